#pragma once

#include "svarmsh/data.hpp"
#include "svarmsh/distributions.hpp"
#include "svarmsh/errors.hpp"
#include "svarmsh/gibbs.hpp"
#include "svarmsh/hmm.hpp"
#include "svarmsh/identification.hpp"
#include "svarmsh/inference.hpp"
#include "svarmsh/io.hpp"
#include "svarmsh/likelihood.hpp"
#include "svarmsh/parameters.hpp"
#include "svarmsh/restrictions.hpp"
#include "svarmsh/rng.hpp"
#include "svarmsh/simulate.hpp"
#include "svarmsh/util.hpp"
