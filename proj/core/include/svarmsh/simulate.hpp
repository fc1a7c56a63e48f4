#pragma once

#include <utility>

#include <Eigen/Dense>

#include "svarmsh/data.hpp"
#include "svarmsh/parameters.hpp"
#include "svarmsh/rng.hpp"

namespace svarmsh {

// Largest eigenvalue modulus of the companion matrix of the reduced form;
// < 1 means the autoregression is stable.
double companion_spectral_radius(const ModelParameters& params);

// Draws a sample of length T (plus p presample columns) from the model.
// The regime path starts from the ergodic distribution; `burn` initial
// observations are generated and discarded so the series forgets the zero
// starting values.  Throws ModelError when the reduced form is unstable.
std::pair<TimeSeriesData, StateSequence>
simulate_data(const ModelParameters& params, int T, RngStream& rng,
              int burn = 100);

} // namespace svarmsh
