#pragma once

#include <string>
#include <vector>

#include "svarmsh/data.hpp"
#include "svarmsh/gibbs.hpp"

namespace svarmsh {

// Savage-Dickey density ratio: log Bayes factor of the sharp hypothesis
// against the unrestricted model, with numerical standard error of the
// log numerator from batch means.
struct SddrResult {
  std::string hypothesis;
  double log_numerator = 0.0;
  double log_denominator = 0.0;
  double log_sddr = 0.0;
  double nse = 0.0;
  int draws_used = 0;
};

// Hypothesis: equations i and j share the regime-`state` relative variance
// (a single non-identification direction).  `state` is the 1-based regime
// label (>= 2); i, j are 1-based equation labels.
SddrResult sddr_pair_identification(const DrawStore& store, int state, int i,
                                    int j, int n_batches = 2000);

// Hypothesis: equations i and j share relative variances in every regime
// (rows i and j not separately identified).
SddrResult sddr_joint_identification(const DrawStore& store, int i, int j,
                                     int n_batches = 2000);

// Hypothesis: equation i's shock has equal variance in all regimes.
SddrResult sddr_homoskedasticity(const DrawStore& store, int i,
                                 int n_batches = 2000);

// Hypothesis: every listed equation's shock is homoskedastic (1-based
// labels; empty list means all equations).
SddrResult sddr_joint_homoskedasticity(const DrawStore& store,
                                       std::vector<int> equations,
                                       int n_batches = 1000);

struct MddOptions {
  int draws = 20000;
  int batches = 1000;
  std::uint64_t seed = 1;
  // Testing affordances: treat a block as known constants (values from the
  // first stored draw), excluding it from the importance space and from the
  // prior.  Hierarchical terms are kept when their child block is free.
  bool fix_coefficients = false; // alpha and A
  bool fix_variances = false;    // lambda1 and omega
  bool fix_transition = false;   // P
  bool fix_shrinkage = false;    // gamma_*
};

struct MddResult {
  double log_mdd = 0.0;
  double nse = 0.0;
  double threshold_log_lik = 0.0; // lowest posterior-draw data density
  double inside_fraction = 0.0;   // importance draws inside the cut region
  int draws = 0;
};

// Marginal data density by arithmetic-mean importance sampling restricted
// to the region where the data density exceeds its lowest value across the
// posterior draws.  The importance density is a Gaussian fitted to the
// posterior sample in a transformed space (logs of variances and shrinkage,
// additive log-ratios of transition rows).
MddResult estimate_mdd(const DrawStore& store, const TimeSeriesData& data,
                       const DesignMatrices& design, const MddOptions& options);

// Numerical standard error of a sample mean by batch means.
double nse_batch_means(const std::vector<double>& series, int n_batches);

// Numerical standard error of log(mean(exp(series))) by batch means on the
// log scale (batch statistics are logs of batch averages).
double nse_batch_means_log(const std::vector<double>& log_series,
                           int n_batches);

// Linear-interpolation sample quantile, q in [0, 1].
double quantile(std::vector<double> values, double q);

struct ParameterSummary {
  std::string name;
  double mean = 0.0, sd = 0.0, q05 = 0.0, median = 0.0, q95 = 0.0;
};

// Per-coefficient posterior summary over all chains, in a fixed order
// (contemporaneous coefficients, intercepts and lag coefficients, variance
// levels, relative variances, transition probabilities, shrinkage).
std::vector<ParameterSummary> summarize_posterior(const DrawStore& store);

} // namespace svarmsh
