#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "svarmsh/data.hpp"
#include "svarmsh/parameters.hpp"
#include "svarmsh/restrictions.hpp"
#include "svarmsh/rng.hpp"

namespace svarmsh {

struct SamplerConfig {
  int burn = 5000;
  int draws = 20000; // retained per chain
  int thin = 1;
  int chains = 2;
  double mh_dof = 5.0;   // Student-t proposal degrees of freedom
  double mh_scale = 1.0; // proposal scale multiplier
  bool relabel = true;   // order regimes by average variance level
  std::uint64_t seed = 0;
};

// One retained sweep: the parameter point, regime occupation counts, the
// conditional-posterior coefficients of each relative variance (used by the
// density-ratio tests), the marginal data density at the point, and whether
// the coefficient proposal was accepted this sweep.
struct PosteriorDraw {
  Eigen::VectorXd alpha;
  Eigen::MatrixXd A;
  Eigen::VectorXd lambda1;
  Eigen::MatrixXd omega; // (M-1) x N
  Eigen::MatrixXd P;     // M x M
  double gamma_alpha = 1.0, gamma_mu = 1.0, gamma_beta = 1.0;
  Eigen::VectorXi state_counts;  // M
  Eigen::MatrixXd rb_shape;      // (M-1) x N
  Eigen::MatrixXd rb_scale;      // (M-1) x N
  double log_likelihood = 0.0;   // states integrated out
  bool mh_accepted = false;
};

struct ChainResult {
  int chain_id = 0;
  std::vector<PosteriorDraw> draws;
  Eigen::MatrixXd state_probability; // M x T, mean regime indicator
  double mh_acceptance_rate = 0.0;
};

// Posterior sample with everything needed to reproduce and post-process it.
struct DrawStore {
  int N = 0, M = 0, p = 0, K = 0, r = 0;
  SamplerConfig config;
  RestrictionScheme scheme;
  PriorHyperparameters prior;
  std::vector<std::string> variable_names;
  std::uint64_t data_digest = 0;
  std::vector<ChainResult> chains;

  int total_draws() const;
  const PosteriorDraw& draw(int i) const; // pooled across chains, in order
  Eigen::MatrixXd state_probability_mean() const;
};

// Markov chain Monte Carlo sampler for the switching structural model.
// Block updates are public so their conditional laws can be verified in
// isolation; sweep() applies them in the standard order
//   states, transition matrix, variance levels, relative variances,
//   autoregressive rows, contemporaneous coefficients, shrinkage.
class GibbsSampler {
public:
  GibbsSampler(TimeSeriesData data, DesignMatrices design,
               RestrictionScheme scheme, PriorHyperparameters prior, int M,
               SamplerConfig config);

  void initialize(RngStream& rng);
  void sweep(RngStream& rng);

  void sample_states(RngStream& rng);
  void sample_transition(RngStream& rng);
  void sample_lambda1(RngStream& rng);
  void sample_omega(RngStream& rng);
  void sample_A_rows(RngStream& rng);
  bool sample_alpha(RngStream& rng); // returns acceptance
  void sample_shrinkage(RngStream& rng);
  void relabel();
  void relabel_states();
  void relabel_equations();

  PosteriorDraw snapshot() const;
  ChainResult run_chain(int chain_id, RngStream& rng);

  // Conditional-posterior coefficients of the relative variances at the
  // current parameter point (shape, scale) per regime >= 2 and equation.
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> omega_conditional() const;

  ModelParameters params;
  StateSequence states;
  bool last_mh_accepted = false;

  const TimeSeriesData& data() const { return data_; }
  const DesignMatrices& design() const { return design_; }
  const RestrictionScheme& scheme() const { return scheme_; }
  const PriorHyperparameters& prior() const { return prior_; }

private:
  TimeSeriesData data_;
  DesignMatrices design_;
  RestrictionScheme scheme_;
  PriorHyperparameters prior_;
  int M_;
  SamplerConfig config_;
  std::vector<Eigen::MatrixXd> Qcol_Y_; // unvec(Q col k) * Y, fixed
};

// Runs `config.chains` chains from independent substreams of `config.seed`.
DrawStore run_sampler(const TimeSeriesData& data, const DesignMatrices& design,
                      const RestrictionScheme& scheme,
                      const PriorHyperparameters& prior, int M,
                      const SamplerConfig& config);

// Split-chain potential scale reduction factor of a scalar series.
double potential_scale_reduction(const std::vector<std::vector<double>>& chains);

// Worker thread cap: SVARMSH_THREADS when set, hardware concurrency
// otherwise, never more than `units`.
int thread_budget(int units);

} // namespace svarmsh
