#include "svarmsh/distributions.hpp"

#include <cmath>
#include <stdexcept>

#include "svarmsh/errors.hpp"
#include "svarmsh/util.hpp"

namespace svarmsh::dist {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::domain_error(std::string(name) + " must be positive and finite");
}

void require_ratio_params(double a1, double a2, double b1, double b2) {
  require_positive(a1, "a1");
  require_positive(a2, "a2");
  require_positive(b1, "b1");
  require_positive(b2, "b2");
}

} // namespace

double ig2_log_pdf(double x, double a, double b) {
  require_positive(a, "a");
  require_positive(b, "b");
  if (!(x > 0.0)) throw std::domain_error("ig2_log_pdf: x must be positive");
  return -log_gamma(0.5 * a) + 0.5 * a * std::log(0.5 * b) -
         0.5 * (a + 2.0) * std::log(x) - 0.5 * b / x;
}

double ig2_mode(double a, double b) {
  require_positive(a, "a");
  require_positive(b, "b");
  return b / (a + 2.0);
}

double ig2_mean(double a, double b) {
  require_positive(a, "a");
  require_positive(b, "b");
  if (!(a > 2.0)) throw MomentExistenceError("a", a, 2.0, 1);
  return b / (a - 2.0);
}

double ig2_sample(double a, double b, RngStream& rng) {
  require_positive(a, "a");
  require_positive(b, "b");
  double c = rng.chi_squared(a);
  return b / c;
}

double ig2r_log_pdf(double z, double a1, double a2, double b1, double b2) {
  require_ratio_params(a1, a2, b1, b2);
  if (!(z > 0.0)) throw std::domain_error("ig2r_log_pdf: z must be positive");
  return -log_beta(0.5 * a1, 0.5 * a2) + 0.5 * a1 * std::log(b1) +
         0.5 * a2 * std::log(b2) + 0.5 * (a2 - 2.0) * std::log(z) -
         0.5 * (a1 + a2) * std::log(b1 + b2 * z);
}

double ig2r_pdf(double z, double a1, double a2, double b1, double b2) {
  return std::exp(ig2r_log_pdf(z, a1, a2, b1, b2));
}

double ig2r_moment(int k, double a1, double a2, double b1, double b2) {
  require_ratio_params(a1, a2, b1, b2);
  if (k < 1) throw std::domain_error("ig2r_moment: k must be >= 1");
  if (!(a1 > 2.0 * k)) throw MomentExistenceError("a1", a1, 2.0 * k, k);
  double log_m = k * (std::log(b1) - std::log(b2)) +
                 log_beta(0.5 * (a1 - 2.0 * k), 0.5 * (a2 + 2.0 * k)) -
                 log_beta(0.5 * a1, 0.5 * a2);
  return std::exp(log_m);
}

double ig2r_sample(double a1, double a2, double b1, double b2,
                   RngStream& rng) {
  require_ratio_params(a1, a2, b1, b2);
  double x1 = ig2_sample(a1, b1, rng);
  double x2 = ig2_sample(a2, b2, rng);
  return x1 / x2;
}

double ig1_log_pdf(double x, double a, double b) {
  require_positive(a, "a");
  require_positive(b, "b");
  if (!(x > 0.0)) throw std::domain_error("ig1_log_pdf: x must be positive");
  return std::log(2.0) - log_gamma(0.5 * a) + 0.5 * a * std::log(0.5 * b) -
         (a + 1.0) * std::log(x) - 0.5 * b / (x * x);
}

double ig1_sample(double a, double b, RngStream& rng) {
  return std::sqrt(ig2_sample(a, b, rng));
}

double ig1r_log_pdf(double z, double a1, double a2, double b1, double b2) {
  require_ratio_params(a1, a2, b1, b2);
  if (!(z > 0.0)) throw std::domain_error("ig1r_log_pdf: z must be positive");
  return std::log(2.0) - log_beta(0.5 * a1, 0.5 * a2) +
         0.5 * a1 * std::log(b1) + 0.5 * a2 * std::log(b2) +
         (a2 - 1.0) * std::log(z) -
         0.5 * (a1 + a2) * std::log(b1 + b2 * z * z);
}

double ig1r_pdf(double z, double a1, double a2, double b1, double b2) {
  return std::exp(ig1r_log_pdf(z, a1, a2, b1, b2));
}

double ig1r_moment(int k, double a1, double a2, double b1, double b2) {
  require_ratio_params(a1, a2, b1, b2);
  if (k < 1) throw std::domain_error("ig1r_moment: k must be >= 1");
  if (!(a1 > 2.0 * k)) throw MomentExistenceError("a1", a1, 2.0 * k, k);
  double log_m = 0.5 * k * (std::log(b1) - std::log(b2)) +
                 log_beta(0.5 * (a1 - k), 0.5 * (a2 + k)) -
                 log_beta(0.5 * a1, 0.5 * a2);
  return std::exp(log_m);
}

double ig1r_sample(double a1, double a2, double b1, double b2,
                   RngStream& rng) {
  return std::sqrt(ig2r_sample(a1, a2, b1, b2, rng));
}

double dirichlet_log_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& e) {
  if (x.size() != e.size() || x.size() == 0)
    throw std::domain_error("dirichlet_log_pdf: size mismatch");
  double sum = 0.0;
  for (int i = 0; i < e.size(); ++i) {
    require_positive(e[i], "e");
    sum += x[i];
  }
  if (std::abs(sum - 1.0) > 1e-8)
    throw std::domain_error("dirichlet_log_pdf: x must lie on the simplex");
  double lp = log_gamma(e.sum());
  for (int i = 0; i < e.size(); ++i) {
    lp -= log_gamma(e[i]);
    if (x[i] <= 0.0) {
      if (e[i] > 1.0) return neg_inf();
      if (e[i] == 1.0) continue; // (e-1) log x = 0
      throw std::domain_error("dirichlet_log_pdf: boundary with e < 1");
    }
    lp += (e[i] - 1.0) * std::log(x[i]);
  }
  return lp;
}

Eigen::VectorXd dirichlet_sample(const Eigen::VectorXd& e, RngStream& rng) {
  Eigen::VectorXd g(e.size());
  for (int i = 0; i < e.size(); ++i) {
    require_positive(e[i], "e");
    g[i] = rng.gamma(e[i], 1.0);
  }
  double s = g.sum();
  if (s <= 0.0) { // all gammas underflow to 0; fall back to the mean
    return e / e.sum();
  }
  return g / s;
}

double normal_log_pdf(double x, double mean, double variance) {
  require_positive(variance, "variance");
  double d = x - mean;
  return -0.5 * std::log(2.0 * M_PI * variance) - 0.5 * d * d / variance;
}

Eigen::VectorXd mvn_sample(const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& chol_lower, RngStream& rng) {
  Eigen::VectorXd z(mean.size());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean + chol_lower * z;
}

double mvn_log_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                   const Eigen::MatrixXd& chol_lower) {
  const int d = static_cast<int>(x.size());
  Eigen::VectorXd w = chol_lower.triangularView<Eigen::Lower>().solve(x - mean);
  double log_det_half = chol_lower.diagonal().array().log().sum();
  return -0.5 * d * std::log(2.0 * M_PI) - log_det_half -
         0.5 * w.squaredNorm();
}

Eigen::VectorXd mvt_sample(const Eigen::VectorXd& center,
                           const Eigen::MatrixXd& chol_lower, double dof,
                           RngStream& rng) {
  require_positive(dof, "dof");
  Eigen::VectorXd z(center.size());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  double w = rng.chi_squared(dof) / dof;
  return center + (chol_lower * z) / std::sqrt(w);
}

} // namespace svarmsh::dist
