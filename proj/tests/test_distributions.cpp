#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "support/oracles.hpp"
#include "svarmsh/distributions.hpp"
#include "svarmsh/errors.hpp"
#include "svarmsh/rng.hpp"

using namespace svarmsh;
namespace d = svarmsh::dist;

namespace {
constexpr double kPi = 3.14159265358979323846;
// frozen reference values (30-digit arithmetic)
constexpr double kLogIg2_1_1_3 = -1.86963238887061789608270711794;
constexpr double kLogIg1_1_1_1 = -0.725791352644727432363097614947;
} // namespace

TEST_CASE("scaled inverse gamma: density values and normalization") {
  CHECK(d::ig2_log_pdf(1.0, 1.0, 3.0) == doctest::Approx(kLogIg2_1_1_3).epsilon(1e-13));
  // normalization for a=3, b=2 by adaptive quadrature
  auto pdf = [](double x) {
    return x > 0.0 ? std::exp(d::ig2_log_pdf(x, 3.0, 2.0)) : 0.0;
  };
  CHECK(oracle::integrate_positive(pdf) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("scaled inverse gamma: mode formula vs grid search") {
  const double a = 4.0, b = 6.0;
  CHECK(d::ig2_mode(a, b) == doctest::Approx(1.0));
  double best_x = 0.0, best = -1e300;
  for (double x = 0.02; x < 8.0; x += 0.0005) {
    const double v = d::ig2_log_pdf(x, a, b);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  CHECK(best_x == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("scaled inverse gamma: sampler moments and distribution") {
  RngStream rng(1234);
  const int n = 1000000;
  std::vector<double> draws(n);
  for (int i = 0; i < n; ++i) draws[i] = d::ig2_sample(6.0, 4.0, rng);
  const double se = oracle::standard_error(draws);
  CHECK(std::abs(oracle::mean(draws) - d::ig2_mean(6.0, 4.0)) < 3.0 * se);
  CHECK(d::ig2_mean(6.0, 4.0) == doctest::Approx(1.0));

  // distributional agreement with the density for the heavy-tailed a=1 case
  RngStream rng2(77);
  std::vector<double> heavy(100000);
  for (auto& x : heavy) x = d::ig2_sample(1.0, 3.0, rng2);
  auto pdf = [](double x) {
    return x > 0.0 ? std::exp(d::ig2_log_pdf(x, 1.0, 3.0)) : 0.0;
  };
  CHECK(oracle::ks_distance_density(heavy, pdf) < 0.005);
}

TEST_CASE("scaled inverse gamma: seeded determinism") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i)
    CHECK(d::ig2_sample(3.0, 2.0, a) == d::ig2_sample(3.0, 2.0, b));
}

TEST_CASE("scaled inverse gamma: parameter validation") {
  CHECK_THROWS_AS((void)d::ig2_log_pdf(1.0, -1.0, 3.0), std::domain_error);
  CHECK_THROWS_AS((void)d::ig2_log_pdf(0.0, 1.0, 3.0), std::domain_error);
  CHECK_THROWS_AS((void)d::ig2_mean(2.0, 1.0), MomentExistenceError);
  try {
    (void)d::ig2_mean(1.5, 1.0);
    CHECK(false);
  } catch (const MomentExistenceError& e) {
    CHECK(e.value() == doctest::Approx(1.5));
    CHECK(e.bound() == doctest::Approx(2.0));
    CHECK(e.moment_order() == 1);
  }
}

TEST_CASE("variance-ratio density: closed-form values") {
  CHECK(d::ig2r_pdf(1.0, 1.0, 1.0, 3.0, 3.0) ==
        doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-12));
  // nests the F distribution when b1=a1, b2=a2
  CHECK(d::ig2r_pdf(1.0, 2.0, 2.0, 2.0, 2.0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("variance-ratio density: F nesting across a grid") {
  // z = x1/x2 with b_i = a_i is distributed F(a2, a1)
  const double a1 = 3.0, a2 = 5.0;
  for (double z : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const double lhs = d::ig2r_log_pdf(z, a1, a2, a1, a2);
    const double rhs = oracle::f_log_pdf(z, a2, a1);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("variance-ratio density: normalization") {
  auto pdf = [](double z) {
    return z > 0.0 ? d::ig2r_pdf(z, 3.0, 5.0, 2.0, 7.0) : 0.0;
  };
  CHECK(oracle::integrate_positive(pdf) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("variance-ratio moments: formulas, Monte Carlo, existence") {
  CHECK(d::ig2r_moment(1, 4.0, 2.0, 3.0, 3.0) == doctest::Approx(1.0).epsilon(1e-12));
  // second-central-moment identity: Var = m2 - m1^2 = 0.75 at (6,2,1,1)
  const double m1 = d::ig2r_moment(1, 6.0, 2.0, 1.0, 1.0);
  const double m2 = d::ig2r_moment(2, 6.0, 2.0, 1.0, 1.0);
  CHECK(m2 - m1 * m1 == doctest::Approx(0.75).epsilon(1e-12));

  RngStream rng(99);
  const int n = 1000000;
  std::vector<double> draws(n);
  for (auto& z : draws) z = d::ig2r_sample(4.0, 2.0, 3.0, 3.0, rng);
  CHECK(std::abs(oracle::mean(draws) - 1.0) < 3.0 * oracle::standard_error(draws));

  CHECK_THROWS_AS((void)d::ig2r_moment(3, 6.0, 2.0, 1.0, 1.0), MomentExistenceError);
}

TEST_CASE("root inverse gamma: normalization and change of variables") {
  auto pdf = [](double x) {
    return x > 0.0 ? std::exp(d::ig1_log_pdf(x, 2.0, 1.0)) : 0.0;
  };
  CHECK(oracle::integrate_positive(pdf) == doctest::Approx(1.0).epsilon(1e-8));

  CHECK(d::ig1_log_pdf(1.0, 1.0, 1.0) == doctest::Approx(kLogIg1_1_1_1).epsilon(1e-13));

  // sqrt of a squared-scale draw follows the root-scale law
  RngStream rng(2024);
  std::vector<double> roots(100000);
  for (auto& x : roots) x = std::sqrt(d::ig2_sample(3.0, 2.0, rng));
  auto root_pdf = [](double x) {
    return x > 0.0 ? std::exp(d::ig1_log_pdf(x, 3.0, 2.0)) : 0.0;
  };
  CHECK(oracle::ks_distance_density(roots, root_pdf) < 0.005);
}

TEST_CASE("root variance-ratio: density identity, normalization, moments") {
  // pdf relation against the squared-ratio law on a grid
  for (double z = 0.1; z < 5.0; z += 0.07) {
    const double lhs = d::ig1r_pdf(z, 3.0, 5.0, 2.0, 7.0);
    const double rhs = 2.0 * z * d::ig2r_pdf(z * z, 3.0, 5.0, 2.0, 7.0);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }

  auto pdf = [](double z) {
    return z > 0.0 ? d::ig1r_pdf(z, 3.0, 5.0, 2.0, 7.0) : 0.0;
  };
  CHECK(oracle::integrate_positive(pdf) == doctest::Approx(1.0).epsilon(1e-8));

  CHECK(d::ig1r_moment(1, 4.0, 2.0, 1.0, 1.0) == doctest::Approx(kPi / 4.0).epsilon(1e-12));
  CHECK(d::ig1r_moment(2, 6.0, 2.0, 1.0, 1.0) ==
        doctest::Approx(d::ig2r_moment(1, 6.0, 2.0, 1.0, 1.0)).epsilon(1e-12));
  CHECK(d::ig2r_moment(1, 6.0, 2.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));

  RngStream rng(5150);
  const int n = 1000000;
  std::vector<double> draws(n);
  for (auto& z : draws) z = d::ig1r_sample(4.0, 2.0, 1.0, 1.0, rng);
  CHECK(std::abs(oracle::mean(draws) - kPi / 4.0) < 3.0 * oracle::standard_error(draws));

  CHECK_THROWS_AS((void)d::ig1r_moment(4, 6.0, 2.0, 1.0, 1.0), MomentExistenceError);
}

TEST_CASE("dirichlet: moments, simplex constraint, density") {
  RngStream rng(31337);
  Eigen::VectorXd e1(2), e2(2);
  e1 << 1.0, 1.0;
  e2 << 10.0, 1.0;

  const int n = 1000000;
  std::vector<double> first(n);
  for (auto& x : first) {
    const Eigen::VectorXd v = d::dirichlet_sample(e1, rng);
    CHECK(std::abs(v.sum() - 1.0) < 1e-12);
    x = v(0);
  }
  CHECK(std::abs(oracle::mean(first) - 0.5) < 3.0 * oracle::standard_error(first));

  std::vector<double> skewed(n);
  for (auto& x : skewed) x = d::dirichlet_sample(e2, rng)(0);
  CHECK(std::abs(oracle::mean(skewed) - 10.0 / 11.0) <
        3.0 * oracle::standard_error(skewed));

  // flat density on the simplex has log density log Gamma(2) = 0
  Eigen::VectorXd x(2);
  x << 0.3, 0.7;
  CHECK(d::dirichlet_log_pdf(x, e1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("multivariate student t: covariance limits") {
  const int dim = 3;
  const Eigen::VectorXd center = Eigen::VectorXd::Zero(dim);
  const Eigen::MatrixXd chol = Eigen::MatrixXd::Identity(dim, dim);

  RngStream rng(8);
  const int n = 200000;
  Eigen::MatrixXd sum2 = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd v = d::mvt_sample(center, chol, 1e6, rng);
    sum2 += v * v.transpose();
  }
  const Eigen::MatrixXd cov = sum2 / n;
  CHECK((cov - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() < 0.03);

  // dof = 5: covariance inflates to dof/(dof-2); per-entry 3-SE band
  RngStream rng5(9);
  const int n5 = 1000000;
  std::vector<double> sq(n5);
  Eigen::MatrixXd sum5 = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < n5; ++i) {
    const Eigen::VectorXd v = d::mvt_sample(center, chol, 5.0, rng5);
    sum5 += v * v.transpose();
    sq[static_cast<std::size_t>(i)] = v(0) * v(0);
  }
  const double target = 5.0 / 3.0;
  const double se = oracle::standard_error(sq);
  for (int k = 0; k < dim; ++k)
    CHECK(std::abs(sum5(k, k) / n5 - target) < 3.0 * se);

  RngStream s1(123), s2(123);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd v1 = d::mvt_sample(center, chol, 5.0, s1);
    const Eigen::VectorXd v2 = d::mvt_sample(center, chol, 5.0, s2);
    CHECK((v1 - v2).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("multivariate normal: density against direct formula") {
  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 0.6, 0.6, 1.0;
  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
  Eigen::VectorXd mu(2), x(2);
  mu << 0.5, -1.0;
  x << 1.0, 0.25;
  const Eigen::VectorXd diff = x - mu;
  const double quad = diff.dot(cov.inverse() * diff);
  const double ref = -std::log(2.0 * kPi) - 0.5 * std::log(cov.determinant()) -
                     0.5 * quad;
  CHECK(d::mvn_log_pdf(x, mu, chol) == doctest::Approx(ref).epsilon(1e-12));
}
