#include <cmath>
#include <random>

#include "doctest.h"
#include "skewbs/errors.hpp"
#include "skewbs/fitting.hpp"
#include "support.hpp"

using namespace skewbs;

namespace {

Eigen::MatrixXd design(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd X(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) X.row(i) << 1.0, z(rng);
  return X;
}

// Inverse of the negative second-difference Hessian of the log-likelihood.
Eigen::VectorXd fd_standard_errors(const Dataset& d, const ModelParams& theta) {
  const Eigen::VectorXd t = theta.to_vector();
  const auto L = [&](const Eigen::VectorXd& v) { return loglik(d, ModelParams::from_vector(v)); };
  const Eigen::Index k = t.size();
  Eigen::MatrixXd H(k, k);
  const double h = 1e-4;
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      Eigen::VectorXd pp = t, pm = t, mp = t, mm = t;
      pp(a) += h, pp(b) += h;
      pm(a) += h, pm(b) -= h;
      mp(a) -= h, mp(b) += h;
      mm(a) -= h, mm(b) -= h;
      H(a, b) = (L(pp) - L(pm) - L(mp) + L(mm)) / (4 * h * h);
    }
  }
  return (-H).inverse().diagonal().cwiseSqrt();
}

}  // namespace

TEST_CASE("starting values") {
  const Dataset mc = testing::mccool();
  const ModelParams s = starting_values(mc);
  CHECK(s.beta.allFinite());
  CHECK(s.alpha > 0.0);
  CHECK(s.lambda == 0.0);

  Eigen::MatrixXd X(5, 2);
  X << 1, 0, 1, 1, 1, 2, 1, 3, 1, 4;
  const Dataset exact(X * Eigen::Vector2d(0.5, -2.0), X);
  std::vector<std::string> warnings;
  const ModelParams e = starting_values(exact, &warnings);
  CHECK(e.alpha == 1e-3);
  CHECK(warnings.size() == 1);

  std::mt19937_64 rng(11);
  const Eigen::MatrixXd Xs = design(200, rng);
  const ModelParams truth{Eigen::Vector2d(1.0, 0.5), 1.0, 2.0};
  const Dataset sim = simulate(Xs, truth, 99);
  const ModelParams s0 = starting_values(sim);
  const Eigen::VectorXd r = sim.y() - Xs * s0.beta;
  const double sigma2 = r.squaredNorm() / static_cast<double>(200 - 2);
  const Eigen::VectorXd ols_se = (sigma2 * (Xs.transpose() * Xs).inverse()).diagonal().cwiseSqrt();
  CHECK(std::abs(s0.beta(0) - 1.0) < 4 * ols_se(0));
  CHECK(std::abs(s0.beta(1) - 0.5) < 4 * ols_se(1));
}

TEST_CASE("McCool skewed fit") {
  const Dataset d = testing::mccool();
  const FitResult f = fit(d);
  REQUIRE(f.converged);
  CHECK(f.grad_norm_at_solution < 1e-6);
  CHECK(std::abs(f.theta_hat.beta(0) - 0.1657) < 0.01);
  CHECK(std::abs(f.theta_hat.beta(1) + 13.8710) < 0.05);
  CHECK(std::abs(f.theta_hat.alpha - 2.0119) < 0.01);
  CHECK(std::abs(f.theta_hat.lambda - 1.6423) < 0.01);
  CHECK(std::abs(f.loglik_hat + 58.68) < 0.05);
  CHECK(std::abs(f.aic - 125.36) < 0.1);
  CHECK(std::abs(f.bic - 132.12) < 0.1);
  CHECK(std::abs(f.hqic - 127.80) < 0.1);
  CHECK(std::abs(f.aic - (-2 * f.loglik_hat + 8)) < 1e-12);
  CHECK(std::abs(f.se(0) - 0.1759) < 0.005);
  CHECK(std::abs(f.se(1) - 1.5887) < 0.03);
  // The alpha and lambda standard errors are checked against a derivative-free oracle.
  const Eigen::VectorXd oracle = fd_standard_errors(d, f.theta_hat);
  for (Eigen::Index j = 0; j < 4; ++j) CHECK(std::abs(f.se(j) - oracle(j)) < 1e-4 * oracle(j));
  CHECK(f.loglik_hat >= loglik(d, starting_values(d)));
}

TEST_CASE("McCool log-BS fit") {
  const Dataset d = testing::mccool();
  const FitResult r = fit_restricted(d);
  REQUIRE(r.converged);
  CHECK(r.theta_hat.lambda == 0.0);
  CHECK(r.lambda_fixed);
  CHECK(r.n_params == 3);
  CHECK(std::abs(r.theta_hat.beta(0) - 0.0978) < 0.01);
  CHECK(std::abs(r.theta_hat.beta(1) + 14.1164) < 0.05);
  CHECK(std::abs(r.theta_hat.alpha - 1.2791) < 0.01);
  CHECK(std::abs(r.se(0) - 0.1707) < 0.005);
  CHECK(std::abs(r.se(1) - 1.5714) < 0.02);
  CHECK(std::abs(r.se(2) - 0.1438) < 0.005);
  CHECK(std::isnan(r.se(3)));
  CHECK(std::abs(r.loglik_hat + 61.62) < 0.05);
  CHECK(std::abs(r.aic - 129.24) < 0.1);
  CHECK(r.loglik_hat <= fit(d).loglik_hat + 1e-6);
}

TEST_CASE("likelihood ratio test") {
  const Dataset d = testing::mccool();
  const FitResult full = fit(d);
  const FitResult restricted = fit_restricted(d);
  const LrTestResult lr = lr_test(full, restricted);
  CHECK(std::abs(lr.statistic - 5.88) < 0.05);
  CHECK(lr.reject);
  CHECK(lr.df == 1);

  const LrTestResult same = lr_test(full, full);
  CHECK(same.statistic == 0.0);
  CHECK_FALSE(same.reject);

  FitResult a = full, b = full;
  a.loglik_hat = 0.0;
  b.loglik_hat = -1.92;
  const LrTestResult boundary = lr_test(a, b);
  CHECK(boundary.statistic == 3.84);
  CHECK_FALSE(boundary.reject);

  CHECK_THROWS_AS(lr_test(restricted, full), InvalidPair);
}

TEST_CASE("fit is deterministic and equivariant under column scaling") {
  const Dataset d = testing::mccool();
  const FitResult f1 = fit(d);
  const FitResult f2 = fit(d);
  CHECK(f1.theta_hat.to_vector() == f2.theta_hat.to_vector());
  CHECK(f1.se == f2.se);
  CHECK(f1.loglik_hat == f2.loglik_hat);

  FitOptions unit;
  unit.weights = Eigen::VectorXd::Ones(d.n());
  CHECK(fit(d, unit).theta_hat.to_vector() == f1.theta_hat.to_vector());

  Eigen::MatrixXd X = d.X();
  X.col(1) *= 3.0;
  const FitResult g = fit(Dataset(d.y(), X));
  CHECK(std::abs(g.theta_hat.beta(1) - f1.theta_hat.beta(1) / 3.0) < 1e-5);
  CHECK(std::abs(g.theta_hat.beta(0) - f1.theta_hat.beta(0)) < 1e-5);
  CHECK(std::abs(g.theta_hat.alpha - f1.theta_hat.alpha) < 1e-5);
  CHECK(std::abs(g.theta_hat.lambda - f1.theta_hat.lambda) < 1e-5);
  CHECK(std::abs(g.loglik_hat - f1.loglik_hat) < 1e-5);
  CHECK(std::abs(g.aic - f1.aic) < 1e-5);
  CHECK(std::abs(g.bic - f1.bic) < 1e-5);
  CHECK(std::abs(g.hqic - f1.hqic) < 1e-5);
}

TEST_CASE("fit argument checks") {
  const Dataset d = testing::mccool();
  FitOptions bad;
  bad.weights = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(fit(d, bad), DomainError);
  FitOptions order;
  order.quad_order = 20;
  const FitResult f20 = fit(d, order);
  CHECK(std::abs(f20.loglik_hat - fit(d).loglik_hat) < 1e-9);
}

TEST_CASE("relative changes") {
  const Dataset d = testing::mccool();
  const FitResult base = fit(d);

  CHECK(relative_changes(d, base, {}).empty());
  CHECK_THROWS_AS(relative_changes(d, base, {40}), DomainError);
  CHECK_THROWS_AS(relative_changes(d, base, {-1}), DomainError);
  CHECK_THROWS_AS(relative_changes(d, base, {3, 3}), DomainError);

  const auto rows = relative_changes(d, base, {0, 39});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].dropped_index == 0);
  CHECK(rows[1].dropped_index == 39);
  for (const auto& row : rows) {
    CHECK(row.converged);
    CHECK(row.error.empty());
    CHECK((row.rc.array() >= 0.0).all());
  }
  // Beta_2, alpha and lambda for case #1 sit close to the published deletion row.
  CHECK(std::abs(rows[0].rc(1) - 0.029) < 0.02);
  CHECK(std::abs(rows[0].rc(2) - 0.026) < 0.02);
  CHECK(std::abs(rows[0].rc(3) - 0.035) < 0.02);
  CHECK(std::abs(rows[0].se_after(0) - 0.180) < 0.01);

  // Deleting one copy of a duplicated row returns the original data.
  Eigen::VectorXd y(d.n() + 1);
  Eigen::MatrixXd X(d.n() + 1, d.p());
  y << d.y(), d.y()(5);
  X << d.X(), d.X().row(5);
  const Dataset dup(y, X);
  const auto noop = relative_changes(dup, base, {d.n()});
  REQUIRE(noop.size() == 1);
  CHECK(noop[0].rc.maxCoeff() < 1e-5);

  const FitResult restricted = fit_restricted(d);
  const auto rrows = relative_changes(d, restricted, {0});
  CHECK(rrows[0].rc_undefined[3]);
  CHECK(std::isnan(rrows[0].rc(3)));
  CHECK(rrows[0].theta_after.lambda == 0.0);
}

TEST_CASE("Monte Carlo consistency of the estimator") {
  std::mt19937_64 rng(2024);
  const Eigen::MatrixXd X = design(500, rng);
  const ModelParams truth{Eigen::Vector2d(2.0, -1.0), 1.0, 3.0};
  const Eigen::VectorXd t = truth.to_vector();
  const int reps = 200;
  int covered = 0;
  int converged = 0;
  for (int r = 0; r < reps; ++r) {
    const Dataset sim = simulate(X, truth, static_cast<std::uint64_t>(1000 + r));
    const FitResult f = fit(sim);
    if (!f.converged) continue;
    ++converged;
    const Eigen::VectorXd z = ((f.theta_hat.to_vector() - t).array() / f.se.array()).abs();
    if ((z.array() < 3.0).all()) ++covered;
  }
  MESSAGE("converged " << converged << "/" << reps << ", all components within 3 SE in " << covered);
  CHECK(converged == reps);
  CHECK(covered >= 190);
}
