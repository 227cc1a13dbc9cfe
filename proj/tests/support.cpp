#include "support.hpp"

#include <cmath>

#include "skewbs/io.hpp"

namespace skewbs::testing {

Instance random_instance(std::mt19937_64& rng, const InstanceRanges& r) {
  std::uniform_int_distribution<int> n_dist(r.n_min, r.n_max);
  std::uniform_int_distribution<int> p_dist(r.p_min, r.p_max);
  std::uniform_real_distribution<double> alpha_dist(r.alpha_min, r.alpha_max);
  std::uniform_real_distribution<double> lambda_dist(-r.lambda_abs_max, r.lambda_abs_max);
  std::normal_distribution<double> normal(0.0, 1.0);

  const int n = n_dist(rng);
  const int p = p_dist(rng);
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = p == 1 ? normal(rng) : 1.0;
    for (int j = 1; j < p; ++j) X(i, j) = normal(rng);
  }
  ModelParams truth;
  truth.beta.resize(p);
  for (int j = 0; j < p; ++j) truth.beta(j) = normal(rng);
  truth.alpha = alpha_dist(rng);
  truth.lambda = lambda_dist(rng);
  Dataset data = simulate(X, truth, rng());

  ModelParams theta = truth;
  for (int j = 0; j < p; ++j) theta.beta(j) += 0.1 * normal(rng);
  theta.alpha *= std::exp(0.1 * normal(rng));
  theta.lambda += 0.2 * normal(rng);
  if (std::abs(theta.lambda) > r.lambda_abs_max) theta.lambda = std::copysign(r.lambda_abs_max, theta.lambda);
  theta.alpha = std::clamp(theta.alpha, r.alpha_min, r.alpha_max);
  return Instance{std::move(data), std::move(theta)};
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                            double rel_step) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = rel_step * std::max(1.0, std::abs(x(j)));
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    g(j) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g, const Eigen::VectorXd& x,
                            double rel_step) {
  const Eigen::VectorXd g0 = g(x);
  Eigen::MatrixXd J(g0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = rel_step * std::max(1.0, std::abs(x(j)));
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    J.col(j) = (g(xp) - g(xm)) / (2.0 * h);
  }
  return J;
}

double max_rel_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& reference) {
  const Eigen::ArrayXXd denom = reference.array().abs().max(1.0);
  return ((analytic - reference).array().abs() / denom).maxCoeff();
}

Dataset mccool() {
  RunConfig cfg;
  cfg.input_path = std::string(SKEWBS_DATA_DIR) + "/mccool.csv";
  cfg.response_column = "time";
  cfg.covariate_columns = {"stress"};
  cfg.log_response = true;
  cfg.log_covariates = {"stress"};
  cfg.intercept = true;
  return ingest(cfg);
}

}  // namespace skewbs::testing
