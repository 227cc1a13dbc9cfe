#include "skewbs/regression.hpp"

#include <cmath>

#include "skewbs/errors.hpp"
#include "skewbs/kernels.hpp"
#include "skewbs/ssn_dist.hpp"

namespace skewbs {

namespace {

void check_weights(const Dataset& data, const LikelihoodOptions& opts) {
  if (opts.weights.size() != 0 && opts.weights.size() != data.n())
    throw DomainError("case weights must have one entry per observation");
}

}  // namespace

Dataset::Dataset(Eigen::VectorXd y, Eigen::MatrixXd X) : y_(std::move(y)), X_(std::move(X)) {
  if (X_.rows() != y_.size()) throw DomainError("design rows must match the response length");
  if (X_.cols() < 1) throw DomainError("design needs at least one column");
  if (y_.size() <= X_.cols()) throw DomainError("need more observations than regression coefficients");
  if (!y_.allFinite() || !X_.allFinite()) throw DomainError("dataset contains non-finite entries");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X_);
  const double tol = 1e-10 * X_.norm();
  const auto& r = qr.matrixR();
  for (Eigen::Index k = 0; k < X_.cols(); ++k) {
    if (!(std::abs(r(k, k)) > tol)) throw RankError("design matrix is not of full column rank");
  }
}

Dataset Dataset::without(Eigen::Index i) const {
  if (i < 0 || i >= n()) throw DomainError("observation index out of range");
  const Eigen::Index m = n() - 1;
  Eigen::VectorXd y(m);
  Eigen::MatrixXd X(m, p());
  y << y_.head(i), y_.tail(m - i);
  X << X_.topRows(i), X_.bottomRows(m - i);
  return Dataset(std::move(y), std::move(X));
}

Eigen::VectorXd ModelParams::to_vector() const {
  Eigen::VectorXd theta(size());
  theta << beta, alpha, lambda;
  return theta;
}

ModelParams ModelParams::from_vector(const Eigen::VectorXd& theta) {
  if (theta.size() < 3) throw DomainError("parameter vector needs at least beta_1, alpha and lambda");
  const Eigen::Index p = theta.size() - 2;
  return ModelParams{theta.head(p), theta(p), theta(p + 1)};
}

void ModelParams::validate(Eigen::Index p) const {
  if (beta.size() != p) throw DomainError("beta has the wrong length for this design");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive and finite");
  if (!beta.allFinite() || !std::isfinite(lambda)) throw DomainError("parameters must be finite");
}

XiPair xi(const Dataset& data, const ModelParams& theta, const LikelihoodOptions& opts) {
  theta.validate(data.p());
  const double c = c_shift(theta.alpha, theta.lambda, opts.quadrature());
  return kernels::xi(data, theta, c, kernels::run_parallel(opts.policy, data.n()));
}

double loglik(const Dataset& data, const ModelParams& theta, const LikelihoodOptions& opts) {
  theta.validate(data.p());
  check_weights(data, opts);
  const double c = c_shift(theta.alpha, theta.lambda, opts.quadrature());
  return kernels::loglik(data, theta, c, opts.weights, kernels::run_parallel(opts.policy, data.n()));
}

ScoreTerms score_terms(const Dataset& data, const ModelParams& theta, const LikelihoodOptions& opts) {
  theta.validate(data.p());
  const CCoefficients cc = c_coefficients(theta.alpha, theta.lambda, opts.quadrature());
  return kernels::score_terms(data, theta, cc, kernels::run_parallel(opts.policy, data.n()));
}

Eigen::VectorXd score(const Dataset& data, const ModelParams& theta, const LikelihoodOptions& opts) {
  check_weights(data, opts);
  ScoreTerms t = score_terms(data, theta, opts);
  if (opts.weights.size() != 0) {
    t.s.array() *= opts.weights.array();
    t.a.array() *= opts.weights.array();
    t.c.array() *= opts.weights.array();
  }
  const Eigen::Index p = data.p();
  Eigen::VectorXd u(p + 2);
  u.head(p) = data.X().transpose() * t.s;
  u(p) = t.a.sum();
  u(p + 1) = t.c.sum();
  return u;
}

InfoBlocks info_blocks(const Dataset& data, const ModelParams& theta, const LikelihoodOptions& opts) {
  theta.validate(data.p());
  const CCoefficients cc = c_coefficients(theta.alpha, theta.lambda, opts.quadrature());
  return kernels::info_blocks(data, theta, cc, kernels::run_parallel(opts.policy, data.n()));
}

Eigen::MatrixXd assemble_information(const Eigen::MatrixXd& X, const InfoBlocks& blk, const Eigen::VectorXd& weights) {
  const Eigen::Index p = X.cols();
  const bool weighted = weights.size() != 0;
  const Eigen::VectorXd v = weighted ? Eigen::VectorXd(blk.v.cwiseProduct(weights)) : blk.v;
  const Eigen::VectorXd h = weighted ? Eigen::VectorXd(blk.h.cwiseProduct(weights)) : blk.h;
  const Eigen::VectorXd b = weighted ? Eigen::VectorXd(blk.b.cwiseProduct(weights)) : blk.b;
  const double k1 = weighted ? blk.k1.dot(weights) : blk.k1.sum();
  const double k2 = weighted ? blk.k2.dot(weights) : blk.k2.sum();
  const double k3 = weighted ? blk.k3.dot(weights) : blk.k3.sum();

  // Negated Hessian: X^T V X, borders X^T h and X^T b, corner -sum(k).
  Eigen::MatrixXd info(p + 2, p + 2);
  info.topLeftCorner(p, p) = X.transpose() * v.asDiagonal() * X;
  const Eigen::VectorXd xh = X.transpose() * h;
  const Eigen::VectorXd xb = X.transpose() * b;
  info.block(0, p, p, 1) = xh;
  info.block(p, 0, 1, p) = xh.transpose();
  info.block(0, p + 1, p, 1) = xb;
  info.block(p + 1, 0, 1, p) = xb.transpose();
  info(p, p) = -k1;
  info(p, p + 1) = info(p + 1, p) = -k2;
  info(p + 1, p + 1) = -k3;
  // X^T diag(v) X is not bitwise symmetric out of the product.
  info.topLeftCorner(p, p) = 0.5 * (info.topLeftCorner(p, p) + info.topLeftCorner(p, p).transpose()).eval();
  return info;
}

Eigen::MatrixXd observed_information(const Dataset& data, const ModelParams& theta, const LikelihoodOptions& opts) {
  check_weights(data, opts);
  return assemble_information(data.X(), info_blocks(data, theta, opts), opts.weights);
}

Dataset simulate(const Eigen::MatrixXd& X, const ModelParams& theta, std::uint64_t seed, const QuadratureRule& rule) {
  theta.validate(X.cols());
  const double c = c_shift(theta.alpha, theta.lambda, rule);
  const auto errors = ssn_sample(SsnParams{theta.alpha, -c, theta.lambda}, static_cast<std::size_t>(X.rows()), seed);
  Eigen::VectorXd y = X * theta.beta;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += errors[static_cast<std::size_t>(i)];
  return Dataset(std::move(y), X);
}

}  // namespace skewbs
