#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "skewbs/special_fns.hpp"

namespace skewbs {

/// Log-lifetimes y and a full-rank n x p design X (n > p >= 1).
class Dataset {
 public:
  /// Throws DomainError on non-finite entries or a shape mismatch and RankError
  /// when a column-pivoted QR finds a pivot below 1e-10 * ||X||_F.
  Dataset(Eigen::VectorXd y, Eigen::MatrixXd X);

  const Eigen::VectorXd& y() const noexcept { return y_; }
  const Eigen::MatrixXd& X() const noexcept { return X_; }
  Eigen::Index n() const noexcept { return y_.size(); }
  Eigen::Index p() const noexcept { return X_.cols(); }

  /// Copy with observation `i` (0-based) removed.
  Dataset without(Eigen::Index i) const;

 private:
  Eigen::VectorXd y_;
  Eigen::MatrixXd X_;
};

/// theta = (beta, alpha, lambda). Flattened order is beta_1..beta_p, alpha, lambda.
struct ModelParams {
  Eigen::VectorXd beta;
  double alpha = 1.0;
  double lambda = 0.0;

  Eigen::Index size() const noexcept { return beta.size() + 2; }
  Eigen::VectorXd to_vector() const;
  static ModelParams from_vector(const Eigen::VectorXd& theta);

  /// Throws DomainError unless alpha > 0, everything is finite and beta has p entries.
  void validate(Eigen::Index p) const;
};

struct XiPair {
  Eigen::VectorXd xi1;  // (2/alpha) cosh(u_i)
  Eigen::VectorXd xi2;  // (2/alpha) sinh(u_i)
};

/// Per-observation score factors: U_beta = X^T s, U_alpha = sum a_i, U_lambda = sum c_i.
struct ScoreTerms {
  Eigen::VectorXd s;
  Eigen::VectorXd a;
  Eigen::VectorXd c;
};

/// Per-observation second-derivative factors. With unit weights
///   d2l/dbeta dbeta^T = -X^T V X,  d2l/dbeta dalpha = -X^T h,  d2l/dbeta dlambda = -X^T b,
///   d2l/dalpha2 = sum k1,  d2l/dalpha dlambda = sum k2,  d2l/dlambda2 = sum k3.
struct InfoBlocks {
  Eigen::VectorXd v;
  Eigen::VectorXd h;
  Eigen::VectorXd b;
  Eigen::VectorXd k1;
  Eigen::VectorXd k2;
  Eigen::VectorXd k3;
};

enum class ExecPolicy { Serial, Parallel, Auto };

/// Evaluation knobs shared by every likelihood routine.
struct LikelihoodOptions {
  const QuadratureRule* rule = nullptr;  // nullptr selects default_rule()
  Eigen::VectorXd weights;               // empty means unit case weights
  ExecPolicy policy = ExecPolicy::Auto;

  const QuadratureRule& quadrature() const { return rule ? *rule : default_rule(); }
};

XiPair xi(const Dataset& data, const ModelParams& theta, const LikelihoodOptions& opts = {});
double loglik(const Dataset& data, const ModelParams& theta, const LikelihoodOptions& opts = {});
ScoreTerms score_terms(const Dataset& data, const ModelParams& theta, const LikelihoodOptions& opts = {});
Eigen::VectorXd score(const Dataset& data, const ModelParams& theta, const LikelihoodOptions& opts = {});
InfoBlocks info_blocks(const Dataset& data, const ModelParams& theta, const LikelihoodOptions& opts = {});

/// -d2l/dtheta dtheta^T, (p+2) x (p+2), symmetric by construction.
Eigen::MatrixXd observed_information(const Dataset& data, const ModelParams& theta,
                                     const LikelihoodOptions& opts = {});
Eigen::MatrixXd assemble_information(const Eigen::MatrixXd& X, const InfoBlocks& blocks,
                                     const Eigen::VectorXd& weights = {});

/// y_i = x_i^T beta + e_i with e_i ~ SSN(alpha, -c(alpha, lambda), 2, lambda).
Dataset simulate(const Eigen::MatrixXd& X, const ModelParams& theta, std::uint64_t seed,
                 const QuadratureRule& rule = default_rule());

}  // namespace skewbs
