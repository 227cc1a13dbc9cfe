#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "skewbs/regression.hpp"

namespace skewbs {

enum class Scheme { CaseWeights, Response, Covariate };

std::string to_string(Scheme scheme);

/// Score max-norm above which the Delta formulas are flagged as not evaluated at an MLE.
inline constexpr double kStationarityThreshold = 1e-3;

/// Mixed second derivative of the perturbed log-likelihood, (p+2) x n.
struct DeltaMatrix {
  Eigen::MatrixXd values;
  Scheme scheme = Scheme::CaseWeights;
  Eigen::Index covariate = -1;  // 0-based column of X for Scheme::Covariate
  double scale_factor = 1.0;    // s_y or s_x; 1 for case weights
  double score_norm = 0.0;      // max-norm of the score at theta
  bool stationarity_warning = false;
};

struct InfluenceReport {
  Eigen::VectorXd d_max;      // unit eigenvector, largest-magnitude entry positive
  Eigen::VectorXd d_max_abs;  // entrywise |d_max|
  double c_dmax = 0.0;        // 2 * largest eigenvalue of B
  Scheme scheme = Scheme::CaseWeights;
  std::optional<std::vector<Eigen::Index>> subset;
};

struct LeverageMatrix {
  Eigen::MatrixXd values;  // (i, l) = d yhat_i / d y_l
  Eigen::VectorXd diagonal() const { return values.diagonal(); }
};

DeltaMatrix delta_case_weights(const Dataset& data, const ModelParams& theta_hat,
                               const LikelihoodOptions& opts = {});

/// y_i + omega_i * s_y. `scale` overrides s_y (default: sample SD of y, divisor n-1).
DeltaMatrix delta_response(const Dataset& data, const ModelParams& theta_hat, const LikelihoodOptions& opts = {},
                           std::optional<double> scale = std::nullopt);

/// x_ij + omega_i * s_x for 0-based column j. Throws ConstantColumnError on a constant column.
DeltaMatrix delta_covariate(const Dataset& data, const ModelParams& theta_hat, Eigen::Index j,
                            const LikelihoodOptions& opts = {}, std::optional<double> scale = std::nullopt);

/// 2 |d^T Delta^T J^{-1} Delta d| for the observed information J and a unit vector d.
double curvature(const DeltaMatrix& delta, const Eigen::MatrixXd& info, const Eigen::VectorXd& d);

/// B = Delta^T J^{-1} Delta, formed through a Cholesky factor of J.
Eigen::MatrixXd influence_matrix(const DeltaMatrix& delta, const Eigen::MatrixXd& info);

InfluenceReport curvature_dmax(const DeltaMatrix& delta, const Eigen::MatrixXd& info);

/// Curvature for the parameters in `subset` (flattened 0-based indices into theta),
/// treating the remaining ones as nuisance.
InfluenceReport curvature_dmax_subset(const DeltaMatrix& delta, const Eigen::MatrixXd& info,
                                      const std::vector<Eigen::Index>& subset);

/// d yhat / d y^T at theta_hat.
LeverageMatrix generalized_leverage(const Dataset& data, const ModelParams& theta_hat,
                                    const LikelihoodOptions& opts = {});

/// Sample standard deviation with divisor n-1.
double sample_sd(const Eigen::VectorXd& v);

}  // namespace skewbs
