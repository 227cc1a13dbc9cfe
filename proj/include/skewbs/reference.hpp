#pragma once

// Serial reference implementation of the likelihood, score and observed
// information. It differentiates l_i = log xi1 - xi2^2/2 + log Phi(lambda xi2)
// through generic first and second derivatives of xi1 and xi2 with respect to
// theta, never touching the closed-form v, h, b, k1, k2, k3 used by the
// production kernels. Kept for cross-checking and benchmarking.

#include "skewbs/regression.hpp"

namespace skewbs::reference {

double loglik(const Dataset& data, const ModelParams& theta, const QuadratureRule& rule,
              const Eigen::VectorXd& weights = {});
Eigen::VectorXd score(const Dataset& data, const ModelParams& theta, const QuadratureRule& rule,
                      const Eigen::VectorXd& weights = {});
Eigen::MatrixXd observed_information(const Dataset& data, const ModelParams& theta, const QuadratureRule& rule,
                                     const Eigen::VectorXd& weights = {});

}  // namespace skewbs::reference
