#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "skewbs/regression.hpp"

namespace skewbs {

struct FitOptions {
  double grad_tol = 1e-6;         // max-norm of the score on the original scale
  double rel_loglik_tol = 1e-10;  // relative change of the log-likelihood between iterations
  int max_iter = 500;
  int quad_order = kDefaultQuadOrder;
  std::optional<double> lambda_fixed;  // hold lambda at this value (0 gives the log-BS model)
  Eigen::VectorXd weights;             // case weights; empty means all ones
  bool newton_polish = true;           // finish with safeguarded Newton steps on the observed information
  bool multi_start = true;             // cold fits also start from lambda = -2 and 2 and keep the best
  ExecPolicy policy = ExecPolicy::Auto;
};

struct FitResult {
  ModelParams theta_hat;
  Eigen::VectorXd se;  // p+2 entries; the lambda entry is NaN when lambda is held fixed
  double loglik_hat = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double hqic = 0.0;
  bool converged = false;
  int iterations = 0;
  double grad_norm_at_solution = 0.0;
  bool lambda_fixed = false;
  Eigen::Index n = 0;
  int n_params = 0;                  // free parameters counted by the information criteria
  Eigen::MatrixXd information;       // observed information over the free parameters
  std::vector<std::string> warnings;
};

struct LrTestResult {
  double statistic = 0.0;
  int df = 1;
  double critical_5pct = 3.84;
  bool reject = false;
};

struct RelativeChangeRow {
  Eigen::Index dropped_index = 0;  // 0-based row of the original data
  Eigen::VectorXd rc;              // NaN where the baseline estimate is zero
  std::vector<bool> rc_undefined;
  Eigen::VectorXd se_after;
  ModelParams theta_after;
  bool converged = false;
  std::string error;  // non-empty when the refit failed
};

/// OLS beta, alpha from the sinh-transformed residuals (floored at 1e-3), lambda = 0.
ModelParams starting_values(const Dataset& data, std::vector<std::string>* warnings = nullptr);

/// Maximum likelihood by BFGS over (beta, log alpha, lambda), optionally warm-started.
/// Without a start, the recipe in starting_values is used and, when lambda is free and
/// multi_start is set, two further starts with lambda = -2 and 2; the best fit is kept.
/// Non-convergence is reported through FitResult::converged; a singular observed
/// information at the solution throws SingularityError.
FitResult fit(const Dataset& data, const FitOptions& options = {},
              const std::optional<ModelParams>& start = std::nullopt);

/// fit with lambda held at zero.
FitResult fit_restricted(const Dataset& data, FitOptions options = {});

/// Throws InvalidPair when the restricted log-likelihood exceeds the full one by more than `tol`.
LrTestResult lr_test(const FitResult& full, const FitResult& restricted, double tol = 1e-6);

/// One warm-started refit per 0-based index in `drop`, run in parallel. Per-row
/// failures are recorded in the row. Throws DomainError on invalid or repeated indices.
std::vector<RelativeChangeRow> relative_changes(const Dataset& data, const FitResult& baseline,
                                                const std::vector<Eigen::Index>& drop,
                                                const FitOptions& options = {});

}  // namespace skewbs
