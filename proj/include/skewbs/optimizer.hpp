#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace skewbs::optim {

/// Returns f(x) and writes the gradient into `grad`. Non-finite values are
/// treated as "step too long" by the line search.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Maps (x, grad) to the quantity compared against `grad_tol`. Defaults to the max-norm of grad.
using StationarityMeasure = std::function<double(const Eigen::VectorXd& x, const Eigen::VectorXd& grad)>;

struct BfgsOptions {
  double grad_tol = 1e-6;
  double rel_f_tol = 1e-10;
  int max_iter = 500;
  double c1 = 1e-4;  // sufficient decrease
  double c2 = 0.9;   // curvature
  int max_line_search = 40;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd grad;
  double stationarity = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
};

/// Quasi-Newton minimization with a strong-Wolfe line search (bracketing plus
/// cubic-interpolation zoom). Converged means the stationarity measure is below
/// grad_tol and the last relative change in f is below rel_f_tol.
BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options = {},
                         const StationarityMeasure& stationarity = {});

}  // namespace skewbs::optim
