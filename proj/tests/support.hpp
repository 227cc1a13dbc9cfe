#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>

#include "skewbs/regression.hpp"

namespace skewbs::testing {

struct Instance {
  Dataset data;
  ModelParams theta;
};

struct InstanceRanges {
  int n_min = 10;
  int n_max = 60;
  int p_min = 1;
  int p_max = 4;
  double alpha_min = 0.3;
  double alpha_max = 3.0;
  double lambda_abs_max = 4.0;
};

/// Design: intercept plus standard-normal columns (or one normal column when p = 1).
/// The response is drawn from the model at a random theta; the returned theta is
/// that value jittered, so derivative checks do not sit at a stationary point.
Instance random_instance(std::mt19937_64& rng, const InstanceRanges& ranges = {});

/// Central differences with step h_j = rel_step * max(1, |x_j|).
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                            double rel_step = 1e-6);
Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g,
                            const Eigen::VectorXd& x, double rel_step = 1e-6);

/// max_j |a_j - b_j| / max(1, |b_j|)
double max_rel_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& reference);

/// The shipped McCool rolling-contact-fatigue data: y = log T, X = [1, log stress].
Dataset mccool();

}  // namespace skewbs::testing
