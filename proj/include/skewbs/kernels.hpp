#pragma once

// Per-observation kernels behind the regression API. Each loop over i is an
// OpenMP parallel-for that only writes slot i; every reduction over i runs
// afterwards in index order, so results do not depend on the thread count.

#include "skewbs/regression.hpp"

namespace skewbs::kernels {

/// Observation count from which ExecPolicy::Auto goes parallel.
inline constexpr Eigen::Index kParallelThreshold = 512;

bool run_parallel(ExecPolicy policy, Eigen::Index n);

XiPair xi(const Dataset& data, const ModelParams& theta, double c, bool parallel);

/// Per-observation log-likelihood contributions l_i.
Eigen::VectorXd loglik_terms(const Dataset& data, const ModelParams& theta, double c, bool parallel);

/// Weighted sum of loglik_terms, accumulated in index order.
double loglik(const Dataset& data, const ModelParams& theta, double c, const Eigen::VectorXd& weights,
              bool parallel);

ScoreTerms score_terms(const Dataset& data, const ModelParams& theta, const CCoefficients& cc, bool parallel);
InfoBlocks info_blocks(const Dataset& data, const ModelParams& theta, const CCoefficients& cc, bool parallel);

}  // namespace skewbs::kernels
