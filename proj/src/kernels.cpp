#include "skewbs/kernels.hpp"

#include <cmath>
#include <numbers>

namespace skewbs::kernels {

namespace {

// Common per-observation state: xi1, xi2 and the Mills ratio at lambda * xi2.
struct Obs {
  double xi1;
  double xi2;
  double mills;
};

inline Obs observe(double residual, double alpha, double lambda, double c) {
  const double u = 0.5 * (residual + c);
  Obs o;
  o.xi1 = (2.0 / alpha) * std::cosh(u);
  o.xi2 = (2.0 / alpha) * std::sinh(u);
  o.mills = mills_ratio_sn(lambda * o.xi2);
  return o;
}

}  // namespace

bool run_parallel(ExecPolicy policy, Eigen::Index n) {
  switch (policy) {
    case ExecPolicy::Serial:
      return false;
    case ExecPolicy::Parallel:
      return true;
    case ExecPolicy::Auto:
      break;
  }
  return n >= kParallelThreshold;
}

XiPair xi(const Dataset& data, const ModelParams& theta, double c, bool parallel) {
  const Eigen::Index n = data.n();
  const Eigen::VectorXd resid = data.y() - data.X() * theta.beta;
  XiPair out{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const double scale = 2.0 / theta.alpha;
#pragma omp parallel for schedule(static) if (parallel)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = 0.5 * (resid(i) + c);
    out.xi1(i) = scale * std::cosh(u);
    out.xi2(i) = scale * std::sinh(u);
  }
  return out;
}

Eigen::VectorXd loglik_terms(const Dataset& data, const ModelParams& theta, double c, bool parallel) {
  const Eigen::Index n = data.n();
  const Eigen::VectorXd resid = data.y() - data.X() * theta.beta;
  Eigen::VectorXd terms(n);
  const double log_scale = std::log(2.0 / theta.alpha);
  const double lambda = theta.lambda;
  const double scale = 2.0 / theta.alpha;
#pragma omp parallel for schedule(static) if (parallel)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = 0.5 * (resid(i) + c);
    const double au = std::abs(u);
    const double log_xi1 = log_scale + au + std::log1p(std::exp(-2.0 * au)) - std::numbers::ln2;
    const double xi2 = scale * std::sinh(u);
    terms(i) = -kLogSqrt2Pi + log_xi1 - 0.5 * xi2 * xi2 + log_norm_cdf(lambda * xi2);
  }
  return terms;
}

double loglik(const Dataset& data, const ModelParams& theta, double c, const Eigen::VectorXd& weights,
              bool parallel) {
  const Eigen::VectorXd terms = loglik_terms(data, theta, c, parallel);
  double total = 0.0;
  if (weights.size() == 0) {
    for (Eigen::Index i = 0; i < terms.size(); ++i) total += terms(i);
  } else {
    for (Eigen::Index i = 0; i < terms.size(); ++i) total += weights(i) * terms(i);
  }
  return total;
}

ScoreTerms score_terms(const Dataset& data, const ModelParams& theta, const CCoefficients& cc, bool parallel) {
  const Eigen::Index n = data.n();
  const Eigen::VectorXd resid = data.y() - data.X() * theta.beta;
  ScoreTerms out{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const double alpha = theta.alpha;
  const double lambda = theta.lambda;
#pragma omp parallel for schedule(static) if (parallel)
  for (Eigen::Index i = 0; i < n; ++i) {
    const Obs o = observe(resid(i), alpha, lambda, cc.c);
    const double g = o.xi1 * o.xi2 - o.xi2 / o.xi1;
    out.s(i) = 0.5 * (g - lambda * o.xi1 * o.mills);
    out.a(i) = -1.0 / alpha + o.xi2 * o.xi2 / alpha - 0.5 * cc.c_alpha * g +
               lambda * o.mills * (0.5 * cc.c_alpha * o.xi1 - o.xi2 / alpha);
    // The lambda-score carries c_lambda in both terms.
    out.c(i) = -0.5 * cc.c_lambda * g + 0.5 * o.mills * (2.0 * o.xi2 + lambda * cc.c_lambda * o.xi1);
  }
  return out;
}

InfoBlocks info_blocks(const Dataset& data, const ModelParams& theta, const CCoefficients& cc, bool parallel) {
  const Eigen::Index n = data.n();
  const Eigen::VectorXd resid = data.y() - data.X() * theta.beta;
  InfoBlocks out{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n),
                 Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const double al = theta.alpha;
  const double lam = theta.lambda;
  const double al2 = al * al;
  const double lam2 = lam * lam;
  const double ca = cc.c_alpha;
  const double cl = cc.c_lambda;
  const double cap = cc.c_alpha_prime;
  const double clp = cc.c_lambda_prime;
  const double cal = cc.c_alpha_lambda;

#pragma omp parallel for schedule(static) if (parallel)
  for (Eigen::Index i = 0; i < n; ++i) {
    const Obs o = observe(resid(i), al, lam, cc.c);
    const double x1 = o.xi1;
    const double x2 = o.xi2;
    const double m = o.mills;
    const double m2 = m * m;
    const double x1sq = x1 * x1;
    const double x2sq = x2 * x2;

    const double g = x1 * x2 - x2 / x1;
    const double q = 2.0 * x2sq + 4.0 / al2 - 1.0 + x2sq / x1sq;
    const double d_alpha_xi2 = -x2 / al + 0.5 * ca * x1;  // d xi2 / d alpha
    const double d_alpha_xi1 = -x1 / al + 0.5 * ca * x2;  // d xi1 / d alpha
    const double tail = lam * x2 + m;                      // -(d mills / dx) / mills
    const double h_alpha = -2.0 * x1 * x2 / al + 0.5 * ca * (x1sq + x2sq) - 2.0 * ca / (al2 * x1sq);
    const double e_lam = x2 + 0.5 * lam * cl * x1;  // d (lambda xi2) / d lambda

    const double skew_v = -lam * x2 * m + lam2 * lam * x1sq * x2 * m + lam2 * x1sq * m2;
    out.v(i) = 0.25 * (q + skew_v);

    const double w1 = x2 * m - lam2 * x1sq * x2 * m - lam * x1sq * m2;
    const double w2 = x1 * m - lam2 * x1 * x2sq * m - lam * x1 * x2 * m2;
    out.h(i) = x1 * x2 / al - 0.25 * ca * q + 0.25 * lam * ca * w1 - lam / (2.0 * al) * w2;
    out.b(i) = -0.25 * cl * q + 0.25 * lam * cl * w1 + 0.5 * w2;

    // The brace multiplying h_alpha carries c_alpha, not c'_alpha.
    out.k1(i) = 1.0 / al2 - 3.0 * x2sq / al2 - 0.5 * cap * g + 0.5 * lam * cap * x1 * m + ca * x1 * x2 / al -
                0.5 * ca * h_alpha - lam * m / al * d_alpha_xi2 + 0.5 * lam * ca * m * d_alpha_xi1 +
                lam * x2 * m / al2 - 0.5 * lam2 * ca * x1 * m * d_alpha_xi2 * tail +
                lam2 * x2 * m / al * d_alpha_xi2 * tail;

    // Last term: lambda xi2 mills (no 1/alpha factor).
    out.k2(i) = -0.5 * cal * g + 0.5 * lam * cal * x1 * m - 0.5 * cl * h_alpha + 0.5 * lam * cl * m * d_alpha_xi1 +
                m * d_alpha_xi2 - 0.5 * lam2 * cl * x1 * m * d_alpha_xi2 * tail -
                lam * x2 * m * d_alpha_xi2 * tail;

    // Last two terms enter with unit coefficient.
    out.k3(i) = -0.5 * clp * g + cl * x1 * m + 0.5 * lam * clp * x1 * m - 0.25 * cl * cl * q +
                0.25 * lam * cl * cl * x2 * m - 0.5 * lam2 * cl * x1 * x2 * m * e_lam -
                0.5 * lam * cl * x1 * m2 * e_lam - lam * x2sq * m * e_lam - x2 * m2 * e_lam;
  }
  return out;
}

}  // namespace skewbs::kernels
