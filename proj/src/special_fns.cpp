#include "skewbs/special_fns.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "skewbs/errors.hpp"

namespace skewbs {

namespace {

constexpr double kTailSwitch = -5.0;
constexpr int kTailTerms = 40;
constexpr double kRuleHalfWidth = 12.0;
constexpr int kGradedLevels = 12;

// Phi(-t) / phi(t) for t >= 5 by backward evaluation of Laplace's continued fraction.
double upper_tail_ratio(double t) {
  double v = t;
  for (int k = kTailTerms; k >= 1; --k) v = t + k / v;
  return 1.0 / v;
}

// Eigen-decomposition of a symmetric Jacobi matrix (Golub-Welsch).
void golub_welsch(const Eigen::VectorXd& off_diag, Eigen::VectorXd& nodes, Eigen::VectorXd& first_row_sq) {
  const Eigen::Index n = off_diag.size() + 1;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = off_diag(k);
    jacobi(k + 1, k) = off_diag(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  if (eig.info() != Eigen::Success) throw EigenFailure("Golub-Welsch eigen-solve failed");
  nodes = eig.eigenvalues();
  first_row_sq = eig.eigenvectors().row(0).array().square().transpose();
}

}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_norm_cdf(double x) {
  if (x > 0.0) return std::log1p(-norm_cdf(-x));
  if (x >= kTailSwitch) return std::log(norm_cdf(x));
  // log Phi(x) = log phi(x) + log(Phi(x)/phi(x))
  return -0.5 * x * x - kLogSqrt2Pi + std::log(upper_tail_ratio(-x));
}

double mills_ratio_sn(double x) {
  if (x >= kTailSwitch) return norm_pdf(x) / norm_cdf(x);
  return 1.0 / upper_tail_ratio(-x);
}

double asinh_half(double alpha, double w) {
  const double z = 0.5 * alpha * w;
  return std::copysign(std::asinh(std::abs(z)), z);
}

QuadratureRule::QuadratureRule(std::vector<double> nodes, std::vector<double> weights, int order)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), order_(order) {
  if (order_ <= 0) throw DomainError("quadrature order must be positive");
  if (nodes_.empty() || nodes_.size() != weights_.size())
    throw DomainError("quadrature nodes and weights must be non-empty and of equal length");
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (!(weights_[k] > 0.0) || !std::isfinite(weights_[k]))
      throw DomainError("quadrature weights must be positive and finite");
    if (k > 0 && !(nodes_[k] > nodes_[k - 1])) throw DomainError("quadrature nodes must be strictly increasing");
  }
}

QuadratureRule QuadratureRule::normal_composite(int order) {
  if (order < 2) throw DomainError("composite rule needs at least 2 points per panel");

  Eigen::VectorXd off(order - 1);
  for (int k = 1; k < order; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::VectorXd gl_nodes, gl_weights;
  golub_welsch(off, gl_nodes, gl_weights);
  gl_weights *= 2.0;

  // Panel edges on [0, H]: 0, 2^-L, ..., 1/2, 1, 2, ..., H; mirrored onto [-H, 0].
  std::vector<double> half{0.0};
  for (int level = kGradedLevels; level >= 1; --level) half.push_back(std::ldexp(1.0, -level));
  for (double edge = 1.0; edge <= kRuleHalfWidth; edge += 1.0) half.push_back(edge);
  std::vector<double> edges;
  for (auto it = half.rbegin(); it != half.rend(); ++it) edges.push_back(-*it);
  edges.insert(edges.end(), half.begin() + 1, half.end());

  std::vector<double> nodes, weights;
  nodes.reserve((edges.size() - 1) * order);
  weights.reserve(nodes.capacity());
  for (std::size_t panel = 0; panel + 1 < edges.size(); ++panel) {
    const double mid = 0.5 * (edges[panel] + edges[panel + 1]);
    const double half_len = 0.5 * (edges[panel + 1] - edges[panel]);
    for (int k = 0; k < order; ++k) {
      const double w = mid + half_len * gl_nodes(k);
      nodes.push_back(w);
      weights.push_back(half_len * gl_weights(k) * norm_pdf(w));
    }
  }
  return QuadratureRule(std::move(nodes), std::move(weights), order);
}

QuadratureRule QuadratureRule::gauss_hermite(int order) {
  if (order < 2) throw DomainError("Gauss-Hermite order must be at least 2");
  Eigen::VectorXd off(order - 1);
  for (int k = 1; k < order; ++k) off(k - 1) = std::sqrt(0.5 * k);
  Eigen::VectorXd t, v0sq;
  golub_welsch(off, t, v0sq);
  // int f(w) phi(w) dw = pi^{-1/2} int f(sqrt(2) t) e^{-t^2} dt; the e^{-t^2} rule weights are sqrt(pi) v0^2.
  std::vector<double> nodes(order), weights(order);
  for (int k = 0; k < order; ++k) {
    nodes[k] = std::numbers::sqrt2 * t(k);
    weights[k] = v0sq(k);
  }
  return QuadratureRule(std::move(nodes), std::move(weights), order);
}

const QuadratureRule& default_rule() {
  static const QuadratureRule rule = QuadratureRule::normal_composite(kDefaultQuadOrder);
  return rule;
}

CCoefficients c_coefficients(double alpha, double lambda, const QuadratureRule& rule) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive and finite");
  if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");

  const auto nodes = rule.nodes();
  const auto weights = rule.weights();
  const double a2 = alpha * alpha;
  CCoefficients out;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double w = nodes[k];
    const double wt = weights[k];
    const double ash = asinh_half(alpha, w);
    const double big_phi = norm_cdf(lambda * w);
    const double small_phi = norm_pdf(lambda * w);
    const double inv_root = 1.0 / std::sqrt(4.0 + a2 * w * w);
    const double w3 = w * w * w;
    out.c += wt * (ash * big_phi);
    out.c_alpha += wt * (w * inv_root * big_phi);
    out.c_lambda += wt * (w * ash * small_phi);
    out.c_alpha_prime += wt * (w3 * inv_root * inv_root * inv_root * big_phi);
    out.c_lambda_prime += wt * (w3 * ash * small_phi);
    out.c_alpha_lambda += wt * (w * w * inv_root * small_phi);
  }
  out.c *= 4.0;
  out.c_alpha *= 4.0;
  out.c_lambda *= 4.0;
  out.c_alpha_prime *= -4.0 * alpha;
  out.c_lambda_prime *= -4.0 * lambda;
  out.c_alpha_lambda *= 4.0;
  return out;
}

CCoefficients c_coefficients(double alpha, double lambda) { return c_coefficients(alpha, lambda, default_rule()); }

double c_shift(double alpha, double lambda, const QuadratureRule& rule) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive and finite");
  if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
  const auto nodes = rule.nodes();
  const auto weights = rule.weights();
  double c = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k)
    c += weights[k] * (asinh_half(alpha, nodes[k]) * norm_cdf(lambda * nodes[k]));
  return 4.0 * c;
}

}  // namespace skewbs
