#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace skewbs {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// Default Gauss-Legendre points per panel of the normal-weight rule.
inline constexpr int kDefaultQuadOrder = 12;

double norm_pdf(double x);
double norm_cdf(double x);

/// log Phi(x), finite for every finite x.
double log_norm_cdf(double x);

/// phi(x) / Phi(x). Switches to a continued fraction for the lower tail (x < -5),
/// so the ratio stays finite and accurate down to x = -1e150.
double mills_ratio_sn(double x);

/// asinh(alpha * w / 2), odd in w.
double asinh_half(double alpha, double w);

/// A fixed rule for integrals of the form  int f(w) phi(w) dw.
/// The standard normal density is folded into the weights.
class QuadratureRule {
 public:
  /// Composite Gauss-Legendre rule on [-12, 12]. Panels are graded
  /// geometrically toward w = 0 (down to width 2^-12) and have unit width
  /// beyond |w| = 1, so integrands carrying Phi(lambda w) or phi(lambda w)
  /// stay resolved for large |lambda|. `order` is the number of points per panel.
  static QuadratureRule normal_composite(int order = kDefaultQuadOrder);

  /// Classical Gauss-Hermite rule after the change of variable w = sqrt(2) t.
  /// Only accurate for integrands analytic in a wide strip; kept for comparison.
  static QuadratureRule gauss_hermite(int order);

  /// Validates: nodes strictly increasing, weights positive, equal lengths.
  QuadratureRule(std::vector<double> nodes, std::vector<double> weights, int order);

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) sum += weights_[k] * f(nodes_[k]);
    return sum;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  int order_;
};

/// Process-wide rule of the default order. Immutable; safe to share across threads.
const QuadratureRule& default_rule();

/// Mean-shift constant c(alpha, lambda) of the skewed sinh-normal law and its
/// first and second partial derivatives.
struct CCoefficients {
  double c = 0.0;
  double c_alpha = 0.0;
  double c_lambda = 0.0;
  double c_alpha_prime = 0.0;   // d2c / dalpha2
  double c_lambda_prime = 0.0;  // d2c / dlambda2
  double c_alpha_lambda = 0.0;  // d2c / dalpha dlambda
};

/// All six integrals in one pass over `rule`. Throws DomainError if alpha <= 0.
CCoefficients c_coefficients(double alpha, double lambda, const QuadratureRule& rule);
CCoefficients c_coefficients(double alpha, double lambda);

/// The mean shift alone; same rule, same value as c_coefficients(...).c.
double c_shift(double alpha, double lambda, const QuadratureRule& rule);

}  // namespace skewbs
