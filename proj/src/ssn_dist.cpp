#include "skewbs/ssn_dist.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "skewbs/errors.hpp"

namespace skewbs {

void SsnParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("SSN shape alpha must be positive and finite");
  if (!std::isfinite(gamma) || !std::isfinite(lambda)) throw DomainError("SSN location and skewness must be finite");
}

double ssn_logpdf(const SsnParams& p, double y) {
  p.validate();
  const double u = 0.5 * (y - p.gamma);
  const double au = std::abs(u);
  // log cosh(u) without overflow for |u| beyond ~710.
  const double log_cosh = au + std::log1p(std::exp(-2.0 * au)) - std::numbers::ln2;
  const double z = (2.0 / p.alpha) * std::sinh(u);
  return std::log(2.0 / p.alpha) + log_cosh - kLogSqrt2Pi - 0.5 * z * z + log_norm_cdf(p.lambda * z);
}

double ssn_pdf(const SsnParams& p, double y) { return std::exp(ssn_logpdf(p, y)); }

std::vector<double> ssn_sample(const SsnParams& p, std::size_t n, std::uint64_t seed) {
  p.validate();
  if (n == 0) throw DomainError("sample size must be at least 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double delta = p.lambda / std::sqrt(1.0 + p.lambda * p.lambda);
  const double tail = std::sqrt(1.0 - delta * delta);
  std::vector<double> out(n);
  for (auto& y : out) {
    const double u0 = normal(gen);
    const double u1 = normal(gen);
    const double z = delta * std::abs(u0) + tail * u1;
    y = p.gamma + 2.0 * asinh_half(p.alpha, z);
  }
  return out;
}

double ssn_mean(const SsnParams& p, const QuadratureRule& rule) {
  p.validate();
  return p.gamma + c_shift(p.alpha, p.lambda, rule);
}

double ssn_moment(const SsnParams& p, int s, const QuadratureRule& rule) {
  p.validate();
  if (s < 0) throw DomainError("moment order must be non-negative");
  return 2.0 * rule.integrate([&](double w) {
    return std::pow(p.gamma + 2.0 * asinh_half(p.alpha, w), s) * norm_cdf(p.lambda * w);
  });
}

}  // namespace skewbs
