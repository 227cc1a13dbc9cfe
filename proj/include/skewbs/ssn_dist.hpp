#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "skewbs/special_fns.hpp"

namespace skewbs {

/// SSN(alpha, gamma, sigma = 2, lambda), the log of an extended Birnbaum-Saunders
/// lifetime. The non-centrality is fixed at zero and the scale at 2.
struct SsnParams {
  double alpha = 1.0;
  double gamma = 0.0;
  double lambda = 0.0;

  /// Throws DomainError unless alpha > 0 and every field is finite.
  void validate() const;
};

double ssn_logpdf(const SsnParams& p, double y);
double ssn_pdf(const SsnParams& p, double y);

/// n draws of Y = gamma + 2 asinh(alpha Z / 2) with Z ~ SN(lambda) generated by
/// the conditional representation Z = delta |U0| + sqrt(1 - delta^2) U1.
std::vector<double> ssn_sample(const SsnParams& p, std::size_t n, std::uint64_t seed);

/// E(Y) = gamma + c(alpha, lambda).
double ssn_mean(const SsnParams& p, const QuadratureRule& rule = default_rule());

/// E(Y^s) by direct quadrature: Y = gamma + 2 asinh(alpha W / 2) integrated
/// against the skew-normal density 2 phi(w) Phi(lambda w).
double ssn_moment(const SsnParams& p, int s, const QuadratureRule& rule = default_rule());

}  // namespace skewbs
