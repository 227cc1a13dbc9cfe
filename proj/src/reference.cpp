#include "skewbs/reference.hpp"

#include <cmath>

namespace skewbs::reference {

namespace {

struct Derivs {
  double value;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

// xi1 = g(alpha) cosh(u), xi2 = g(alpha) sinh(u) with g = 2/alpha and
// u = (y - x^T beta + c(alpha, lambda)) / 2.
void hyperbolic_derivs(double y, const Eigen::RowVectorXd& x, const ModelParams& theta, const CCoefficients& cc,
                       Derivs& d1, Derivs& d2) {
  const Eigen::Index p = x.size();
  const Eigen::Index k = p + 2;
  const Eigen::Index ia = p;
  const Eigen::Index il = p + 1;
  const double alpha = theta.alpha;

  const double u = 0.5 * (y - x.dot(theta.beta) + cc.c);
  Eigen::VectorXd du = Eigen::VectorXd::Zero(k);
  du.head(p) = -0.5 * x.transpose();
  du(ia) = 0.5 * cc.c_alpha;
  du(il) = 0.5 * cc.c_lambda;
  Eigen::MatrixXd ddu = Eigen::MatrixXd::Zero(k, k);
  ddu(ia, ia) = 0.5 * cc.c_alpha_prime;
  ddu(il, il) = 0.5 * cc.c_lambda_prime;
  ddu(ia, il) = ddu(il, ia) = 0.5 * cc.c_alpha_lambda;

  const double g = 2.0 / alpha;
  Eigen::VectorXd dg = Eigen::VectorXd::Zero(k);
  dg(ia) = -2.0 / (alpha * alpha);
  Eigen::MatrixXd ddg = Eigen::MatrixXd::Zero(k, k);
  ddg(ia, ia) = 4.0 / (alpha * alpha * alpha);

  const double ch = std::cosh(u);
  const double sh = std::sinh(u);
  // f = g * H(u): df = dg H + g H' du; d2f = d2g H + H'(dg du^T + du dg^T) + g (H'' du du^T + H' d2u)
  auto fill = [&](double h0, double h1, Derivs& out) {
    out.value = g * h0;
    out.grad = dg * h0 + g * h1 * du;
    out.hess = ddg * h0 + h1 * (dg * du.transpose() + du * dg.transpose()) + g * (h0 * du * du.transpose() + h1 * ddu);
  };
  fill(ch, sh, d1);
  fill(sh, ch, d2);
}

}  // namespace

double loglik(const Dataset& data, const ModelParams& theta, const QuadratureRule& rule,
              const Eigen::VectorXd& weights) {
  const double c = c_coefficients(theta.alpha, theta.lambda, rule).c;
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double u = 0.5 * (data.y()(i) - data.X().row(i).dot(theta.beta) + c);
    const double xi1 = (2.0 / theta.alpha) * std::cosh(u);
    const double xi2 = (2.0 / theta.alpha) * std::sinh(u);
    const double li = -kLogSqrt2Pi + std::log(xi1) - 0.5 * xi2 * xi2 + log_norm_cdf(theta.lambda * xi2);
    total += (weights.size() ? weights(i) : 1.0) * li;
  }
  return total;
}

Eigen::VectorXd score(const Dataset& data, const ModelParams& theta, const QuadratureRule& rule,
                      const Eigen::VectorXd& weights) {
  const CCoefficients cc = c_coefficients(theta.alpha, theta.lambda, rule);
  const Eigen::Index k = theta.size();
  const Eigen::Index il = k - 1;
  Eigen::VectorXd total = Eigen::VectorXd::Zero(k);
  Derivs d1, d2;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    hyperbolic_derivs(data.y()(i), data.X().row(i), theta, cc, d1, d2);
    const double z = theta.lambda * d2.value;
    Eigen::VectorXd dz = theta.lambda * d2.grad;
    dz(il) += d2.value;
    const Eigen::VectorXd gi = d1.grad / d1.value - d2.value * d2.grad + mills_ratio_sn(z) * dz;
    total += (weights.size() ? weights(i) : 1.0) * gi;
  }
  return total;
}

Eigen::MatrixXd observed_information(const Dataset& data, const ModelParams& theta, const QuadratureRule& rule,
                                     const Eigen::VectorXd& weights) {
  const CCoefficients cc = c_coefficients(theta.alpha, theta.lambda, rule);
  const Eigen::Index k = theta.size();
  const Eigen::Index il = k - 1;
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(k, k);
  Derivs d1, d2;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    hyperbolic_derivs(data.y()(i), data.X().row(i), theta, cc, d1, d2);
    const double z = theta.lambda * d2.value;
    Eigen::VectorXd dz = theta.lambda * d2.grad;
    dz(il) += d2.value;
    Eigen::MatrixXd ddz = theta.lambda * d2.hess;
    ddz.row(il) += d2.grad.transpose();
    ddz.col(il) += d2.grad;
    const double m = mills_ratio_sn(z);
    // d/dz mills(z) = -mills (z + mills)
    const double dm = -m * (z + m);
    const Eigen::MatrixXd hi = d1.hess / d1.value - d1.grad * d1.grad.transpose() / (d1.value * d1.value) -
                               d2.grad * d2.grad.transpose() - d2.value * d2.hess + dm * dz * dz.transpose() +
                               m * ddz;
    hess += (weights.size() ? weights(i) : 1.0) * hi;
  }
  return -hess;
}

}  // namespace skewbs::reference
