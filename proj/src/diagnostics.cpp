#include "skewbs/diagnostics.hpp"

#include <cmath>
#include <set>

#include "skewbs/errors.hpp"

namespace skewbs {

namespace {

// Solves J Z = R. Cholesky first; an indefinite but invertible J falls back to LU.
Eigen::MatrixXd solve_info(const Eigen::MatrixXd& info, const Eigen::MatrixXd& rhs) {
  if (info.rows() != info.cols() || info.rows() != rhs.rows())
    throw DomainError("information matrix does not match the Delta matrix");
  const Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
  if (!lu.isInvertible()) throw SingularityError("observed information is singular");
  return lu.solve(rhs);
}

void stamp_stationarity(DeltaMatrix& out, const Dataset& data, const ModelParams& theta,
                        const LikelihoodOptions& opts) {
  out.score_norm = score(data, theta, opts).lpNorm<Eigen::Infinity>();
  out.stationarity_warning = out.score_norm > kStationarityThreshold;
}

LikelihoodOptions unweighted(const LikelihoodOptions& opts) {
  LikelihoodOptions o = opts;
  o.weights.resize(0);
  return o;
}

InfluenceReport top_eigenpair(const Eigen::MatrixXd& B, Scheme scheme) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  if (es.info() != Eigen::Success) throw EigenFailure("symmetric eigendecomposition did not converge");
  Eigen::Index top = 0;
  es.eigenvalues().cwiseAbs().maxCoeff(&top);
  InfluenceReport r;
  r.scheme = scheme;
  r.d_max = es.eigenvectors().col(top);
  Eigen::Index big = 0;
  r.d_max.cwiseAbs().maxCoeff(&big);
  if (r.d_max(big) < 0.0) r.d_max = -r.d_max;
  r.d_max_abs = r.d_max.cwiseAbs();
  r.c_dmax = 2.0 * std::abs(es.eigenvalues()(top));
  return r;
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::CaseWeights:
      return "case";
    case Scheme::Response:
      return "response";
    case Scheme::Covariate:
      return "covariate";
  }
  return "unknown";
}

double sample_sd(const Eigen::VectorXd& v) {
  if (v.size() < 2) throw DomainError("standard deviation needs at least two values");
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

DeltaMatrix delta_case_weights(const Dataset& data, const ModelParams& theta_hat, const LikelihoodOptions& opts) {
  const LikelihoodOptions o = unweighted(opts);
  const ScoreTerms t = score_terms(data, theta_hat, o);
  const Eigen::Index p = data.p();
  DeltaMatrix out;
  out.scheme = Scheme::CaseWeights;
  out.values.resize(p + 2, data.n());
  out.values.topRows(p) = data.X().transpose() * t.s.asDiagonal();
  out.values.row(p) = t.a.transpose();
  out.values.row(p + 1) = t.c.transpose();
  stamp_stationarity(out, data, theta_hat, o);
  return out;
}

DeltaMatrix delta_response(const Dataset& data, const ModelParams& theta_hat, const LikelihoodOptions& opts,
                           std::optional<double> scale) {
  const LikelihoodOptions o = unweighted(opts);
  const double sy = scale ? *scale : sample_sd(data.y());
  if (!(sy > 0.0) || !std::isfinite(sy)) throw DomainError("response scale factor must be positive");
  const InfoBlocks ib = info_blocks(data, theta_hat, o);
  const Eigen::Index p = data.p();
  DeltaMatrix out;
  out.scheme = Scheme::Response;
  out.scale_factor = sy;
  out.values.resize(p + 2, data.n());
  out.values.topRows(p) = sy * (data.X().transpose() * ib.v.asDiagonal());
  out.values.row(p) = sy * ib.h.transpose();
  out.values.row(p + 1) = sy * ib.b.transpose();
  stamp_stationarity(out, data, theta_hat, o);
  return out;
}

DeltaMatrix delta_covariate(const Dataset& data, const ModelParams& theta_hat, Eigen::Index j,
                            const LikelihoodOptions& opts, std::optional<double> scale) {
  const Eigen::Index p = data.p();
  if (j < 0 || j >= p) throw DomainError("covariate index " + std::to_string(j + 1) + " is outside 1.." + std::to_string(p));
  const Eigen::VectorXd col = data.X().col(j);
  if (col.maxCoeff() - col.minCoeff() <= 1e-12 * std::max(1.0, col.cwiseAbs().maxCoeff()))
    throw ConstantColumnError("covariate column " + std::to_string(j + 1) + " is constant");
  const double sx = scale ? *scale : sample_sd(col);
  if (!(sx > 0.0) || !std::isfinite(sx)) throw DomainError("covariate scale factor must be positive");

  const LikelihoodOptions o = unweighted(opts);
  const InfoBlocks ib = info_blocks(data, theta_hat, o);
  const ScoreTerms t = score_terms(data, theta_hat, o);
  const double bj = theta_hat.beta(j);
  DeltaMatrix out;
  out.scheme = Scheme::Covariate;
  out.covariate = j;
  out.scale_factor = sx;
  out.values.resize(p + 2, data.n());
  out.values.topRows(p) = -sx * bj * (data.X().transpose() * ib.v.asDiagonal());
  out.values.row(j) += sx * t.s.transpose();
  out.values.row(p) = -sx * bj * ib.h.transpose();
  out.values.row(p + 1) = -sx * bj * ib.b.transpose();
  stamp_stationarity(out, data, theta_hat, o);
  return out;
}

Eigen::MatrixXd influence_matrix(const DeltaMatrix& delta, const Eigen::MatrixXd& info) {
  const Eigen::MatrixXd& D = delta.values;
  if (info.rows() != D.rows() || info.cols() != D.rows())
    throw DomainError("information matrix does not match the Delta matrix");
  const Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() == Eigen::Success) {
    const Eigen::MatrixXd W = llt.matrixL().solve(D);
    return W.transpose() * W;
  }
  const Eigen::MatrixXd Z = solve_info(info, D);
  const Eigen::MatrixXd B = D.transpose() * Z;
  return 0.5 * (B + B.transpose());
}

double curvature(const DeltaMatrix& delta, const Eigen::MatrixXd& info, const Eigen::VectorXd& d) {
  if (d.size() != delta.values.cols()) throw DomainError("direction length does not match the number of cases");
  const double norm = d.norm();
  if (std::abs(norm - 1.0) > 1e-8) throw DomainError("direction must have unit length");
  const Eigen::VectorXd Dd = delta.values * d;
  const Eigen::VectorXd z = solve_info(info, Dd);
  return 2.0 * std::abs(Dd.dot(z));
}

InfluenceReport curvature_dmax(const DeltaMatrix& delta, const Eigen::MatrixXd& info) {
  return top_eigenpair(influence_matrix(delta, info), delta.scheme);
}

InfluenceReport curvature_dmax_subset(const DeltaMatrix& delta, const Eigen::MatrixXd& info,
                                      const std::vector<Eigen::Index>& subset) {
  const Eigen::Index k = delta.values.rows();
  if (subset.empty()) throw DomainError("parameter subset is empty");
  std::set<Eigen::Index> in;
  for (Eigen::Index s : subset) {
    if (s < 0 || s >= k) throw DomainError("parameter index " + std::to_string(s) + " is out of range");
    if (!in.insert(s).second) throw DomainError("parameter index " + std::to_string(s) + " is repeated");
  }
  std::vector<Eigen::Index> rest;
  for (Eigen::Index j = 0; j < k; ++j)
    if (!in.count(j)) rest.push_back(j);

  Eigen::MatrixXd B = influence_matrix(delta, info);
  if (!rest.empty()) {
    const auto m = static_cast<Eigen::Index>(rest.size());
    Eigen::MatrixXd J22(m, m);
    Eigen::MatrixXd D2(m, delta.values.cols());
    for (Eigen::Index a = 0; a < m; ++a) {
      D2.row(a) = delta.values.row(rest[static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b < m; ++b) J22(a, b) = info(rest[static_cast<std::size_t>(a)], rest[static_cast<std::size_t>(b)]);
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(J22);
    if (llt.info() == Eigen::Success) {
      const Eigen::MatrixXd W = llt.matrixL().solve(D2);
      B -= W.transpose() * W;
    } else {
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(J22);
      if (!lu.isInvertible()) throw SingularityError("nuisance block of the observed information is singular");
      const Eigen::MatrixXd C = D2.transpose() * lu.solve(D2);
      B -= 0.5 * (C + C.transpose());
    }
  }
  InfluenceReport r = top_eigenpair(B, delta.scheme);
  r.subset = std::vector<Eigen::Index>(in.begin(), in.end());
  return r;
}

LeverageMatrix generalized_leverage(const Dataset& data, const ModelParams& theta_hat, const LikelihoodOptions& opts) {
  const LikelihoodOptions o = unweighted(opts);
  const InfoBlocks ib = info_blocks(data, theta_hat, o);
  const Eigen::MatrixXd J = assemble_information(data.X(), ib);
  const Eigen::Index p = data.p();
  // d2l / dtheta dy^T
  Eigen::MatrixXd Lty(p + 2, data.n());
  Lty.topRows(p) = data.X().transpose() * ib.v.asDiagonal();
  Lty.row(p) = ib.h.transpose();
  Lty.row(p + 1) = ib.b.transpose();
  const Eigen::MatrixXd dtheta = solve_info(J, Lty);
  LeverageMatrix out;
  out.values = data.X() * dtheta.topRows(p);
  return out;
}

}  // namespace skewbs
