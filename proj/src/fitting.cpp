#include "skewbs/fitting.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <set>

#include "skewbs/errors.hpp"
#include "skewbs/optimizer.hpp"

namespace skewbs {

namespace {

constexpr double kAlphaFloor = 1e-3;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kExtraLambdaStarts[] = {-2.0, 2.0};

// Keeps a non-default quadrature rule alive for the duration of one fit.
struct RuleHolder {
  std::unique_ptr<QuadratureRule> owned;
  const QuadratureRule* get(int order) {
    if (order == kDefaultQuadOrder) return &default_rule();
    owned = std::make_unique<QuadratureRule>(QuadratureRule::normal_composite(order));
    return owned.get();
  }
};

double original_scale_norm(const Eigen::VectorXd& score_free) { return score_free.lpNorm<Eigen::Infinity>(); }

Eigen::VectorXd restrict_vector(const Eigen::VectorXd& full, bool lambda_fixed) {
  return lambda_fixed ? Eigen::VectorXd(full.head(full.size() - 1)) : full;
}

Eigen::MatrixXd restrict_matrix(const Eigen::MatrixXd& full, bool lambda_fixed) {
  const Eigen::Index k = lambda_fixed ? full.rows() - 1 : full.rows();
  return full.topLeftCorner(k, k);
}

}  // namespace

ModelParams starting_values(const Dataset& data, std::vector<std::string>* warnings) {
  ModelParams start;
  start.beta = data.X().colPivHouseholderQr().solve(data.y());
  const Eigen::VectorXd r = data.y() - data.X() * start.beta;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const double s = std::sinh(0.5 * r(i));
    acc += s * s;
  }
  start.alpha = std::sqrt(4.0 * acc / static_cast<double>(data.n()));
  if (!(start.alpha >= kAlphaFloor)) {
    start.alpha = kAlphaFloor;
    if (warnings) warnings->push_back("least-squares residuals are (nearly) zero; starting alpha clamped to 1e-3");
  }
  start.lambda = 0.0;
  return start;
}

namespace {

FitResult fit_from(const Dataset& data, const FitOptions& options, const LikelihoodOptions& lik, ModelParams theta0,
                   std::vector<std::string> warnings) {
  const Eigen::Index p = data.p();
  const bool fixed = options.lambda_fixed.has_value();

  FitResult out;
  out.lambda_fixed = fixed;
  out.n = data.n();
  out.warnings = std::move(warnings);

  if (fixed) theta0.lambda = *options.lambda_fixed;
  theta0.validate(p);

  const Eigen::Index k = fixed ? p + 1 : p + 2;
  const auto to_theta = [&](const Eigen::VectorXd& x) {
    ModelParams t;
    t.beta = x.head(p);
    t.alpha = std::exp(x(p));
    t.lambda = fixed ? *options.lambda_fixed : x(p + 1);
    return t;
  };

  const optim::Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const ModelParams t = to_theta(x);
    try {
      const double ll = loglik(data, t, lik);
      if (!std::isfinite(ll)) return std::numeric_limits<double>::infinity();
      const Eigen::VectorXd u = score(data, t, lik);
      g.head(p) = -u.head(p);
      g(p) = -t.alpha * u(p);
      if (!fixed) g(p + 1) = -u(p + 1);
      return -ll;
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const optim::StationarityMeasure measure = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
    Eigen::VectorXd u = g;
    u(p) /= std::exp(x(p));
    return original_scale_norm(u);
  };

  Eigen::VectorXd x0(k);
  x0.head(p) = theta0.beta;
  x0(p) = std::log(theta0.alpha);
  if (!fixed) x0(p + 1) = theta0.lambda;

  optim::BfgsOptions bo;
  bo.grad_tol = options.grad_tol;
  bo.rel_f_tol = options.rel_loglik_tol;
  bo.max_iter = options.max_iter;
  const optim::BfgsResult bfgs = optim::minimize_bfgs(objective, x0, bo, measure);
  if (!std::isfinite(bfgs.f)) throw ConvergenceError("log-likelihood is not finite at the starting values");

  ModelParams theta = to_theta(bfgs.x);
  double ll = -bfgs.f;
  double stat = bfgs.stationarity;
  bool converged = bfgs.converged;
  int iterations = bfgs.iterations;

  if (options.newton_polish && !converged) {
    // Safeguarded Newton on the observed information, original parameterization.
    double rel_change = std::numeric_limits<double>::infinity();
    for (int step = 0; step < 50; ++step) {
      const Eigen::VectorXd u = restrict_vector(score(data, theta, lik), fixed);
      stat = original_scale_norm(u);
      if (stat < options.grad_tol && rel_change < options.rel_loglik_tol) {
        converged = true;
        break;
      }
      const Eigen::LLT<Eigen::MatrixXd> llt(restrict_matrix(observed_information(data, theta, lik), fixed));
      if (llt.info() != Eigen::Success) break;
      const Eigen::VectorXd delta = llt.solve(u);
      bool accepted = false;
      for (double t = 1.0; t > 1e-10; t *= 0.5) {
        ModelParams cand = theta;
        cand.beta += t * delta.head(p);
        cand.alpha += t * delta(p);
        if (!fixed) cand.lambda += t * delta(p + 1);
        if (!(cand.alpha > 0.0)) continue;
        const double cand_ll = loglik(data, cand, lik);
        if (std::isfinite(cand_ll) && cand_ll >= ll - 1e-12 * std::abs(ll)) {
          rel_change = std::abs(cand_ll - ll) / std::max(1.0, std::abs(cand_ll));
          theta = cand;
          ll = cand_ll;
          accepted = true;
          break;
        }
      }
      ++iterations;
      if (!accepted) break;
    }
  }

  const Eigen::MatrixXd full_info = observed_information(data, theta, lik);
  const Eigen::MatrixXd info = restrict_matrix(full_info, fixed);
  Eigen::MatrixXd cov;
  const Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() == Eigen::Success) {
    cov = llt.solve(Eigen::MatrixXd::Identity(k, k));
  } else {
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
    if (!lu.isInvertible()) throw SingularityError("observed information is singular at the estimate");
    cov = lu.inverse();
    out.warnings.push_back("observed information is not positive definite at the estimate");
  }

  out.se = Eigen::VectorXd::Constant(p + 2, kNaN);
  for (Eigen::Index j = 0; j < k; ++j) out.se(j) = cov(j, j) > 0.0 ? std::sqrt(cov(j, j)) : kNaN;

  out.theta_hat = theta;
  out.loglik_hat = ll;
  out.converged = converged;
  out.iterations = iterations;
  out.grad_norm_at_solution = original_scale_norm(restrict_vector(score(data, theta, lik), fixed));
  out.information = info;
  out.n_params = static_cast<int>(k);
  const double n = static_cast<double>(data.n());
  const double kk = static_cast<double>(k);
  out.aic = -2.0 * ll + 2.0 * kk;
  out.bic = -2.0 * ll + kk * std::log(n);
  out.hqic = -2.0 * ll + 2.0 * kk * std::log(std::log(n));
  if (!converged) out.warnings.push_back("optimizer stopped before meeting the convergence criteria");
  return out;
}

bool better(const FitResult& a, const FitResult& b) {
  if (a.converged != b.converged) return a.converged;
  return a.loglik_hat > b.loglik_hat;
}

}  // namespace

FitResult fit(const Dataset& data, const FitOptions& options, const std::optional<ModelParams>& start) {
  if (options.weights.size() != 0 && options.weights.size() != data.n())
    throw DomainError("case weights must have one entry per observation");
  if (options.max_iter < 0) throw DomainError("max_iter must be non-negative");

  RuleHolder holder;
  LikelihoodOptions lik;
  lik.rule = holder.get(options.quad_order);
  lik.weights = options.weights;
  lik.policy = options.policy;

  if (start) return fit_from(data, options, lik, *start, {});

  std::vector<std::string> warnings;
  const ModelParams theta0 = starting_values(data, &warnings);
  FitResult best = fit_from(data, options, lik, theta0, warnings);
  if (options.lambda_fixed || !options.multi_start) return best;

  // The profile likelihood in lambda can have a second mode of the opposite sign.
  for (const double l0 : kExtraLambdaStarts) {
    ModelParams t = theta0;
    t.lambda = l0;
    try {
      FitResult alt = fit_from(data, options, lik, t, warnings);
      if (better(alt, best)) best = std::move(alt);
    } catch (const std::exception&) {
    }
  }
  return best;
}

FitResult fit_restricted(const Dataset& data, FitOptions options) {
  options.lambda_fixed = 0.0;
  return fit(data, options);
}

LrTestResult lr_test(const FitResult& full, const FitResult& restricted, double tol) {
  if (full.n != restricted.n) throw InvalidPair("fits were computed on datasets of different size");
  const double diff = full.loglik_hat - restricted.loglik_hat;
  if (diff < -tol)
    throw InvalidPair("restricted log-likelihood exceeds the full-model log-likelihood by " + std::to_string(-diff));
  LrTestResult out;
  out.statistic = std::max(0.0, 2.0 * diff);
  out.reject = out.statistic > out.critical_5pct;
  return out;
}

std::vector<RelativeChangeRow> relative_changes(const Dataset& data, const FitResult& baseline,
                                                const std::vector<Eigen::Index>& drop, const FitOptions& options) {
  std::set<Eigen::Index> seen;
  for (Eigen::Index i : drop) {
    if (i < 0 || i >= data.n())
      throw DomainError("case index " + std::to_string(i + 1) + " is outside 1.." + std::to_string(data.n()));
    if (!seen.insert(i).second) throw DomainError("case index " + std::to_string(i + 1) + " is repeated");
  }
  if (options.weights.size() != 0 && options.weights.size() != data.n())
    throw DomainError("case weights must have one entry per observation");

  const Eigen::VectorXd base = baseline.theta_hat.to_vector();
  const auto m = static_cast<std::ptrdiff_t>(drop.size());
  std::vector<RelativeChangeRow> rows(drop.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < m; ++r) {
    RelativeChangeRow& row = rows[static_cast<std::size_t>(r)];
    const Eigen::Index i = drop[static_cast<std::size_t>(r)];
    row.dropped_index = i;
    row.rc = Eigen::VectorXd::Constant(base.size(), kNaN);
    row.rc_undefined.assign(static_cast<std::size_t>(base.size()), false);
    row.se_after = Eigen::VectorXd::Constant(base.size(), kNaN);
    try {
      FitOptions opts = options;
      opts.policy = ExecPolicy::Serial;
      if (baseline.lambda_fixed && !opts.lambda_fixed) opts.lambda_fixed = baseline.theta_hat.lambda;
      if (opts.weights.size() != 0) {
        Eigen::VectorXd w(data.n() - 1);
        w << opts.weights.head(i), opts.weights.tail(data.n() - 1 - i);
        opts.weights = w;
      }
      const FitResult refit = fit(data.without(i), opts, baseline.theta_hat);
      row.theta_after = refit.theta_hat;
      row.se_after = refit.se;
      row.converged = refit.converged;
      if (!refit.converged) row.error = "ConvergenceError: refit did not converge";
      const Eigen::VectorXd after = refit.theta_hat.to_vector();
      for (Eigen::Index j = 0; j < base.size(); ++j) {
        if (base(j) == 0.0) {
          row.rc_undefined[static_cast<std::size_t>(j)] = true;
        } else {
          row.rc(j) = std::abs((base(j) - after(j)) / base(j));
        }
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  return rows;
}

}  // namespace skewbs
