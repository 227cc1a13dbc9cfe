#include "skewbs/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace skewbs::optim {

namespace {

struct Point {
  double a = 0.0;
  double f = 0.0;
  double d = 0.0;  // directional derivative
  Eigen::VectorXd x;
  Eigen::VectorXd g;
  bool valid = false;
};

class LineSearch {
 public:
  LineSearch(const Objective& f, const Eigen::VectorXd& x, const Eigen::VectorXd& p, const BfgsOptions& o)
      : f_(f), x_(x), p_(p), o_(o) {}

  Point eval(double a) {
    ++evals_;
    Point pt;
    pt.a = a;
    pt.x = x_ + a * p_;
    pt.g.resize(x_.size());
    pt.f = f_(pt.x, pt.g);
    pt.valid = std::isfinite(pt.f) && pt.g.allFinite();
    if (pt.valid) pt.d = pt.g.dot(p_);
    return pt;
  }

  // Returns a point satisfying the strong Wolfe conditions or, failing that, the
  // best point with sufficient decrease. An invalid point signals failure.
  Point run(const Point& start, double a_init) {
    f0_ = start.f;
    d0_ = start.d;
    Point prev = start;
    double a = a_init;
    for (int i = 0; evals_ < o_.max_line_search; ++i) {
      Point cur = eval(a);
      if (!cur.valid) {
        Point hi;
        hi.a = a;
        return zoom(prev, hi);
      }
      if (approx_wolfe(cur)) return cur;
      if (cur.f > f0_ + o_.c1 * cur.a * d0_ || (i > 0 && cur.f >= prev.f)) return zoom(prev, cur);
      if (std::abs(cur.d) <= -o_.c2 * d0_) return cur;
      if (cur.d >= 0.0) return zoom(cur, prev);
      prev = std::move(cur);
      a *= 2.0;
    }
    return prev.a > 0.0 ? prev : Point{};
  }

 private:
  // Approximate Wolfe conditions: near a minimizer the decrease in f drops below
  // rounding level, so progress is judged on the directional derivative instead.
  bool approx_wolfe(const Point& pt) const {
    return pt.f <= f0_ + kFTol * std::abs(f0_) && (2.0 * o_.c1 - 1.0) * d0_ >= pt.d &&
           std::abs(pt.d) <= -o_.c2 * d0_;
  }

  static constexpr double kFTol = 1e-12;

  static double cubic_min(const Point& lo, const Point& hi) {
    const double mid = 0.5 * (lo.a + hi.a);
    if (!hi.valid) return mid;
    const double d1 = lo.d + hi.d - 3.0 * (lo.f - hi.f) / (lo.a - hi.a);
    const double disc = d1 * d1 - lo.d * hi.d;
    if (!(disc >= 0.0)) return mid;
    const double d2 = std::copysign(std::sqrt(disc), hi.a - lo.a);
    const double a = hi.a - (hi.a - lo.a) * (hi.d + d2 - d1) / (hi.d - lo.d + 2.0 * d2);
    const double left = std::min(lo.a, hi.a);
    const double width = std::abs(hi.a - lo.a);
    if (!std::isfinite(a) || a < left + 0.1 * width || a > left + 0.9 * width) return mid;
    return a;
  }

  Point zoom(Point lo, Point hi) {
    while (evals_ < o_.max_line_search) {
      if (std::abs(hi.a - lo.a) <= 1e-14 * std::max(1.0, std::abs(lo.a))) break;
      Point cur = eval(cubic_min(lo, hi));
      if (!cur.valid) {
        hi = Point{};
        hi.a = cur.a;
        continue;
      }
      if (approx_wolfe(cur)) return cur;
      if (cur.f > f0_ + o_.c1 * cur.a * d0_ || cur.f >= lo.f) {
        hi = std::move(cur);
        continue;
      }
      if (std::abs(cur.d) <= -o_.c2 * d0_) return cur;
      if (cur.d * (hi.a - lo.a) >= 0.0) hi = lo;
      lo = std::move(cur);
    }
    return lo.a > 0.0 ? lo : Point{};
  }

  const Objective& f_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& p_;
  const BfgsOptions& o_;
  int evals_ = 0;
  double f0_ = 0.0;
  double d0_ = 0.0;
};

}  // namespace

BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options,
                         const StationarityMeasure& stationarity) {
  const auto measure = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
    return stationarity ? stationarity(x, g) : g.lpNorm<Eigen::Infinity>();
  };
  const Eigen::Index k = x0.size();

  BfgsResult res;
  Point cur;
  cur.x = std::move(x0);
  cur.g.resize(k);
  cur.f = f(cur.x, cur.g);
  if (!std::isfinite(cur.f) || !cur.g.allFinite()) {
    res.x = cur.x;
    res.f = cur.f;
    res.grad = cur.g;
    res.stationarity = std::numeric_limits<double>::infinity();
    res.message = "objective is not finite at the starting point";
    return res;
  }

  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(k, k);
  bool scaled = false;
  double stat = measure(cur.x, cur.g);
  double rel_change = std::numeric_limits<double>::infinity();

  int it = 0;
  int failures = 0;
  for (; it < options.max_iter; ++it) {
    Eigen::VectorXd p = -H * cur.g;
    double d = p.dot(cur.g);
    if (!(d < 0.0)) {
      H.setIdentity();
      scaled = false;
      p = -cur.g;
      d = p.dot(cur.g);
    }
    cur.a = 0.0;
    cur.d = d;
    const double a_init = scaled ? 1.0 : std::min(1.0, 1.0 / std::max(cur.g.lpNorm<Eigen::Infinity>(), 1e-300));

    LineSearch ls(f, cur.x, p, options);
    Point next = ls.run(cur, a_init);
    if (!next.valid) {
      if (scaled && ++failures < 2) {
        H.setIdentity();
        scaled = false;
        continue;
      }
      res.message = "line search failed";
      if (stat < options.grad_tol) rel_change = 0.0;
      break;
    }

    failures = 0;
    const Eigen::VectorXd s = next.x - cur.x;
    const Eigen::VectorXd y = next.g - cur.g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        H *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd Hy = H * y;
      const double yHy = y.dot(Hy);
      H += (rho * rho * yHy + rho) * s * s.transpose() - rho * (Hy * s.transpose() + s * Hy.transpose());
    }

    rel_change = std::abs(next.f - cur.f) / std::max(1.0, std::abs(next.f));
    cur = std::move(next);
    stat = measure(cur.x, cur.g);
    if (stat < options.grad_tol && rel_change < options.rel_f_tol) {
      ++it;
      break;
    }
  }

  res.x = cur.x;
  res.f = cur.f;
  res.grad = cur.g;
  res.stationarity = stat;
  res.iterations = it;
  res.converged = stat < options.grad_tol && rel_change < options.rel_f_tol;
  if (res.converged)
    res.message = "converged";
  else if (res.message.empty())
    res.message = "iteration limit reached";
  return res;
}

}  // namespace skewbs::optim
