// SPDX-License-Identifier: Apache-2.0
#include "slbfgs/line_search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slbfgs {

void LineSearchConfig::validate() const {
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw std::invalid_argument("line search: sigma must lie in (0,1)");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("line search: beta must lie in (0,1)");
  }
  if (kind != LineSearchKind::armijo && !(eta > sigma && eta < 1.0)) {
    throw std::invalid_argument("line search: eta must lie in (sigma,1)");
  }
  if (max_steps < 1 || max_fev < 1) {
    throw std::invalid_argument("line search: iteration limits must be positive");
  }
}

LineSearchResult armijo_backtrack(const ScalarFn& phi, double phi0,
                                  double slope0, const LineSearchConfig& cfg) {
  if (!(slope0 < 0.0)) {
    throw std::invalid_argument("armijo_backtrack: not a descent direction");
  }
  LineSearchResult res;
  double alpha = 1.0;
  for (int i = 0; i < cfg.max_steps; ++i) {
    if (i > 0) alpha *= cfg.beta;
    const double value = phi(alpha);
    ++res.n_evals;
    res.alpha = alpha;
    res.value = value;
    if (value <= phi0 + alpha * cfg.sigma * slope0) {
      res.success = true;
      return res;
    }
  }
  return res;
}

namespace {

struct Point {
  double a;
  double f;
  double g;
};

// Minimizer of the cubic interpolating (a, f, g) at both ends, or NaN if the
// cubic has no interior minimizer.
double cubic_minimizer(const Point& p, const Point& q) {
  const double d1 = p.g + q.g - 3.0 * (p.f - q.f) / (p.a - q.a);
  const double rad = d1 * d1 - p.g * q.g;
  if (!(rad >= 0.0)) return std::nan("");
  const double d2 = std::copysign(std::sqrt(rad), q.a - p.a);
  const double denom = q.g - p.g + 2.0 * d2;
  if (denom == 0.0) return std::nan("");
  return q.a - (q.a - p.a) * (q.g + d2 - d1) / denom;
}

}  // namespace

LineSearchResult wolfe_search(const ScalarFn& phi, const ScalarFn& dphi,
                              double phi0, double slope0,
                              const LineSearchConfig& cfg) {
  if (!(slope0 < 0.0)) {
    throw std::invalid_argument("wolfe_search: not a descent direction");
  }
  if (cfg.kind == LineSearchKind::armijo) {
    throw std::invalid_argument("wolfe_search: configured for Armijo");
  }

  LineSearchResult res;
  auto eval = [&](double a) {
    Point p{a, phi(a), dphi(a)};
    ++res.n_evals;
    ++res.n_grad_evals;
    return p;
  };
  auto armijo_ok = [&](const Point& p) {
    return p.f <= phi0 + p.a * cfg.sigma * slope0;
  };
  auto curvature_ok = [&](const Point& p) {
    if (cfg.kind == LineSearchKind::strong_wolfe) {
      return std::abs(p.g) <= cfg.eta * std::abs(slope0);
    }
    return p.g >= cfg.eta * slope0;
  };
  auto finish = [&](const Point& p, bool ok) {
    res.alpha = p.a;
    res.value = p.f;
    res.success = ok;
    return res;
  };

  auto zoom = [&](Point lo, Point hi) {
    while (res.n_evals < cfg.max_fev) {
      const double width = std::abs(hi.a - lo.a);
      if (width <= cfg.xtol * std::max(lo.a, hi.a)) break;
      const double left = std::min(lo.a, hi.a);
      const double right = std::max(lo.a, hi.a);
      double a = cubic_minimizer(lo, hi);
      if (!std::isfinite(a) || a < left + 0.1 * width ||
          a > right - 0.1 * width) {
        a = 0.5 * (lo.a + hi.a);
      }
      const Point p = eval(a);
      if (!armijo_ok(p) || !(p.f < lo.f)) {
        hi = p;
      } else {
        if (curvature_ok(p)) return finish(p, true);
        if (p.g * (hi.a - lo.a) >= 0.0) hi = lo;
        lo = p;
      }
    }
    // lo always satisfies the Armijo condition (or is the origin).
    return finish(lo, false);
  };

  Point prev{0.0, phi0, slope0};
  double a = std::min(1.0, cfg.step_max);
  for (int i = 0; res.n_evals < cfg.max_fev; ++i) {
    const Point p = eval(a);
    if (!armijo_ok(p) || (i > 0 && p.f >= prev.f)) return zoom(prev, p);
    if (curvature_ok(p)) return finish(p, true);
    if (p.g >= 0.0) return zoom(p, prev);
    if (a >= cfg.step_max) return finish(p, false);
    prev = p;
    a = std::min(2.0 * a, cfg.step_max);
  }
  return finish(prev, false);
}

}  // namespace slbfgs
