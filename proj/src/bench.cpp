// SPDX-License-Identifier: Apache-2.0
#include "slbfgs/bench.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slbfgs {

double ProfileTable::rho(std::size_t method, double tau) const {
  if (ratios.rows() == 0) return 0.0;
  Eigen::Index hits = 0;
  for (Eigen::Index p = 0; p < ratios.rows(); ++p) {
    if (ratios(p, static_cast<Eigen::Index>(method)) <= tau) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ratios.rows());
}

ProfileTable performance_profile(const DenseMatrix& times,
                                 std::vector<std::string> methods,
                                 std::vector<std::string> problems,
                                 std::vector<double> tau_grid) {
  const Eigen::Index np = times.rows();
  const Eigen::Index ns = times.cols();
  if (!methods.empty() && static_cast<Eigen::Index>(methods.size()) != ns) {
    throw std::invalid_argument("performance_profile: method label count");
  }
  if (!problems.empty() && static_cast<Eigen::Index>(problems.size()) != np) {
    throw std::invalid_argument("performance_profile: problem label count");
  }

  ProfileTable t;
  t.methods = std::move(methods);
  t.problems = std::move(problems);
  t.ratios.resize(np, ns);
  std::vector<double> finite_ratios{1.0};
  for (Eigen::Index p = 0; p < np; ++p) {
    double best = kInf;
    for (Eigen::Index s = 0; s < ns; ++s) {
      const double v = times(p, s);
      if (!(v > 0.0)) {
        throw std::invalid_argument("performance_profile: metric must be > 0");
      }
      best = std::min(best, v);
    }
    if (!std::isfinite(best)) {
      throw std::invalid_argument("performance_profile: every method failed on a problem");
    }
    for (Eigen::Index s = 0; s < ns; ++s) {
      t.ratios(p, s) = times(p, s) / best;
      if (std::isfinite(t.ratios(p, s))) finite_ratios.push_back(t.ratios(p, s));
    }
  }

  if (tau_grid.empty()) {
    tau_grid = std::move(finite_ratios);
  }
  std::sort(tau_grid.begin(), tau_grid.end());
  tau_grid.erase(std::unique(tau_grid.begin(), tau_grid.end()), tau_grid.end());
  t.taus = std::move(tau_grid);

  t.curves.assign(static_cast<std::size_t>(ns), {});
  for (Eigen::Index s = 0; s < ns; ++s) {
    auto& curve = t.curves[static_cast<std::size_t>(s)];
    curve.reserve(t.taus.size());
    for (double tau : t.taus) curve.push_back(t.rho(static_cast<std::size_t>(s), tau));
  }
  return t;
}

NewtonDiagnostics newton_diagnostics(const Problem& problem,
                                     std::span<const Vector> iterates,
                                     std::span<const Vector> directions) {
  if (!problem.dense_hessian) {
    throw std::invalid_argument("newton_diagnostics: problem has no dense Hessian");
  }
  if (iterates.size() < directions.size()) {
    throw std::invalid_argument("newton_diagnostics: fewer iterates than directions");
  }
  NewtonDiagnostics out;
  out.cosine.reserve(directions.size());
  out.ratio.reserve(directions.size());
  for (std::size_t k = 0; k < directions.size(); ++k) {
    const Vector& x = iterates[k];
    const Vector& d = directions[k];
    const DenseMatrix h = problem.dense_hessian(x);
    const Eigen::FullPivLU<DenseMatrix> lu(h);
    if (!lu.isInvertible()) {
      throw std::domain_error("newton_diagnostics: singular Hessian");
    }
    const Vector dn = lu.solve(-problem.gradient(x));
    const double denom = d.norm() * dn.norm();
    out.cosine.push_back(denom > 0.0 ? std::clamp(d.dot(dn) / denom, -1.0, 1.0)
                                     : std::nan(""));
    out.ratio.push_back(dn.norm() > 0.0 ? d.norm() / dn.norm() : std::nan(""));
  }
  return out;
}

void attach_newton_diagnostics(std::vector<IterationRecord>& trace,
                               const NewtonDiagnostics& diag) {
  const std::size_t n = std::min(trace.size(), diag.cosine.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (std::isfinite(diag.cosine[k])) trace[k].cos_newton = diag.cosine[k];
    if (std::isfinite(diag.ratio[k])) trace[k].ratio_newton = diag.ratio[k];
  }
}

double estimate_q_factor(std::span<const double> gaps, int min_tail,
                         int* tail_length) {
  // Usable prefix: the iterations before the gap first drops under the floor.
  std::size_t usable = 0;
  while (usable < gaps.size() && gaps[usable] > kRateFloor) ++usable;
  const std::size_t start = 0;
  const std::size_t count = usable;
  if (static_cast<int>(count) < min_tail || count < 2) {
    throw std::domain_error("estimate_rate: tail too short");
  }
  const double first = gaps[start];
  const double last = gaps[usable - 1];
  if (!(last < first)) {
    throw std::domain_error("estimate_rate: no decrease over the tail");
  }
  if (tail_length) *tail_length = static_cast<int>(count);
  return std::pow(last / first, 1.0 / static_cast<double>(count - 1));
}

double log_slope(std::span<const double> values) {
  double n = 0.0, sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0.0)) continue;
    const double kk = static_cast<double>(k);
    const double y = std::log(values[k]);
    n += 1.0;
    sk += kk;
    sy += y;
    skk += kk * kk;
    sky += kk * y;
  }
  const double denom = n * skk - sk * sk;
  if (n < 2.0 || denom == 0.0) {
    throw std::domain_error("log_slope: need at least two positive values");
  }
  return (n * sky - sk * sy) / denom;
}

RateEstimate estimate_rate(const std::vector<IterationRecord>& trace,
                           double j_star, const Vector& x_star,
                           std::span<const Vector> iterates) {
  std::vector<double> gaps, grads;
  gaps.reserve(trace.size());
  grads.reserve(trace.size());
  for (const auto& r : trace) {
    gaps.push_back(r.J - j_star);
    grads.push_back(r.grad_norm);
  }
  RateEstimate est;
  est.q_factor = estimate_q_factor(gaps, 10, &est.tail_length);
  est.slope_grad = log_slope(grads);
  est.r_factor_grad = std::exp(est.slope_grad);
  if (!iterates.empty()) {
    std::vector<double> dist;
    dist.reserve(iterates.size());
    for (const auto& x : iterates) dist.push_back((x - x_star).norm());
    est.slope_x = log_slope(dist);
    est.r_factor_x = std::exp(*est.slope_x);
  }
  return est;
}

}  // namespace slbfgs
