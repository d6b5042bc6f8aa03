// SPDX-License-Identifier: Apache-2.0
#include "slbfgs/optimizer.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>

namespace slbfgs {

std::string_view to_string(SeedStrategy s) {
  switch (s) {
    case SeedStrategy::hs: return "hs";
    case SeedStrategy::hy: return "hy";
    case SeedStrategy::bs: return "bs";
    case SeedStrategy::bz: return "bz";
    case SeedStrategy::bu: return "bu";
    case SeedStrategy::bg: return "bg";
    case SeedStrategy::adap: return "adap";
  }
  return "?";
}

SeedStrategy parse_strategy(std::string_view name) {
  for (SeedStrategy s : {SeedStrategy::hs, SeedStrategy::hy, SeedStrategy::bs,
                         SeedStrategy::bz, SeedStrategy::bu, SeedStrategy::bg,
                         SeedStrategy::adap}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown seed strategy: " + std::string(name));
}

bool is_structured(SeedStrategy s) {
  return s != SeedStrategy::hs && s != SeedStrategy::hy;
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::converged_gradient: return "converged_gradient";
    case Status::converged_fair: return "converged_fair";
    case Status::max_iterations: return "max_iterations";
    case Status::line_search_failure: return "line_search_failure";
    case Status::non_finite: return "non_finite";
  }
  return "?";
}

bool is_converged(Status s) {
  return s == Status::converged_gradient || s == Status::converged_fair;
}

void OptimizerConfig::validate() const {
  const auto& c = cautious;
  if (!(c.c_s > 0.0) || !(c.c1 > 0.0) || !(c.c2 > 0.0)) {
    throw std::invalid_argument("config: c_s, c1, c2 must be positive");
  }
  if (!(c.c0 >= 0.0) || !(c.C0 >= c.c0)) {
    throw std::invalid_argument("config: need 0 <= c0 <= C0");
  }
  if (!(tau0 > 0.0) || !std::isfinite(tau0)) {
    throw std::invalid_argument("config: tau0 must be positive and finite");
  }
  if (max_iter < 0) {
    throw std::invalid_argument("config: max_iter must be nonnegative");
  }
  if (stopping.grad_tol < 0.0 && !stopping.fair_triple) {
    throw std::invalid_argument("config: no stopping rule active");
  }
  if (inner.mode == SeedSolve::Mode::krylov &&
      (inner.maxiter < 1 || !(inner.tol > 0.0))) {
    throw std::invalid_argument("config: inner solver needs maxiter >= 1, tol > 0");
  }
  line_search.validate();
}

DirectionChoice choose_direction_with_fallback(const Vector& grad,
                                               const Memory& mem,
                                               const SeedApplier& seed,
                                               const DirectionFn& direction_fn) {
  auto compute = [&](const SeedApplier& s, SolveStats* stats) {
    return direction_fn ? direction_fn(grad, mem, s, stats)
                        : two_loop(grad, mem, s, stats);
  };

  DirectionChoice out;
  out.d = compute(seed, &out.inner);
  if (grad.dot(out.d) < 0.0 && out.d.allFinite()) return out;

  if (seed.is_structured() && seed.solve().mode == SeedSolve::Mode::krylov) {
    out.retried = true;
    out.d = compute(seed.with_tolerance_scaled(0.1), &out.inner);
    if (grad.dot(out.d) < 0.0 && out.d.allFinite()) return out;
  }

  out.fallback_used = true;
  out.d = -grad.cwiseQuotient(seed.seed_diagonal(grad.size()));
  return out;
}

StopDecision check_stopping(const IterationRecord* prev,
                            const IterationRecord& curr, const Vector* x_prev,
                            const Vector& x_curr, const StoppingRule& rule,
                            double j0) {
  if (rule.grad_tol >= 0.0 && curr.grad_norm <= rule.grad_tol) {
    return StopDecision::gradient;
  }
  if (rule.fair_triple && prev && x_prev) {
    const double scale = 1.0 + std::abs(j0);
    const bool dj = std::abs(curr.J - prev->J) <= rule.tol_j * scale;
    const bool dx = (x_curr - *x_prev).norm() <= rule.tol_x * (1.0 + x_curr.norm());
    const bool dg = curr.grad_norm <= rule.tol_g * scale;
    if (dj && dx && dg) return StopDecision::fair;
  }
  return StopDecision::proceed;
}

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

struct StepOutcome {
  LineSearchResult ls;
  bool decreased = false;
  std::optional<Vector> grad_at_alpha;  // from Wolfe, if last evaluated there
};

class Driver {
 public:
  Driver(const Problem& problem, const OptimizerConfig& cfg, bool classical)
      : p_(problem), cfg_(cfg), classical_(classical), mem_(cfg.memory) {}

  OptimizeResult run(const Vector& x0);

 private:
  double eval(const Vector& x) {
    ++result_.n_fevals;
    return p_.evaluate(x);
  }
  Vector grad(const Vector& x) {
    ++result_.n_gevals;
    return p_.gradient(x);
  }
  OperatorPtr reg_hessian(const Vector& x) const {
    if (p_.regularizer_hessian) return p_.regularizer_hessian(x);
    return std::make_shared<ZeroOperator>(x.size());
  }

  StepOutcome line_search(const Vector& x, double J, const Vector& d,
                          double slope);
  double next_tau(const ScalingSet& fs, int nu, double j_prev, double j_curr,
                  long k);

  const Problem& p_;
  const OptimizerConfig& cfg_;
  bool classical_;
  Memory mem_;
  AdapState adap_;
  OptimizeResult result_;
};

StepOutcome Driver::line_search(const Vector& x, double J, const Vector& d,
                                double slope) {
  StepOutcome out;
  Vector trial(x.size());
  auto phi = [&](double a) {
    trial = x + a * d;
    const double v = eval(trial);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  if (cfg_.line_search.kind == LineSearchKind::armijo) {
    out.ls = armijo_backtrack(phi, J, slope, cfg_.line_search);
  } else {
    double last_a = std::numeric_limits<double>::quiet_NaN();
    Vector last_g;
    auto dphi = [&](double a) {
      trial = x + a * d;
      last_g = grad(trial);
      last_a = a;
      return last_g.allFinite() ? last_g.dot(d)
                                : std::numeric_limits<double>::quiet_NaN();
    };
    out.ls = wolfe_search(phi, dphi, J, slope, cfg_.line_search);
    if (last_a == out.ls.alpha) out.grad_at_alpha = std::move(last_g);
  }
  out.decreased = out.ls.alpha > 0.0 && out.ls.value < J;
  return out;
}

double Driver::next_tau(const ScalingSet& fs, int nu, double j_prev,
                        double j_curr, long k) {
  const bool positive = fs.rho > 0.0;
  switch (cfg_.strategy) {
    case SeedStrategy::bs:
      return fs.tau_s;
    case SeedStrategy::bg:
      return fs.tau_g;
    case SeedStrategy::bz:
      return positive ? *fs.tau_z : fs.tau_g;
    case SeedStrategy::bu:
      return positive ? *fs.tau_u : fs.tau_g;
    case SeedStrategy::adap: {
      const AdapResult r = adap_step(adap_, fs, nu, j_prev, j_curr, k, cfg_.adap);
      adap_ = r.state;
      return r.tau;
    }
    default:
      break;
  }
  throw std::logic_error("next_tau: classical strategy in structured driver");
}

OptimizeResult Driver::run(const Vector& x0) {
  if (x0.size() != p_.dimension) {
    throw std::invalid_argument("minimize: x0 has wrong dimension");
  }
  Vector x = x0;
  double J = eval(x);
  Vector g = grad(x);
  const double j0 = J;
  double tau = cfg_.tau0;

  auto finish = [&](IterationRecord last, Status status) {
    result_.trace.push_back(std::move(last));
    result_.status = status;
    result_.x = x;
    if (cfg_.record_iterates) result_.iterates.push_back(x);
    return std::move(result_);
  };
  auto fresh_record = [&](long k) {
    IterationRecord r;
    r.k = k;
    r.J = J;
    r.grad_norm = g.norm();
    r.tau = tau;
    return r;
  };

  if (!std::isfinite(J) || !g.allFinite()) {
    result_.offending_iterate = x;
    return finish(fresh_record(0), Status::non_finite);
  }
  if (cfg_.stopping.grad_tol >= 0.0 && g.norm() <= cfg_.stopping.grad_tol) {
    return finish(fresh_record(0), Status::converged_gradient);
  }

  OperatorPtr S = reg_hessian(x);
  if (classical_) S = std::make_shared<ZeroOperator>(x.size());
  // Classical seeds are applied as B0 = b I, with b the reciprocal quotient of tau.
  double classical_b = 1.0 / tau;

  for (long k = 0;; ++k) {
    IterationRecord rec = fresh_record(k);
    if (k >= cfg_.max_iter) return finish(std::move(rec), Status::max_iterations);

    const SeedApplier seed =
        SeedApplier::structured(classical_ ? classical_b : tau, *S, cfg_.inner);
    DirectionChoice dir = choose_direction_with_fallback(g, mem_, seed);
    if (!classical_) rec.inner = dir.inner;

    StepOutcome step = line_search(x, J, dir.d, g.dot(dir.d));
    if (!step.decreased && !dir.fallback_used) {
      // Retry once along the diagonally scaled gradient.
      dir.fallback_used = true;
      dir.d = -g.cwiseQuotient(seed.seed_diagonal(g.size()));
      const int first_evals = step.ls.n_evals;
      step = line_search(x, J, dir.d, g.dot(dir.d));
      step.ls.n_evals += first_evals;
    }
    rec.fallback_used = dir.fallback_used;
    if (dir.fallback_used) ++result_.fallback_count;
    rec.n_ls = step.ls.n_evals;
    if (!step.decreased) {
      return finish(std::move(rec), Status::line_search_failure);
    }

    const double alpha = step.ls.alpha;
    rec.alpha = alpha;
    Vector x_new = x + alpha * dir.d;
    const double J_new = step.ls.value;
    Vector g_new = step.grad_at_alpha ? std::move(*step.grad_at_alpha) : grad(x_new);
    if (cfg_.record_iterates) {
      result_.iterates.push_back(x);
      result_.directions.push_back(dir.d);
    }
    if (!std::isfinite(J_new) || !g_new.allFinite()) {
      result_.trace.push_back(std::move(rec));
      result_.offending_iterate = x_new;
      result_.status = Status::non_finite;
      result_.x = x;
      return std::move(result_);
    }

    const Vector s = x_new - x;
    const Vector y = g_new - g;
    if (s.squaredNorm() == 0.0) {
      return finish(std::move(rec), Status::line_search_failure);
    }
    rec.curvature = s.dot(y);
    rec.s_norm_sq = s.squaredNorm();
    rec.pair_accepted =
        try_store(mem_, s, y, classical_ ? 0.0 : cfg_.cautious.c_s);

    IterationRecord next_rec;
    next_rec.k = k + 1;
    next_rec.J = J_new;
    next_rec.grad_norm = g_new.norm();
    const StopDecision stop =
        check_stopping(&rec, next_rec, &x, x_new, cfg_.stopping, j0);

    if (classical_) {
      rec.rho_sign = sign_of(rec.curvature);
      if (stop == StopDecision::proceed && rec.curvature > 0.0) {
        const BBFactors bb = bb_factors(s, y);
        const bool hs = cfg_.strategy == SeedStrategy::hs;
        tau = hs ? bb.tau_hat_s : bb.tau_hat_y;
        classical_b = hs ? rec.curvature / rec.s_norm_sq : y.squaredNorm() / rec.curvature;
      }
      rec.tau_next = tau;
    } else if (stop == StopDecision::proceed) {
      OperatorPtr S_next = reg_hessian(x_new);
      const Vector z = cfg_.use_quadratic_shortcut && p_.data_gradient
                           ? Vector(p_.data_gradient(x_new) - p_.data_gradient(x))
                           : Vector(y - S_next->apply(s));
      const auto& c = cfg_.cautious;
      const SafeguardInterval sg = safeguards(next_rec.grad_norm, c.c0, c.C0, c.c1, c.c2);
      const ScalingSet fs = structured_factors(s, z, sg.omega_l, sg.omega_u);
      rec.rho_sign = sign_of(fs.rho);
      rec.omega_l = sg.omega_l;
      rec.omega_u = sg.omega_u;
      rec.tau_lo = fs.tau_s;
      rec.tau_hi = fs.rho > 0.0 ? *fs.tau_z : fs.tau_g;
      tau = next_tau(fs, rec.n_ls, J, J_new, k);
      rec.tau_next = tau;
      S = std::move(S_next);
    }

    result_.trace.push_back(std::move(rec));
    x = std::move(x_new);
    J = J_new;
    g = std::move(g_new);

    if (stop == StopDecision::gradient) {
      return finish(fresh_record(k + 1), Status::converged_gradient);
    }
    if (stop == StopDecision::fair) {
      return finish(fresh_record(k + 1), Status::converged_fair);
    }
  }
}

}  // namespace

OptimizeResult slbfgs_minimize(const Problem& problem, const Vector& x0,
                               const OptimizerConfig& cfg) {
  cfg.validate();
  if (!is_structured(cfg.strategy)) {
    throw std::invalid_argument("slbfgs_minimize: strategy must be structured");
  }
  return Driver(problem, cfg, false).run(x0);
}

OptimizeResult lbfgs_minimize(const Problem& problem, const Vector& x0,
                              const OptimizerConfig& cfg) {
  cfg.validate();
  if (is_structured(cfg.strategy)) {
    throw std::invalid_argument("lbfgs_minimize: strategy must be hs or hy");
  }
  return Driver(problem, cfg, true).run(x0);
}

OptimizeResult minimize(const Problem& problem, const Vector& x0,
                        const OptimizerConfig& cfg) {
  return is_structured(cfg.strategy) ? slbfgs_minimize(problem, x0, cfg)
                                     : lbfgs_minimize(problem, x0, cfg);
}

}  // namespace slbfgs
