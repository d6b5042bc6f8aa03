#include "slbfgs/optimizer.hpp"
#include "slbfgs/problems.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace slbfgs;

namespace {

/// J(x) = 1/2 |x - 1|^2 with no regularizer.
Problem shifted_square(Eigen::Index n) {
  Problem p;
  p.dimension = n;
  p.evaluate = [](const Vector& x) { return 0.5 * (x.array() - 1.0).matrix().squaredNorm(); };
  p.gradient = [](const Vector& x) -> Vector { return x.array() - 1.0; };
  return p;
}

/// Diagonal quadratic with a spread spectrum and no regularizer.
Problem diagonal_quadratic(Eigen::Index n) {
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = std::pow(10.0, -2.0 * i / double(n - 1));
  Problem p;
  p.dimension = n;
  p.evaluate = [d](const Vector& x) { return 0.5 * x.dot(d.cwiseProduct(x)); };
  p.gradient = [d](const Vector& x) -> Vector { return d.cwiseProduct(x); };
  return p;
}

OptimizerConfig config(SeedStrategy s, std::optional<std::size_t> memory) {
  OptimizerConfig cfg;
  cfg.strategy = s;
  cfg.memory = memory;
  return cfg;
}

bool in_band(long measured, long paper) { return 2 * measured >= paper && measured <= 2 * paper; }

}  // namespace

TEST_CASE("one step on the shifted square") {
  for (SeedStrategy s : {SeedStrategy::bs, SeedStrategy::hy, SeedStrategy::hs, SeedStrategy::adap}) {
    const OptimizeResult r = minimize(shifted_square(3), Vector::Zero(3), config(s, 5));
    CHECK(r.status == Status::converged_gradient);
    CHECK(r.iterations() == 1);
    CHECK((r.x - Vector::Ones(3)).norm() == 0.0);
    REQUIRE(r.trace.size() == 2);
    CHECK(r.trace[0].alpha == 1.0);
    CHECK_FALSE(r.trace[1].alpha);
  }
}

TEST_CASE("stationary start takes no step") {
  const OptimizeResult r = minimize(shifted_square(2), Vector::Ones(2), config(SeedStrategy::bs, 5));
  CHECK(r.status == Status::converged_gradient);
  CHECK(r.iterations() == 0);
  CHECK(r.trace.size() == 1);
}

TEST_CASE("empty memory without regularizer is a safeguarded BB method") {
  OptimizerConfig cfg = config(SeedStrategy::bs, 0);
  cfg.record_iterates = true;
  cfg.max_iter = 40;
  const Problem p = diagonal_quadratic(6);
  const OptimizeResult r = minimize(p, Vector::Ones(6), cfg);
  REQUIRE(r.directions.size() >= 5);
  for (std::size_t k = 0; k < r.directions.size(); ++k) {
    const Vector expect = -p.gradient(r.iterates[k]) / r.trace[k].tau;
    CHECK((r.directions[k] - expect).norm() <= 1e-14 * expect.norm());
    CHECK(r.trace[k].pair_accepted == false);
  }
  // Each tau after the first is the safeguarded Rayleigh quotient of the step.
  for (std::size_t k = 0; k + 1 < r.trace.size() && r.trace[k + 1].alpha; ++k) {
    const auto& rec = r.trace[k];
    const double raw = rec.curvature / rec.s_norm_sq;
    CHECK(r.trace[k + 1].tau == doctest::Approx(std::clamp(raw, *rec.omega_l, *rec.omega_u)));
  }
}

TEST_CASE("grid quadratic with a structured seed") {
  const QuadraticProblem q = make_quadratic(4, 1e-1);
  const OptimizeResult r = minimize(q.problem, Vector::Zero(16), config(SeedStrategy::bs, 5));
  CHECK(r.status == Status::converged_gradient);
  CHECK(r.trace.back().grad_norm <= 1e-13);
  CHECK(in_band(r.iterations(), 28));
  CHECK(r.fallback_count == 0);
}

TEST_CASE("grid quadratic with classical seeds") {
  const QuadraticProblem q = make_quadratic(4, 1e-1);
  const OptimizeResult hs = minimize(q.problem, Vector::Zero(16), config(SeedStrategy::hs, 5));
  const OptimizeResult hy = minimize(q.problem, Vector::Zero(16), config(SeedStrategy::hy, 5));
  CHECK(hs.status == Status::converged_gradient);
  CHECK(hy.status == Status::converged_gradient);
  const long hs_iterations = hs.iterations();
  const long hy_iterations = hy.iterations();
  CHECK_MESSAGE(in_band(hs_iterations, 87), "Hs iterations: " << hs_iterations);
  CHECK_MESSAGE(in_band(hy_iterations, 91), "Hy iterations: " << hy_iterations);
}

TEST_CASE("krylov seed solves never need the fallback on the grid quadratic") {
  for (double alpha : {1e-5, 1e-3, 1e-1}) {
    for (std::optional<std::size_t> mem : {std::optional<std::size_t>(3), std::optional<std::size_t>(5),
                                           std::optional<std::size_t>(10), std::optional<std::size_t>()}) {
      for (SeedStrategy s : {SeedStrategy::bs, SeedStrategy::bz, SeedStrategy::bu, SeedStrategy::bg,
                             SeedStrategy::adap}) {
        const QuadraticProblem q = make_quadratic(4, alpha);
        OptimizerConfig cfg = config(s, mem);
        cfg.inner = {SeedSolve::Mode::krylov, 50, 1e-2};
        const OptimizeResult r = minimize(q.problem, Vector::Zero(16), cfg);
        CHECK(r.fallback_count == 0);
        CHECK(is_converged(r.status));
        for (const auto& rec : r.trace) {
          if (rec.alpha) CHECK(rec.inner);
        }
      }
    }
  }
}

TEST_CASE("exact seed solves never need the fallback") {
  const QuadraticProblem q = make_quadratic(4, 1e-3);
  for (SeedStrategy s : {SeedStrategy::bs, SeedStrategy::bz, SeedStrategy::bu, SeedStrategy::bg,
                         SeedStrategy::adap, SeedStrategy::hs, SeedStrategy::hy}) {
    const OptimizeResult r = minimize(q.problem, Vector::Zero(16), config(s, 5));
    CHECK(r.fallback_count == 0);
  }
}

TEST_CASE("fallback on a non-descent direction") {
  const OperatorPtr lap = laplacian_2d(2);
  const SeedApplier seed = SeedApplier::structured(0.5, *lap);
  Vector g(4);
  g << 1, -2, 3, 0.5;
  const Memory mem(5);
  int calls = 0;
  DirectionFn uphill = [&](const Vector& grad, const Memory&, const SeedApplier&, SolveStats*) {
    ++calls;
    return Vector(grad);
  };
  const DirectionChoice c = choose_direction_with_fallback(g, mem, seed, uphill);
  CHECK(c.fallback_used);
  CHECK(calls == 1);
  CHECK(g.dot(c.d) < 0.0);
  CHECK((c.d + g.cwiseQuotient(Vector::Constant(4, 4.5))).norm() <= 1e-15);

  calls = 0;
  const SeedApplier krylov = SeedApplier::structured(0.5, *lap, {SeedSolve::Mode::krylov, 50, 1e-2});
  const DirectionChoice k = choose_direction_with_fallback(g, mem, krylov, uphill);
  CHECK(k.retried);
  CHECK(k.fallback_used);
  CHECK(calls == 2);

  const DirectionChoice ok = choose_direction_with_fallback(g, mem, seed);
  CHECK_FALSE(ok.fallback_used);
  CHECK(g.dot(ok.d) < 0.0);
}

TEST_CASE("stopping rules") {
  StoppingRule rule;
  IterationRecord prev, curr;
  prev.J = 1.0;
  curr.J = 1.0;
  curr.grad_norm = 0.0;
  const Vector x = Vector::Zero(2);
  CHECK(check_stopping(nullptr, curr, nullptr, x, rule, 1.0) == StopDecision::gradient);
  rule.grad_tol = 0.0;
  CHECK(check_stopping(nullptr, curr, nullptr, x, rule, 1.0) == StopDecision::gradient);

  rule.grad_tol = -1.0;
  rule.fair_triple = true;
  const double j0 = 1.0;
  Vector x_prev = x;
  curr.grad_norm = 1e-4;
  curr.J = 1.0 + 1e-6;
  CHECK(check_stopping(&prev, curr, &x_prev, x, rule, j0) == StopDecision::fair);
  CHECK(check_stopping(nullptr, curr, nullptr, x, rule, j0) == StopDecision::proceed);
  // Two of three.
  curr.grad_norm = 1.0;
  CHECK(check_stopping(&prev, curr, &x_prev, x, rule, j0) == StopDecision::proceed);
  curr.grad_norm = 1e-4;
  curr.J = 2.0;
  CHECK(check_stopping(&prev, curr, &x_prev, x, rule, j0) == StopDecision::proceed);
  curr.J = 1.0;
  x_prev = Vector::Constant(2, 1.0);
  CHECK(check_stopping(&prev, curr, &x_prev, x, rule, j0) == StopDecision::proceed);
}

TEST_CASE("iteration cap and non-finite values") {
  const QuadraticProblem q = make_quadratic(4, 1e-5);
  OptimizerConfig cfg = config(SeedStrategy::bs, 3);
  cfg.max_iter = 7;
  const OptimizeResult capped = minimize(q.problem, Vector::Zero(16), cfg);
  CHECK(capped.status == Status::max_iterations);
  CHECK(capped.iterations() == 7);

  Problem p = shifted_square(2);
  p.gradient = [](const Vector& x) -> Vector {
    if (x[0] > 0.25) return Vector::Constant(2, std::nan(""));
    return x.array() - 1.0;
  };
  const OptimizeResult bad = minimize(p, Vector::Zero(2), config(SeedStrategy::bs, 5));
  CHECK(bad.status == Status::non_finite);
  REQUIRE(bad.offending_iterate);
  CHECK((*bad.offending_iterate)[0] > 0.25);
  CHECK(bad.x.allFinite());
}

TEST_CASE("runs are deterministic") {
  const QuadraticProblem q = make_quadratic(4, 1e-3);
  for (SeedStrategy s : {SeedStrategy::adap, SeedStrategy::hs}) {
    const OptimizeResult a = minimize(q.problem, Vector::Zero(16), config(s, 5));
    const OptimizeResult b = minimize(q.problem, Vector::Zero(16), config(s, 5));
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
      CHECK(a.trace[k].J == b.trace[k].J);
      CHECK(a.trace[k].tau == b.trace[k].tau);
    }
  }
}

TEST_CASE("quadratic shortcut for z gives the same run") {
  const QuadraticProblem q = make_quadratic(4, 1e-1);
  OptimizerConfig a = config(SeedStrategy::bu, 5);
  OptimizerConfig b = a;
  b.use_quadratic_shortcut = true;
  const OptimizeResult ra = minimize(q.problem, Vector::Zero(16), a);
  const OptimizeResult rb = minimize(q.problem, Vector::Zero(16), b);
  CHECK(rb.status == Status::converged_gradient);
  REQUIRE(ra.trace.size() > 10);
  REQUIRE(rb.trace.size() > 10);
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(rb.trace[k].tau == doctest::Approx(ra.trace[k].tau).epsilon(1e-8));
  }
}

TEST_CASE("strategy names and config validation") {
  for (const char* name : {"hs", "hy", "bs", "bz", "bu", "bg", "adap"}) {
    CHECK(to_string(parse_strategy(name)) == name);
  }
  CHECK_THROWS_AS(parse_strategy("bp"), std::invalid_argument);
  CHECK_FALSE(is_structured(SeedStrategy::hy));
  CHECK(is_structured(SeedStrategy::adap));

  OptimizerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.cautious.c_s = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.cautious.C0 = 1e-9;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.tau0 = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.strategy = SeedStrategy::hs;
  CHECK_THROWS_AS(slbfgs_minimize(shifted_square(1), Vector::Zero(1), cfg), std::invalid_argument);
  cfg.strategy = SeedStrategy::bs;
  CHECK_THROWS_AS(lbfgs_minimize(shifted_square(1), Vector::Zero(1), cfg), std::invalid_argument);
  CHECK_THROWS_AS(minimize(shifted_square(2), Vector::Zero(3), cfg), std::invalid_argument);
}
