#include "slbfgs/scaling.hpp"
#include "support/random.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace slbfgs;
using testing_support::random_vector;

namespace {

Vector vec(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("bb factors") {
  auto f = bb_factors(vec(1, 0), vec(2, 0));
  CHECK(f.tau_hat_y == doctest::Approx(0.5));
  CHECK(f.tau_hat_s == doctest::Approx(0.5));

  f = bb_factors(vec(1, 0), vec(1, 1));
  CHECK(f.tau_hat_y == doctest::Approx(0.5));
  CHECK(f.tau_hat_s == doctest::Approx(1.0));

  f = bb_factors(vec(1, 0), vec(-1, 1));
  CHECK(f.tau_hat_y == doctest::Approx(-0.5));
  CHECK(f.tau_hat_s == doctest::Approx(-1.0));

  CHECK_THROWS_AS(bb_factors(vec(1, 0), vec(0, 1)), std::domain_error);
}

TEST_CASE("proj") {
  CHECK(proj_interval(5, 1, 10) == 5);
  CHECK(proj_interval(0.5, 1, 10) == 1);
  CHECK(proj_interval(50, 1, 10) == 10);
  CHECK(proj_interval(3, 0, kInf) == 3);
  CHECK_THROWS_AS(proj_interval(1, 2, 1), std::invalid_argument);
}

TEST_CASE("structured factors examples") {
  auto f = structured_factors(vec(1, 0), vec(1, 1), 0.0, kInf);
  CHECK(f.rho == 1.0);
  CHECK(f.tau_s == doctest::Approx(1.0));
  CHECK(f.tau_g == doctest::Approx(std::sqrt(2.0)));
  REQUIRE(f.tau_z);
  CHECK(*f.tau_z == doctest::Approx(2.0));
  CHECK(f.lambda == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0));
  REQUIRE(f.tau_u);
  CHECK(*f.tau_u == doctest::Approx(1.618034).epsilon(1e-6));

  f = structured_factors(vec(2, 0), vec(1, 0), 0.0, kInf);
  CHECK(f.tau_s == doctest::Approx(0.5));
  CHECK(f.tau_g == doctest::Approx(0.5));
  CHECK(*f.tau_z == doctest::Approx(0.5));
  CHECK(*f.tau_u == doctest::Approx(0.5));

  f = structured_factors(vec(1, 0), vec(1, 1), 1.5, 1.9);
  CHECK(f.tau_s == doctest::Approx(1.5));
  CHECK(f.tau_g == doctest::Approx(1.5));
  CHECK(*f.tau_z == doctest::Approx(1.9));
  CHECK(*f.tau_u == doctest::Approx(1.618034).epsilon(1e-6));

  f = structured_factors(vec(1, 0), vec(0, 1), 0.0, kInf);
  CHECK(f.rho == 0.0);
  CHECK_FALSE(f.tau_z);
  CHECK_FALSE(f.tau_u);

  CHECK_THROWS_AS(structured_factors(vec(0, 0), vec(1, 1), 0, kInf), std::invalid_argument);
  CHECK_THROWS_AS(structured_factors(vec(1, 0), vec(1, 1), 2, 1), std::invalid_argument);
}

TEST_CASE("structured factor invariants on random pairs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = testing_support::uniform_int(rng, 1, 12);
    const Vector s = random_vector(rng, n);
    const Vector z = random_vector(rng, n);
    const double lo = trial % 3 == 0 ? 0.0 : u(rng) * 0.5;
    const double hi = trial % 4 == 0 ? kInf : lo + u(rng) * 5.0;
    const ScalingSet f = structured_factors(s, z, lo, hi);
    CHECK(f.tau_s >= lo);
    CHECK(f.tau_g <= hi);
    CHECK(bool(f.tau_z) == (f.rho != 0.0));
    if (f.rho > 0.0) {
      // Ties (collinear s, z) may differ in the last bit.
      const double r = 1 + 1e-12;
      CHECK(f.tau_s <= *f.tau_u * r);
      CHECK(*f.tau_u <= *f.tau_z * r);
      CHECK(f.tau_s <= f.tau_g * r);
      CHECK(f.tau_g <= *f.tau_z * r);
    } else {
      CHECK(f.tau_s == lo);
      CHECK(f.tau_s <= f.tau_g);
    }
  }
}

TEST_CASE("safeguards") {
  auto w = safeguards(10.0, 1e-6, 1e6, 1e-6, 1.0);
  CHECK(w.omega_l == doctest::Approx(1e-6));
  CHECK(w.omega_u == doctest::Approx(1e6));
  w = safeguards(1e-12, 1e-6, 1e6, 1e-6, 1.0);
  CHECK(w.omega_l == doctest::Approx(1e-18));
  CHECK(w.omega_u == doctest::Approx(1e18));
  for (double g : {0.0, 1e-8, 1.0, 1e8}) {
    w = safeguards(g, 0.0, 1e6, 1e-6, 1.0);
    CHECK(w.omega_l == 0.0);
    CHECK(w.omega_l <= w.omega_u);
  }
  CHECK(safeguards(0.0, 1e-6, 1e6, 1e-6, 1.0).omega_u == kInf);
}

TEST_CASE("adap controller") {
  const AdapParams p;
  ScalingSet f = structured_factors(vec(1, 0), vec(1, 1), 0.0, kInf);

  auto r = adap_step({}, f, 3, 1.0, 0.5, 0, p);
  CHECK(r.state.w_s == doctest::Approx(0.75));
  CHECK(r.state.w_g == doctest::Approx(0.25));
  CHECK(r.state.w_z == 0.0);
  CHECK(r.tau == doctest::Approx(std::pow(f.tau_s, 0.75) * std::pow(f.tau_g, 0.25)));

  // Medium progress: eps1 |J| < |dJ| <= eps0 |J|.
  r = adap_step({0.75, 0.25, 0.0}, f, 1, 1.0, 1.0 - 5e-4, 1, p);
  CHECK(r.state.w_s == doctest::Approx(0.65));
  CHECK(r.state.w_g == doctest::Approx(0.35));
  CHECK(r.state.w_z == 0.0);

  // Small and large progress select eta0 and eta2.
  r = adap_step({0.75, 0.25, 0.0}, f, 1, 1.0, 0.5, 1, p);
  CHECK(r.state.w_s == doctest::Approx(0.75 - p.eta0));
  r = adap_step({0.75, 0.25, 0.0}, f, 2, 1.0, 1.0 - 1e-6, 1, p);
  CHECK(r.state.w_s == doctest::Approx(0.75 - 2 * p.eta2));

  // Weight moves from tau_g to tau_z once w_s is exhausted, down to delta1.
  r = adap_step({0.0, 1.0, 0.0}, f, 1, 1.0, 0.5, 5, p);
  CHECK(r.state.w_g == doctest::Approx(1.0 - p.beta_adap));
  CHECK(r.state.w_z == doctest::Approx(p.beta_adap));
  r = adap_step({0.0, 0.11, 0.89}, f, 5, 1.0, 0.5, 5, p);
  CHECK(r.state.w_g == doctest::Approx(p.delta1));
  CHECK(r.state.w_z == doctest::Approx(1.0 - p.delta1));

  // Equal factors give that factor.
  const ScalingSet eq = structured_factors(vec(2, 0), vec(1, 0), 0.0, kInf);
  r = adap_step({0.0, 0.3, 0.7}, eq, 1, 1.0, 0.5, 4, p);
  CHECK(r.tau == doctest::Approx(0.5));

  // Nonpositive curvature cuts off to tau_g.
  const ScalingSet neg = structured_factors(vec(1, 0), vec(-1, 1), 0.0, kInf);
  r = adap_step({0.2, 0.3, 0.5}, neg, 1, 1.0, 0.5, 4, p);
  CHECK(r.tau == neg.tau_g);
}

TEST_CASE("adap weights stay on the simplex") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ScalingSet f = structured_factors(vec(1, 0), vec(1, 1), 0.0, kInf);
  AdapState st;
  double j = 1.0;
  for (long k = 0; k < 400; ++k) {
    const double j_new = j * (1.0 - std::pow(10.0, -6.0 * u(rng)));
    const int nu = testing_support::uniform_int(rng, 1, 4);
    const AdapResult r = adap_step(st, f, nu, j, j_new, k);
    st = r.state;
    j = j_new;
    CHECK(std::abs(st.w_s + st.w_g + st.w_z - 1.0) <= 1e-12);
    for (double w : {st.w_s, st.w_g, st.w_z}) {
      CHECK(w >= 0.0);
      CHECK(w <= 1.0);
    }
    CHECK(r.tau >= f.tau_s - 1e-15);
    CHECK(r.tau <= *f.tau_z + 1e-15);
  }
}
