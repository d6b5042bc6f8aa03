// SPDX-License-Identifier: Apache-2.0
#include "slbfgs/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slbfgs {

BBFactors bb_factors(const Vector& s, const Vector& y) {
  const double rho = dot(y, s);
  if (rho == 0.0) {
    throw std::domain_error("bb_factors: y's = 0");
  }
  return {rho / y.squaredNorm(), s.squaredNorm() / rho};
}

double proj_interval(double t, double tau_min, double tau_max) {
  if (tau_min > tau_max) {
    throw std::invalid_argument("proj_interval: tau_min > tau_max");
  }
  return std::min(std::max(t, tau_min), tau_max);
}

ScalingSet structured_factors(const Vector& s, const Vector& z, double tau_min,
                              double tau_max) {
  if (tau_min > tau_max) {
    throw std::invalid_argument("structured_factors: tau_min > tau_max");
  }
  const double ss = s.squaredNorm();
  if (ss == 0.0) {
    throw std::invalid_argument("structured_factors: s = 0");
  }
  const double zz = z.squaredNorm();
  const double rho = dot(z, s);

  ScalingSet out;
  out.rho = rho;
  out.tau_min = tau_min;
  out.tau_max = tau_max;

  // Smaller eigenvalue of [[ss, rho], [rho, zz]], written as det / lambda_max
  // so it does not cancel when s and z are nearly collinear.
  const double disc = std::sqrt((ss - zz) * (ss - zz) + 4.0 * rho * rho);
  const double lambda_max = 0.5 * (ss + zz + disc);
  const double det = std::max(ss * zz - rho * rho, 0.0);
  out.lambda = lambda_max > 0.0 ? det / lambda_max : 0.0;

  out.raw_s = rho / ss;
  out.raw_g = std::sqrt(zz / ss);
  out.tau_s = proj_interval(out.raw_s, tau_min, tau_max);
  out.tau_g = proj_interval(out.raw_g, tau_min, tau_max);
  if (rho != 0.0) {
    out.raw_z = zz / rho;
    out.raw_u = (zz - out.lambda) / rho;
    out.tau_z = proj_interval(*out.raw_z, tau_min, tau_max);
    out.tau_u = proj_interval(*out.raw_u, tau_min, tau_max);
  }
  return out;
}

SafeguardInterval safeguards(double grad_norm, double c0, double C0, double c1,
                             double c2) {
  const double g = c1 * std::pow(grad_norm, c2);
  SafeguardInterval out;
  out.omega_l = std::min(c0, g);
  out.omega_u = g > 0.0 ? std::max(C0, 1.0 / g) : kInf;
  return out;
}

AdapResult adap_step(const AdapState& state, const ScalingSet& factors, int nu,
                     double j_prev, double j_curr, long k,
                     const AdapParams& params) {
  AdapState next = state;
  if (k == 0) {
    next = {params.delta0, 1.0 - params.delta0, 0.0};
  } else {
    const double change = std::abs(j_curr - j_prev);
    double step = params.eta0;
    if (change <= params.eps1 * std::abs(j_prev)) {
      step = params.eta2;
    } else if (change <= params.eps0 * std::abs(j_prev)) {
      step = params.eta1;
    }
    if (state.w_s > 0.0) {
      next.w_s = std::max(state.w_s - step * nu, 0.0);
      next.w_g = 1.0 - next.w_s;
    }
    if (state.w_g >= 1.0 || state.w_z > 0.0) {
      next.w_g = std::max(state.w_g - params.beta_adap * nu, params.delta1);
      next.w_z = 1.0 - next.w_g;
    }
  }

  // tau_z is undefined or meaningless for rho <= 0; the controller cuts off
  // to tau_g there, so the weighted mean is never formed.
  if (factors.rho <= 0.0 || !factors.tau_z) {
    return {factors.tau_g, next};
  }
  const double tau = std::pow(factors.tau_s, next.w_s) *
                     std::pow(factors.tau_g, next.w_g) *
                     std::pow(*factors.tau_z, next.w_z);
  return {tau, next};
}

}  // namespace slbfgs
