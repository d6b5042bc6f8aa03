// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "slbfgs/linalg.hpp"

#include <limits>
#include <optional>

namespace slbfgs {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Barzilai-Borwein factors for an identity-scaled inverse seed.
struct BBFactors {
  double tau_hat_y;  ///< (y's) / |y|^2
  double tau_hat_s;  ///< |s|^2 / (y's)
};

/// Throws std::domain_error if y's == 0.
BBFactors bb_factors(const Vector& s, const Vector& y);

/// Clamp of t to [tau_min, tau_max]. Throws std::invalid_argument if
/// tau_min > tau_max.
double proj_interval(double t, double tau_min, double tau_max);

/// The four secant-derived scaling factors for the structured seed
/// tau*I + S, each projected onto [tau_min, tau_max].
///
/// tau_z and tau_u are only defined when rho = z's is nonzero.
struct ScalingSet {
  double tau_s = 0.0;
  double tau_g = 0.0;
  std::optional<double> tau_z;
  std::optional<double> tau_u;
  double rho = 0.0;
  double lambda = 0.0;  ///< smaller eigenvalue of the Gram matrix of (s, z)
  double tau_min = 0.0;
  double tau_max = kInf;

  /// Unprojected quotients, kept for diagnostics.
  double raw_s = 0.0;
  double raw_g = 0.0;
  std::optional<double> raw_z;
  std::optional<double> raw_u;
};

/// Throws std::invalid_argument if s = 0 or tau_min > tau_max.
ScalingSet structured_factors(const Vector& s, const Vector& z, double tau_min,
                              double tau_max);

struct SafeguardInterval {
  double omega_l = 0.0;
  double omega_u = kInf;
};

/// omega_l = min{c0, c1 g^c2}, omega_u = max{C0, (c1 g^c2)^-1}.
/// For g = 0 the upper bound is +inf.
SafeguardInterval safeguards(double grad_norm, double c0, double C0, double c1,
                             double c2);

/// Constants of the adaptive tau controller. Defaults are the published
/// parameter table; note eta2 < eta1 there.
struct AdapParams {
  double delta0 = 0.75;
  double delta1 = 0.1;
  double eps0 = 1e-3;
  double eps1 = 1e-4;
  double eta0 = 0.025;
  double eta1 = 0.1;
  double eta2 = 0.05;
  double beta_adap = 0.01;
};

/// Weights of the geometric mean over (tau_s, tau_g, tau_z).
struct AdapState {
  double w_s = 0.0;
  double w_g = 0.0;
  double w_z = 0.0;
};

struct AdapResult {
  double tau;
  AdapState state;
};

/// One step of the adaptive controller.
///
/// `nu` is the number of line-search trials of the current iteration,
/// `j_prev`/`j_curr` are J(x_k) and J(x_{k+1}), and `k` the iteration index.
/// When factors.rho <= 0 the result is tau_g.
AdapResult adap_step(const AdapState& state, const ScalingSet& factors, int nu,
                     double j_prev, double j_curr, long k,
                     const AdapParams& params = {});

}  // namespace slbfgs
