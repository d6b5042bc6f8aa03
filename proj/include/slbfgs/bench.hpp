// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "slbfgs/linalg.hpp"
#include "slbfgs/optimizer.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace slbfgs {

/// Dolan-More performance profile.
///
/// ratios(p, s) = t(p, s) / min_sigma t(p, sigma); curves[s][i] is the
/// fraction of problems with ratio <= taus[i]. Failed runs are encoded as
/// +inf and never count as solved.
struct ProfileTable {
  std::vector<std::string> methods;
  std::vector<std::string> problems;
  DenseMatrix ratios;
  std::vector<double> taus;
  std::vector<std::vector<double>> curves;

  /// rho_s(tau) for an arbitrary tau >= 1.
  double rho(std::size_t method, double tau) const;
};

/// `times` is n_p x n_s. When `tau_grid` is empty the grid is {1} plus
/// every distinct finite ratio. Throws std::invalid_argument on a
/// nonpositive or NaN entry, on a row that is entirely +inf, or on label
/// count mismatch (labels may be left empty).
ProfileTable performance_profile(const DenseMatrix& times,
                                 std::vector<std::string> methods = {},
                                 std::vector<std::string> problems = {},
                                 std::vector<double> tau_grid = {});

/// Angle and length of d_k against the Newton direction
/// d_N = -(hess J(x_k))^-1 grad J(x_k).
struct NewtonDiagnostics {
  std::vector<double> cosine;
  std::vector<double> ratio;
};

/// Needs problem.dense_hessian. Throws std::domain_error on a singular
/// Hessian and std::invalid_argument if the sizes of `iterates` and
/// `directions` do not allow pairing.
NewtonDiagnostics newton_diagnostics(const Problem& problem,
                                     std::span<const Vector> iterates,
                                     std::span<const Vector> directions);

/// Copies diagnostics into the trace's cos_newton/ratio_newton columns.
void attach_newton_diagnostics(std::vector<IterationRecord>& trace,
                               const NewtonDiagnostics& diag);

struct RateEstimate {
  /// Geometric mean of (J_{k+1} - J*) / (J_k - J*) over the tail.
  double q_factor = 1.0;
  int tail_length = 0;
  /// exp of the least-squares slope of log ||x_k - x*|| (needs iterates).
  std::optional<double> r_factor_x;
  std::optional<double> slope_x;
  /// exp of the least-squares slope of log ||grad J(x_k)||.
  double r_factor_grad = 1.0;
  double slope_grad = 0.0;
};

/// Floor below which J - J* is treated as numerically zero.
inline constexpr double kRateFloor = 1e-24;

/// q-factor of a sequence of optimality gaps over the leading entries that
/// stay above the floor. Throws std::domain_error if
/// fewer than `min_tail` usable entries remain or the gaps do not decrease.
double estimate_q_factor(std::span<const double> gaps, int min_tail = 10,
                         int* tail_length = nullptr);

/// Least-squares slope of log(values[k]) against k over positive entries.
double log_slope(std::span<const double> values);

RateEstimate estimate_rate(const std::vector<IterationRecord>& trace,
                           double j_star, const Vector& x_star,
                           std::span<const Vector> iterates = {});

}  // namespace slbfgs
