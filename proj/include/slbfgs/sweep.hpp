// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "slbfgs/bench.hpp"
#include "slbfgs/optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace slbfgs {

inline constexpr const char* kTraceHeader =
    "k,J,grad_norm,alpha,tau,n_ls,pair_accepted,rho_sign,inner_iters,"
    "inner_rel_res,fallback,cos_newton,ratio_newton";

/// Shortest text that round-trips the double (17 significant digits).
std::string format_double(double v);

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace);

/// Parses the columns written by write_trace_csv. Throws std::runtime_error
/// on a malformed header or row.
std::vector<IterationRecord> read_trace_csv(std::istream& in);

/// key=value lines; blank lines and lines starting with '#' are skipped.
/// Throws std::runtime_error on a malformed line, a duplicate key or a key
/// outside `allowed`.
std::map<std::string, std::string> parse_config(std::istream& in,
                                                const std::set<std::string>& allowed);

/// "inf" / "unbounded" map to std::nullopt.
std::optional<std::size_t> parse_memory(const std::string& text);
std::string memory_label(std::optional<std::size_t> memory);

enum class SweepProblem { quadratic, nonconvex };

/// Strategy x memory x alpha (x rng seed for the non-convex family) sweep.
/// List-valued keys default to empty, so an empty file describes no runs.
struct SweepSpec {
  SweepProblem problem = SweepProblem::quadratic;
  std::vector<SeedStrategy> strategies;
  std::vector<std::optional<std::size_t>> memories;
  std::vector<double> alphas;
  std::vector<std::uint64_t> rng_seeds{0};
  Eigen::Index m = 4;
  LineSearchKind line_search = LineSearchKind::armijo;
  double grad_tol = 1e-13;
  long max_iter = 10000;
  bool exact_seed_solve = true;
  int inner_maxiter = 50;
  double inner_tol = 1e-2;
  bool fair_stopping = false;
  int threads = 1;

  std::size_t run_count() const;
};

/// Keys: problem, strategies, memories, alphas, rng_seeds, m, line_search,
/// grad_tol, max_iter, exact_seed_solve, inner_maxiter, inner_tol,
/// fair_stopping, threads. Lists are comma separated.
SweepSpec parse_sweep_spec(std::istream& in);

struct RunSummary {
  std::string problem;
  SeedStrategy strategy = SeedStrategy::bs;
  std::optional<std::size_t> memory;
  double alpha = 0.0;
  std::uint64_t rng_seed = 0;
  long iterations = 0;
  double mean_line_searches = 0.0;
  double wall_ms = 0.0;
  long fevals = 0;
  long gevals = 0;
  Status status = Status::max_iterations;
  int fallbacks = 0;
  double final_grad_norm = 0.0;

  std::string problem_label() const;
};

struct RunOutput {
  RunSummary summary;
  OptimizeResult result;
};

/// Builds the optimizer configuration a sweep uses for one run.
OptimizerConfig sweep_config(const SweepSpec& spec, SeedStrategy strategy,
                             std::optional<std::size_t> memory);

/// Runs one cell. Newton diagnostics are attached for quadratic runs.
RunOutput run_one(const SweepSpec& spec, SeedStrategy strategy,
                  std::optional<std::size_t> memory, double alpha,
                  std::uint64_t rng_seed);

/// Runs the sweep and writes, under `out_dir`:
///   traces/<label>.csv           per-run iteration trace
///   summary.csv                  one row per run
///   table_iterations.csv, table_line_searches.csv, table_runtime_ms.csv
///   profile_iters.csv, profile_fevals.csv
/// Nothing is written for an empty sweep. Throws std::runtime_error on I/O
/// failure.
std::vector<RunSummary> run_suite(const SweepSpec& spec,
                                  const std::filesystem::path& out_dir);

enum class ProfileMetric { iters, time, fevals };

ProfileMetric parse_metric(const std::string& name);

/// Reads summary.csv back from a sweep directory.
std::vector<RunSummary> read_summary_csv(std::istream& in);

/// Profile over problems = (problem, memory, alpha, seed) cells and
/// methods = strategies. Non-converged runs count as failures.
ProfileTable profile_from_summaries(const std::vector<RunSummary>& runs,
                                    ProfileMetric metric);

void write_profile_csv(std::ostream& out, const ProfileTable& table);

}  // namespace slbfgs
