// SPDX-License-Identifier: Apache-2.0
// Command-line front end: single runs, sweeps and performance profiles.
#include "slbfgs/problems.hpp"
#include "slbfgs/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

struct RunFlags {
  long m = 4;
  double alpha = 1e-1;
  std::string memory = "5";
  std::string strategy = "bs";
  std::string line_search = "armijo";
  double grad_tol = 1e-13;
  long max_iter = 10000;
  int inner_maxiter = 50;
  double inner_tol = 1e-2;
  bool exact_seed_solve = false;
  std::string csv_out;
  std::uint64_t rng_seed = 0;
  bool fair_stopping = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--m", f.m, "grid size, n = m*m")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", f.alpha, "regularization weight");
  cmd->add_option("--memory", f.memory, "stored pairs, or inf");
  cmd->add_option("--strategy", f.strategy, "seed strategy")
      ->check(CLI::IsMember({"hs", "hy", "bs", "bz", "bu", "bg", "adap"}));
  cmd->add_option("--line-search", f.line_search)
      ->check(CLI::IsMember({"armijo", "wolfe"}));
  cmd->add_option("--grad-tol", f.grad_tol, "stop when |grad J| <= tol");
  cmd->add_option("--max-iter", f.max_iter);
  cmd->add_option("--inner-maxiter", f.inner_maxiter);
  cmd->add_option("--inner-tol", f.inner_tol);
  cmd->add_flag("--exact-seed-solve", f.exact_seed_solve,
                "factor tau I + S instead of running PMINRES (=false to disable)");
  cmd->add_option("--csv-out", f.csv_out, "trace CSV path (default: stdout)");
}

slbfgs::SweepSpec spec_from(const RunFlags& f, slbfgs::SweepProblem problem) {
  slbfgs::SweepSpec spec;
  spec.problem = problem;
  spec.m = f.m;
  spec.line_search = f.line_search == "wolfe" ? slbfgs::LineSearchKind::strong_wolfe
                                              : slbfgs::LineSearchKind::armijo;
  spec.grad_tol = f.grad_tol;
  spec.max_iter = f.max_iter;
  spec.exact_seed_solve = f.exact_seed_solve;
  spec.inner_maxiter = f.inner_maxiter;
  spec.inner_tol = f.inner_tol;
  spec.fair_stopping = f.fair_stopping;
  return spec;
}

int run_single(const RunFlags& f, slbfgs::SweepProblem problem) {
  const slbfgs::SweepSpec spec = spec_from(f, problem);
  const slbfgs::RunOutput out =
      slbfgs::run_one(spec, slbfgs::parse_strategy(f.strategy),
                      slbfgs::parse_memory(f.memory), f.alpha, f.rng_seed);
  if (f.csv_out.empty()) {
    slbfgs::write_trace_csv(std::cout, out.result.trace);
  } else {
    std::ofstream csv(f.csv_out, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open " + f.csv_out);
    slbfgs::write_trace_csv(csv, out.result.trace);
  }
  const auto& s = out.summary;
  std::fprintf(stderr, "%s: status=%s iterations=%ld mean_ls=%.2f fevals=%ld grad_norm=%.3e\n",
               s.problem_label().c_str(), std::string(slbfgs::to_string(s.status)).c_str(),
               s.iterations, s.mean_line_searches, s.fevals, s.final_grad_norm);
  return slbfgs::is_converged(s.status) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured L-BFGS benchmark driver"};
  app.require_subcommand(1);

  RunFlags quad;
  auto* quad_cmd = app.add_subcommand("quadratic", "regularized quadratic on an m x m grid");
  quad.exact_seed_solve = true;
  add_run_flags(quad_cmd, quad);

  RunFlags nonc;
  nonc.alpha = 1e-2;
  auto* nonc_cmd = app.add_subcommand("nonconvex", "cosine data term with Laplacian regularizer");
  add_run_flags(nonc_cmd, nonc);
  nonc_cmd->add_option("--rng-seed", nonc.rng_seed);
  nonc_cmd->add_flag("--fair-stopping", nonc.fair_stopping,
                     "stop on the relative J / x / gradient triple");

  std::string spec_file, out_dir;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a strategy x memory x alpha sweep");
  sweep_cmd->add_option("--spec-file", spec_file)->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out-dir", out_dir)->required();

  std::string metric = "iters", in_dir, profile_out;
  auto* prof_cmd = app.add_subcommand("profile", "performance profile from a sweep summary");
  prof_cmd->add_option("--metric", metric)->check(CLI::IsMember({"iters", "time", "fevals"}));
  prof_cmd->add_option("--in-dir", in_dir)->required()->check(CLI::ExistingDirectory);
  prof_cmd->add_option("--csv-out", profile_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*quad_cmd) return run_single(quad, slbfgs::SweepProblem::quadratic);
    if (*nonc_cmd) return run_single(nonc, slbfgs::SweepProblem::nonconvex);
    if (*sweep_cmd) {
      std::ifstream in(spec_file);
      const slbfgs::SweepSpec spec = slbfgs::parse_sweep_spec(in);
      const auto runs = slbfgs::run_suite(spec, out_dir);
      int failed = 0;
      for (const auto& r : runs) failed += slbfgs::is_converged(r.status) ? 0 : 1;
      std::fprintf(stderr, "%zu runs, %d not converged\n", runs.size(), failed);
      return 0;
    }
    if (*prof_cmd) {
      std::ifstream in(std::filesystem::path(in_dir) / "summary.csv");
      if (!in) throw std::runtime_error("no summary.csv in " + in_dir);
      const auto table = slbfgs::profile_from_summaries(slbfgs::read_summary_csv(in),
                                                        slbfgs::parse_metric(metric));
      if (profile_out.empty()) {
        slbfgs::write_profile_csv(std::cout, table);
      } else {
        std::ofstream out(profile_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + profile_out);
        slbfgs::write_profile_csv(out, table);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
