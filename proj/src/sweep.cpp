// SPDX-License-Identifier: Apache-2.0
#include "slbfgs/sweep.hpp"

#include "slbfgs/problems.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace slbfgs {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw std::runtime_error("not a number: '" + s + "'");
  return v;
}

long to_long(const std::string& s) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("not an integer: '" + s + "'");
  }
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw std::runtime_error("not a boolean: '" + s + "'");
}

std::string opt_double(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::string cell_label(const RunSummary& r, SweepProblem problem) {
  std::string label = "a" + short_double(r.alpha) + "_l" + memory_label(r.memory);
  if (problem == SweepProblem::nonconvex) label += "_s" + std::to_string(r.rng_seed);
  return label;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << r.k << ',' << format_double(r.J) << ',' << format_double(r.grad_norm)
        << ',' << opt_double(r.alpha) << ',' << format_double(r.tau) << ','
        << r.n_ls << ',' << (r.pair_accepted ? 1 : 0) << ',' << r.rho_sign << ',';
    if (r.inner) {
      out << r.inner->iterations << ',' << format_double(r.inner->relative_residual);
    } else {
      out << ',';
    }
    out << ',' << (r.fallback_used ? 1 : 0) << ',' << opt_double(r.cos_newton)
        << ',' << opt_double(r.ratio_newton) << '\n';
  }
}

std::vector<IterationRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kTraceHeader) {
    throw std::runtime_error("trace csv: unexpected header");
  }
  std::vector<IterationRecord> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 13) throw std::runtime_error("trace csv: expected 13 fields");
    IterationRecord r;
    r.k = to_long(f[0]);
    r.J = to_double(f[1]);
    r.grad_norm = to_double(f[2]);
    if (!f[3].empty()) r.alpha = to_double(f[3]);
    r.tau = to_double(f[4]);
    r.n_ls = static_cast<int>(to_long(f[5]));
    r.pair_accepted = to_bool(f[6]);
    r.rho_sign = static_cast<int>(to_long(f[7]));
    if (!f[8].empty()) {
      SolveStats s;
      s.iterations = static_cast<int>(to_long(f[8]));
      s.relative_residual = to_double(f[9]);
      r.inner = s;
    }
    r.fallback_used = to_bool(f[10]);
    if (!f[11].empty()) r.cos_newton = to_double(f[11]);
    if (!f[12].empty()) r.ratio_newton = to_double(f[12]);
    out.push_back(std::move(r));
  }
  return out;
}

std::map<std::string, std::string> parse_config(std::istream& in,
                                                const std::set<std::string>& allowed) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!allowed.count(key)) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (!out.emplace(key, value).second) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

std::optional<std::size_t> parse_memory(const std::string& text) {
  if (text == "inf" || text == "unbounded") return std::nullopt;
  const long v = to_long(text);
  if (v < 0) throw std::runtime_error("memory must be >= 0");
  return static_cast<std::size_t>(v);
}

std::string memory_label(std::optional<std::size_t> memory) {
  return memory ? std::to_string(*memory) : std::string("inf");
}

std::size_t SweepSpec::run_count() const {
  const std::size_t seeds = problem == SweepProblem::nonconvex ? rng_seeds.size() : 1;
  return strategies.size() * memories.size() * alphas.size() * seeds;
}

SweepSpec parse_sweep_spec(std::istream& in) {
  const auto kv = parse_config(
      in, {"problem", "strategies", "memories", "alphas", "rng_seeds", "m",
           "line_search", "grad_tol", "max_iter", "exact_seed_solve",
           "inner_maxiter", "inner_tol", "fair_stopping", "threads"});
  SweepSpec spec;
  auto list = [](const std::string& v) {
    std::vector<std::string> items;
    for (auto& item : split(v, ',')) {
      const std::string t = trim(item);
      if (!t.empty()) items.push_back(t);
    }
    return items;
  };
  for (const auto& [key, value] : kv) {
    if (key == "problem") {
      if (value == "quadratic") spec.problem = SweepProblem::quadratic;
      else if (value == "nonconvex") spec.problem = SweepProblem::nonconvex;
      else throw std::runtime_error("unknown problem '" + value + "'");
    } else if (key == "strategies") {
      for (const auto& s : list(value)) spec.strategies.push_back(parse_strategy(s));
    } else if (key == "memories") {
      for (const auto& s : list(value)) spec.memories.push_back(parse_memory(s));
    } else if (key == "alphas") {
      for (const auto& s : list(value)) spec.alphas.push_back(to_double(s));
    } else if (key == "rng_seeds") {
      spec.rng_seeds.clear();
      for (const auto& s : list(value)) {
        spec.rng_seeds.push_back(static_cast<std::uint64_t>(to_long(s)));
      }
    } else if (key == "m") {
      spec.m = to_long(value);
    } else if (key == "line_search") {
      if (value == "armijo") spec.line_search = LineSearchKind::armijo;
      else if (value == "wolfe") spec.line_search = LineSearchKind::strong_wolfe;
      else if (value == "weak_wolfe") spec.line_search = LineSearchKind::wolfe;
      else throw std::runtime_error("unknown line search '" + value + "'");
    } else if (key == "grad_tol") {
      spec.grad_tol = to_double(value);
    } else if (key == "max_iter") {
      spec.max_iter = to_long(value);
    } else if (key == "exact_seed_solve") {
      spec.exact_seed_solve = to_bool(value);
    } else if (key == "inner_maxiter") {
      spec.inner_maxiter = static_cast<int>(to_long(value));
    } else if (key == "inner_tol") {
      spec.inner_tol = to_double(value);
    } else if (key == "fair_stopping") {
      spec.fair_stopping = to_bool(value);
    } else if (key == "threads") {
      spec.threads = std::max(1, static_cast<int>(to_long(value)));
    }
  }
  return spec;
}

std::string RunSummary::problem_label() const {
  return problem + "_" + std::string(to_string(strategy)) + "_l" +
         memory_label(memory) + "_a" + short_double(alpha) +
         (problem == "nonconvex" ? "_s" + std::to_string(rng_seed) : "");
}

OptimizerConfig sweep_config(const SweepSpec& spec, SeedStrategy strategy,
                             std::optional<std::size_t> memory) {
  OptimizerConfig cfg;
  cfg.strategy = strategy;
  cfg.memory = memory;
  cfg.line_search.kind = spec.line_search;
  cfg.stopping.grad_tol = spec.grad_tol;
  cfg.stopping.fair_triple = spec.fair_stopping;
  cfg.max_iter = spec.max_iter;
  cfg.inner.mode = spec.exact_seed_solve ? SeedSolve::Mode::exact : SeedSolve::Mode::krylov;
  cfg.inner.maxiter = spec.inner_maxiter;
  cfg.inner.tol = spec.inner_tol;
  return cfg;
}

RunOutput run_one(const SweepSpec& spec, SeedStrategy strategy,
                  std::optional<std::size_t> memory, double alpha,
                  std::uint64_t rng_seed) {
  OptimizerConfig cfg = sweep_config(spec, strategy, memory);
  RunOutput out;
  out.summary.strategy = strategy;
  out.summary.memory = memory;
  out.summary.alpha = alpha;

  const auto start = std::chrono::steady_clock::now();
  if (spec.problem == SweepProblem::quadratic) {
    cfg.record_iterates = true;
    const QuadraticProblem q = make_quadratic(spec.m, alpha);
    out.result = minimize(q.problem, Vector::Zero(q.problem.dimension), cfg);
    out.summary.problem = "quadratic";
    const auto stop = std::chrono::steady_clock::now();
    out.summary.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    attach_newton_diagnostics(
        out.result.trace,
        newton_diagnostics(q.problem, out.result.iterates, out.result.directions));
  } else {
    const NonconvexProblem nc = make_nonconvex(spec.m, alpha, rng_seed);
    out.result = minimize(nc.problem, nc.x0, cfg);
    out.summary.problem = "nonconvex";
    out.summary.rng_seed = rng_seed;
    const auto stop = std::chrono::steady_clock::now();
    out.summary.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  }

  const auto& trace = out.result.trace;
  long steps = 0, ls = 0;
  for (const auto& r : trace) {
    if (r.alpha) {
      ++steps;
      ls += r.n_ls;
    }
  }
  out.summary.iterations = out.result.iterations();
  out.summary.mean_line_searches = steps ? static_cast<double>(ls) / steps : 0.0;
  out.summary.fevals = out.result.n_fevals;
  out.summary.gevals = out.result.n_gevals;
  out.summary.status = out.result.status;
  out.summary.fallbacks = out.result.fallback_count;
  out.summary.final_grad_norm = trace.empty() ? 0.0 : trace.back().grad_norm;
  return out;
}

namespace {

void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& runs) {
  out << "problem,strategy,memory,alpha,rng_seed,iterations,mean_line_searches,"
         "wall_ms,fevals,gevals,status,fallbacks,final_grad_norm\n";
  for (const auto& r : runs) {
    out << r.problem << ',' << to_string(r.strategy) << ',' << memory_label(r.memory)
        << ',' << format_double(r.alpha) << ',' << r.rng_seed << ',' << r.iterations
        << ',' << format_double(r.mean_line_searches) << ',' << format_double(r.wall_ms)
        << ',' << r.fevals << ',' << r.gevals << ',' << to_string(r.status) << ','
        << r.fallbacks << ',' << format_double(r.final_grad_norm) << '\n';
  }
}

template <class Value>
void write_table(const std::filesystem::path& path, const SweepSpec& spec,
                 const std::vector<RunSummary>& runs, Value value) {
  std::vector<std::string> columns;
  for (const auto& r : runs) {
    const std::string c = cell_label(r, spec.problem);
    if (std::find(columns.begin(), columns.end(), c) == columns.end()) columns.push_back(c);
  }
  std::ofstream out = open_out(path);
  out << "strategy";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (SeedStrategy s : spec.strategies) {
    out << to_string(s);
    for (const auto& c : columns) {
      out << ',';
      for (const auto& r : runs) {
        if (r.strategy == s && cell_label(r, spec.problem) == c) {
          out << value(r);
          break;
        }
      }
    }
    out << '\n';
  }
}

}  // namespace

std::vector<RunSummary> run_suite(const SweepSpec& spec,
                                  const std::filesystem::path& out_dir) {
  struct Cell {
    SeedStrategy strategy;
    std::optional<std::size_t> memory;
    double alpha;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  const std::vector<std::uint64_t> seeds =
      spec.problem == SweepProblem::nonconvex ? spec.rng_seeds : std::vector<std::uint64_t>{0};
  for (double alpha : spec.alphas) {
    for (auto memory : spec.memories) {
      for (auto seed : seeds) {
        for (SeedStrategy s : spec.strategies) cells.push_back({s, memory, alpha, seed});
      }
    }
  }
  if (cells.empty()) return {};

  std::error_code ec;
  std::filesystem::create_directories(out_dir / "traces", ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<RunSummary> runs(cells.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(cells.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      try {
        RunOutput out = run_one(spec, c.strategy, c.memory, c.alpha, c.seed);
        std::ofstream f = open_out(out_dir / "traces" / (out.summary.problem_label() + ".csv"));
        write_trace_csv(f, out.result.trace);
        if (!f) throw std::runtime_error("write failed");
        runs[i] = std::move(out.summary);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(spec.threads, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error("sweep run failed: " + e);
  }

  {
    std::ofstream f = open_out(out_dir / "summary.csv");
    write_summary_csv(f, runs);
  }
  write_table(out_dir / "table_iterations.csv", spec, runs,
              [](const RunSummary& r) { return std::to_string(r.iterations); });
  write_table(out_dir / "table_line_searches.csv", spec, runs, [](const RunSummary& r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", r.mean_line_searches);
    return std::string(buf);
  });
  write_table(out_dir / "table_runtime_ms.csv", spec, runs, [](const RunSummary& r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
    return std::string(buf);
  });
  for (auto [metric, name] : {std::pair{ProfileMetric::iters, "iters"},
                              std::pair{ProfileMetric::fevals, "fevals"}}) {
    bool any_solved = false;
    for (const auto& r : runs) any_solved = any_solved || is_converged(r.status);
    if (!any_solved) break;
    try {
      const ProfileTable t = profile_from_summaries(runs, metric);
      std::ofstream f = open_out(out_dir / (std::string("profile_") + name + ".csv"));
      write_profile_csv(f, t);
    } catch (const std::invalid_argument&) {
      // Some problem was solved by no method; a profile is undefined.
    }
  }
  return runs;
}

ProfileMetric parse_metric(const std::string& name) {
  if (name == "iters") return ProfileMetric::iters;
  if (name == "time") return ProfileMetric::time;
  if (name == "fevals") return ProfileMetric::fevals;
  throw std::invalid_argument("unknown metric '" + name + "'");
}

std::vector<RunSummary> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split(trim(line), ',').size() != 13) {
    throw std::runtime_error("summary csv: unexpected header");
  }
  std::vector<RunSummary> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 13) throw std::runtime_error("summary csv: expected 13 fields");
    RunSummary r;
    r.problem = f[0];
    r.strategy = parse_strategy(f[1]);
    r.memory = parse_memory(f[2]);
    r.alpha = to_double(f[3]);
    r.rng_seed = static_cast<std::uint64_t>(to_long(f[4]));
    r.iterations = to_long(f[5]);
    r.mean_line_searches = to_double(f[6]);
    r.wall_ms = to_double(f[7]);
    r.fevals = to_long(f[8]);
    r.gevals = to_long(f[9]);
    bool known = false;
    for (Status s : {Status::converged_gradient, Status::converged_fair,
                     Status::max_iterations, Status::line_search_failure,
                     Status::non_finite}) {
      if (to_string(s) == f[10]) {
        r.status = s;
        known = true;
      }
    }
    if (!known) throw std::runtime_error("summary csv: unknown status '" + f[10] + "'");
    r.fallbacks = static_cast<int>(to_long(f[11]));
    r.final_grad_norm = to_double(f[12]);
    out.push_back(std::move(r));
  }
  return out;
}

ProfileTable profile_from_summaries(const std::vector<RunSummary>& runs,
                                    ProfileMetric metric) {
  std::vector<std::string> methods, problems;
  auto cell = [](const RunSummary& r) {
    return r.problem + "_a" + short_double(r.alpha) + "_l" + memory_label(r.memory) +
           (r.problem == "nonconvex" ? "_s" + std::to_string(r.rng_seed) : "");
  };
  for (const auto& r : runs) {
    const std::string m(to_string(r.strategy));
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
    const std::string p = cell(r);
    if (std::find(problems.begin(), problems.end(), p) == problems.end()) problems.push_back(p);
  }
  DenseMatrix times = DenseMatrix::Constant(static_cast<Eigen::Index>(problems.size()),
                                            static_cast<Eigen::Index>(methods.size()), kInf);
  for (const auto& r : runs) {
    if (!is_converged(r.status)) continue;
    const auto pi = std::find(problems.begin(), problems.end(), cell(r)) - problems.begin();
    const auto si = std::find(methods.begin(), methods.end(), std::string(to_string(r.strategy))) -
                    methods.begin();
    double v = 0.0;
    switch (metric) {
      case ProfileMetric::iters: v = static_cast<double>(r.iterations); break;
      case ProfileMetric::time: v = r.wall_ms; break;
      case ProfileMetric::fevals: v = static_cast<double>(r.fevals); break;
    }
    // A run that starts at a stationary point costs zero iterations; count it
    // as one so ratios stay defined.
    times(pi, si) = std::max(v, metric == ProfileMetric::time ? 1e-6 : 1.0);
  }
  return performance_profile(times, methods, problems);
}

void write_profile_csv(std::ostream& out, const ProfileTable& table) {
  out << "tau";
  for (const auto& m : table.methods) out << ',' << m;
  out << '\n';
  for (std::size_t i = 0; i < table.taus.size(); ++i) {
    out << format_double(table.taus[i]);
    for (const auto& curve : table.curves) out << ',' << format_double(curve[i]);
    out << '\n';
  }
}

}  // namespace slbfgs
