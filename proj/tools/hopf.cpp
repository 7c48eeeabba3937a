// hopf: command-line front end (eval, slice, project, bench).

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "hopf/bench.hpp"
#include "hopf/closest_point.hpp"
#include "hopf/io.hpp"
#include "hopf/slice.hpp"
#include "hopf/solver.hpp"

namespace {

using hopf::Index;
using hopf::Vector;
using nlohmann::json;

constexpr int kExitParse = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitFailure = 1;

std::vector<double> to_std(const Vector<double>& v) { return {v.data(), v.data() + v.size()}; }

std::string join(const Vector<double>& v) { return fmt::format("{:.17g}", fmt::join(to_std(v), ",")); }

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  const Vector<double> v = hopf::io::parse_vector(text);
  std::vector<T> out;
  for (Index i = 0; i < v.size(); ++i) out.push_back(static_cast<T>(v(i)));
  return out;
}

struct EvalArgs {
  std::string problem;
  std::string x;
  double t = 0.0;
  std::optional<Index> dim;
  bool json = false;
  bool strict = false;
};

int cmd_eval(const EvalArgs& a) {
  const auto problem = hopf::io::load_problem(a.problem, a.dim);
  const Vector<double> x = hopf::io::parse_vector(a.x);
  hopf::check_dimension(problem.dimension, x.size());
  const auto start = std::chrono::steady_clock::now();
  const auto e = hopf::solve(x, a.t, problem.hamiltonian, problem.initial, problem.solver);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::optional<Vector<double>> control;
  std::string control_note;
  if (a.t > 0.0) {
    if (problem.hamiltonian.is_min()) {
      control_note = "not reported for a min of Hamiltonians";
    } else {
      try {
        control = hopf::recover_control(e.gradient, problem.hamiltonian);
      } catch (const hopf::Error& err) {
        control_note = std::string("nonunique: ") + err.what();
      }
    }
  } else {
    control_note = "t = 0";
  }

  if (a.json) {
    json out{{"value", e.value + 0.0}, {"gradient", to_std(e.gradient)}, {"iters", e.iters},
             {"converged", e.converged}, {"seconds", seconds}};
    out["control"] = control ? json(to_std(*control)) : json(nullptr);
    if (!control_note.empty()) out["control_note"] = control_note;
    if (e.stats.branch) {
      out["branch"] = *e.stats.branch;
      out["tie"] = e.stats.tie;
    }
    std::cout << out.dump(2) << "\n";
  } else {
    fmt::print("value      {:.17g}\n", e.value + 0.0);  // no "-0"
    fmt::print("gradient   {}\n", join(e.gradient));
    fmt::print("control    {}\n", control ? join(*control) : control_note);
    if (e.stats.branch) fmt::print("branch     {}{}\n", *e.stats.branch, e.stats.tie ? " (tie)" : "");
    fmt::print("iters      {}\n", e.iters);
    fmt::print("converged  {}\n", e.converged);
    fmt::print("seconds    {:.3e}\n", seconds);
  }
  return (a.strict && !e.converged) ? kExitNotConverged : 0;
}

struct SliceArgs {
  std::string problem;
  std::string out;
  std::string axes = "1,2";
  std::string range = "-20,20";
  std::string range2;
  std::string samples = "100";
  std::string times = "0";
  std::string base;
  std::optional<Index> dim;
  std::optional<double> contour_step;
  bool warm_start = false;
  int workers = 1;
  bool json = false;
  bool strict = false;
};

int cmd_slice(const SliceArgs& a) {
  const auto problem = hopf::io::load_problem(a.problem, a.dim);
  hopf::SliceJob job;
  const auto axes = parse_list<Index>(a.axes);
  if (axes.size() != 2) throw hopf::io::ParseError("--axes: expected two 1-based indices");
  job.axes = {axes[0] - 1, axes[1] - 1};
  const auto r1 = parse_list<double>(a.range);
  const auto r2 = a.range2.empty() ? r1 : parse_list<double>(a.range2);
  if (r1.size() != 2 || r2.size() != 2) throw hopf::io::ParseError("--range: expected lo,hi");
  job.lower = {r1[0], r2[0]};
  job.upper = {r1[1], r2[1]};
  const auto samples = parse_list<int>(a.samples);
  if (samples.empty() || samples.size() > 2) throw hopf::io::ParseError("--samples: expected one or two counts");
  job.samples = {samples[0], samples.back()};
  job.times = parse_list<double>(a.times);
  job.base = a.base.empty() ? Vector<double>::Zero(problem.dimension) : hopf::io::parse_vector(a.base);
  job.warm_start = a.warm_start;
  job.workers = a.workers;
  job.contour_step = a.contour_step;

  const auto report = hopf::run_slice(problem, job, a.out);
  const std::size_t unconverged = report.unconverged;
  std::vector<std::string> files;
  for (const auto& path : report.files) files.push_back(path.string());
  if (a.json) {
    std::cout << json{{"files", files}, {"unconverged", unconverged}}.dump(2) << "\n";
  } else {
    for (const auto& f : files) fmt::print("{}\n", f);
    fmt::print("unconverged points: {}\n", unconverged);
  }
  return (a.strict && unconverged > 0) ? kExitNotConverged : 0;
}

struct ProjectArgs {
  std::string shape;
  std::string y;
  std::optional<Index> dim;
  bool json = false;
};

int cmd_project(const ProjectArgs& a) {
  const auto shape = hopf::io::load_shape(a.shape, a.dim);
  const Vector<double> y = hopf::io::parse_vector(a.y);
  hopf::check_dimension(shape.dimension(), y.size());
  const auto r = hopf::closest_union(y, shape);
  if (a.json) {
    json out{{"distance", r.distance},
             {"point", to_std(r.point)},
             {"newton_iters", r.newton_iters},
             {"tie", r.tie}};
    out["branch"] = r.branch ? json(*r.branch) : json(nullptr);
    std::cout << out.dump(2) << "\n";
  } else {
    fmt::print("distance   {:.17g}\n", r.distance);
    fmt::print("point      {}\n", join(r.point));
    if (r.branch) fmt::print("branch     {}\n", *r.branch);
    fmt::print("tie        {}\n", r.tie);
    fmt::print("newton     {}\n", r.newton_iters);
  }
  return 0;
}

struct BenchArgs {
  std::string problem;
  std::string dims = "4,8,12,16";
  std::size_t samples = 1000;
  int workers = 1;
  std::uint64_t seed = 0;
  bool json = false;
  bool strict = false;
};

int cmd_bench(const BenchArgs& a) {
  hopf::BenchConfig cfg;
  cfg.problem = a.problem;
  cfg.dimensions = parse_list<Index>(a.dims);
  cfg.samples = a.samples;
  cfg.workers = a.workers;
  cfg.seed = a.seed;
  const auto rows = hopf::run_bench(cfg);
  bool all_converged = true;
  for (const auto& r : rows) all_converged = all_converged && r.convergence_rate == 1.0;
  if (a.json) {
    json out = json::array();
    for (const auto& r : rows) {
      json row{{"n", r.dimension},          {"samples", r.samples},
               {"mean_seconds", r.mean_seconds}, {"convergence_rate", r.convergence_rate},
               {"mean_iters", r.mean_iters}, {"workers", r.workers}};
      if (r.parallel_mean_seconds) {
        row["parallel_mean_seconds"] = *r.parallel_mean_seconds;
        row["throughput_per_second"] = 1.0 / *r.parallel_mean_seconds;
        row["speedup"] = *r.speedup;
      }
      out.push_back(row);
    }
    std::cout << out.dump(2) << "\n";
  } else {
    fmt::print("{:>4} {:>9} {:>12} {:>10} {:>9}", "n", "samples", "sec/call", "converged", "iters");
    if (a.workers > 1) fmt::print(" {:>7} {:>12} {:>8}", "workers", "sec/call(p)", "speedup");
    fmt::print("\n");
    for (const auto& r : rows) {
      fmt::print("{:>4} {:>9} {:>12.3e} {:>9.2f}% {:>9.1f}", r.dimension, r.samples, r.mean_seconds,
                 100.0 * r.convergence_rate, r.mean_iters);
      if (r.parallel_mean_seconds)
        fmt::print(" {:>7} {:>12.3e} {:>8.2f}", r.workers, *r.parallel_mean_seconds, *r.speedup);
      fmt::print("\n");
    }
  }
  return (a.strict && !all_converged) ? kExitNotConverged : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid-free Hamilton-Jacobi evaluation by the Hopf formula"};
  app.require_subcommand(1);
  bool flush = false;
  app.add_flag("--flush-denormals", flush, "Flush denormal numbers to zero (x86 only)");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Evaluate phi(x, t) and its gradient at one point");
  e->add_option("--problem", eval.problem, "Problem JSON file")->required()->check(CLI::ExistingFile);
  e->add_option("--x", eval.x, "Query point, comma separated")->required();
  e->add_option("--t", eval.t, "Time (>= 0)")->required();
  e->add_option("--dim", eval.dim, "Override the problem dimension");
  e->add_flag("--json", eval.json, "Print JSON");
  e->add_flag("--strict", eval.strict, "Exit with status 3 if the solver did not converge");

  SliceArgs slice;
  auto* s = app.add_subcommand("slice", "Evaluate phi on a 2-D grid and write one CSV per time");
  s->add_option("--problem", slice.problem, "Problem JSON file")->required()->check(CLI::ExistingFile);
  s->add_option("--out", slice.out, "Output directory")->required();
  s->add_option("--axes", slice.axes, "The two varying coordinates, 1-based")->capture_default_str();
  s->add_option("--range", slice.range, "lo,hi for the first (and second) axis")->capture_default_str();
  s->add_option("--range2", slice.range2, "lo,hi for the second axis");
  s->add_option("--samples", slice.samples, "Samples per axis (n or n1,n2)")->capture_default_str();
  s->add_option("--times", slice.times, "Comma-separated times")->capture_default_str();
  s->add_option("--x", slice.base, "Base point for the fixed coordinates (default 0)");
  s->add_option("--dim", slice.dim, "Override the problem dimension");
  s->add_option("--contour-step", slice.contour_step, "Write level lines at multiples of this value");
  s->add_flag("--warm-start", slice.warm_start, "Warm-start each point from its neighbour");
  s->add_option("--workers", slice.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_flag("--json", slice.json, "Print JSON");
  s->add_flag("--strict", slice.strict, "Exit with status 3 if any point did not converge");

  ProjectArgs project;
  auto* p = app.add_subcommand("project", "Closest point and distance to a convex shape or union");
  p->add_option("--shape", project.shape, "Shape JSON file")->required()->check(CLI::ExistingFile);
  p->add_option("--y", project.y, "Exterior query point, comma separated")->required();
  p->add_option("--dim", project.dim, "Override the shape dimension");
  p->add_flag("--json", project.json, "Print JSON");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Mean time per evaluation over uniform samples in [-10,10]^n x [0,10]");
  b->add_option("--problem", bench.problem, "Problem JSON file")->required()->check(CLI::ExistingFile);
  b->add_option("--dims", bench.dims, "Comma-separated dimensions")->capture_default_str();
  b->add_option("--samples", bench.samples, "Samples per dimension")->capture_default_str()->check(
      CLI::PositiveNumber);
  b->add_option("--workers", bench.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  b->add_option("--seed", bench.seed, "Seed of the std::mt19937_64 sample stream")->capture_default_str();
  b->add_flag("--json", bench.json, "Print JSON");
  b->add_flag("--strict", bench.strict, "Exit with status 3 unless every sample converged");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    // --help and --version exit 0; usage errors share the parse-error status.
    return app.exit(err) == 0 ? 0 : kExitParse;
  }
  if (flush && !hopf::flush_denormals()) std::cerr << "warning: --flush-denormals is not supported here\n";

  try {
    if (*e) return cmd_eval(eval);
    if (*s) return cmd_slice(slice);
    if (*p) return cmd_project(project);
    if (*b) return cmd_bench(bench);
  } catch (const hopf::io::ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitParse;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
