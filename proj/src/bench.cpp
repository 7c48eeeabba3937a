#include "hopf/bench.hpp"

#include <chrono>

#if defined(__SSE3__) || defined(__x86_64__)
#include <pmmintrin.h>
#include <xmmintrin.h>
#define HOPF_HAVE_MXCSR 1
#endif

namespace hopf {

BenchSample draw_bench_samples(Index n, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  BenchSample out;
  out.points.reserve(count);
  out.times.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    Vector<double> x(n);
    for (Index i = 0; i < n; ++i) x(i) = -10.0 + 20.0 * unit_uniform(gen);
    out.points.push_back(std::move(x));
    out.times.push_back(10.0 * unit_uniform(gen));
  }
  return out;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

BenchRow bench_dimension(const io::Problem& problem, std::size_t samples, int workers, std::uint64_t seed) {
  if (samples == 0) throw InvalidArgument("bench: samples must be >= 1");
  if (workers < 1) throw InvalidArgument("bench: workers must be >= 1");
  const BenchSample draw = draw_bench_samples(problem.dimension, samples, seed);
  BenchRow row;
  row.dimension = problem.dimension;
  row.samples = samples;
  row.workers = workers;

  std::size_t converged = 0, iters = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t s = 0; s < samples; ++s) {
    const auto e = solve(draw.points[s], draw.times[s], problem.hamiltonian, problem.initial, problem.solver);
    converged += e.converged;
    iters += static_cast<std::size_t>(e.iters);
  }
  const double serial = seconds_since(start);
  row.mean_seconds = serial / double(samples);
  row.convergence_rate = double(converged) / double(samples);
  row.mean_iters = double(iters) / double(samples);

  if (workers > 1) {
    const auto pstart = std::chrono::steady_clock::now();
    const auto results =
        evaluate_batch(draw.points, draw.times, problem.hamiltonian, problem.initial, problem.solver, workers);
    const double parallel = seconds_since(pstart);
    row.parallel_mean_seconds = parallel / double(samples);
    row.speedup = parallel > 0.0 ? serial / parallel : 0.0;
  }
  return row;
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  std::vector<BenchRow> rows;
  for (Index n : cfg.dimensions) {
    const io::Problem problem = io::load_problem(cfg.problem, n);
    rows.push_back(bench_dimension(problem, cfg.samples, cfg.workers, cfg.seed));
  }
  return rows;
}

bool flush_denormals() {
#ifdef HOPF_HAVE_MXCSR
  _MM_SET_FLUSH_ZERO_MODE(_MM_FLUSH_ZERO_ON);
  _MM_SET_DENORMALS_ZERO_MODE(_MM_DENORMALS_ZERO_ON);
  return true;
#else
  return false;
#endif
}

}  // namespace hopf
