#ifndef HOPF_BENCH_HPP
#define HOPF_BENCH_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

#include "hopf/io.hpp"

namespace hopf {

/// Uniform double in [0, 1) from the top 53 bits of a std::mt19937_64
/// draw, so that sample streams are reproducible across standard libraries.
inline double unit_uniform(std::mt19937_64& gen) {
  return double(gen() >> 11) * 0x1.0p-53;
}

struct BenchSample {
  std::vector<Vector<double>> points;
  std::vector<double> times;
};

// `count` pairs (x, t) uniform in [-10, 10]^n x [0, 10]; x is drawn first,
// coordinate by coordinate, then t.
BenchSample draw_bench_samples(Index n, std::size_t count, std::uint64_t seed);

struct BenchRow {
  Index dimension = 0;
  std::size_t samples = 0;
  double mean_seconds = 0.0;  // wall time per call, one worker
  double convergence_rate = 0.0;
  double mean_iters = 0.0;
  // Filled when workers > 1.
  int workers = 1;
  std::optional<double> parallel_mean_seconds;  // wall time / samples
  std::optional<double> speedup;
};

struct BenchConfig {
  // Problem file; its dimension is replaced by each entry of `dimensions`.
  std::filesystem::path problem;
  std::vector<Index> dimensions{4, 8, 12, 16};
  std::size_t samples = 1000;
  int workers = 1;
  std::uint64_t seed = 0;
};

BenchRow bench_dimension(const io::Problem& problem, std::size_t samples, int workers, std::uint64_t seed);
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

// Sets flush-to-zero / denormals-are-zero on the calling thread where the
// platform supports it. Returns false otherwise.
bool flush_denormals();

}  // namespace hopf

#endif  // HOPF_BENCH_HPP
