#include "hopf/slice.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include <fmt/format.h>
#include <fmt/os.h>

namespace hopf {

void SliceJob::validate(Index dimension) const {
  check_dimension(dimension, base.size());
  for (int a = 0; a < 2; ++a) {
    if (axes[a] < 0 || axes[a] >= dimension) throw InvalidArgument("slice: axis out of range");
    if (samples[a] < 2) throw InvalidArgument("slice: need at least 2 samples per axis");
    if (!std::isfinite(lower[a]) || !std::isfinite(upper[a]) || !(lower[a] < upper[a]))
      throw InvalidArgument("slice: ranges must be finite with lower < upper");
  }
  if (axes[0] == axes[1]) throw InvalidArgument("slice: the two axes must differ");
  if (times.empty()) throw InvalidArgument("slice: no times given");
  for (double t : times)
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("slice: times must be finite and >= 0");
  if (workers < 1) throw InvalidArgument("slice: workers must be >= 1");
  if (contour_step && !(*contour_step > 0.0)) throw InvalidArgument("slice: contour step must be positive");
}

double SliceJob::coordinate(int axis, int k) const {
  return lower[axis] + double(k) * (upper[axis] - lower[axis]) / double(samples[axis] - 1);
}

SliceGrid compute_slice(const io::Problem& problem, const SliceJob& job, double time) {
  job.validate(problem.dimension);
  SliceGrid grid;
  grid.time = time;
  grid.rows = job.samples[0];
  grid.cols = job.samples[1];
  for (int r = 0; r < grid.rows; ++r) grid.x1.push_back(job.coordinate(0, r));
  for (int c = 0; c < grid.cols; ++c) grid.x2.push_back(job.coordinate(1, c));
  const std::size_t total = static_cast<std::size_t>(grid.rows) * grid.cols;
  grid.phi.resize(total);
  grid.grad_norm.resize(total);
  grid.converged.resize(total);
  // Warm starts carry the split Bregman state of a single problem; min
  // combinations solve several and start each branch cold.
  const bool warm = job.warm_start && !problem.hamiltonian.is_min() && !problem.initial.is_min();

  auto run_rows = [&](int begin, int end) {
    Vector<double> x = job.base;
    for (int r = begin; r < end; ++r) {
      SolverConfig<double> cfg = problem.solver;
      x(job.axes[0]) = grid.x1[r];
      for (int c = 0; c < grid.cols; ++c) {
        x(job.axes[1]) = grid.x2[c];
        Evaluation<double> e = solve(x, time, problem.hamiltonian, problem.initial, cfg);
        const std::size_t i = static_cast<std::size_t>(r) * grid.cols + c;
        grid.phi[i] = e.value;
        grid.grad_norm[i] = e.gradient.norm();
        grid.converged[i] = e.converged;
        if (warm) cfg.warm_start = e.stats.state;
      }
    }
  };

  const int workers = std::min(job.workers, grid.rows);
  if (workers <= 1) {
    run_rows(0, grid.rows);
    return grid;
  }
  const int chunk = (grid.rows + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk, end = std::min(grid.rows, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, w, begin, end] {
        try {
          run_rows(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return grid;
}

std::vector<Segment> marching_squares(const SliceGrid& grid, double step) {
  if (!(step > 0.0)) throw InvalidArgument("marching_squares: step must be positive");
  std::vector<Segment> out;
  struct Point {
    double x1, x2;
  };
  for (int r = 0; r + 1 < grid.rows; ++r) {
    for (int c = 0; c + 1 < grid.cols; ++c) {
      // Corners in cyclic order (r,c) (r,c+1) (r+1,c+1) (r+1,c).
      const double v[4] = {grid.at(r, c), grid.at(r, c + 1), grid.at(r + 1, c + 1), grid.at(r + 1, c)};
      const Point p[4] = {{grid.x1[r], grid.x2[c]},
                          {grid.x1[r], grid.x2[c + 1]},
                          {grid.x1[r + 1], grid.x2[c + 1]},
                          {grid.x1[r + 1], grid.x2[c]}};
      if (!std::all_of(std::begin(v), std::end(v), [](double a) { return std::isfinite(a); })) continue;
      const double lo = *std::min_element(std::begin(v), std::end(v));
      const double hi = *std::max_element(std::begin(v), std::end(v));
      for (double k = std::ceil(lo / step); k * step <= hi; k += 1.0) {
        const double level = k * step;
        bool above[4];
        for (int i = 0; i < 4; ++i) above[i] = v[i] >= level;
        Point cross[4];
        bool has[4];
        int count = 0;
        for (int e = 0; e < 4; ++e) {
          const int a = e, b = (e + 1) % 4;
          has[e] = above[a] != above[b];
          if (!has[e]) continue;
          const double w = (level - v[a]) / (v[b] - v[a]);
          cross[e] = {p[a].x1 + w * (p[b].x1 - p[a].x1), p[a].x2 + w * (p[b].x2 - p[a].x2)};
          ++count;
        }
        auto emit = [&](int e, int f) { out.push_back({level, cross[e].x1, cross[e].x2, cross[f].x1, cross[f].x2}); };
        if (count == 2) {
          int first = -1, second = -1;
          for (int e = 0; e < 4; ++e)
            if (has[e]) (first < 0 ? first : second) = e;
          emit(first, second);
        } else if (count == 4) {
          // Saddle: the cell center decides which diagonal is connected.
          const bool center = 0.25 * (v[0] + v[1] + v[2] + v[3]) >= level;
          if (center == above[0]) {
            emit(0, 1);
            emit(2, 3);
          } else {
            emit(3, 0);
            emit(1, 2);
          }
        }
      }
    }
  }
  return out;
}

void write_slice_csv(const SliceGrid& grid, const std::filesystem::path& path) {
  auto out = fmt::output_file(path.string());
  out.print("x1,x2,phi,grad_norm,converged\n");
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * grid.cols + c;
      out.print("{:.17g},{:.17g},{:.17g},{:.17g},{}\n", grid.x1[r], grid.x2[c], grid.phi[i], grid.grad_norm[i],
                grid.converged[i] ? 1 : 0);
    }
}

void write_contours_csv(const std::vector<Segment>& segments, const std::filesystem::path& path) {
  auto out = fmt::output_file(path.string());
  out.print("level,x1a,x2a,x1b,x2b\n");
  for (const auto& s : segments)
    out.print("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.level, s.x1a, s.x2a, s.x1b, s.x2b);
}

std::string slice_file_name(const std::string& prefix, double time) {
  return fmt::format("{}_t{:g}.csv", prefix, time);
}

SliceReport run_slice(const io::Problem& problem, const SliceJob& job, const std::filesystem::path& directory) {
  job.validate(problem.dimension);
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw Error("slice: cannot create " + directory.string() + ": " + ec.message());
  SliceReport report;
  auto& written = report.files;
  for (double t : job.times) {
    const SliceGrid grid = compute_slice(problem, job, t);
    report.unconverged += static_cast<std::size_t>(std::count(grid.converged.begin(), grid.converged.end(), 0));
    const auto path = directory / slice_file_name("phi", t);
    try {
      write_slice_csv(grid, path);
      written.push_back(path);
      if (job.contour_step) {
        const auto contours = directory / slice_file_name("contours", t);
        write_contours_csv(marching_squares(grid, *job.contour_step), contours);
        written.push_back(contours);
      }
    } catch (const std::system_error& e) {
      throw Error("slice: cannot write " + path.string() + ": " + e.what());
    }
  }
  return report;
}

}  // namespace hopf
