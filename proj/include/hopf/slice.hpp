#ifndef HOPF_SLICE_HPP
#define HOPF_SLICE_HPP

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hopf/io.hpp"

namespace hopf {

/// A 2-D slice through R^n: coordinates `axes` vary over their ranges,
/// everything else is taken from `base`.
struct SliceJob {
  std::array<Index, 2> axes{0, 1};  // zero-based
  Vector<double> base;
  std::array<double, 2> lower{-20.0, -20.0};
  std::array<double, 2> upper{20.0, 20.0};
  std::array<int, 2> samples{100, 100};
  std::vector<double> times{0.0};
  // Warm-start each point from its predecessor along the second axis.
  bool warm_start = false;
  int workers = 1;
  // Emit marching-squares segments at multiples of this level.
  std::optional<double> contour_step;

  void validate(Index dimension) const;
  double coordinate(int axis, int k) const;
};

struct SliceGrid {
  double time = 0.0;
  int rows = 0;  // samples along the first axis
  int cols = 0;  // samples along the second axis
  std::vector<double> x1, x2;  // per-row and per-column coordinates
  std::vector<double> phi;     // row-major: phi[r * cols + c]
  std::vector<double> grad_norm;
  std::vector<char> converged;

  double at(int r, int c) const { return phi[static_cast<std::size_t>(r) * cols + c]; }
};

struct Segment {
  double level;
  double x1a, x2a, x1b, x2b;
};

SliceGrid compute_slice(const io::Problem& problem, const SliceJob& job, double time);

// Segments of the level sets phi = k * step crossing the grid.
std::vector<Segment> marching_squares(const SliceGrid& grid, double step);

// CSV "x1,x2,phi,grad_norm,converged", rows in grid order (first axis
// outer), numbers printed with 17 significant digits.
void write_slice_csv(const SliceGrid& grid, const std::filesystem::path& path);
void write_contours_csv(const std::vector<Segment>& segments, const std::filesystem::path& path);

// Output file name for a time, e.g. "phi_t5.csv".
std::string slice_file_name(const std::string& prefix, double time);

struct SliceReport {
  std::vector<std::filesystem::path> files;
  std::size_t unconverged = 0;
};

// Runs the job for every time and writes the CSVs (and contours) into
// `directory`.
SliceReport run_slice(const io::Problem& problem, const SliceJob& job, const std::filesystem::path& directory);

}  // namespace hopf

#endif  // HOPF_SLICE_HPP
