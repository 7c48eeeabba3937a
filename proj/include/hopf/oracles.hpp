#ifndef HOPF_ORACLES_HPP
#define HOPF_ORACLES_HPP

#include <cmath>
#include <limits>
#include <utility>

#include "hopf/core.hpp"
#include "hopf/problem.hpp"
#include "hopf/solver.hpp"

// Closed-form solutions and a brute-force Hopf minimiser. These are the
// ground truth for the solver tests and never call the split Bregman path.
namespace hopf::oracles {

template <typename Scalar>
struct ValueAndGradient {
  Scalar value;
  Vector<Scalar> gradient;
};

// H = |.|_1, J = 1/2 (sum x_i^2 / a_i^2 - 1): coordinates with |x_i| <= t
// drop out, the rest contribute 1/2 ((|x_i| - t) / a_i)^2.
template <typename Scalar>
ValueAndGradient<Scalar> ellipsoid_l1(const Vector<Scalar>& x, Scalar t, const Vector<Scalar>& a) {
  check_dimension(a.size(), x.size());
  if (!(t >= Scalar(0))) throw InvalidArgument("ellipsoid_l1: t must be >= 0");
  ValueAndGradient<Scalar> out{Scalar(-0.5), Vector<Scalar>::Zero(x.size())};
  for (Index i = 0; i < x.size(); ++i) {
    const Scalar excess = std::abs(x(i)) - t;
    if (excess <= Scalar(0)) continue;
    const Scalar r = excess / a(i);
    out.value += Scalar(0.5) * r * r;
    out.gradient(i) = (x(i) > Scalar(0) ? excess : -excess) / (a(i) * a(i));
  }
  return out;
}

// H = |.|_2, J = 1/2(|x|^2 - 1): the unit sphere moving outwards.
template <typename Scalar>
Scalar sphere_l2_outward(const Vector<Scalar>& x, Scalar t) {
  if (!(t >= Scalar(0))) throw InvalidArgument("sphere_l2_outward: t must be >= 0");
  const Scalar r = x.norm();
  return r > t ? Scalar(0.5) * (r - t) * (r - t) - Scalar(0.5) : Scalar(-0.5);
}

// Inward motion, H = -|.|_1 (nonconvex). The zero level set is gone once
// t >= max_i a_i.
template <typename Scalar>
Scalar ellipsoid_l1_inward(const Vector<Scalar>& x, Scalar t, const Vector<Scalar>& a) {
  check_dimension(a.size(), x.size());
  if (!(t >= Scalar(0))) throw InvalidArgument("ellipsoid_l1_inward: t must be >= 0");
  return Scalar(-0.5) + Scalar(0.5) * ((x.array().abs() + t) / a.array()).square().sum();
}

// Inward motion of the unit sphere: zero set at |x|_2 = 1 - t for t <= 1.
template <typename Scalar>
Scalar sphere_l2_inward(const Vector<Scalar>& x, Scalar t) {
  if (!(t >= Scalar(0))) throw InvalidArgument("sphere_l2_inward: t must be >= 0");
  const Scalar r = x.norm() + t;
  return Scalar(0.5) * r * r - Scalar(0.5);
}

template <typename Scalar>
struct BruteForceResult {
  Scalar value;  // phi(x, t) = -min objective
  Vector<Scalar> minimizer;
  // Incumbent of the coarse pass sat on the grid boundary: the grid does not
  // bracket the minimiser.
  bool boundary_incumbent = false;
};

struct BruteForceOptions {
  double grid_radius = 25.0;
  double grid_step = 0.1;
  int refinements = 2;
  // Each refinement divides the step by this factor over a window of
  // +-window_cells previous steps around the incumbent.
  int refine_factor = 25;
  int window_cells = 3;
};

/// Exhaustive minimisation of an objective over a centred cubic grid
/// (n <= 3), followed by nested refinement around the incumbent. Refined
/// grids share the coarse grid's lattice so that coordinate axes stay on
/// the grid.
template <typename Scalar, typename Objective>
BruteForceResult<Scalar> brute_force_minimize(Index n, Objective&& objective,
                                              const BruteForceOptions& opts = {}) {
  if (n < 1 || n > 3) throw InvalidArgument("brute force: dimension must be 1, 2 or 3");
  Vector<Scalar> center = Vector<Scalar>::Zero(n);
  Scalar step = Scalar(opts.grid_step);
  int half = static_cast<int>(std::ceil(opts.grid_radius / opts.grid_step));
  BruteForceResult<Scalar> out{std::numeric_limits<Scalar>::infinity(), center, false};
  Vector<Scalar> v(n);
  for (int pass = 0; pass <= opts.refinements; ++pass) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    Vector<Scalar> best_v = center;
    int best_idx[3] = {0, 0, 0};
    int idx[3] = {-half, n > 1 ? -half : 0, n > 2 ? -half : 0};
    const int hi1 = n > 1 ? half : 0, hi2 = n > 2 ? half : 0;
    for (idx[2] = n > 2 ? -half : 0; idx[2] <= hi2; ++idx[2]) {
      for (idx[1] = n > 1 ? -half : 0; idx[1] <= hi1; ++idx[1]) {
        for (idx[0] = -half; idx[0] <= half; ++idx[0]) {
          for (Index i = 0; i < n; ++i) v(i) = center(i) + step * Scalar(idx[i]);
          const Scalar f = objective(v);
          if (f < best) {
            best = f;
            best_v = v;
            for (int i = 0; i < 3; ++i) best_idx[i] = idx[i];
          }
        }
      }
    }
    if (pass == 0)
      for (Index i = 0; i < n; ++i)
        if (std::abs(best_idx[i]) == half) out.boundary_incumbent = true;
    out.value = -best;
    out.minimizer = best_v;
    center = best_v;
    step /= Scalar(opts.refine_factor);
    half = opts.window_cells * opts.refine_factor;
  }
  return out;
}

// -min_v { J*(v) + t H(v) - <x, v> } by brute force; H may be a min.
template <typename Scalar>
BruteForceResult<Scalar> brute_force_hopf(const Vector<Scalar>& x, Scalar t, const Hamiltonian<Scalar>& h,
                                          const InitialData<Scalar>& j, const BruteForceOptions& opts = {}) {
  return brute_force_minimize<Scalar>(
      x.size(), [&](const Vector<Scalar>& v) { return hopf_objective(v, x, t, h, j); }, opts);
}

}  // namespace hopf::oracles

#endif  // HOPF_ORACLES_HPP
