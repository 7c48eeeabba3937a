#ifndef HOPF_CLOSEST_POINT_HPP
#define HOPF_CLOSEST_POINT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "hopf/core.hpp"
#include "hopf/level_set.hpp"
#include "hopf/problem.hpp"
#include "hopf/prox.hpp"
#include "hopf/solver.hpp"

namespace hopf {

template <typename Scalar>
struct ClosestPointOptions {
  // Inner split Bregman settings. The direction of grad psi sets the
  // projection point, so the default is far tighter than for evaluation.
  SolverConfig<Scalar> solver = [] {
    SolverConfig<Scalar> cfg;
    cfg.tol = Scalar(1e-20);
    return cfg;
  }();
  Scalar root_tol = Scalar(1e-6);
  int max_newton = 100;
  int max_bracket = 60;
};

template <typename Scalar>
struct ClosestPointResult {
  Scalar distance = Scalar(0);
  Vector<Scalar> point;
  Vector<Scalar> gradient_at_root;
  int newton_iters = 0;
  std::optional<std::size_t> branch;
  bool tie = false;
  // |psi(y, s_l)| for every time tried.
  std::vector<Scalar> psi_history;
};

/// psi(y, s) for the eikonal problem (H = |.|_2) started from L.
template <typename Scalar>
Evaluation<Scalar> eikonal_value(const Vector<Scalar>& y, Scalar s, const LevelSetData<Scalar>& level,
                                 const SolverConfig<Scalar>& cfg = {}) {
  check_dimension(level.dimension(), y.size());
  if (!(s >= Scalar(0)) || !std::isfinite(s)) throw InvalidArgument("eikonal_value: s must be >= 0");
  if (s == Scalar(0)) {
    Evaluation<Scalar> out;
    out.value = level.value(y);
    out.gradient = level.gradient(y);
    out.converged = true;
    return out;
  }
  return split_bregman<Scalar>(
      y, s, [&](const Vector<Scalar>& z, Scalar a) { return level.prox_conjugate(z, a); },
      [](const Vector<Scalar>& z, Scalar a) { return shrink2(z, a); },
      [&](const Vector<Scalar>& v) { return level.conjugate(v) + s * v.norm() - y.dot(v); }, cfg);
}

/// Largest Euclidean distance from the shape's center to its boundary.
template <typename Scalar>
Scalar circumradius(const ConvexShape<Scalar>& shape) {
  using S = ConvexShape<Scalar>;
  return std::visit(
      overloaded{[&](const typename S::PNormBall& b) {
                   if (b.p <= Scalar(2)) return b.radius;
                   const Scalar n = Scalar(shape.dimension());
                   return b.radius * std::pow(n, Scalar(0.5) - Scalar(1) / b.p);
                 },
                 [](const typename S::Ellipsoid& e) { return e.semi_axes.maxCoeff(); },
                 [](const typename S::QuadOverNorm& q) { return Scalar(1) / q.spectral.eigenvalues().minCoeff(); },
                 [&](const typename S::UnionOf& u) {
                   Scalar r(0);
                   for (const auto& m : u.members)
                     r = std::max(r, (m.center() - shape.center()).norm() + circumradius(m));
                   return r;
                 }},
      shape.kind());
}

/// Time s at which the front started at L's zero level set reaches y, i.e.
/// psi(y, s) = 0. psi(y, .) is convex and decreasing with slope -|grad psi|,
/// so Newton from the left is monotone; a geometric bracket and bisection
/// guard the remaining cases.
template <typename Scalar>
Scalar find_boundary_time(const Vector<Scalar>& y, const LevelSetData<Scalar>& level,
                          const ClosestPointOptions<Scalar>& opts, int* iters = nullptr,
                          std::vector<Scalar>* history = nullptr, Evaluation<Scalar>* at_root = nullptr) {
  const Scalar l0 = level.value(y);
  if (!(l0 > Scalar(0))) throw InvalidArgument("find_boundary_time: query is not exterior to the shape");
  const Scalar offset = (y - level.shape().center()).norm();
  const Scalar upper = offset + circumradius(level.shape());
  const Scalar grad0 = level.gradient(y).norm();
  Scalar s = grad0 > Scalar(0) ? l0 / grad0 : upper;
  s = std::clamp(s, Scalar(1e-3), std::max(Scalar(1e-3), upper));

  Scalar lo(0), hi = std::numeric_limits<Scalar>::infinity();
  int growth = 0;
  for (int k = 1; k <= opts.max_newton; ++k) {
    Evaluation<Scalar> e = eikonal_value(y, s, level, opts.solver);
    const Scalar psi = e.value;
    if (history) history->push_back(std::abs(psi));
    if (std::abs(psi) <= opts.root_tol) {
      if (iters) *iters = k;
      if (at_root) *at_root = std::move(e);
      return s;
    }
    if (psi > Scalar(0))
      lo = s;
    else
      hi = s;
    const Scalar slope = e.gradient.norm();
    Scalar next = slope > Scalar(0) ? s + psi / slope : std::numeric_limits<Scalar>::quiet_NaN();
    if (std::isinf(hi)) {
      if (!(next > lo) || !std::isfinite(next)) {
        if (++growth > opts.max_bracket) throw ConvergenceFailure("find_boundary_time: bracket growth cap");
        next = Scalar(2) * s;
      }
    } else if (!(next > lo && next < hi)) {
      next = Scalar(0.5) * (lo + hi);
    }
    s = next;
  }
  throw ConvergenceFailure("find_boundary_time: Newton iteration cap");
}

/// Euclidean projection of an exterior point onto a convex shape:
/// y - s grad psi / |grad psi| at the boundary time s.
template <typename Scalar>
ClosestPointResult<Scalar> closest(const Vector<Scalar>& y, const ConvexShape<Scalar>& shape,
                                   const ClosestPointOptions<Scalar>& opts = {}) {
  check_dimension(shape.dimension(), y.size());
  if (shape.is_union()) throw InvalidArgument("closest: use closest_union for unions");
  const auto level = LevelSetData<Scalar>::for_shape(shape);
  ClosestPointResult<Scalar> out;
  Evaluation<Scalar> root;
  out.distance = find_boundary_time(y, level, opts, &out.newton_iters, &out.psi_history, &root);
  const Scalar norm = root.gradient.norm();
  if (!(norm > Scalar(0))) throw ConvergenceFailure("closest: vanishing gradient at the boundary time");
  out.point = y - out.distance * root.gradient / norm;
  out.gradient_at_root = std::move(root.gradient);
  return out;
}

/// Closest point to a finite union of convex shapes: the member with the
/// smallest distance. Distances within a relative 1e-9 count as ties and
/// the lowest such index is reported.
template <typename Scalar>
ClosestPointResult<Scalar> closest_union(const Vector<Scalar>& y, const ConvexShape<Scalar>& shape,
                                         const ClosestPointOptions<Scalar>& opts = {}) {
  using S = ConvexShape<Scalar>;
  const auto* u = std::get_if<typename S::UnionOf>(&shape.kind());
  if (!u) return closest(y, shape, opts);
  check_dimension(shape.dimension(), y.size());
  for (const auto& m : u->members)
    if (!(shape_gauge(m, y) > Scalar(1)))
      throw InvalidArgument("closest_union: query lies inside or on a member");
  std::vector<ClosestPointResult<Scalar>> results;
  results.reserve(u->members.size());
  for (const auto& m : u->members) results.push_back(closest(y, m, opts));
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (const auto& r : results) best = std::min(best, r.distance);
  const Scalar tie_tol = Scalar(1e-9) * std::max(Scalar(1), best);
  std::size_t arg = results.size();
  int close = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].distance - best <= tie_tol) {
      ++close;
      if (arg == results.size()) arg = i;
    }
  }
  ClosestPointResult<Scalar> out = std::move(results[arg]);
  out.branch = arg;
  out.tie = close > 1;
  return out;
}

/// phi(y, t) for H = |.|_1 started from the shape's level-set function: the
/// sign says whether y is within Manhattan distance t of the shape. Unions
/// take the minimum over members.
template <typename Scalar>
Evaluation<Scalar> distance_field_manhattan(const Vector<Scalar>& y, const ConvexShape<Scalar>& shape, Scalar t,
                                            const SolverConfig<Scalar>& cfg = {}) {
  using S = ConvexShape<Scalar>;
  check_dimension(shape.dimension(), y.size());
  if (!(t >= Scalar(0)) || !std::isfinite(t)) throw InvalidArgument("distance_field_manhattan: t must be >= 0");
  if (const auto* u = std::get_if<typename S::UnionOf>(&shape.kind())) {
    std::vector<Evaluation<Scalar>> branches;
    for (const auto& m : u->members) branches.push_back(distance_field_manhattan(y, m, t, cfg));
    return detail::select_branch(std::move(branches), [](Scalar a, Scalar b) { return a < b; });
  }
  const auto level = LevelSetData<Scalar>::for_shape(shape);
  if (t == Scalar(0)) {
    Evaluation<Scalar> out;
    out.value = level.value(y);
    out.gradient = level.gradient(y);
    out.converged = true;
    return out;
  }
  return split_bregman<Scalar>(
      y, t, [&](const Vector<Scalar>& z, Scalar a) { return level.prox_conjugate(z, a); },
      [](const Vector<Scalar>& z, Scalar a) { return shrink1(z, a); },
      [&](const Vector<Scalar>& v) { return level.conjugate(v) + t * v.template lpNorm<1>() - y.dot(v); }, cfg);
}

}  // namespace hopf

#endif  // HOPF_CLOSEST_POINT_HPP
