#ifndef HOPF_PROX_HPP
#define HOPF_PROX_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <optional>
#include <vector>

#include "hopf/core.hpp"
#include "hopf/spectral.hpp"

// Proximal maps prox_{alpha df}(z) = argmin_w { alpha f(w) + 1/2 |w - z|^2 }
// and the projections they reduce to.
namespace hopf {

template <typename Scalar>
struct ProxResult {
  Vector<Scalar> point;
  // Lagrange multiplier (ball/ellipsoid projections) or threshold
  // (1/2 |.|_1^2), whenever the algorithm produces one.
  std::optional<Scalar> multiplier;
  std::optional<int> newton_iters;
};

template <typename Derived>
Vector<typename Derived::Scalar> shrink1(const Eigen::MatrixBase<Derived>& z,
                                         typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const Scalar zi = z(i);
    out(i) = zi > alpha ? zi - alpha : (zi < -alpha ? zi + alpha : Scalar(0));
  }
  return out;
}

template <typename Derived>
Vector<typename Derived::Scalar> shrink2(const Eigen::MatrixBase<Derived>& z,
                                         typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  const Scalar norm = z.norm();
  if (norm <= alpha || norm == Scalar(0)) return Vector<Scalar>::Zero(z.size());
  return z * ((norm - alpha) / norm);
}

// Optimal value of min_v { 1/2 |v - x|^2 + alpha |v|_2 }.
template <typename Scalar>
Scalar huber_value(Scalar norm_x, Scalar alpha) {
  return norm_x <= alpha ? Scalar(0.5) * norm_x * norm_x : alpha * norm_x - Scalar(0.5) * alpha * alpha;
}

// prox of 1/2 <w, A w> with A = P diag(weights) P^T, i.e. (I + alpha A)^{-1} z.
template <typename Derived>
Vector<typename Derived::Scalar> prox_quadratic(
    const Eigen::MatrixBase<Derived>& z, typename Derived::Scalar alpha,
    const Vector<typename Derived::Scalar>& weights,
    const Matrix<typename Derived::Scalar>* orthogonal_factor = nullptr) {
  using Scalar = typename Derived::Scalar;
  check_dimension(weights.size(), z.size());
  const auto scale = (Scalar(1) + alpha * weights.array()).inverse().eval();
  if (orthogonal_factor == nullptr) return (z.array() * scale).matrix();
  const Matrix<Scalar>& p = *orthogonal_factor;
  const Vector<Scalar> rotated = p.transpose() * z;
  return p * (rotated.array() * scale).matrix();
}

namespace detail {

// Sorted, deduplicated breakpoints {0} U {|z_i|}.
template <typename Derived>
std::vector<typename Derived::Scalar> abs_breakpoints(const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  std::vector<Scalar> points;
  points.reserve(static_cast<std::size_t>(z.size()) + 1);
  points.push_back(Scalar(0));
  for (Index i = 0; i < z.size(); ++i) points.push_back(std::abs(z(i)));
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

// |shrink1(z, mu)|_1 without materialising the vector.
template <typename Derived>
typename Derived::Scalar shrunk_l1(const Eigen::MatrixBase<Derived>& z,
                                   typename Derived::Scalar mu) {
  using Scalar = typename Derived::Scalar;
  Scalar sum(0);
  for (Index i = 0; i < z.size(); ++i) sum += std::max(std::abs(z(i)) - mu, Scalar(0));
  return sum;
}

// Root of a continuous, piecewise-affine, decreasing map g whose kinks lie in
// the sorted breakpoint list, with g(points.front()) >= 0 > g(points.back()).
// Binary search for the bracketing segment, then one affine interpolation.
template <typename Scalar, typename Map>
Scalar piecewise_affine_root(const std::vector<Scalar>& points, Map g) {
  std::size_t lo = 0;
  std::size_t hi = points.size() - 1;
  Scalar g_lo = g(points[lo]);
  Scalar g_hi = g(points[hi]);
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const Scalar g_mid = g(points[mid]);
    if (g_mid >= Scalar(0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
      g_hi = g_mid;
    }
  }
  if (g_lo == Scalar(0)) return points[lo];
  return points[lo] + g_lo * (points[hi] - points[lo]) / (g_lo - g_hi);
}

}  // namespace detail

/// Euclidean projection onto the l1 ball of radius alpha.
///
/// Outside the ball the projection is shrink1(z, mu) where mu > 0 solves
/// |shrink1(z, mu)|_1 = alpha. The map mu -> |shrink1(z, mu)|_1 is
/// piecewise affine and decreasing with kinks at the |z_i|, so mu is found
/// exactly by sorting the kinks, binary search and interpolation
/// (O(n log n)).
template <typename Derived>
ProxResult<typename Derived::Scalar> project_l1_ball(const Eigen::MatrixBase<Derived>& z,
                                                     typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  if (!(alpha > Scalar(0))) throw InvalidArgument("project_l1_ball: radius must be positive");
  if (z.template lpNorm<1>() <= alpha) return {Vector<Scalar>(z), Scalar(0), std::nullopt};
  const auto points = detail::abs_breakpoints(z);
  const Scalar mu = detail::piecewise_affine_root(
      points, [&](Scalar m) { return detail::shrunk_l1(z, m) - alpha; });
  return {shrink1(z, mu), mu, std::nullopt};
}

// prox of alpha |.|_inf = z - projection onto the l1 ball of radius alpha.
template <typename Derived>
Vector<typename Derived::Scalar> prox_linf(const Eigen::MatrixBase<Derived>& z,
                                           typename Derived::Scalar alpha) {
  return z - project_l1_ball(z, alpha).point;
}

/// Euclidean projection onto { x : sum_i ((P^T x)_i / d_i)^2 <= 1 }.
///
/// For an exterior point the projection in the eigenbasis is
/// d_i^2 w_i / (d_i^2 + mu) where mu > 0 solves
/// r(mu) = sum_i d_i^2 w_i^2 / (d_i^2 + mu)^2 - 1 = 0. r is decreasing and
/// convex on mu >= 0, so Newton from mu = 0 increases monotonically to the
/// root. Iteration stops once |mu_{k+1} - mu_k| <= step_tol.
template <typename Derived>
ProxResult<typename Derived::Scalar> project_ellipsoid(
    const Eigen::MatrixBase<Derived>& w, const Vector<typename Derived::Scalar>& semi_axes,
    const Matrix<typename Derived::Scalar>* orthogonal_factor = nullptr,
    typename Derived::Scalar step_tol = typename Derived::Scalar(1e-8), int max_iters = 200) {
  using Scalar = typename Derived::Scalar;
  check_dimension(semi_axes.size(), w.size());
  if ((semi_axes.array() <= Scalar(0)).any())
    throw InvalidArgument("project_ellipsoid: semi-axes must be positive");
  const Vector<Scalar> y = orthogonal_factor ? Vector<Scalar>(orthogonal_factor->transpose() * w)
                                             : Vector<Scalar>(w);
  if ((y.array() / semi_axes.array()).square().sum() <= Scalar(1))
    return {Vector<Scalar>(w), Scalar(0), 0};

  const auto d2 = semi_axes.array().square().eval();
  const auto num = (d2 * y.array().square()).eval();
  Scalar mu(0);
  int iter = 0;
  for (;; ++iter) {
    if (iter >= max_iters)
      throw ConvergenceFailure("project_ellipsoid: Newton iteration cap reached");
    const auto denom = (d2 + mu).eval();
    const Scalar r = (num / denom.square()).sum() - Scalar(1);
    const Scalar dr = Scalar(-2) * (num / denom.cube()).sum();
    Scalar next = mu - r / dr;
    if (next < Scalar(0)) next = Scalar(0);
    const Scalar step = std::abs(next - mu);
    mu = next;
    if (step <= step_tol) break;
  }
  Vector<Scalar> proj = (d2 * y.array() / (d2 + mu)).matrix();
  if (orthogonal_factor) proj = *orthogonal_factor * proj;
  return {std::move(proj), mu, iter + 1};
}

// prox of alpha sqrt(<., A .>) = z - projection onto alpha E, with
// E = { y : <y, A^{-1} y> <= 1 } the Wulff shape of the norm.
template <typename Derived>
Vector<typename Derived::Scalar> prox_norm_A(const Eigen::MatrixBase<Derived>& z,
                                             typename Derived::Scalar alpha,
                                             const SpectralMatrix<typename Derived::Scalar>& a) {
  using Scalar = typename Derived::Scalar;
  if (!(alpha > Scalar(0))) throw InvalidArgument("prox_norm_A: alpha must be positive");
  check_dimension(a.dimension(), z.size());
  const Vector<Scalar> axes = alpha * a.eigenvalues().array().sqrt();
  const Matrix<Scalar>* factor = a.is_diagonal() ? nullptr : &a.orthogonal_factor();
  return z - project_ellipsoid(z, axes, factor).point;
}

/// prox of (alpha/2)|.|_1^2.
///
/// The result is shrink1(z, beta) where beta >= 0 is the fixed point
/// beta = alpha |shrink1(z, beta)|_1, i.e. the root of the decreasing
/// piecewise-affine map g(beta) = alpha |shrink1(z, beta)|_1 - beta.
template <typename Derived>
ProxResult<typename Derived::Scalar> prox_half_l1_sq(const Eigen::MatrixBase<Derived>& z,
                                                     typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  if (!(alpha > Scalar(0))) throw InvalidArgument("prox_half_l1_sq: alpha must be positive");
  if (z.isZero(Scalar(0))) return {Vector<Scalar>::Zero(z.size()), Scalar(0), std::nullopt};
  const auto points = detail::abs_breakpoints(z);
  const Scalar beta = detail::piecewise_affine_root(
      points, [&](Scalar b) { return alpha * detail::shrunk_l1(z, b) - b; });
  return {shrink1(z, beta), beta, std::nullopt};
}

// prox of (alpha/2)|.|_inf^2 via Moreau: the conjugate of 1/2|.|_inf^2 is
// 1/2|.|_1^2, giving z - prox_{(1/alpha) 1/2|.|_1^2}(z).
template <typename Derived>
Vector<typename Derived::Scalar> prox_half_linf_sq(const Eigen::MatrixBase<Derived>& z,
                                                   typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  if (!(alpha > Scalar(0))) throw InvalidArgument("prox_half_linf_sq: alpha must be positive");
  return z - prox_half_l1_sq(z, Scalar(1) / alpha).point;
}

// prox_{alpha df}(z) = z - alpha prox_{(1/alpha) df*}(z / alpha).
// `prox_conj(u, beta)` must return prox_{beta df*}(u).
template <typename Derived, typename ConjProx>
Vector<typename Derived::Scalar> moreau_complement(ConjProx&& prox_conj,
                                                   const Eigen::MatrixBase<Derived>& z,
                                                   typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  if (!(alpha > Scalar(0))) throw InvalidArgument("moreau_complement: alpha must be positive");
  const Vector<Scalar> scaled = z / alpha;
  const Vector<Scalar> inner = prox_conj(scaled, Scalar(1) / alpha);
  return z - alpha * inner;
}

// A twice differentiable convex function: value, gradient and Hessian.
template <typename F, typename Scalar>
concept SmoothFunction = requires(const F& f, const Vector<Scalar>& w) {
  { f.value(w) } -> std::convertible_to<Scalar>;
  { f.gradient(w) } -> std::convertible_to<Vector<Scalar>>;
  { f.hessian(w) } -> std::convertible_to<Matrix<Scalar>>;
};

struct NewtonOptions {
  double residual_tol = 1e-10;
  double step_tol = 1e-12;
  int max_iters = 100;
  int max_halvings = 30;
};

/// prox of alpha f for smooth convex f: damped Newton on
/// F(w) = alpha grad f(w) + w - z = 0 from w = z, halving the step while the
/// residual norm increases.
template <typename Scalar, SmoothFunction<Scalar> F>
ProxResult<Scalar> prox_smooth_newton(const F& f, const Vector<Scalar>& z, Scalar alpha,
                                      const NewtonOptions& opts = {},
                                      const Vector<Scalar>* start = nullptr) {
  if (!(alpha > Scalar(0))) throw InvalidArgument("prox_smooth_newton: alpha must be positive");
  const Index n = z.size();
  Vector<Scalar> w = start ? *start : z;
  auto residual = [&](const Vector<Scalar>& u) -> Vector<Scalar> {
    return alpha * f.gradient(u) + u - z;
  };
  Vector<Scalar> res = residual(w);
  Scalar res_norm = res.norm();
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (res_norm <= Scalar(opts.residual_tol)) return {std::move(w), std::nullopt, iter};
    const Matrix<Scalar> jac = alpha * f.hessian(w) + Matrix<Scalar>::Identity(n, n);
    const Vector<Scalar> step = jac.ldlt().solve(res);
    Scalar scale(1);
    Vector<Scalar> trial = w - step;
    Vector<Scalar> trial_res = residual(trial);
    Scalar trial_norm = trial_res.norm();
    for (int h = 0; h < opts.max_halvings && !(trial_norm < res_norm); ++h) {
      scale *= Scalar(0.5);
      trial = w - scale * step;
      trial_res = residual(trial);
      trial_norm = trial_res.norm();
    }
    const Scalar moved = scale * step.norm();
    w = std::move(trial);
    res = std::move(trial_res);
    res_norm = trial_norm;
    if (moved <= Scalar(opts.step_tol)) return {std::move(w), std::nullopt, iter + 1};
  }
  if (res_norm <= Scalar(opts.residual_tol)) return {std::move(w), std::nullopt, opts.max_iters};
  throw ConvergenceFailure("prox_smooth_newton: iteration cap reached");
}

// Minimiser of 1/2|y - x|^2 - alpha |y|_1 (nonconvex); zero components stay.
template <typename Derived>
Vector<typename Derived::Scalar> stretch1(const Eigen::MatrixBase<Derived>& z,
                                          typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const Scalar zi = z(i);
    out(i) = zi > Scalar(0) ? zi + alpha : (zi < Scalar(0) ? zi - alpha : Scalar(0));
  }
  return out;
}

// Minimiser of 1/2|v - x|^2 - alpha |v|_2; multivalued at the origin.
template <typename Derived>
Vector<typename Derived::Scalar> stretch2(const Eigen::MatrixBase<Derived>& z,
                                          typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  const Scalar norm = z.norm();
  if (norm == Scalar(0)) throw NonDifferentiable("stretch2: multivalued at the origin");
  return z * ((norm + alpha) / norm);
}

}  // namespace hopf

#endif  // HOPF_PROX_HPP
