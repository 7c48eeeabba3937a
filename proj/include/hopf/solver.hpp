#ifndef HOPF_SOLVER_HPP
#define HOPF_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "hopf/core.hpp"
#include "hopf/problem.hpp"
#include "hopf/prox.hpp"

namespace hopf {

template <typename Scalar>
struct WarmStart {
  Vector<Scalar> v;
  Vector<Scalar> d;
  Vector<Scalar> b;
};

/// Split Bregman parameters. `tol` is compared against the squared norms
/// |v^k - v^{k-1}|^2, |d^k - d^{k-1}|^2 and |d^k - v^k|^2.
template <typename Scalar>
struct SolverConfig {
  Scalar lambda = Scalar(1);
  Scalar tol = Scalar(1e-8);
  int max_iters = 10000;
  // Defaults to v = d = x, b = 0 when absent.
  std::optional<WarmStart<Scalar>> warm_start;

  void validate() const {
    if (!(lambda > Scalar(0))) throw InvalidArgument("solver: lambda must be positive");
    if (!(tol > Scalar(0))) throw InvalidArgument("solver: tol must be positive");
    if (max_iters < 1) throw InvalidArgument("solver: max_iters must be >= 1");
  }
};

template <typename Scalar>
struct SolverStats {
  // Final squared stopping residuals.
  Scalar dv = Scalar(0);
  Scalar dd = Scalar(0);
  Scalar gap = Scalar(0);
  // Filled by the min/max combinators.
  std::optional<std::size_t> branch;
  bool tie = false;
  std::vector<Scalar> branch_values;
  // Final split Bregman state, usable as a warm start.
  std::optional<WarmStart<Scalar>> state;
};

template <typename Scalar>
struct Evaluation {
  Scalar value = Scalar(0);
  // Minimiser of the Hopf objective; equals grad_x phi(x, t) when unique.
  Vector<Scalar> gradient;
  int iters = 0;
  bool converged = false;
  SolverStats<Scalar> stats;
};

/// Generic split Bregman loop for min_v { F(v) + t G(v) - <x, v> }.
///
/// `prox_f(z, a)` returns prox_{a dF}(z), `prox_g(z, a)` returns
/// prox_{a dG}(z), and `objective(v)` evaluates F(v) + t G(v) - <x, v>.
/// Per iteration:
///   v <- prox_{(1/lambda) dF}(d - b + x / lambda)
///   d <- prox_{(t/lambda) dG}(v + b)
///   b <- b + v - d
/// The returned gradient is the G-side iterate d and the value is
/// -objective(d).
template <typename Scalar, typename ProxF, typename ProxG, typename Objective>
Evaluation<Scalar> split_bregman(const Vector<Scalar>& x, Scalar t, ProxF&& prox_f, ProxG&& prox_g,
                                 Objective&& objective, const SolverConfig<Scalar>& cfg) {
  cfg.validate();
  const Index n = x.size();
  Vector<Scalar> v = x, d = x, b = Vector<Scalar>::Zero(n);
  if (cfg.warm_start) {
    check_dimension(n, cfg.warm_start->v.size());
    check_dimension(n, cfg.warm_start->d.size());
    check_dimension(n, cfg.warm_start->b.size());
    v = cfg.warm_start->v;
    d = cfg.warm_start->d;
    b = cfg.warm_start->b;
  }
  const Scalar inv_lambda = Scalar(1) / cfg.lambda;
  const Scalar h_weight = t * inv_lambda;
  const Vector<Scalar> x_scaled = x * inv_lambda;

  Evaluation<Scalar> out;
  Vector<Scalar> v_prev(n), d_prev(n), z(n);
  int k = 0;
  while (k < cfg.max_iters) {
    ++k;
    v_prev.swap(v);
    d_prev.swap(d);
    z.noalias() = d_prev - b + x_scaled;
    v = prox_f(z, inv_lambda);
    z.noalias() = v + b;
    d = prox_g(z, h_weight);
    b += v - d;
    out.stats.dv = (v - v_prev).squaredNorm();
    out.stats.dd = (d - d_prev).squaredNorm();
    out.stats.gap = (d - v).squaredNorm();
    if (out.stats.dv <= cfg.tol && out.stats.dd <= cfg.tol && out.stats.gap <= cfg.tol) {
      out.converged = true;
      break;
    }
  }
  out.iters = k;
  out.value = -objective(d);
  out.gradient = d;
  out.stats.state = WarmStart<Scalar>{std::move(v), d, std::move(b)};
  return out;
}

/// prox_{alpha dJ*}(z) for the closed-form conjugates of InitialData.
template <typename Scalar, typename Derived>
Vector<Scalar> prox_conjugate(const InitialData<Scalar>& j, const Eigen::MatrixBase<Derived>& z,
                              Scalar alpha) {
  using J = InitialData<Scalar>;
  return std::visit(
      overloaded{[&](const typename J::HalfSqL2&) -> Vector<Scalar> { return z / (Scalar(1) + alpha); },
                 // (1/2|.|_1^2)* = 1/2|.|_inf^2
                 [&](const typename J::HalfSqL1&) -> Vector<Scalar> { return prox_half_linf_sq(z, alpha); },
                 // (1/2|.|_inf^2)* = 1/2|.|_1^2
                 [&](const typename J::HalfSqLinf&) -> Vector<Scalar> {
                   return prox_half_l1_sq(z, alpha).point;
                 },
                 [&](const typename J::DiagQuadratic& q) -> Vector<Scalar> {
                   return prox_quadratic(z, alpha, q.inverse_weights);
                 },
                 [&](const typename J::EllipsoidLevel& e) -> Vector<Scalar> {
                   return prox_quadratic(z, alpha, Vector<Scalar>(e.semi_axes.array().square()));
                 },
                 [&](const typename J::ShiftedQuadratic& s) -> Vector<Scalar> {
                   return (z + (alpha * Scalar(s.sign)) * s.shift) / (Scalar(1) + alpha);
                 },
                 [&](const typename J::MinOf&) -> Vector<Scalar> {
                   throw InvalidArgument("prox_conjugate: min of initial data needs the combinator");
                 }},
      j.kind());
}

/// prox_{alpha dH}(z) for the norm Hamiltonians.
template <typename Scalar, typename Derived>
Vector<Scalar> prox_hamiltonian(const Hamiltonian<Scalar>& h, const Eigen::MatrixBase<Derived>& z,
                                Scalar alpha) {
  using H = Hamiltonian<Scalar>;
  return std::visit(overloaded{[&](const typename H::L1&) -> Vector<Scalar> { return shrink1(z, alpha); },
                               [&](const typename H::L2&) -> Vector<Scalar> { return shrink2(z, alpha); },
                               [&](const typename H::Linf&) -> Vector<Scalar> { return prox_linf(z, alpha); },
                               [&](const typename H::NormA& a) -> Vector<Scalar> {
                                 return prox_norm_A(z, alpha, a.spectral);
                               },
                               [&](const typename H::MinOf&) -> Vector<Scalar> {
                                 throw InvalidArgument("prox_hamiltonian: min of Hamiltonians needs the combinator");
                               }},
                    h.kind());
}

// J*(v) + t H(v) - <x, v>. H may be a min; J may not.
template <typename Scalar>
Scalar hopf_objective(const Vector<Scalar>& v, const Vector<Scalar>& x, Scalar t,
                      const Hamiltonian<Scalar>& h, const InitialData<Scalar>& j) {
  check_dimension(x.size(), v.size());
  return eval_conjugate(j, v) + t * eval_hamiltonian(h, v) - x.dot(v);
}

// Minimal-norm element of the subdifferential of J at x.
template <typename Scalar>
Vector<Scalar> min_norm_subgradient(const InitialData<Scalar>& j, const Vector<Scalar>& x) {
  using J = InitialData<Scalar>;
  if (std::holds_alternative<typename J::HalfSqL1>(j.kind())) {
    const Scalar s = x.template lpNorm<1>();
    Vector<Scalar> g(x.size());
    for (Index i = 0; i < x.size(); ++i)
      g(i) = x(i) > Scalar(0) ? s : (x(i) < Scalar(0) ? -s : Scalar(0));
    return g;
  }
  if (std::holds_alternative<typename J::HalfSqLinf>(j.kind())) {
    Vector<Scalar> g = Vector<Scalar>::Zero(x.size());
    if (x.size() == 0) return g;
    const Scalar top = x.cwiseAbs().maxCoeff();
    if (top == Scalar(0)) return g;
    Index count = 0;
    for (Index i = 0; i < x.size(); ++i) count += std::abs(x(i)) == top;
    for (Index i = 0; i < x.size(); ++i)
      if (std::abs(x(i)) == top) g(i) = x(i) / Scalar(count);
    return g;
  }
  return grad_initial(j, x);
}

/// phi(x, t) and its gradient for convex J and convex 1-homogeneous H by
/// split Bregman minimisation of the Hopf objective. t = 0 returns J(x).
/// Nonconvergence is reported through `converged`, not thrown.
template <typename Scalar>
Evaluation<Scalar> evaluate(const Vector<Scalar>& x, Scalar t, const Hamiltonian<Scalar>& h,
                            const InitialData<Scalar>& j, const SolverConfig<Scalar>& cfg = {}) {
  if (h.is_min() || j.is_min())
    throw InvalidArgument("evaluate: use evaluate_min_initial / evaluate_min_hamiltonian for minima");
  if (auto d = h.dimension()) check_dimension(*d, x.size());
  if (auto d = j.dimension()) check_dimension(*d, x.size());
  if (!(t >= Scalar(0)) || !std::isfinite(t)) throw InvalidArgument("evaluate: t must be >= 0");
  if (t == Scalar(0)) {
    Evaluation<Scalar> out;
    out.value = eval_initial(j, x);
    out.gradient = min_norm_subgradient(j, x);
    out.converged = true;
    return out;
  }
  return split_bregman<Scalar>(
      x, t, [&](const Vector<Scalar>& z, Scalar a) { return prox_conjugate(j, z, a); },
      [&](const Vector<Scalar>& z, Scalar a) { return prox_hamiltonian(h, z, a); },
      [&](const Vector<Scalar>& v) { return hopf_objective(v, x, t, h, j); }, cfg);
}

namespace detail {

template <typename Scalar, typename Better>
Evaluation<Scalar> select_branch(std::vector<Evaluation<Scalar>> branches, Better better) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < branches.size(); ++i)
    if (better(branches[i].value, branches[arg].value)) arg = i;
  bool tie = false;
  std::vector<Scalar> values;
  values.reserve(branches.size());
  for (std::size_t i = 0; i < branches.size(); ++i) {
    values.push_back(branches[i].value);
    if (i != arg && branches[i].value == branches[arg].value) tie = true;
  }
  bool all_converged = true;
  for (const auto& b : branches) all_converged = all_converged && b.converged;
  Evaluation<Scalar> out = std::move(branches[arg]);
  out.converged = all_converged;
  out.stats.branch = arg;
  out.stats.tie = tie;
  out.stats.branch_values = std::move(values);
  return out;
}

}  // namespace detail

/// phi for J = min_i J_i: the pointwise minimum of the member solutions.
/// Lowest index wins ties; ties are flagged in stats.
template <typename Scalar>
Evaluation<Scalar> evaluate_min_initial(const Vector<Scalar>& x, Scalar t, const Hamiltonian<Scalar>& h,
                                        const std::vector<InitialData<Scalar>>& members,
                                        const SolverConfig<Scalar>& cfg = {}) {
  if (members.empty()) throw InvalidArgument("evaluate_min_initial: empty list");
  std::vector<Evaluation<Scalar>> branches;
  branches.reserve(members.size());
  for (const auto& j : members) branches.push_back(evaluate(x, t, h, j, cfg));
  return detail::select_branch(std::move(branches), [](Scalar a, Scalar b) { return a < b; });
}

/// phi for H = min_i H_i: the pointwise maximum of the member solutions.
template <typename Scalar>
Evaluation<Scalar> evaluate_min_hamiltonian(const Vector<Scalar>& x, Scalar t,
                                            const std::vector<Hamiltonian<Scalar>>& members,
                                            const InitialData<Scalar>& j,
                                            const SolverConfig<Scalar>& cfg = {}) {
  if (members.empty()) throw InvalidArgument("evaluate_min_hamiltonian: empty list");
  std::vector<Evaluation<Scalar>> branches;
  branches.reserve(members.size());
  for (const auto& h : members) branches.push_back(evaluate(x, t, h, j, cfg));
  return detail::select_branch(std::move(branches), [](Scalar a, Scalar b) { return a > b; });
}

// Dispatches on min variants. A min on both sides is rejected.
template <typename Scalar>
Evaluation<Scalar> solve(const Vector<Scalar>& x, Scalar t, const Hamiltonian<Scalar>& h,
                         const InitialData<Scalar>& j, const SolverConfig<Scalar>& cfg = {}) {
  using H = Hamiltonian<Scalar>;
  using J = InitialData<Scalar>;
  if (h.is_min() && j.is_min())
    throw InvalidArgument("solve: min of Hamiltonians together with min of initial data is not supported");
  if (auto* mh = std::get_if<typename H::MinOf>(&h.kind()))
    return evaluate_min_hamiltonian(x, t, mh->members, j, cfg);
  if (auto* mj = std::get_if<typename J::MinOf>(&j.kind()))
    return evaluate_min_initial(x, t, h, mj->members, cfg);
  return evaluate(x, t, h, j, cfg);
}

// Optimal control grad H(grad_x phi); throws NonDifferentiable when the
// control is not unique.
template <typename Scalar>
Vector<Scalar> recover_control(const Vector<Scalar>& grad, const Hamiltonian<Scalar>& h) {
  return grad_hamiltonian(h, grad);
}

/// Independent evaluations of `solve`, partitioned into contiguous blocks
/// across `workers` threads. Results are in input order and do not depend
/// on the worker count.
template <typename Scalar>
std::vector<Evaluation<Scalar>> evaluate_batch(const std::vector<Vector<Scalar>>& points,
                                               const std::vector<Scalar>& times,
                                               const Hamiltonian<Scalar>& h,
                                               const InitialData<Scalar>& j,
                                               const SolverConfig<Scalar>& cfg, int workers = 1) {
  if (points.size() != times.size()) throw InvalidArgument("evaluate_batch: size mismatch");
  std::vector<Evaluation<Scalar>> out(points.size());
  const std::size_t count = points.size();
  const std::size_t w = static_cast<std::size_t>(std::max(1, workers));
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = solve(points[i], times[i], h, j, cfg);
  };
  if (w == 1 || count < 2) {
    run(0, count);
    return out;
  }
  const std::size_t chunk = (count + w - 1) / w;
  std::vector<std::exception_ptr> errors((count + chunk - 1) / chunk);
  {
    std::vector<std::jthread> pool;
    for (std::size_t begin = 0, slot = 0; begin < count; begin += chunk, ++slot)
      pool.emplace_back([&, begin, slot] {
        try {
          run(begin, std::min(count, begin + chunk));
        } catch (...) {
          errors[slot] = std::current_exception();
        }
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace hopf

#endif  // HOPF_SOLVER_HPP
