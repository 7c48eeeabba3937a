#ifndef HOPF_PROBLEM_HPP
#define HOPF_PROBLEM_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "hopf/core.hpp"
#include "hopf/spectral.hpp"

namespace hopf {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

namespace detail {

template <typename Member>
void check_min_members(const std::vector<Member>& members, const char* what) {
  if (members.empty()) throw InvalidArgument(std::string(what) + ": min of an empty list");
  std::optional<Index> dim;
  for (const auto& m : members) {
    if (m.is_min()) throw InvalidArgument(std::string(what) + ": nested min is not supported");
    if (auto d = m.dimension()) {
      if (dim && *dim != *d) throw DimensionMismatch(*dim, *d);
      dim = d;
    }
  }
}

template <typename Member>
std::optional<Index> common_dimension(const std::vector<Member>& members) {
  for (const auto& m : members)
    if (auto d = m.dimension()) return d;
  return std::nullopt;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Hamiltonians: convex, nonnegative, positively 1-homogeneous norms, and
// pointwise minima of them.

template <typename Scalar>
class Hamiltonian {
 public:
  struct L1 {};
  struct L2 {};
  struct Linf {};
  struct NormA {
    SpectralMatrix<Scalar> spectral;
  };
  struct MinOf {
    std::vector<Hamiltonian> members;
  };
  using Kind = std::variant<L1, L2, Linf, NormA, MinOf>;

  static Hamiltonian l1() { return Hamiltonian(L1{}); }
  static Hamiltonian l2() { return Hamiltonian(L2{}); }
  static Hamiltonian linf() { return Hamiltonian(Linf{}); }
  static Hamiltonian norm_a(SpectralMatrix<Scalar> a) { return Hamiltonian(NormA{std::move(a)}); }
  static Hamiltonian min_of(std::vector<Hamiltonian> members) {
    detail::check_min_members(members, "hamiltonian");
    return Hamiltonian(MinOf{std::move(members)});
  }

  const Kind& kind() const { return kind_; }
  bool is_min() const { return std::holds_alternative<MinOf>(kind_); }

  std::optional<Index> dimension() const {
    if (auto* a = std::get_if<NormA>(&kind_)) return a->spectral.dimension();
    if (auto* m = std::get_if<MinOf>(&kind_)) return detail::common_dimension(m->members);
    return std::nullopt;
  }

  std::string name() const {
    return std::visit(overloaded{[](const L1&) -> std::string { return "l1"; },
                                 [](const L2&) -> std::string { return "l2"; },
                                 [](const Linf&) -> std::string { return "linf"; },
                                 [](const NormA&) -> std::string { return "norm_a"; },
                                 [](const MinOf& m) {
                                   std::string s = "min(";
                                   for (std::size_t i = 0; i < m.members.size(); ++i)
                                     s += (i ? "," : "") + m.members[i].name();
                                   return s + ")";
                                 }},
                      kind_);
  }

 private:
  explicit Hamiltonian(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

template <typename Scalar, typename Derived>
Scalar eval_hamiltonian(const Hamiltonian<Scalar>& h, const Eigen::MatrixBase<Derived>& p) {
  using H = Hamiltonian<Scalar>;
  if (auto d = h.dimension()) check_dimension(*d, p.size());
  return std::visit(
      overloaded{[&](const typename H::L1&) { return Scalar(p.template lpNorm<1>()); },
                 [&](const typename H::L2&) { return Scalar(p.norm()); },
                 [&](const typename H::Linf&) {
                   return p.size() ? Scalar(p.template lpNorm<Eigen::Infinity>()) : Scalar(0);
                 },
                 [&](const typename H::NormA& a) {
                   return std::sqrt(std::max(a.spectral.quadratic_form(p), Scalar(0)));
                 },
                 [&](const typename H::MinOf& m) {
                   Scalar best = std::numeric_limits<Scalar>::infinity();
                   for (const auto& member : m.members) best = std::min(best, eval_hamiltonian(member, p));
                   return best;
                 }},
      h.kind());
}

/// Gradient of H at p.
///
/// Throws ZeroInput at p = 0 and NonDifferentiable at kinks: a zero
/// component for l1, a tie in max |p_i| for linf, a tie between active
/// members for a min. Never returns an arbitrary subgradient.
template <typename Scalar, typename Derived>
Vector<Scalar> grad_hamiltonian(const Hamiltonian<Scalar>& h, const Eigen::MatrixBase<Derived>& p) {
  using H = Hamiltonian<Scalar>;
  if (auto d = h.dimension()) check_dimension(*d, p.size());
  if (p.isZero(Scalar(0))) throw ZeroInput("grad_hamiltonian: gradient undefined at p = 0");
  return std::visit(
      overloaded{[&](const typename H::L1&) -> Vector<Scalar> {
                   Vector<Scalar> g(p.size());
                   for (Index i = 0; i < p.size(); ++i) {
                     if (p(i) == Scalar(0))
                       throw NonDifferentiable("grad_hamiltonian: l1 with a zero component");
                     g(i) = p(i) > Scalar(0) ? Scalar(1) : Scalar(-1);
                   }
                   return g;
                 },
                 [&](const typename H::L2&) -> Vector<Scalar> { return p / p.norm(); },
                 [&](const typename H::Linf&) -> Vector<Scalar> {
                   Index arg = 0;
                   const Scalar top = p.cwiseAbs().maxCoeff(&arg);
                   Index count = 0;
                   for (Index i = 0; i < p.size(); ++i) count += std::abs(p(i)) == top;
                   if (count > 1) throw NonDifferentiable("grad_hamiltonian: linf with a tie");
                   Vector<Scalar> g = Vector<Scalar>::Zero(p.size());
                   g(arg) = p(arg) > Scalar(0) ? Scalar(1) : Scalar(-1);
                   return g;
                 },
                 [&](const typename H::NormA& a) -> Vector<Scalar> {
                   const Vector<Scalar> ap = a.spectral.apply(p);
                   return ap / std::sqrt(p.dot(ap));
                 },
                 [&](const typename H::MinOf& m) -> Vector<Scalar> {
                   std::size_t arg = 0;
                   Scalar best = std::numeric_limits<Scalar>::infinity();
                   int ties = 0;
                   for (std::size_t i = 0; i < m.members.size(); ++i) {
                     const Scalar v = eval_hamiltonian(m.members[i], p);
                     if (v < best) {
                       best = v;
                       arg = i;
                       ties = 0;
                     } else if (v == best) {
                       ++ties;
                     }
                   }
                   if (ties > 0) throw NonDifferentiable("grad_hamiltonian: active members tie");
                   return grad_hamiltonian(m.members[arg], p);
                 }},
      h.kind());
}

// Gauge of the Wulff shape C of a norm Hamiltonian (H = support function of
// C), i.e. the dual norm: c lies in C iff wulff_gauge(H, c) <= 1.
template <typename Scalar, typename Derived>
Scalar wulff_gauge(const Hamiltonian<Scalar>& h, const Eigen::MatrixBase<Derived>& c) {
  using H = Hamiltonian<Scalar>;
  return std::visit(
      overloaded{[&](const typename H::L1&) {
                   return c.size() ? Scalar(c.template lpNorm<Eigen::Infinity>()) : Scalar(0);
                 },
                 [&](const typename H::L2&) { return Scalar(c.norm()); },
                 [&](const typename H::Linf&) { return Scalar(c.template lpNorm<1>()); },
                 [&](const typename H::NormA& a) {
                   return std::sqrt(std::max(c.dot(a.spectral.apply_inverse(c)), Scalar(0)));
                 },
                 [&](const typename H::MinOf&) -> Scalar {
                   throw InvalidArgument("wulff_gauge: a min of norms has no convex Wulff shape");
                 }},
      h.kind());
}

// ---------------------------------------------------------------------------
// Initial data J, each convex with a closed-form conjugate, and minima of
// them.

template <typename Scalar>
class InitialData {
 public:
  struct HalfSqL2 {};
  struct HalfSqL1 {};
  struct HalfSqLinf {};
  // J(x) = 1/2 <x, D^{-1} x>, D = diag(inverse_weights).
  struct DiagQuadratic {
    Vector<Scalar> inverse_weights;
  };
  // J(x) = 1/2 (sum x_i^2 / a_i^2 - 1).
  struct EllipsoidLevel {
    Vector<Scalar> semi_axes;
  };
  // J(x) = 1/2 |x|^2 + sign <b, x>.
  struct ShiftedQuadratic {
    Vector<Scalar> shift;
    int sign;
  };
  struct MinOf {
    std::vector<InitialData> members;
  };
  using Kind = std::variant<HalfSqL2, HalfSqL1, HalfSqLinf, DiagQuadratic, EllipsoidLevel,
                            ShiftedQuadratic, MinOf>;

  static InitialData half_sq_l2() { return InitialData(HalfSqL2{}); }
  static InitialData half_sq_l1() { return InitialData(HalfSqL1{}); }
  static InitialData half_sq_linf() { return InitialData(HalfSqLinf{}); }
  static InitialData diag_quadratic(Vector<Scalar> d) {
    if (d.size() == 0 || (d.array() <= Scalar(0)).any())
      throw InvalidArgument("diag_quadratic: weights must be positive");
    return InitialData(DiagQuadratic{std::move(d)});
  }
  static InitialData ellipsoid_level(Vector<Scalar> a) {
    if (a.size() == 0 || (a.array() <= Scalar(0)).any())
      throw InvalidArgument("ellipsoid_level: semi-axes must be positive");
    return InitialData(EllipsoidLevel{std::move(a)});
  }
  static InitialData shifted_quadratic(Vector<Scalar> b, int sign) {
    if (sign != 1 && sign != -1) throw InvalidArgument("shifted_quadratic: sign must be +1 or -1");
    if (b.size() == 0) throw InvalidArgument("shifted_quadratic: empty shift");
    return InitialData(ShiftedQuadratic{std::move(b), sign});
  }
  static InitialData min_of(std::vector<InitialData> members) {
    detail::check_min_members(members, "initial data");
    return InitialData(MinOf{std::move(members)});
  }

  const Kind& kind() const { return kind_; }
  bool is_min() const { return std::holds_alternative<MinOf>(kind_); }

  std::optional<Index> dimension() const {
    return std::visit(overloaded{[](const DiagQuadratic& q) -> std::optional<Index> {
                                   return q.inverse_weights.size();
                                 },
                                 [](const EllipsoidLevel& e) -> std::optional<Index> {
                                   return e.semi_axes.size();
                                 },
                                 [](const ShiftedQuadratic& s) -> std::optional<Index> {
                                   return s.shift.size();
                                 },
                                 [](const MinOf& m) { return detail::common_dimension(m.members); },
                                 [](const auto&) -> std::optional<Index> { return std::nullopt; }},
                      kind_);
  }

  std::string name() const {
    return std::visit(overloaded{[](const HalfSqL2&) -> std::string { return "half_sq_l2"; },
                                 [](const HalfSqL1&) -> std::string { return "half_sq_l1"; },
                                 [](const HalfSqLinf&) -> std::string { return "half_sq_linf"; },
                                 [](const DiagQuadratic&) -> std::string { return "diag_quadratic"; },
                                 [](const EllipsoidLevel&) -> std::string { return "ellipsoid_level"; },
                                 [](const ShiftedQuadratic& s) -> std::string {
                                   return s.sign > 0 ? "shifted_quadratic(+)" : "shifted_quadratic(-)";
                                 },
                                 [](const MinOf& m) {
                                   std::string s = "min(";
                                   for (std::size_t i = 0; i < m.members.size(); ++i)
                                     s += (i ? "," : "") + m.members[i].name();
                                   return s + ")";
                                 }},
                      kind_);
  }

 private:
  explicit InitialData(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

template <typename Scalar, typename Derived>
Scalar eval_initial(const InitialData<Scalar>& j, const Eigen::MatrixBase<Derived>& x) {
  using J = InitialData<Scalar>;
  if (auto d = j.dimension()) check_dimension(*d, x.size());
  const Scalar half(0.5);
  return std::visit(
      overloaded{[&](const typename J::HalfSqL2&) { return half * x.squaredNorm(); },
                 [&](const typename J::HalfSqL1&) {
                   const Scalar s = x.template lpNorm<1>();
                   return half * s * s;
                 },
                 [&](const typename J::HalfSqLinf&) {
                   const Scalar s = x.size() ? Scalar(x.template lpNorm<Eigen::Infinity>()) : Scalar(0);
                   return half * s * s;
                 },
                 [&](const typename J::DiagQuadratic& q) {
                   return half * (x.array().square() / q.inverse_weights.array()).sum();
                 },
                 [&](const typename J::EllipsoidLevel& e) {
                   return half * ((x.array() / e.semi_axes.array()).square().sum() - Scalar(1));
                 },
                 [&](const typename J::ShiftedQuadratic& s) {
                   return half * x.squaredNorm() + Scalar(s.sign) * s.shift.dot(x);
                 },
                 [&](const typename J::MinOf& m) {
                   Scalar best = std::numeric_limits<Scalar>::infinity();
                   for (const auto& member : m.members) best = std::min(best, eval_initial(member, x));
                   return best;
                 }},
      j.kind());
}

/// Closed-form conjugate J*(v) = sup_x { <v, x> - J(x) }.
///
/// Constant terms are kept (the ellipsoid level function has J* = ... + 1/2);
/// the Hopf value depends on them. Minima are rejected.
template <typename Scalar, typename Derived>
Scalar eval_conjugate(const InitialData<Scalar>& j, const Eigen::MatrixBase<Derived>& v) {
  using J = InitialData<Scalar>;
  if (auto d = j.dimension()) check_dimension(*d, v.size());
  const Scalar half(0.5);
  return std::visit(
      overloaded{[&](const typename J::HalfSqL2&) { return half * v.squaredNorm(); },
                 [&](const typename J::HalfSqL1&) {
                   const Scalar s = v.size() ? Scalar(v.template lpNorm<Eigen::Infinity>()) : Scalar(0);
                   return half * s * s;
                 },
                 [&](const typename J::HalfSqLinf&) {
                   const Scalar s = v.template lpNorm<1>();
                   return half * s * s;
                 },
                 [&](const typename J::DiagQuadratic& q) {
                   return half * (q.inverse_weights.array() * v.array().square()).sum();
                 },
                 [&](const typename J::EllipsoidLevel& e) {
                   return half * (e.semi_axes.array().square() * v.array().square()).sum() + half;
                 },
                 [&](const typename J::ShiftedQuadratic& s) {
                   return half * (v - Scalar(s.sign) * s.shift).squaredNorm();
                 },
                 [&](const typename J::MinOf&) -> Scalar {
                   throw InvalidArgument("eval_conjugate: conjugate of a min is not provided");
                 }},
      j.kind());
}

// Gradient of J where it exists (used for Fenchel-Young checks).
template <typename Scalar, typename Derived>
Vector<Scalar> grad_initial(const InitialData<Scalar>& j, const Eigen::MatrixBase<Derived>& x) {
  using J = InitialData<Scalar>;
  if (auto d = j.dimension()) check_dimension(*d, x.size());
  return std::visit(
      overloaded{[&](const typename J::HalfSqL2&) -> Vector<Scalar> { return x; },
                 [&](const typename J::HalfSqL1&) -> Vector<Scalar> {
                   Vector<Scalar> g(x.size());
                   const Scalar s = x.template lpNorm<1>();
                   for (Index i = 0; i < x.size(); ++i) {
                     if (x(i) == Scalar(0) && s != Scalar(0))
                       throw NonDifferentiable("grad_initial: zero component");
                     g(i) = x(i) > Scalar(0) ? s : (x(i) < Scalar(0) ? -s : Scalar(0));
                   }
                   return g;
                 },
                 [&](const typename J::HalfSqLinf&) -> Vector<Scalar> {
                   Vector<Scalar> g = Vector<Scalar>::Zero(x.size());
                   if (x.size() == 0) return g;
                   Index arg = 0;
                   const Scalar top = x.cwiseAbs().maxCoeff(&arg);
                   if (top == Scalar(0)) return g;
                   for (Index i = 0; i < x.size(); ++i)
                     if (i != arg && std::abs(x(i)) == top)
                       throw NonDifferentiable("grad_initial: tie in max |x_i|");
                   g(arg) = x(arg);
                   return g;
                 },
                 [&](const typename J::DiagQuadratic& q) -> Vector<Scalar> {
                   return (x.array() / q.inverse_weights.array()).matrix();
                 },
                 [&](const typename J::EllipsoidLevel& e) -> Vector<Scalar> {
                   return (x.array() / e.semi_axes.array().square()).matrix();
                 },
                 [&](const typename J::ShiftedQuadratic& s) -> Vector<Scalar> {
                   return x + Scalar(s.sign) * s.shift;
                 },
                 [&](const typename J::MinOf&) -> Vector<Scalar> {
                   throw InvalidArgument("grad_initial: min is not handled");
                 }},
      j.kind());
}

// ---------------------------------------------------------------------------
// Compact convex shapes for closest-point queries. Every non-union shape is
// described by a 1-homogeneous gauge around its center: shape = { gauge <= 1 }.

template <typename Scalar>
class ConvexShape {
 public:
  struct PNormBall {
    Scalar p;
    Scalar radius;
  };
  struct Ellipsoid {
    Vector<Scalar> semi_axes;
    std::optional<Matrix<Scalar>> orthogonal_factor;
  };
  // { x : <x, A x> <= |x|_2 } with smoothing exponent m >= 2.
  struct QuadOverNorm {
    SpectralMatrix<Scalar> spectral;
    Scalar m;
  };
  struct UnionOf {
    std::vector<ConvexShape> members;
  };
  using Kind = std::variant<PNormBall, Ellipsoid, QuadOverNorm, UnionOf>;

  static ConvexShape p_ball(Scalar p, Scalar radius, Index dim) {
    if (!(p > Scalar(1)) || !std::isfinite(p))
      throw InvalidArgument("p_ball: p must lie in (1, inf)");
    if (!(radius > Scalar(0))) throw InvalidArgument("p_ball: radius must be positive");
    if (dim <= 0) throw InvalidArgument("p_ball: dimension must be positive");
    return ConvexShape(PNormBall{p, radius}, Vector<Scalar>::Zero(dim));
  }
  static ConvexShape ellipsoid(Vector<Scalar> semi_axes,
                               std::optional<Matrix<Scalar>> factor = std::nullopt) {
    if (semi_axes.size() == 0 || (semi_axes.array() <= Scalar(0)).any())
      throw InvalidArgument("ellipsoid: semi-axes must be positive");
    const Index n = semi_axes.size();
    if (factor) {
      SpectralMatrix<Scalar> check(semi_axes, *factor);  // validates orthogonality
      (void)check;
    }
    return ConvexShape(Ellipsoid{std::move(semi_axes), std::move(factor)}, Vector<Scalar>::Zero(n));
  }
  static ConvexShape quad_over_norm(SpectralMatrix<Scalar> a, Scalar m = Scalar(2)) {
    const auto& ev = a.eigenvalues();
    if (!(ev.maxCoeff() <= Scalar(2) * ev.minCoeff()))
      throw InvalidArgument("quad_over_norm: needs max eigenvalue <= 2 min eigenvalue");
    if (!(m >= Scalar(2))) throw InvalidArgument("quad_over_norm: exponent m must be >= 2");
    const Index n = a.dimension();
    return ConvexShape(QuadOverNorm{std::move(a), m}, Vector<Scalar>::Zero(n));
  }
  static ConvexShape union_of(std::vector<ConvexShape> members) {
    if (members.empty()) throw InvalidArgument("union: empty member list");
    const Index n = members.front().dimension();
    for (const auto& m : members) {
      if (m.is_union()) throw InvalidArgument("union: nested unions are not supported");
      check_dimension(n, m.dimension());
    }
    return ConvexShape(UnionOf{std::move(members)}, Vector<Scalar>::Zero(n));
  }

  // Same shape translated so that its gauge is centred at `center`.
  ConvexShape translated(Vector<Scalar> center) const {
    if (is_union()) throw InvalidArgument("translated: translate the union members instead");
    check_dimension(dimension(), center.size());
    ConvexShape out = *this;
    out.center_ = std::move(center);
    return out;
  }

  const Kind& kind() const { return kind_; }
  bool is_union() const { return std::holds_alternative<UnionOf>(kind_); }
  Index dimension() const { return center_.size(); }
  const Vector<Scalar>& center() const { return center_; }

 private:
  ConvexShape(Kind kind, Vector<Scalar> center) : kind_(std::move(kind)), center_(std::move(center)) {}
  Kind kind_;
  Vector<Scalar> center_;
};

template <typename Scalar>
Scalar lp_norm(const Vector<Scalar>& x, Scalar p) {
  const Scalar top = x.size() ? x.cwiseAbs().maxCoeff() : Scalar(0);
  if (top == Scalar(0)) return Scalar(0);
  return top * std::pow((x.array().abs() / top).pow(p).sum(), Scalar(1) / p);
}

/// Gauge of a convex shape (min over members for unions): the shape is the
/// sublevel set { gauge <= 1 }.
template <typename Scalar, typename Derived>
Scalar shape_gauge(const ConvexShape<Scalar>& shape, const Eigen::MatrixBase<Derived>& x) {
  using S = ConvexShape<Scalar>;
  check_dimension(shape.dimension(), x.size());
  if (auto* u = std::get_if<typename S::UnionOf>(&shape.kind())) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (const auto& m : u->members) best = std::min(best, shape_gauge(m, x));
    return best;
  }
  const Vector<Scalar> y = x - shape.center();
  return std::visit(
      overloaded{[&](const typename S::PNormBall& b) { return lp_norm<Scalar>(y, b.p) / b.radius; },
                 [&](const typename S::Ellipsoid& e) {
                   const Vector<Scalar> r = e.orthogonal_factor ? Vector<Scalar>(e.orthogonal_factor->transpose() * y) : y;
                   return std::sqrt((r.array() / e.semi_axes.array()).square().sum());
                 },
                 [&](const typename S::QuadOverNorm& q) {
                   const Scalar norm = y.norm();
                   return norm == Scalar(0) ? Scalar(0) : q.spectral.quadratic_form(y) / norm;
                 },
                 [&](const typename S::UnionOf&) -> Scalar { return Scalar(0); }},
      shape.kind());
}

/// Signed residual of the boundary equation: |x - c|_p - r for balls,
/// gauge - 1 for ellipsoids, <y, A y> - |y|_2 for quad-over-norm sets.
template <typename Scalar, typename Derived>
Scalar boundary_residual(const ConvexShape<Scalar>& shape, const Eigen::MatrixBase<Derived>& x) {
  using S = ConvexShape<Scalar>;
  check_dimension(shape.dimension(), x.size());
  const Vector<Scalar> y = x - shape.center();
  return std::visit(
      overloaded{[&](const typename S::PNormBall& b) { return lp_norm<Scalar>(y, b.p) - b.radius; },
                 [&](const typename S::Ellipsoid&) { return shape_gauge(shape, x) - Scalar(1); },
                 [&](const typename S::QuadOverNorm& q) { return q.spectral.quadratic_form(y) - y.norm(); },
                 [&](const typename S::UnionOf&) -> Scalar {
                   throw InvalidArgument("boundary_residual: pick a union member");
                 }},
      shape.kind());
}

// Boundary point on the ray from the center along `direction`.
template <typename Scalar, typename Derived>
Vector<Scalar> boundary_point(const ConvexShape<Scalar>& shape, const Eigen::MatrixBase<Derived>& direction) {
  if (shape.is_union()) throw InvalidArgument("boundary_point: pick a union member");
  const Vector<Scalar> dir = direction;
  const Scalar g = shape_gauge(shape, Vector<Scalar>(shape.center() + dir));
  if (!(g > Scalar(0))) throw InvalidArgument("boundary_point: zero direction");
  return shape.center() + dir / g;
}

}  // namespace hopf

#endif  // HOPF_PROBLEM_HPP
