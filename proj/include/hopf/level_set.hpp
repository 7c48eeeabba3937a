#ifndef HOPF_LEVEL_SET_HPP
#define HOPF_LEVEL_SET_HPP

#include <cmath>
#include <optional>
#include <variant>

#include "hopf/core.hpp"
#include "hopf/problem.hpp"
#include "hopf/prox.hpp"

namespace hopf {

/// f(u) = coef * (scale * |u|_p)^k with p >= 1, k >= 1.
///
/// Derivatives are written in terms of u / |u|_p so that large p and tiny
/// |u| stay representable.
template <typename Scalar>
struct PowerNorm {
  Scalar p;
  Scalar k;
  Scalar coef = Scalar(1);
  Scalar scale = Scalar(1);

  Scalar value(const Vector<Scalar>& u) const {
    return coef * std::pow(scale * lp_norm<Scalar>(u, p), k);
  }

  Vector<Scalar> gradient(const Vector<Scalar>& u) const {
    const Scalar norm = lp_norm<Scalar>(u, p);
    if (norm == Scalar(0)) return Vector<Scalar>::Zero(u.size());
    const Scalar c = coef * std::pow(scale, k) * k * std::pow(norm, k - Scalar(1));
    Vector<Scalar> g(u.size());
    for (Index i = 0; i < u.size(); ++i) {
      const Scalar a = std::abs(u(i)) / norm;
      g(i) = u(i) == Scalar(0) ? Scalar(0) : std::copysign(c * std::pow(a, p - Scalar(1)), u(i));
    }
    return g;
  }

  Matrix<Scalar> hessian(const Vector<Scalar>& u) const {
    const Index n = u.size();
    const Scalar norm = lp_norm<Scalar>(u, p);
    const Scalar c = coef * std::pow(scale, k) * k;
    if (norm == Scalar(0)) {
      if (k > Scalar(2)) return Matrix<Scalar>::Zero(n, n);
      if (k == Scalar(2) && p == Scalar(2)) return Scalar(2) * coef * scale * scale * Matrix<Scalar>::Identity(n, n);
      throw NonDifferentiable("power norm: Hessian undefined at the origin");
    }
    Vector<Scalar> a(n), diag(n);
    for (Index i = 0; i < n; ++i) {
      const Scalar r = std::abs(u(i)) / norm;
      if (r == Scalar(0) && p < Scalar(2)) throw NonDifferentiable("power norm: Hessian undefined on an axis");
      a(i) = u(i) == Scalar(0) ? Scalar(0) : std::copysign(std::pow(r, p - Scalar(1)), u(i));
      diag(i) = (p - Scalar(1)) * (p == Scalar(2) ? Scalar(1) : std::pow(r, p - Scalar(2)));
    }
    Matrix<Scalar> h = (k - p) * a * a.transpose();
    h.diagonal() += diag;
    return c * std::pow(norm, k - Scalar(2)) * h;
  }
};

/// L(x) = ((<x, A x> / |x|_2)^(2m) - 1) / (2m), the level-set function of
/// { <x, A x> <= |x|_2 }.
template <typename Scalar>
struct QuadOverNormLevel {
  SpectralMatrix<Scalar> spectral;
  Scalar m;

  Scalar value(const Vector<Scalar>& x) const {
    return (std::pow(gauge(x), Scalar(2) * m) - Scalar(1)) / (Scalar(2) * m);
  }

  Vector<Scalar> gradient(const Vector<Scalar>& x) const {
    const Scalar r = x.norm();
    if (r == Scalar(0)) return Vector<Scalar>::Zero(x.size());
    const Scalar q = spectral.quadratic_form(x);
    const Vector<Scalar> dg = Scalar(2) * spectral.apply(x) / r - q * x / (r * r * r);
    return std::pow(q / r, Scalar(2) * m - Scalar(1)) * dg;
  }

  Matrix<Scalar> hessian(const Vector<Scalar>& x) const {
    const Index n = x.size();
    const Scalar r = x.norm();
    if (r == Scalar(0)) return Matrix<Scalar>::Zero(n, n);
    const Scalar r3 = r * r * r;
    const Scalar q = spectral.quadratic_form(x);
    const Scalar g = q / r;
    const Vector<Scalar> ax = spectral.apply(x);
    const Vector<Scalar> dg = Scalar(2) * ax / r - q * x / r3;
    Matrix<Scalar> d2g = Scalar(2) * spectral.reconstruct() / r -
                         Scalar(2) * (ax * x.transpose() + x * ax.transpose()) / r3 +
                         Scalar(3) * q * x * x.transpose() / (r3 * r * r);
    d2g.diagonal().array() -= q / r3;
    return (Scalar(2) * m - Scalar(1)) * std::pow(g, Scalar(2) * m - Scalar(2)) * dg * dg.transpose() +
           std::pow(g, Scalar(2) * m - Scalar(1)) * d2g;
  }

  Scalar gauge(const Vector<Scalar>& x) const {
    const Scalar r = x.norm();
    return r == Scalar(0) ? Scalar(0) : spectral.quadratic_form(x) / r;
  }
};

/// f*(w) = sup_x <w, x> - f(x) for a smooth convex f, by damped Newton on
/// grad f(x) = w with an Armijo line search.
template <typename Scalar, SmoothFunction<Scalar> F>
Scalar smooth_conjugate(const F& f, const Vector<Scalar>& w, Vector<Scalar> x, int max_iters = 100) {
  auto objective = [&](const Vector<Scalar>& u) { return f.value(u) - w.dot(u); };
  const Scalar tol = Scalar(1e-12) * std::max(Scalar(1), w.norm());
  Scalar fx = objective(x);
  for (int iter = 0; iter < max_iters; ++iter) {
    const Vector<Scalar> g = f.gradient(x) - w;
    if (g.norm() <= tol) return -fx;
    Vector<Scalar> step = -f.hessian(x).ldlt().solve(g);
    Scalar slope = g.dot(step);
    if (!step.allFinite() || !(slope < Scalar(0))) {
      step = -g;
      slope = -g.squaredNorm();
    }
    Scalar tau(1);
    Vector<Scalar> trial = x + step;
    Scalar ft = objective(trial);
    for (int h = 0; h < 60 && !(ft <= fx + Scalar(1e-4) * tau * slope); ++h) {
      tau *= Scalar(0.5);
      trial = x + tau * step;
      ft = objective(trial);
    }
    if ((trial - x).norm() <= Scalar(1e-15) * std::max(Scalar(1), x.norm())) return -ft;
    x = std::move(trial);
    fx = ft;
  }
  throw ConvergenceFailure("smooth_conjugate: iteration cap reached");
}

enum class LevelSetSide { Primal, Dual };

/// Level-set function L of a convex shape (negative inside, zero on the
/// boundary, positive outside) together with its conjugate and the prox of
/// the conjugate, which is what the eikonal split Bregman iteration needs.
///
/// With gauge g of the shape and exponent m:
///   L(x)  = (g(x - c)^(2m) - 1) / (2m)
///   L*(w) = (2m-1)/(2m) g°(w)^(2m/(2m-1)) + 1/(2m) + <c, w>
/// On the primal side prox of L* goes through the Moreau identity and Newton
/// on L; on the dual side Newton runs on L* directly.
template <typename Scalar>
class LevelSetData {
 public:
  static LevelSetData for_shape(const ConvexShape<Scalar>& shape, std::optional<Scalar> m = std::nullopt,
                                std::optional<LevelSetSide> side = std::nullopt) {
    using S = ConvexShape<Scalar>;
    if (shape.is_union()) throw InvalidArgument("level set: build one per union member");
    LevelSetData out(shape);
    std::visit(
        overloaded{[&](const typename S::PNormBall& b) {
                     const bool high = b.p >= Scalar(2);
                     out.side_ = side.value_or(high ? LevelSetSide::Primal : LevelSetSide::Dual);
                     if (out.side_ == LevelSetSide::Primal) {
                       out.m_ = m.value_or(Scalar(2));
                       if (b.p < Scalar(2) || out.m_ < Scalar(1))
                         throw InvalidArgument("level set: primal side needs p >= 2 and m >= 1");
                     } else {
                       out.m_ = m.value_or(Scalar(0.75));
                       if (b.p > Scalar(2) || !(out.m_ > Scalar(0.5)) || out.m_ > Scalar(1))
                         throw InvalidArgument("level set: dual side needs p <= 2 and 1/2 < m <= 1");
                     }
                   },
                   [&](const typename S::Ellipsoid&) {
                     if (m && *m != Scalar(1)) throw InvalidArgument("level set: ellipsoids use m = 1");
                     out.m_ = Scalar(1);
                     out.side_ = side.value_or(LevelSetSide::Primal);
                   },
                   [&](const typename S::QuadOverNorm& q) {
                     out.m_ = m.value_or(q.m);
                     if (!(out.m_ >= Scalar(2))) throw InvalidArgument("level set: quad-over-norm needs m >= 2");
                     if (side && *side != LevelSetSide::Primal)
                       throw InvalidArgument("level set: quad-over-norm has no closed-form dual");
                     out.side_ = LevelSetSide::Primal;
                   },
                   [&](const typename S::UnionOf&) {}},
        shape.kind());
    return out;
  }

  const ConvexShape<Scalar>& shape() const { return shape_; }
  Scalar exponent() const { return m_; }
  LevelSetSide side() const { return side_; }
  Index dimension() const { return shape_.dimension(); }

  Scalar value(const Vector<Scalar>& x) const {
    check_dimension(dimension(), x.size());
    const Scalar g = shape_gauge(shape_, x);
    return (std::pow(g, Scalar(2) * m_) - Scalar(1)) / (Scalar(2) * m_);
  }

  Vector<Scalar> gradient(const Vector<Scalar>& x) const {
    check_dimension(dimension(), x.size());
    const Vector<Scalar> y = x - shape_.center();
    using S = ConvexShape<Scalar>;
    return std::visit(
        overloaded{[&](const typename S::PNormBall& b) -> Vector<Scalar> {
                     return primal_power(b).gradient(y);
                   },
                   [&](const typename S::Ellipsoid& e) -> Vector<Scalar> {
                     const Vector<Scalar> w2 = e.semi_axes.array().square();
                     if (!e.orthogonal_factor) return (y.array() / w2.array()).matrix();
                     const Matrix<Scalar>& p = *e.orthogonal_factor;
                     return p * ((p.transpose() * y).array() / w2.array()).matrix();
                   },
                   [&](const typename S::QuadOverNorm& q) -> Vector<Scalar> {
                     return QuadOverNormLevel<Scalar>{q.spectral, m_}.gradient(y);
                   },
                   [&](const typename S::UnionOf&) -> Vector<Scalar> { return {}; }},
        shape_.kind());
  }

  Scalar conjugate(const Vector<Scalar>& w) const {
    check_dimension(dimension(), w.size());
    using S = ConvexShape<Scalar>;
    const Scalar two_m = Scalar(2) * m_;
    const Scalar shift = shape_.center().dot(w);
    return std::visit(
        overloaded{[&](const typename S::PNormBall& b) {
                     const Scalar dual = b.radius * lp_norm<Scalar>(w, conjugate_exponent(b.p));
                     return (two_m - Scalar(1)) / two_m * std::pow(dual, two_m / (two_m - Scalar(1))) +
                            Scalar(1) / two_m + shift;
                   },
                   [&](const typename S::Ellipsoid& e) {
                     const Vector<Scalar> r =
                         e.orthogonal_factor ? Vector<Scalar>(e.orthogonal_factor->transpose() * w) : w;
                     return Scalar(0.5) * (e.semi_axes.array() * r.array()).square().sum() + Scalar(0.5) + shift;
                   },
                   [&](const typename S::QuadOverNorm& q) {
                     const QuadOverNormLevel<Scalar> level{q.spectral, m_};
                     return smooth_conjugate<Scalar>(level, w, conjugate_start(level, w)) + shift;
                   },
                   [&](const typename S::UnionOf&) { return Scalar(0); }},
        shape_.kind());
  }

  /// prox_{alpha dL*}(z).
  Vector<Scalar> prox_conjugate(const Vector<Scalar>& z, Scalar alpha) const {
    check_dimension(dimension(), z.size());
    if (!(alpha > Scalar(0))) throw InvalidArgument("level set: alpha must be positive");
    using S = ConvexShape<Scalar>;
    const Vector<Scalar> u = z - alpha * shape_.center();
    return std::visit(
        overloaded{[&](const typename S::PNormBall& b) -> Vector<Scalar> {
                     if (side_ == LevelSetSide::Dual) return prox_smooth_newton<Scalar>(dual_power(b), u, alpha).point;
                     return primal_moreau(primal_power(b), u, alpha);
                   },
                   [&](const typename S::Ellipsoid& e) -> Vector<Scalar> {
                     const Vector<Scalar> w2 = e.semi_axes.array().square();
                     return prox_quadratic(u, alpha, w2, e.orthogonal_factor ? &*e.orthogonal_factor : nullptr);
                   },
                   [&](const typename S::QuadOverNorm& q) -> Vector<Scalar> {
                     return primal_moreau(QuadOverNormLevel<Scalar>{q.spectral, m_}, u, alpha);
                   },
                   [&](const typename S::UnionOf&) -> Vector<Scalar> { return {}; }},
        shape_.kind());
  }

 private:
  explicit LevelSetData(ConvexShape<Scalar> shape) : shape_(std::move(shape)) {}

  static Scalar conjugate_exponent(Scalar p) { return p / (p - Scalar(1)); }

  // (|y|_p / r)^(2m) / (2m); the constant is irrelevant to derivatives.
  PowerNorm<Scalar> primal_power(const typename ConvexShape<Scalar>::PNormBall& b) const {
    return {b.p, Scalar(2) * m_, Scalar(1) / (Scalar(2) * m_), Scalar(1) / b.radius};
  }

  PowerNorm<Scalar> dual_power(const typename ConvexShape<Scalar>::PNormBall& b) const {
    const Scalar k = Scalar(2) * m_ / (Scalar(2) * m_ - Scalar(1));
    return {conjugate_exponent(b.p), k, Scalar(1) / k, b.radius};
  }

  // prox_{a L*}(u) = u - a prox_{L/a}(u/a).
  template <typename F>
  static Vector<Scalar> primal_moreau(const F& f, const Vector<Scalar>& u, Scalar alpha) {
    return moreau_complement(
        [&](const Vector<Scalar>& s, Scalar beta) { return prox_smooth_newton<Scalar>(f, s, beta).point; }, u,
        alpha);
  }

  // For a 2m-homogeneous smooth part, the scaling of w/|w| whose gradient
  // has the right length.
  Vector<Scalar> conjugate_start(const QuadOverNormLevel<Scalar>& level, const Vector<Scalar>& w) const {
    const Scalar norm = w.norm();
    if (norm == Scalar(0)) return Vector<Scalar>::Zero(w.size());
    const Vector<Scalar> dir = w / norm;
    const Scalar g = level.gauge(dir);
    const Scalar two_m = Scalar(2) * m_;
    return dir * std::pow(norm / std::pow(g, two_m), Scalar(1) / (two_m - Scalar(1)));
  }

  ConvexShape<Scalar> shape_;
  Scalar m_ = Scalar(1);
  LevelSetSide side_ = LevelSetSide::Primal;
};

}  // namespace hopf

#endif  // HOPF_LEVEL_SET_HPP
