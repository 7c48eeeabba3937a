#include <gtest/gtest.h>

#include "hopf/problem.hpp"
#include "test_util.hpp"

namespace hopf {
namespace {

using test::Mat;
using test::Vec;
using test::vec;
using H = Hamiltonian<double>;
using J = InitialData<double>;

std::vector<H> norm_hamiltonians(Index n, std::mt19937_64& gen) {
  Vec ev(n);
  for (Index i = 0; i < n; ++i) ev(i) = 0.5 + double(i);
  return {H::l1(), H::l2(), H::linf(), H::norm_a(SpectralMatrix<double>::diagonal(ev)),
          H::norm_a(SpectralMatrix<double>(ev, test::random_orthogonal(gen, n)))};
}

std::vector<J> convex_initial_data(Index n) {
  Vec w(n), b(n);
  for (Index i = 0; i < n; ++i) {
    w(i) = 1.0 + 0.5 * double(i);
    b(i) = 1.0 - 0.3 * double(i);
  }
  return {J::half_sq_l2(),         J::half_sq_l1(),  J::half_sq_linf(), J::diag_quadratic(w),
          J::ellipsoid_level(w), J::shifted_quadratic(b, 1), J::shifted_quadratic(b, -1)};
}

TEST(SpectralMatrix, FromMatrixReconstructs) {
  Mat a(3, 3);
  a << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  const auto s = SpectralMatrix<double>::from_matrix(a);
  EXPECT_LT((s.reconstruct() - a).cwiseAbs().maxCoeff(), 1e-12);
  const Mat p = s.orthogonal_factor();
  EXPECT_LT((p.transpose() * p - Mat::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(s.eigenvalues().maxCoeff(), 4.0, 1e-12);
}

TEST(SpectralMatrix, RejectsInvalidData) {
  EXPECT_THROW(SpectralMatrix<double>::diagonal(vec({1, 0})), InvalidArgument);
  EXPECT_THROW(SpectralMatrix<double>::diagonal(vec({1, -2})), InvalidArgument);
  Mat skew = Mat::Identity(2, 2);
  skew(0, 1) = 0.1;
  EXPECT_THROW(SpectralMatrix<double>(vec({1, 2}), skew), InvalidArgument);
  Mat asym(2, 2);
  asym << 2, 1, 0, 2;
  EXPECT_THROW(SpectralMatrix<double>::from_matrix(asym), InvalidArgument);
}

TEST(Hamiltonian, Examples) {
  EXPECT_DOUBLE_EQ(eval_hamiltonian(H::l1(), vec({1, -2, 3})), 6.0);
  EXPECT_DOUBLE_EQ(eval_hamiltonian(H::norm_a(SpectralMatrix<double>::diagonal(vec({1, 1}))), vec({3, 4})), 5.0);
  EXPECT_DOUBLE_EQ(eval_hamiltonian(H::min_of({H::l1(), H::l2()}), vec({3, 4})), 5.0);
}

TEST(Hamiltonian, GradientExamples) {
  const Vec g2 = grad_hamiltonian(H::l2(), vec({3, 4}));
  EXPECT_NEAR(g2(0), 0.6, 1e-15);
  EXPECT_NEAR(g2(1), 0.8, 1e-15);
  EXPECT_EQ(grad_hamiltonian(H::l1(), vec({2, -3})), vec({1, -1}));
  const H a = H::norm_a(SpectralMatrix<double>::diagonal(vec({1, 4})));
  const Vec ga = grad_hamiltonian(a, vec({1, 0}));
  EXPECT_NEAR(ga(0), 1.0, 1e-15);
  EXPECT_NEAR(ga(1), 0.0, 1e-15);
  const Vec fd = test::central_difference([&](const Vec& p) { return eval_hamiltonian(a, p); }, vec({1, 0}), 1e-6);
  EXPECT_LT((fd - ga).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Hamiltonian, GradientErrorsAreDistinct) {
  EXPECT_THROW(grad_hamiltonian(H::l2(), vec({0, 0})), ZeroInput);
  EXPECT_THROW(grad_hamiltonian(H::l1(), vec({1, 0})), NonDifferentiable);
  EXPECT_THROW(grad_hamiltonian(H::linf(), vec({2, -2})), NonDifferentiable);
  EXPECT_THROW(grad_hamiltonian(H::min_of({H::l2(), H::l2()}), vec({1, 2})), NonDifferentiable);
  EXPECT_THROW(eval_hamiltonian(H::norm_a(SpectralMatrix<double>::diagonal(vec({1, 4}))), vec({1, 2, 3})),
               DimensionMismatch);
}

TEST(Hamiltonian, MinValidation) {
  EXPECT_THROW(H::min_of({}), InvalidArgument);
  EXPECT_THROW(H::min_of({H::min_of({H::l1()})}), InvalidArgument);
  EXPECT_THROW(H::min_of({H::norm_a(SpectralMatrix<double>::diagonal(vec({1, 2}))),
                          H::norm_a(SpectralMatrix<double>::diagonal(vec({1, 2, 3})))}),
               DimensionMismatch);
}

TEST(Hamiltonian, EulerIdentityAndFiniteDifferences) {
  std::mt19937_64 gen(11);
  for (Index n : {2, 5, 8}) {
    for (const auto& h : norm_hamiltonians(n, gen)) {
      for (int s = 0; s < 50; ++s) {
        const Vec p = test::uniform(gen, n, -3, 3);
        const Vec g = grad_hamiltonian(h, p);
        EXPECT_NEAR(p.dot(g), eval_hamiltonian(h, p), 1e-10) << h.name();
        const Vec fd = test::central_difference([&](const Vec& q) { return eval_hamiltonian(h, q); }, p, 1e-7);
        EXPECT_LT((fd - g).cwiseAbs().maxCoeff(), 1e-5) << h.name();
      }
    }
  }
}

TEST(Hamiltonian, PositiveHomogeneity) {
  std::mt19937_64 gen(12);
  for (const auto& h : norm_hamiltonians(6, gen)) {
    for (int s = 0; s < 50; ++s) {
      const Vec p = test::uniform(gen, 6, -5, 5);
      const double a = test::uniform(gen, 0.01, 20);
      const double lhs = eval_hamiltonian(h, Vec(a * p)), rhs = a * eval_hamiltonian(h, p);
      EXPECT_NEAR(lhs, rhs, 1e-13 * std::max(1.0, std::abs(rhs))) << h.name();
    }
  }
  const H m = H::min_of({H::l1(), H::l2()});
  EXPECT_NEAR(eval_hamiltonian(m, vec({6, 8})), 2 * eval_hamiltonian(m, vec({3, 4})), 1e-14);
}

// H is the support function of its Wulff shape C, so { H <= 1 } is the
// polar of C: every boundary point c of C has <c, p> <= H(p), and the
// maximum over C is attained at grad H(p), which lies on the boundary.
TEST(Hamiltonian, WulffPolarIdentity) {
  std::mt19937_64 gen(13);
  for (Index n : {2, 4}) {
    for (const auto& h : norm_hamiltonians(n, gen)) {
      for (int s = 0; s < 20; ++s) {
        Vec p = test::uniform(gen, n, -2, 2);
        p /= eval_hamiltonian(h, p);  // on the boundary of the polar set
        double best = -1;
        for (int k = 0; k < 400; ++k) {
          Vec c = test::uniform(gen, n, -1, 1);
          c /= wulff_gauge(h, c);
          const double inner = c.dot(p);
          EXPECT_LE(inner, 1.0 + 1e-12) << h.name();
          best = std::max(best, inner);
        }
        const Vec star = grad_hamiltonian(h, p);
        EXPECT_NEAR(wulff_gauge(h, star), 1.0, 1e-12) << h.name();
        EXPECT_NEAR(star.dot(p), 1.0, 1e-12) << h.name();
        EXPECT_GT(best, n == 2 ? 0.9 : 0.5) << h.name();
      }
    }
  }
}

TEST(InitialData, Examples) {
  EXPECT_DOUBLE_EQ(eval_initial(J::ellipsoid_level(vec({1, 1})), vec({1, 0})), 0.0);
  EXPECT_DOUBLE_EQ(eval_initial(J::half_sq_l1(), vec({1, -1})), 2.0);
  const Vec b = Vec::Ones(8);
  EXPECT_DOUBLE_EQ(eval_initial(J::min_of({J::shifted_quadratic(b, 1), J::shifted_quadratic(b, -1)}), Vec::Zero(8)),
                   0.0);
}

TEST(InitialData, ConjugateExamples) {
  EXPECT_DOUBLE_EQ(eval_conjugate(J::ellipsoid_level(vec({1, 2})), vec({1, 1})), 3.0);
  EXPECT_DOUBLE_EQ(eval_conjugate(J::half_sq_linf(), vec({3, 1})), 8.0);
  EXPECT_DOUBLE_EQ(eval_conjugate(J::half_sq_l2(), Vec::Zero(3)), 0.0);
  EXPECT_THROW(eval_conjugate(J::min_of({J::half_sq_l2()}), vec({1, 1})), InvalidArgument);
}

TEST(InitialData, Validation) {
  EXPECT_THROW(J::diag_quadratic(vec({1, 0})), InvalidArgument);
  EXPECT_THROW(J::ellipsoid_level(vec({-1})), InvalidArgument);
  EXPECT_THROW(J::shifted_quadratic(vec({1}), 0), InvalidArgument);
  EXPECT_THROW(J::min_of({}), InvalidArgument);
  EXPECT_THROW(eval_initial(J::ellipsoid_level(vec({1, 2})), vec({1, 2, 3})), DimensionMismatch);
}

TEST(InitialData, FenchelYoung) {
  std::mt19937_64 gen(14);
  const Index n = 5;
  for (const auto& j : convex_initial_data(n)) {
    for (int s = 0; s < 200; ++s) {
      const Vec x = test::uniform(gen, n, -4, 4);
      const Vec v = test::uniform(gen, n, -4, 4);
      EXPECT_GE(eval_initial(j, x) + eval_conjugate(j, v) - x.dot(v), -1e-12) << j.name();
      const Vec g = grad_initial(j, x);
      EXPECT_NEAR(eval_initial(j, x) + eval_conjugate(j, g), x.dot(g), 1e-8 * std::max(1.0, std::abs(x.dot(g))))
          << j.name();
    }
  }
}

TEST(InitialData, GradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(15);
  for (const auto& j : convex_initial_data(4)) {
    for (int s = 0; s < 30; ++s) {
      const Vec x = test::uniform(gen, 4, -3, 3);
      const Vec fd = test::central_difference([&](const Vec& y) { return eval_initial(j, y); }, x, 1e-6);
      EXPECT_LT((fd - grad_initial(j, x)).cwiseAbs().maxCoeff(), 1e-5) << j.name();
    }
  }
}

TEST(ConvexShape, Validation) {
  EXPECT_THROW(ConvexShape<double>::p_ball(1.0, 1.0, 2), InvalidArgument);
  EXPECT_THROW(ConvexShape<double>::p_ball(2.0, 0.0, 2), InvalidArgument);
  EXPECT_THROW(ConvexShape<double>::ellipsoid(vec({1, 0})), InvalidArgument);
  EXPECT_THROW(ConvexShape<double>::quad_over_norm(SpectralMatrix<double>::diagonal(vec({1, 2.5}))),
               InvalidArgument);
  EXPECT_THROW(ConvexShape<double>::quad_over_norm(SpectralMatrix<double>::diagonal(vec({1, 1.5})), 1.5),
               InvalidArgument);
  const auto ball = ConvexShape<double>::p_ball(2.0, 1.0, 2);
  EXPECT_THROW(ConvexShape<double>::union_of({ConvexShape<double>::union_of({ball})}), InvalidArgument);
  EXPECT_THROW(ConvexShape<double>::union_of({ball, ConvexShape<double>::p_ball(2.0, 1.0, 3)}), DimensionMismatch);
}

TEST(ConvexShape, BoundaryPointsHaveZeroResidual) {
  std::mt19937_64 gen(16);
  const std::vector<ConvexShape<double>> shapes{
      ConvexShape<double>::p_ball(4.0, 2.0, 3),
      ConvexShape<double>::p_ball(1.5, 1.0, 3).translated(vec({1, -2, 0.5})),
      ConvexShape<double>::ellipsoid(vec({1, 2, 3}), test::random_orthogonal(gen, 3)),
      ConvexShape<double>::quad_over_norm(SpectralMatrix<double>::diagonal(vec({1, 1.5, 1.9})))};
  for (const auto& s : shapes) {
    for (int k = 0; k < 50; ++k) {
      const Vec q = boundary_point(s, test::uniform(gen, 3, -1, 1));
      EXPECT_NEAR(boundary_residual(s, q), 0.0, 1e-12);
      EXPECT_NEAR(shape_gauge(s, q), 1.0, 1e-12);
    }
    EXPECT_LT(shape_gauge(s, s.center()), 1.0);
  }
}

}  // namespace
}  // namespace hopf
