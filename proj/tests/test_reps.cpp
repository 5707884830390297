#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qso/reps.hpp"
#include "suite.hpp"

using namespace qso;
using suite::H;

namespace {

DenseMat dense(const GeneratorMatrix& g) { return DenseMat(g.mat); }

// Closed-form so_3 matrix entries, written with explicit powers of q.
double qb(double a, double q) { return (std::pow(q, a) - std::pow(q, -a)) / (q - 1 / q); }
double qbp(double a, double q) { return (std::pow(q, a) + std::pow(q, -a)) / (q - 1 / q); }

}  // namespace

TEST(Relations, HoldForEverySuiteLabel) {
  for (double q : suite::q_values) {
    const QContext ctx(q);
    for (const auto& label : suite::all_labels()) {
      const auto rep = check_relations(build_representation(label, ctx), ctx);
      EXPECT_TRUE(rep.pass()) << label.str() << " q=" << q;
      EXPECT_LE(rep.max_relative(), 1e-9) << label.str() << " q=" << q;
    }
  }
}

TEST(Relations, HoldForLargerLabels) {
  const QContext ctx(1.3);
  for (const auto& label :
       {IrrepLabel::classical(6, {H(4), H(2), H(-2)}), IrrepLabel::classical(7, {H(2), H(2), H(0)}),
        IrrepLabel::nonclassical(6, {H(3), H(1), H(1)}, {1, -1, -1, 1, 1}),
        IrrepLabel::nonclassical(7, {H(3), H(1), H(1)}, suite::alternating(7)),
        IrrepLabel::classical(5, {H(3), H(1)})})
    EXPECT_TRUE(check_relations(build_representation(label, ctx), ctx).pass()) << label.str();
}

TEST(Relations, FamiliesAndCount) {
  const QContext ctx(1.3);
  const auto rep = check_relations(build_representation(IrrepLabel::classical(5, {H(2), H(0)}), ctx), ctx);
  // two Serre relations per adjacent pair (3 pairs) plus far commutators (3)
  EXPECT_EQ(rep.results.size(), 9u);
  int commute = 0;
  for (const auto& r : rep.results) commute += r.family == "commute";
  EXPECT_EQ(commute, 3);
}

TEST(Relations, DetectCorruptedMatrix) {
  const QContext ctx(1.3);
  auto mats = build_representation(IrrepLabel::classical(4, {H(2), H(0)}), ctx);
  mats[1].mat.coeffRef(0, 0) += Cplx(0.1);
  EXPECT_FALSE(check_relations(mats, ctx).pass());
}

TEST(Relations, RejectMismatchedShapesAndOrder) {
  const QContext ctx(1.3);
  auto a = build_representation(IrrepLabel::classical(4, {H(2), H(0)}), ctx);
  auto b = build_representation(IrrepLabel::classical(4, {H(2), H(2)}), ctx);
  auto mixed = a;
  mixed[1] = b[1];
  EXPECT_THROW(check_relations(mixed, ctx), DimensionError);
  auto swapped = a;
  std::swap(swapped[0], swapped[1]);
  EXPECT_THROW(check_relations(swapped, ctx), DimensionError);
}

TEST(Spectra, I21IsDiagonalWithExpectedEigenvalues) {
  for (double q : suite::q_values) {
    const QContext ctx(q);
    for (const auto& label : suite::all_labels()) {
      const auto basis = enumerate_patterns(label);
      const DenseMat t = dense(build_generator(basis, 1, ctx));
      DenseMat expected = DenseMat::Zero(t.rows(), t.cols());
      for (std::size_t i = 0; i < basis.size(); ++i) {
        const double m = basis[i].m12().value();
        expected(i, i) = label.kind == Kind::classical ? Cplx(0.0, qb(m, q))
                                                       : Cplx(label.eps_at(2) * qbp(m, q));
      }
      const auto got = oracle::sorted_eigenvalues(t);
      const auto want = oracle::sorted_eigenvalues(expected);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i)
        EXPECT_LE(std::abs(got[i] - want[i]), 1e-8) << label.str() << " q=" << q;
    }
  }
}

TEST(Matrices, NonclassicalAreReal) {
  const QContext ctx(0.7);
  for (const auto& label : suite::nonclassical_labels())
    for (const auto& g : build_representation(label, ctx))
      EXPECT_EQ(DenseMat(g.mat).imag().norm(), 0.0) << label.str() << " " << g.gen.str();
}

TEST(Matrices, So4NonclassicalLowestIsRealAndConsistent) {
  const QContext ctx(1.3);
  const auto label = IrrepLabel::nonclassical(4, {H(1), H(1)}, {1, 1, 1});
  const auto mats = build_representation(label, ctx);
  ASSERT_EQ(mats.size(), 3u);
  for (const auto& g : mats) EXPECT_EQ(DenseMat(g.mat).imag().norm(), 0.0);
  EXPECT_TRUE(check_relations(mats, ctx).pass());
}

TEST(Matrices, So3ClassicalClosedForm) {
  const double q = 1.3;
  const QContext ctx(q);
  for (int tl : {2, 3, 4}) {
    const double l = tl / 2.0;
    const auto basis = enumerate_patterns(IrrepLabel::classical(3, {H(tl)}));
    const DenseMat t = dense(build_generator(basis, 2, ctx));
    auto d = [&](double m) {
      return 1.0 / std::sqrt((std::pow(q, m) + std::pow(q, -m)) * (std::pow(q, m + 1) + std::pow(q, -m - 1)));
    };
    for (std::size_t c = 0; c < basis.size(); ++c) {
      const double m = basis[c].m12().value();
      if (c > 0) {  // <m+1| I_32 |m>
        EXPECT_NEAR(std::abs(t(c - 1, c) - d(m) * std::sqrt(qb(l - m, q) * qb(l + m + 1, q))), 0.0, 1e-13);
      }
      if (c + 1 < basis.size()) {  // <m-1| I_32 |m>
        EXPECT_NEAR(std::abs(t(c + 1, c) + d(m - 1) * std::sqrt(qb(l - m + 1, q) * qb(l + m, q))), 0.0,
                    1e-13);
      }
      EXPECT_EQ(t(c, c), Cplx(0.0));
    }
  }
}

TEST(Matrices, So3NonclassicalClosedForm) {
  for (double q : suite::q_values) {
    const QContext ctx(q);
    for (int eps3 : {1, -1}) {
      const int tl = 5;
      const double l = 2.5;
      const auto basis = enumerate_patterns(IrrepLabel::nonclassical(3, {H(tl)}, {1, eps3}));
      const DenseMat t = dense(build_generator(basis, 2, ctx));
      auto dt = [&](double m) {
        return 1.0 / std::sqrt((std::pow(q, m) - std::pow(q, -m)) * (std::pow(q, m + 1) - std::pow(q, -m - 1)));
      };
      for (std::size_t c = 0; c < basis.size(); ++c) {
        const double m = basis[c].m12().value();
        if (c > 0) {
          EXPECT_NEAR(std::abs(t(c - 1, c) - dt(m) * std::sqrt(qb(l - m, q) * qb(l + m + 1, q))), 0.0, 1e-12);
        }
        const Cplx diag = m == 0.5 ? Cplx(eps3 * qbp(0.5, q) * qb(l + 0.5, q)) : Cplx(0.0);
        EXPECT_NEAR(std::abs(t(c, c) - diag), 0.0, 1e-12) << "m=" << m;
      }
    }
  }
}

TEST(Matrices, ClassicalLimitMatchesGelfandTsetlin) {
  const QContext ctx(1.0 + 1e-6);
  for (const auto& label : suite::classical_labels()) {
    const auto basis = enumerate_patterns(label);
    std::vector<oracle::DPattern> pats;
    for (const auto& p : basis.patterns()) pats.push_back(oracle::to_doubled(p));
    for (int k = 1; k < label.n; ++k) {
      const DenseMat got = dense(build_generator(basis, k, ctx));
      const DenseMat want = oracle::gt_matrix_q1(label.n, pats, k);
      const double peak = want.cwiseAbs().maxCoeff();
      for (Eigen::Index r = 0; r < got.rows(); ++r)
        for (Eigen::Index c = 0; c < got.cols(); ++c) {
          const double ref = std::max(std::abs(want(r, c)), 1e-12 * peak);
          EXPECT_LE(std::abs(got(r, c) - want(r, c)), 1e-4 * ref)
              << label.str() << " k=" << k << " (" << r << "," << c << ")";
        }
    }
  }
}

TEST(Matrices, ClassicalLimitIsAntiHermitian) {
  // at q = 1 the generators of the compact form are skew-adjoint
  const QContext ctx(1.0 + 1e-7);
  for (const auto& label : suite::classical_labels())
    for (const auto& g : build_representation(label, ctx)) {
      const DenseMat m = dense(g);
      EXPECT_LE((m + m.adjoint()).norm(), 1e-5 * (1 + m.norm())) << label.str() << " " << g.gen.str();
    }
}

TEST(Coefficients, NumeratorZeroGivesExactZero) {
  const QContext ctx(1.3);
  // L = (2, 0) at level 4 puts [0] in the numerator of C_3
  EXPECT_EQ(coeff_C(Kind::classical, {H(2), H(0)}, {H(0)}, {H(0)}, 3, ctx), Cplx(0.0));
}

TEST(Coefficients, DenominatorZeroRaisesSingularity) {
  const QContext ctx(1.3);
  // mid l = 1 makes [l - 1] = [0] in the denominator while the numerator is nonzero
  EXPECT_THROW(coeff_C(Kind::classical, {H(2), H(2)}, {H(0)}, {H(2)}, 3, ctx), SingularityError);
}

TEST(Coefficients, AccessorsAgreeWithMatrices) {
  const QContext ctx(1.3);
  const auto label = IrrepLabel::classical(4, {H(2), H(0)});
  const auto basis = enumerate_patterns(label);
  const DenseMat t = dense(build_generator(basis, 3, ctx));
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const Cplx diag = Cplx(0.0, 1.0) * coeff_classical(basis[c], 1, 3, CoeffKind::C, ctx);
    EXPECT_NEAR(std::abs(t(c, c) - diag), 0.0, 1e-14);
  }
  EXPECT_THROW(coeff_classical(basis[0], 1, 3, CoeffKind::D, ctx), ValidationError);
}

TEST(Generators, OutOfRangeIndexIsRejected) {
  const QContext ctx(1.3);
  const auto label = IrrepLabel::classical(3, {H(2)});
  EXPECT_THROW(build_generator(label, 3, ctx), ValidationError);
  EXPECT_THROW(build_generator(label, 0, ctx), ValidationError);
  EXPECT_THROW(composite_generator(label, 3, 3, 1, ctx), ValidationError);
}

TEST(Generators, CompositeIsNestedQCommutator) {
  const QContext ctx(0.7);
  const auto rep = build_representation(IrrepLabel::classical(5, {H(4), H(2)}), ctx);
  const double a = std::sqrt(ctx.q), b = 1 / std::sqrt(ctx.q);
  const DenseMat i21 = dense(rep[0]), i32 = dense(rep[1]), i43 = dense(rep[2]);
  for (int s : {1, -1}) {
    const double x = s > 0 ? a : b, y = s > 0 ? b : a;
    const DenseMat i31 = x * i21 * i32 - y * i32 * i21;
    const DenseMat i42 = x * i32 * i43 - y * i43 * i32;
    const DenseMat i41 = x * i21 * i42 - y * i42 * i21;
    EXPECT_LE((dense(composite_generator(rep, 3, 1, s, ctx)) - i31).norm(), 1e-12);
    EXPECT_LE((dense(composite_generator(rep, 4, 2, s, ctx)) - i42).norm(), 1e-12);
    EXPECT_LE((dense(composite_generator(rep, 4, 1, s, ctx)) - i41).norm(), 1e-12);
  }
  const auto simple = composite_generator(rep, 3, 2, 1, ctx);
  EXPECT_EQ(simple.gen, GenId::simple(2));
  EXPECT_LE((dense(simple) - i32).norm(), 0.0);
}

TEST(Generators, IdNames) {
  EXPECT_EQ(GenId::simple(2).str(), "I(3,2)");
  EXPECT_EQ((GenId{3, 1, 1}.str()), "I+(3,1)");
  EXPECT_EQ((GenId{4, 1, -1}.str()), "I-(4,1)");
}
