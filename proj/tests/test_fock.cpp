#include "test_support.hpp"

#include <kerrpb/fock.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace kerrpb;
using kerrpb::testing::Gen;
using kerrpb::testing::max_abs;

TEST(Ladder, AnnihilationEntries) {
    const CMatrix a = annihilation(3);
    EXPECT_DOUBLE_EQ(a(0, 1).real(), 1.0);
    EXPECT_DOUBLE_EQ(a(1, 2).real(), std::sqrt(2.0));
    EXPECT_EQ((a.cwiseAbs().array() > 0).count(), 2);
}

TEST(Ladder, CommutatorIsIdentityBelowEdge) {
    for (Eigen::Index dim : {2, 5, 12}) {
        const CMatrix c = commutator(annihilation(dim), creation(dim));
        EXPECT_LT(max_abs(c.topLeftCorner(dim - 1, dim - 1) - identity(dim - 1)), 1e-14);
        EXPECT_NEAR(c(dim - 1, dim - 1).real(), -static_cast<double>(dim - 1), 1e-12);
    }
}

TEST(Ladder, ActionOnFockStates) {
    EXPECT_LT((annihilation(2) * fock_state(2, 1) - fock_state(2, 0)).norm(), 1e-15);
    EXPECT_LT((creation(2) * fock_state(2, 0) - fock_state(2, 1)).norm(), 1e-15);
}

TEST(Ladder, NumberParityIdentity) {
    const CMatrix n = number(4);
    for (int i = 0; i < 4; ++i) {
        EXPECT_DOUBLE_EQ(n(i, i).real(), i);
    }
    EXPECT_DOUBLE_EQ(identity(5).trace().real(), 5.0);
    const CMatrix p = parity(4);
    const double expected[] = {1, -1, 1, -1};
    for (int i = 0; i < 4; ++i) {
        EXPECT_DOUBLE_EQ(p(i, i).real(), expected[i]);
    }
    EXPECT_LT(max_abs(p * p - identity(4)), 1e-15);
    EXPECT_DOUBLE_EQ(p(0, 0).real(), 1.0);
}

TEST(Ladder, InvalidDimension) {
    EXPECT_THROW(annihilation(0), InvalidDimension);
    EXPECT_THROW(number(0), InvalidDimension);
    EXPECT_THROW(parity(-1), InvalidDimension);
    EXPECT_THROW(displacement(0, 1.0), InvalidDimension);
    EXPECT_THROW(fock_state(3, 3), InvalidArgument);
}

TEST(Ladder, MixedDimensionsRejected) {
    EXPECT_THROW(commutator(number(3), number(4)), ShapeError);
    EXPECT_THROW(checked_product(CMatrix::Zero(2, 3), CMatrix::Zero(2, 3)), ShapeError);
}

TEST(Kron, BlockStructure) {
    const CMatrix a = number(2);
    const CMatrix b = annihilation(3);
    const CMatrix k = kron(a, b);
    ASSERT_EQ(k.rows(), 6);
    EXPECT_LT(max_abs(k.topLeftCorner(3, 3)), 1e-15);
    EXPECT_LT(max_abs(k.bottomRightCorner(3, 3) - b), 1e-15);
}

TEST(Expm, Identities) {
    EXPECT_LT(max_abs(expm(CMatrix::Zero(4, 4)) - identity(4)), 1e-15);
    EXPECT_LT(max_abs(expm(kI * kPi * number(4)) - parity(4)), 1e-12);
    CMatrix d = CMatrix::Zero(3, 3);
    d.diagonal() << -2.0, 0.5, Complex(1.0, 3.0);
    const CMatrix e = expm(d);
    for (int i = 0; i < 3; ++i) {
        EXPECT_LT(std::abs(e(i, i) - std::exp(d(i, i))), 1e-13 * std::abs(std::exp(d(i, i))));
    }
}

TEST(Expm, NilpotentSeriesTerminates) {
    // a^dim = 0, so exp(t a) is the finite series sum t^n a^n / n!.
    const Eigen::Index dim = 6;
    const CMatrix a = annihilation(dim);
    const double t = 1.7;
    CMatrix series = identity(dim);
    CMatrix term = identity(dim);
    for (int n = 1; n < dim; ++n) {
        term = term * a * (t / n);
        series += term;
    }
    EXPECT_LT(max_abs(expm(t * a) - series), 1e-12);
}

TEST(Expm, MatchesEigendecompositionOnRandomHermitian) {
    Gen gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index dim = gen.integer(1, 12);
        const CMatrix h = gen.hermitian(dim) * gen.uniform(0.1, 20.0);
        const double t = gen.uniform(-2.0, 2.0);
        const EigenSystem eig = hermitian_eig(h);
        CVector phases(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            phases(i) = std::polar(1.0, -eig.values(i) * t);
        }
        const CMatrix oracle = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
        EXPECT_LT(max_abs(expm(-kI * t * h) - oracle), 1e-10) << "trial " << trial;
    }
}

TEST(Expm, NonFiniteInputRejected) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(expm(m), NumericError);
    EXPECT_THROW(expm(CMatrix::Zero(2, 3)), ShapeError);
}

TEST(HermitianEig, SimpleSpectra) {
    const EigenSystem id = hermitian_eig(identity(3));
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(id.values(i), 1.0, 1e-15);
    }
    const EigenSystem n = hermitian_eig(number(3));
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(n.values(i), i, 1e-14);
    }
}

TEST(HermitianEig, ReconstructionProperty) {
    Gen gen(23);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index dim = gen.integer(1, 20);
        const CMatrix m = gen.hermitian(dim) * gen.uniform(1e-3, 1e3);
        const EigenSystem eig = hermitian_eig(m);
        for (Eigen::Index i = 1; i < dim; ++i) {
            EXPECT_LE(eig.values(i - 1), eig.values(i));
        }
        const CMatrix rec = eig.vectors * eig.values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
        EXPECT_LE((rec - m).norm(), 1e-8 * m.norm()) << "trial " << trial;
    }
}

TEST(HermitianEig, RejectsNonHermitian) {
    EXPECT_THROW(hermitian_eig(annihilation(3)), ContractViolation);
}

TEST(Displacement, ZeroIsIdentity) {
    EXPECT_LT(max_abs(displacement(6, 0.0) - identity(6)), 1e-15);
}

TEST(Displacement, CoherentStateAmplitudes) {
    // D(alpha)|0> = e^{-|alpha|^2/2} sum alpha^n / sqrt(n!) |n>
    const Eigen::Index dim = 40;
    for (Complex alpha : {Complex(0.3, 0.0), Complex(-1.1, 0.7), Complex(0.0, 2.0), Complex(1.2, -1.5)}) {
        if (std::abs(alpha) > 2.0) {
            continue;
        }
        const CVector col = displacement(dim, alpha).col(0);
        Complex coeff = std::exp(-0.5 * std::norm(alpha));
        for (Eigen::Index n = 0; n < 15; ++n) {
            EXPECT_LT(std::abs(col(n) - coeff), 1e-8) << "alpha " << alpha << " n " << n;
            coeff *= alpha / std::sqrt(static_cast<double>(n + 1));
        }
        EXPECT_NEAR(std::abs(col(0)), std::exp(-0.5 * std::norm(alpha)), 1e-8);
    }
}

TEST(Displacement, InverseOnLowerBlock) {
    const Eigen::Index dim = 40;
    for (Complex alpha : {Complex(1.0, 1.0), Complex(-2.0, 0.0), Complex(0.5, -1.8)}) {
        const CMatrix prod = displacement(dim, alpha) * displacement(dim, -alpha);
        EXPECT_LT(max_abs(prod.topLeftCorner(dim / 2, dim / 2) - identity(dim / 2)), 1e-8);
    }
}

TEST(Displacement, GeneratorMatchesExpm) {
    Gen gen(5);
    const Eigen::Index dim = 25;
    const DisplacementGenerator g(dim);
    for (int trial = 0; trial < 10; ++trial) {
        const Complex alpha(gen.uniform(-2.5, 2.5), gen.uniform(-2.5, 2.5));
        const CMatrix d = displacement(dim, alpha);
        EXPECT_LT(max_abs(g(alpha) - d), 1e-10);
        EXPECT_LT(max_abs(g.top_rows(alpha, 7) - d.topRows(7)), 1e-10);
    }
}

TEST(Hermiticity, DefectAndTolerance) {
    EXPECT_TRUE(is_hermitian(number(5)));
    EXPECT_FALSE(is_hermitian(annihilation(5)));
    CMatrix m = number(3);
    m(0, 1) = 1e-13;
    EXPECT_TRUE(is_hermitian(m));
    EXPECT_FALSE(is_hermitian(CMatrix::Zero(2, 3)));
}
