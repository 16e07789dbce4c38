#include "test_support.hpp"

#include <kerrpb/analytic.hpp>
#include <kerrpb/phase_space.hpp>
#include <kerrpb/validation.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace kerrpb;
using namespace kerrpb::analytic;
using kerrpb::testing::max_abs;

TEST(PerturbationParamsTest, PhysicalRoundTrip) {
    const auto p = PerturbationParams::from_physical(1.0, 5.0, 30.0);
    EXPECT_NEAR(p.delta, 0.2, 1e-15);
    EXPECT_NEAR(p.d, 5.0 / 6.0, 1e-15);
    EXPECT_NEAR(p.eps(), 5.0, 1e-12);
    EXPECT_NEAR(p.chi(), 30.0, 1e-12);
    EXPECT_TRUE(p.valid());
    EXPECT_FALSE((PerturbationParams{0.5, 1.0}.valid()));
    EXPECT_THROW(PerturbationParams::from_physical(0.0, 1.0, 1.0), InvalidParameter);
    EXPECT_THROW(steady2_approx({0.0, 1.0}), InvalidParameter);
}

TEST(Steady2, UndrivenLimitIsVacuum) {
    const CMatrix m = steady2_approx({0.1, 1e-9});
    CMatrix vac = CMatrix::Zero(4, 4);
    vac(0, 0) = 1.0;
    EXPECT_LT(max_abs(m - vac), 1e-8);
}

TEST(Steady2, StructuralIdentities) {
    for (double d : {0.3, 5.0 / 6.0, 1.0}) {
        for (double delta : {0.05, 0.2}) {
            const CMatrix m = steady2_approx({delta, d});
            EXPECT_NEAR(m.trace().real(), 1.0, 1e-14);
            EXPECT_EQ(m(3, 3), Complex(0.0));
            EXPECT_EQ(m(3, 1), Complex(0.0));
            EXPECT_EQ(m(1, 3), Complex(0.0));
            EXPECT_LT(hermiticity_defect(m), 1e-15);
        }
    }
    const CMatrix m = steady2_approx({0.2, 5.0 / 6.0});
    EXPECT_NEAR(m(0, 0).real(), 0.364, 1e-3);
    EXPECT_NEAR(m(1, 1).real(), 0.424, 1e-3);
    EXPECT_NEAR(m(2, 2).real(), 0.212, 1e-3);
}

TEST(Steady2, AgreesWithFourLevelSolve) {
    for (double delta : {0.05, 0.1, 0.2}) {
        for (double d : {0.5, 5.0 / 6.0, 1.0}) {
            const validation::Check c = validation::steady2_check({delta, d});
            EXPECT_TRUE(c.passed()) << "delta " << delta << " d " << d << " residual " << c.residual;
        }
    }
}

TEST(Steady1, FirstOrderDiagonal) {
    const CMatrix m = steady1_approx({0.1, 1.0}, Order::delta1);
    EXPECT_DOUBLE_EQ(m(0, 0).real(), 0.5);
    EXPECT_DOUBLE_EQ(m(1, 1).real(), 0.5);
    EXPECT_DOUBLE_EQ(m(2, 2).real(), 0.0);
    EXPECT_LT(hermiticity_defect(m), 1e-15);
}

TEST(Steady1, SecondOrderEntries) {
    for (double d : {0.5, 1.0, 2.0}) {
        const double delta = 0.07;
        const CMatrix m = steady1_approx({delta, d}, Order::delta2);
        EXPECT_NEAR(m(2, 2).real(), d * d * delta * delta / 4.0, 1e-16);
        EXPECT_NEAR(m.trace().real(), 1.0, 1e-15);
        EXPECT_LT(hermiticity_defect(m), 1e-15);
    }
}

TEST(Steady1, OrdersAgreeToSecondOrder) {
    for (double delta : {0.01, 0.03, 0.05, 0.1}) {
        for (double d : {0.5, 1.0}) {
            const double diff =
                max_abs(steady1_approx({delta, d}, Order::delta1) - steady1_approx({delta, d}, Order::delta2));
            EXPECT_LE(diff, 2.0 * delta * delta) << "delta " << delta << " d " << d;
        }
    }
}

TEST(Steady1, AgreesWithThreeLevelSolve) {
    for (double delta : {0.025, 0.05, 0.1}) {
        const validation::Check c = validation::steady1_check({delta, 1.0});
        EXPECT_TRUE(c.passed()) << "delta " << delta << " residual " << c.residual;
    }
}

TEST(Trunc2, ZeroDriveLimit) {
    const double chi = 30.0;
    const Trunc2Eigensystem e = trunc2_eigensystem(chi, 0.0);
    EXPECT_DOUBLE_EQ(e.lambdas[0], -chi);
    EXPECT_DOUBLE_EQ(e.lambdas[1], 0.0);
    EXPECT_DOUBLE_EQ(e.lambdas[2], 0.0);
    EXPECT_DOUBLE_EQ(e.lambdas[3], 3.0 * chi);
    for (const CVector& v : e.vectors) {
        EXPECT_NEAR(v.norm(), 1.0, 1e-15);
    }
    EXPECT_THROW(trunc2_eigensystem(0.0, 0.1), InvalidParameter);
}

TEST(Trunc2, AgreesWithExactEigensolve) {
    const double chi = 30.0;
    const double delta = 1.0 / 6.0;
    const validation::EigenComparison c = validation::compare_trunc2_eigensystem(chi, delta);
    EXPECT_LE(c.max_lambda_error, 5.0 * chi * std::pow(delta, 3));
    EXPECT_GE(c.min_overlap, 1.0 - 10.0 * std::pow(delta, 4));
    EXPECT_LE(c.sum_error, 10.0 * chi * delta * delta);
}

TEST(Trunc2, ClosedFormNormalizationsMatchAtLeadingOrder) {
    // With N_pm^{-2} read as 6[3 + (5 pm 2 sqrt 2) delta^2] the closed-form constants
    // agree with the vector norms up to O(delta^4).
    for (double delta : {0.02, 0.05, 0.1}) {
        const Trunc2Eigensystem e = trunc2_eigensystem(30.0, delta);
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_NEAR(e.closed_form_norm_ratio[j], 1.0, 6.0 * std::pow(delta, 4))
                << "delta " << delta << " j " << j;
        }
    }
}

TEST(Psi2, InitialStateIsVacuumToThirdOrder) {
    // ||psi(0) - |0>|| scales as delta^3.
    auto defect = [](double delta) {
        CVector vac = CVector::Zero(4);
        vac(0) = 1.0;
        return (psi2_evolution(30.0, delta, 0.0) - vac).norm();
    };
    const double slope = std::log(defect(0.02) / defect(0.01)) / std::log(2.0);
    EXPECT_NEAR(slope, 3.0, 0.5);
}

TEST(Psi2, ThreePhotonAmplitudeFollowsLeadingExpansion) {
    const double chi = 30.0;
    for (double delta : {0.02, 0.05}) {
        const Trunc2Eigensystem e = trunc2_eigensystem(chi, delta);
        // The neglected terms carry a phase gap of order chi delta^2 t, so only chi t = O(1) is checked.
        for (double t : {0.1 / chi, 0.5 / chi, 1.0 / chi}) {
            const Complex c3 = psi2_evolution(e, t)(3);
            const Complex lead = std::sqrt(6.0) / 2.0 * delta *
                                 (std::polar(1.0, -e.lambdas[1] * t) - std::polar(1.0, -e.lambdas[2] * t));
            EXPECT_LE(std::abs(c3 - lead), 20.0 * std::pow(delta, 3)) << "delta " << delta << " chi t " << chi * t;
        }
    }
}

TEST(Psi2, ThreePhotonAmplitudeSmallAtShortTimes) {
    const double chi = 30.0;
    auto worst = [&](double delta) {
        double w = 0.0;
        for (int i = 0; i <= 100; ++i) {
            w = std::max(w, std::abs(psi2_evolution(chi, delta, i * 0.01 / chi)(3)));
        }
        return w;
    };
    const double slope = std::log(worst(0.02) / worst(0.01)) / std::log(2.0);
    EXPECT_NEAR(slope, 3.0, 0.5);
}

TEST(Psi1, ClosedForm) {
    const double eps = 5.0;
    const CVector at0 = psi1_evolution(eps, 0.0);
    EXPECT_EQ(at0(0), Complex(1.0));
    EXPECT_EQ(at0.tail(2).norm(), 0.0);
    const CVector quarter = psi1_evolution(eps, kPi / (2.0 * eps));
    EXPECT_NEAR(std::abs(quarter(0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(quarter(1) - Complex(0.0, -1.0)), 0.0, 1e-15);
}

TEST(Psi1, RabiLawAgainstThreeLevelSolve) {
    const double chi = 30.0;
    const double delta = 1.0 / 6.0;
    const auto times = linspace_step(0.0, 50.0 / chi, 0.01 / chi);
    EXPECT_LE(validation::compare_psi1(chi, delta, times), 3.0 * delta * delta);
}
