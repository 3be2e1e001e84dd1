#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <set>

#include "anchors.hpp"
#include "piezoplate/modal_basis.hpp"

using namespace piezoplate;

namespace {

constexpr double pi2 = pi * pi;
constexpr double pi4 = pi2 * pi2;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct ZeroField {
    double value(double, double) const { return 0.0; }
    double laplacian(double, double) const { return 0.0; }
};

}  // namespace

TEST(ModeSequence, FirstNineFollowTheTable) {
    const std::pair<int, int> expected[] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3}, {3, 1}, {2, 3}, {3, 2}, {3, 3}};
    const auto modes = mode_sequence(9);
    ASSERT_EQ(modes.size(), 9u);
    for (int k = 0; k < 9; ++k) {
        EXPECT_EQ(modes[k].ordinal, k + 1);
        EXPECT_EQ(modes[k].i, expected[k].first);
        EXPECT_EQ(modes[k].j, expected[k].second);
    }
}

TEST(ModeSequence, ExtensionIsByWaveNumberThenFirstIndex) {
    const auto modes = mode_sequence(60);
    EXPECT_EQ(modes[9], (ModeIndex{10, 1, 4}));
    EXPECT_EQ(modes[10], (ModeIndex{11, 4, 1}));
    EXPECT_EQ(modes[11], (ModeIndex{12, 2, 4}));
    std::set<std::pair<int, int>> seen;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        EXPECT_TRUE(seen.insert({modes[k].i, modes[k].j}).second) << "duplicate at " << k;
        if (k >= 10) {
            const int a = modes[k - 1].wave_number_sq(), b = modes[k].wave_number_sq();
            EXPECT_TRUE(a < b || (a == b && modes[k - 1].i < modes[k].i)) << "order broken at " << k;
        }
    }
    // the prefix is stable when more modes are requested
    const auto longer = mode_sequence(80);
    for (std::size_t k = 0; k < modes.size(); ++k) EXPECT_EQ(modes[k], longer[k]);
    EXPECT_EQ(mode_index(12), modes[11]);
    EXPECT_TRUE(mode_sequence(0).empty());
    EXPECT_THROW(mode_sequence(-1), PreconditionError);
}

TEST(SimplySupported, EigenvaluesAndBoundary) {
    EXPECT_NEAR(ss_mech_eigenpair(mode_index(1)).eigenvalue / pi4, 4.0, 1e-13);
    EXPECT_NEAR(ss_mech_eigenpair(mode_index(5)).eigenvalue / pi4, 100.0, 1e-12);
    EXPECT_EQ(mode_index(5).i, 1);
    EXPECT_EQ(mode_index(5).j, 3);
    const Mode m = ss_mech_eigenpair(mode_index(1));
    EXPECT_NEAR(m.shape.value(0.0, 0.37), 0.0, 1e-15);
    for (double t : {0.0, 0.13, 0.5, 0.91, 1.0}) {
        EXPECT_NEAR(m.shape.value(t, 0.0), 0.0, 1e-10);
        EXPECT_NEAR(m.shape.value(t, 1.0), 0.0, 1e-10);
        EXPECT_NEAR(m.shape.value(1.0, t), 0.0, 1e-10);
    }
}

TEST(Membrane, EigenvaluesAndNodalLines) {
    EXPECT_NEAR(membrane_eigenpair(mode_index(1)).eigenvalue / pi2, 2.0, 1e-14);
    EXPECT_NEAR(membrane_eigenpair(mode_index(4)).eigenvalue / pi2, 8.0, 1e-14);
    EXPECT_NEAR(membrane_eigenpair(mode_index(2)).shape.value(0.5, 0.5), 0.0, 1e-15);
}

TEST(SimplySupported, TableTwoRows) {
    const double lam[] = {4, 25, 25, 64, 100, 100, 169, 169, 324};
    const double nu[] = {2, 5, 5, 8, 10, 10, 13, 13, 18};
    const ModalBasis mech = make_basis(BasisKind::mechanical_ss, 9);
    const ModalBasis elec = make_basis(BasisKind::electrical_membrane, 9);
    for (int k = 0; k < 9; ++k) {
        EXPECT_NEAR(mech[k].eigenvalue / pi4, lam[k], 1e-12 * lam[k]);
        EXPECT_NEAR(elec[k].eigenvalue / pi2, nu[k], 1e-13 * nu[k]);
        // lambda_k = nu_k^2 for the simply supported plate
        EXPECT_NEAR(mech[k].eigenvalue / (elec[k].eigenvalue * elec[k].eigenvalue), 1.0, 1e-14);
    }
}

TEST(BeamRoot, MatchesBisectionOracle) {
    for (int n = 1; n <= 3; ++n) EXPECT_NEAR(clamped_beam_root(n), anchors::beam_root[n - 1], 1e-12);
    for (int n = 1; n <= 12; ++n) {
        const double b = clamped_beam_root(n);
        // cos b cosh b = 1, scaled by sech b to stay O(1)
        EXPECT_NEAR(std::cos(b) - 1.0 / std::cosh(b), 0.0, 1e-12) << n;
    }
    EXPECT_THROW(clamped_beam_root(0), PreconditionError);
}

TEST(BeamRoot, ApproachesHalfIntegerMultiplesOfPi) {
    for (int n = 4; n <= 40; ++n) EXPECT_LT(std::abs(clamped_beam_root(n) - (n + 0.5) * pi), 1e-4) << n;
}

TEST(BeamMode, ClampedEndsUnitNormAndStableForLargeRoots) {
    const GaussLegendre rule = gauss_legendre(96);
    for (int n : {1, 2, 3, 8, 20}) {
        const BeamMode b(n);
        for (double x : {0.0, 1.0}) {
            EXPECT_NEAR(b.value(x), 0.0, 1e-9) << n;
            EXPECT_NEAR(b.slope(x) / b.root(), 0.0, 1e-9) << n;
        }
        EXPECT_NEAR(rule.integrate([&](double x) { return b.value(x) * b.value(x); }), 1.0, 1e-10) << n;
    }
}

TEST(ClampedMode, BoundaryConditions) {
    for (int k : {1, 4, 9}) {
        const ModeShape s = clamped_mech_mode(mode_index(k));
        for (double t : {0.0, 0.21, 0.5, 0.77, 1.0}) {
            EXPECT_NEAR(s.value(0.0, t), 0.0, 1e-10);
            EXPECT_NEAR(s.value(1.0, t), 0.0, 1e-10);
            EXPECT_NEAR(s.value(t, 0.0), 0.0, 1e-10);
            EXPECT_NEAR(s.value(t, 1.0), 0.0, 1e-10);
            EXPECT_NEAR(s.gradient(0.0, t)[0], 0.0, 1e-8);
            EXPECT_NEAR(s.gradient(1.0, t)[0], 0.0, 1e-8);
            EXPECT_NEAR(s.gradient(t, 0.0)[1], 0.0, 1e-8);
            EXPECT_NEAR(s.gradient(t, 1.0)[1], 0.0, 1e-8);
        }
    }
}

TEST(ClampedMode, FirstModeSymmetries) {
    const ModeShape s = clamped_mech_mode(mode_index(1));
    for (double x : {0.1, 0.3, 0.45, 0.62}) {
        for (double y : {0.05, 0.33, 0.5, 0.8}) {
            const double v = s.value(x, y);
            EXPECT_NEAR(s.value(y, x), v, 1e-10);
            EXPECT_NEAR(s.value(1.0 - x, y), v, 1e-10);
            EXPECT_NEAR(s.value(x, 1.0 - y), v, 1e-10);
        }
    }
}

TEST(Orthonormality, GramMatricesAreIdentity) {
    const SquareQuadrature quad(32);
    for (BasisKind kind : {BasisKind::mechanical_ss, BasisKind::electrical_membrane, BasisKind::mechanical_clamped}) {
        const ModalBasis b = make_basis(kind, 9, quad);
        const double tol = kind == BasisKind::mechanical_clamped ? 1e-3 : 1e-8;
        double worst = 0.0;
        for (int h = 0; h < 9; ++h) {
            for (int k = 0; k < 9; ++k) {
                const double g = quad.integrate([&](double x, double y) { return b[h].shape.value(x, y) * b[k].shape.value(x, y); });
                worst = std::max(worst, std::abs(g - (h == k ? 1.0 : 0.0)));
            }
        }
        EXPECT_LT(worst, tol) << to_string(kind);
        // beam products are exactly orthogonal, so the loose bound is not needed in practice
        EXPECT_LT(worst, 1e-10) << to_string(kind);
    }
}

TEST(Rayleigh, ExactOnSimplySupportedModes) {
    for (int k : {1, 4, 9}) {
        const Mode m = ss_mech_eigenpair(mode_index(k));
        EXPECT_LT(rel(rayleigh_quotient(m.shape), m.eigenvalue), 1e-12) << k;
    }
}

TEST(Rayleigh, ClampedValuesMatchOracleAndTable) {
    const double table[] = {13.4, 55.8, 55.8, 121.6, 180.2, 180.2, 282.6, 282.6, 501.0};
    const auto start = std::chrono::steady_clock::now();
    const ModalBasis b = make_basis(BasisKind::mechanical_clamped, 9);
    for (int k = 0; k < 9; ++k) {
        const double v = b[k].eigenvalue / pi4;
        EXPECT_LT(rel(v, anchors::clamped_lambda_over_pi4[k]), 1e-10) << k + 1;
        EXPECT_LT(rel(v, table[k]), 0.01) << k + 1;
    }
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 5.0);
}

TEST(Rayleigh, UnderflowIsReported) {
    EXPECT_THROW(rayleigh_quotient(ZeroField{}), NumericalError);
}

TEST(Stiffening, TableValuesAndTrend) {
    EXPECT_NEAR(stiffening_ratio(mode_index(1)), 3.35, 0.005);
    EXPECT_NEAR(stiffening_ratio(mode_index(4)), 1.90, 0.005);
    EXPECT_NEAR(stiffening_ratio(mode_index(9)), 1.55, 0.005);
    double prev = stiffening_ratio(mode_index(1));
    for (int k = 1; k <= 9; ++k) {
        const double c = stiffening_ratio(mode_index(k));
        EXPECT_LT(rel(c, anchors::stiffening[k - 1]), 1e-10) << k;
        EXPECT_LE(c, prev * (1.0 + 1e-12)) << k;
        EXPECT_GT(c, 1.0);
        prev = c;
    }
}

TEST(Basis, EigenvaluesNonDecreasingWithinWaveNumberClasses) {
    for (BasisKind kind : {BasisKind::mechanical_ss, BasisKind::mechanical_clamped, BasisKind::electrical_membrane}) {
        const ModalBasis b = make_basis(kind, 9);
        for (int k = 1; k < 9; ++k) {
            if (b[k].index.wave_number_sq() != b[k - 1].index.wave_number_sq()) continue;
            EXPECT_LE(b[k - 1].eigenvalue, b[k].eigenvalue * (1.0 + 1e-12));
        }
    }
}

TEST(Quadrature, GaussLegendreIsExactForPolynomials) {
    const GaussLegendre rule = gauss_legendre(10);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    EXPECT_NEAR(wsum, 1.0, 1e-15);
    // degree 19 is the highest integrated exactly by 10 points
    EXPECT_NEAR(rule.integrate([](double x) { return std::pow(x, 19); }), 1.0 / 20.0, 1e-15);
    EXPECT_THROW(gauss_legendre(0), PreconditionError);
}
