#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "anchors.hpp"
#include "piezoplate/coupling.hpp"

using namespace piezoplate;

namespace {

constexpr double pi2 = pi * pi;

// Entries forbidden by parity: beam function n and sine m have opposite
// symmetry about 1/2 when n + m is odd, in either coordinate.
bool parity_forbidden(const ModeIndex& m, const ModeIndex& e) { return (m.i + e.i) % 2 == 1 || (m.j + e.j) % 2 == 1; }

const ModalBasis& clamped9() {
    static const ModalBasis b = make_basis(BasisKind::mechanical_clamped, 9);
    return b;
}
const ModalBasis& membrane9() {
    static const ModalBasis b = make_basis(BasisKind::electrical_membrane, 9);
    return b;
}

}  // namespace

TEST(AnalyticSS, DiagonalEntries) {
    const CouplingMatrix c = coupling_analytic_ss(9);
    EXPECT_NEAR(c(0, 0), -2.0 * pi2, 1e-13);
    EXPECT_NEAR(c(0, 0), -19.7392, 1e-4);
    EXPECT_EQ(c(0, 1), 0.0);
    EXPECT_NEAR(c(3, 3), -8.0 * pi2, 1e-12);
    for (int h = 0; h < 9; ++h) EXPECT_LT(c(h, h), 0.0);
    EXPECT_THROW(coupling_analytic_ss(0), PreconditionError);
}

TEST(QuadratureSS, MatchesAnalytic) {
    const auto mech = make_basis(BasisKind::mechanical_ss, 9);
    const auto elec = make_basis(BasisKind::electrical_membrane, 9);
    const CouplingMatrix q = coupling_quadrature(mech, elec, 9);
    const CouplingMatrix a = coupling_analytic_ss(9);
    for (int h = 0; h < 9; ++h) {
        for (int k = 0; k < 9; ++k) {
            if (h == k)
                EXPECT_LT(std::abs(q(h, k) - a(h, k)) / std::abs(a(h, k)), 1e-8);
            else
                EXPECT_LT(std::abs(q(h, k)), 1e-8);
        }
    }
    EXPECT_EQ(q.mech_kind, BasisKind::mechanical_ss);
}

TEST(QuadratureClamped, ParityZerosAndDominantDiagonal) {
    const CouplingMatrix c = coupling_quadrature(clamped9(), membrane9(), 9);
    for (int h = 0; h < 9; ++h) {
        const double diag = std::abs(c(h, h));
        for (int k = 0; k < 9; ++k) {
            if (parity_forbidden(clamped9()[h].index, membrane9()[k].index)) {
                EXPECT_LT(std::abs(c(h, k)), 1e-10) << h << "," << k;
            }
            if (k != h) {
                EXPECT_LT(std::abs(c(h, k)), diag) << h << "," << k;
            }
        }
    }
}

TEST(QuadratureClamped, EntriesMatchOracle) {
    const CouplingMatrix c = coupling_quadrature(clamped9(), membrane9(), 9);
    EXPECT_NEAR(c(0, 0), anchors::clamped_C11, 1e-9);
    EXPECT_NEAR(c(0, 4), anchors::clamped_C15, 1e-9);
    EXPECT_NEAR(c(1, 1), anchors::clamped_C22, 1e-9);
}

TEST(QuadratureClamped, PatternOfFirstRow) {
    const CouplingMatrix c = coupling_quadrature(clamped9(), membrane9(), 9);
    EXPECT_TRUE(is_coupled(0, 4, c));   // (1,1) with (1,3)
    EXPECT_TRUE(is_coupled(0, 5, c));   // (1,1) with (3,1)
    EXPECT_FALSE(is_coupled(0, 1, c));  // (1,1) with (1,2)
    EXPECT_FALSE(is_coupled(0, 3, c));  // (1,1) with (2,2)
}

TEST(QuadratureClamped, ConvergedUnderOrderDoubling) {
    const SquareQuadrature q32(32), q64(64);
    const auto a = coupling_quadrature(make_basis(BasisKind::mechanical_clamped, 9, q32), membrane9(), 9, 32);
    const auto b = coupling_quadrature(make_basis(BasisKind::mechanical_clamped, 9, q64), membrane9(), 9, 64);
    EXPECT_LT((a.entries - b.entries).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(QuadratureClamped, InsufficientOrderIsReported) {
    EXPECT_THROW(coupling_quadrature(clamped9(), membrane9(), 9, 4), NumericalError);
}

TEST(QuadratureClamped, PermutingTheBasisPermutesTheMatrix) {
    ModalBasis mech = clamped9(), elec = membrane9();
    const CouplingMatrix c = coupling_quadrature(mech, elec, 9);
    std::reverse(mech.modes.begin(), mech.modes.end());
    std::reverse(elec.modes.begin(), elec.modes.end());
    const CouplingMatrix r = coupling_quadrature(mech, elec, 9);
    for (int h = 0; h < 9; ++h)
        for (int k = 0; k < 9; ++k) EXPECT_EQ(r(8 - h, 8 - k), c(h, k));
}

TEST(Criterion, SimplySupportedExamples) {
    const CouplingMatrix c = coupling_analytic_ss(4);
    EXPECT_TRUE(is_coupled(0, 0, c, 1e-6));
    EXPECT_FALSE(is_coupled(0, 1, c));
    EXPECT_THROW(is_coupled(0, 0, c, 0.0), PreconditionError);
    EXPECT_THROW(is_coupled(4, 0, c), PreconditionError);
    EXPECT_EQ(coupled_pairs(c).size(), 4u);
}

TEST(Report, ListsPairsAndMap) {
    const CouplingMatrix c = coupling_quadrature(clamped9(), membrane9(), 9);
    const std::string text = coupling_report(c);
    EXPECT_NE(text.find("m1 (1,1)  <->  e5 (1,3)"), std::string::npos);
    EXPECT_EQ(text.find("m1 (1,1)  <->  e2"), std::string::npos);
    EXPECT_NE(text.find("pattern"), std::string::npos);
    // nine map rows, one '#' on each diagonal
    const auto map = text.substr(text.find("pattern"));
    EXPECT_EQ(std::count(map.begin(), map.end(), '\n'), 10);
}
