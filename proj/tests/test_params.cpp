#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "anchors.hpp"
#include "piezoplate/params.hpp"
#include "piezoplate/tuning.hpp"

using namespace piezoplate;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

PhysicalParams random_plate(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PhysicalParams p;
    p.side_length = 0.2 + 2.0 * u(rng);
    p.half_thickness = p.side_length * (1e-4 + 0.02 * u(rng));
    p.mass_density = 1000.0 + 8000.0 * u(rng);
    p.young_modulus = 1e9 + 2e11 * u(rng);
    p.poisson_ratio = 0.45 * u(rng);
    const int side = 1 + static_cast<int>(12 * u(rng));
    p.actuator_count = side * side;
    p.piezo_coupling = 1e-5 + 1e-3 * u(rng);
    p.piezo_capacitance = 1e-8 + 1e-6 * u(rng);
    p.ground_capacitance = 1e-8 + 1e-6 * u(rng);
    p.net_inductance = 0.1 + 100.0 * u(rng);
    p.net_resistance = 50.0 * u(rng);
    return p;
}

}  // namespace

TEST(DerivePhysical, ReferencePlateMatchesAnchors) {
    const DerivedPhysical d = derive_physical(reference_plate());
    EXPECT_LT(rel(d.bending_stiffness, anchors::bending_stiffness), 1e-13);
    EXPECT_LT(rel(d.total_mass, anchors::total_mass), 1e-14);
    EXPECT_LT(rel(d.area_capacitance, anchors::area_capacitance), 1e-14);
    EXPECT_LT(rel(d.char_pulsation, anchors::char_pulsation), 1e-13);
    EXPECT_LT(rel(d.char_estate, anchors::char_estate), 1e-13);
    EXPECT_DOUBLE_EQ(d.actuator_cell_area, 1.0 / 49.0);
}

TEST(DerivePhysical, ZeroPoissonGivesYoungModulus) {
    PhysicalParams p = reference_plate();
    p.poisson_ratio = 0.0;
    const DerivedPhysical d = derive_physical(p);
    EXPECT_NEAR(plate_modulus(p.young_modulus, 0.0), p.young_modulus, 1e-6);
    EXPECT_LT(rel(d.bending_stiffness, 2.0 * std::pow(p.half_thickness, 3) / 3.0 * p.young_modulus), 1e-14);
}

TEST(DerivePhysical, DoublingSideQuartersPulsation) {
    PhysicalParams p = reference_plate();
    const double w1 = derive_physical(p).char_pulsation;
    p.side_length *= 2.0;
    const double w2 = derive_physical(p).char_pulsation;
    EXPECT_NEAR(w2 / w1, 0.25, 1e-14);
}

TEST(DerivePhysical, RejectsInvalidInputs) {
    auto with = [](auto edit) {
        PhysicalParams p = reference_plate();
        edit(p);
        return p;
    };
    EXPECT_THROW(derive_physical(with([](auto& p) { p.side_length = 0.0; })), PreconditionError);
    EXPECT_THROW(derive_physical(with([](auto& p) { p.mass_density = -1.0; })), PreconditionError);
    EXPECT_THROW(derive_physical(with([](auto& p) { p.poisson_ratio = 0.5; })), PreconditionError);
    EXPECT_THROW(derive_physical(with([](auto& p) { p.poisson_ratio = -0.1; })), PreconditionError);
    EXPECT_THROW(derive_physical(with([](auto& p) { p.actuator_count = 50; })), PreconditionError);
    EXPECT_THROW(derive_physical(with([](auto& p) { p.piezo_capacitance = 0.0; })), PreconditionError);
    EXPECT_THROW(validate(with([](auto& p) { p.net_resistance = -1.0; })), PreconditionError);
}

TEST(Validate, ThickPlateWarns) {
    PhysicalParams p = reference_plate();
    EXPECT_TRUE(validate(p).empty());
    p.half_thickness = 0.06;
    const auto warnings = validate(p);
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("2h/l"), std::string::npos);
}

TEST(Dimensionless, AlphaIsInversePiSquaredForRandomPlates) {
    std::mt19937_64 rng(7);
    const double target = 1.0 / (std::numbers::pi * std::numbers::pi);
    for (int n = 0; n < 500; ++n) {
        const DimensionlessParams d = dimensionless_from_physical(random_plate(rng));
        EXPECT_LT(rel(d.alpha, target), 1e-14);
        EXPECT_GT(d.beta, 0.0);
        EXPECT_GE(d.gamma, 0.0);
        EXPECT_GE(d.delta, 0.0);
    }
}

TEST(Dimensionless, ReferenceGammaAndOptimalBeta) {
    PhysicalParams p = reference_plate();
    p.net_inductance = optimal_inductance_ss({1, 1, 1}, p);
    const DimensionlessParams d = dimensionless_from_physical(p);
    EXPECT_LT(rel(d.gamma, anchors::gamma), 1e-13);
    EXPECT_LT(rel(d.beta, anchors::beta_at_L1), 1e-14);
    // tuning relation: B = beta nu_1 equals A = alpha lambda_1
    const double pi2 = std::numbers::pi * std::numbers::pi;
    EXPECT_LT(rel(d.beta * 2.0 * pi2, d.alpha * 4.0 * pi2 * pi2), 1e-14);
}

TEST(Dimensionless, DeltaIsResistanceOverInductanceTimesPulsation) {
    PhysicalParams p = reference_plate();
    p.net_inductance = 3.0;
    p.net_resistance = 12.0;
    const DimensionlessParams d = dimensionless_from_physical(p);
    EXPECT_LT(rel(d.delta, 12.0 / (3.0 * derive_physical(p).char_pulsation)), 1e-15);
}

TEST(Dimensionless, GammaVanishesLinearlyWithCoupling) {
    PhysicalParams p = reference_plate();
    const double g0 = dimensionless_from_physical(p).gamma;
    for (double scale : {1e-3, 1e-9, 1e-200}) {
        p.piezo_coupling = reference_plate().piezo_coupling * scale;
        EXPECT_LT(rel(dimensionless_from_physical(p).gamma, g0 * scale), 1e-14);
    }
}

TEST(Dimensionless, ResistiveOnlyNetworkRejected) {
    PhysicalParams p = reference_plate();
    p.net_inductance = 0.0;
    try {
        dimensionless_from_physical(p);
        FAIL() << "expected PreconditionError";
    } catch (const PreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find("resistive-only"), std::string::npos);
    }
}

TEST(Dimensionless, GammaInvariantUnderCouplingCapacitanceRescaling) {
    const PhysicalParams base = reference_plate();
    const double g0 = dimensionless_from_physical(base).gamma;
    for (double s : {2.0, 10.0}) {
        PhysicalParams p = base;
        p.piezo_coupling *= s;
        p.piezo_capacitance *= s * s;
        p.ground_capacitance *= s * s;
        EXPECT_LT(rel(dimensionless_from_physical(p).gamma, g0), 1e-14) << "s = " << s;
    }
}

TEST(CouplingRatio, Examples) {
    EXPECT_EQ(coupling_ratio(1.0, 0.0), 0.0);
    EXPECT_NEAR(coupling_ratio(4.0, 0.2), 0.01, 1e-16);
    EXPECT_THROW(coupling_ratio(0.0, 0.1), PreconditionError);
}

TEST(CouplingRatio, PhysicalFormMatchesAnchorAndModalReduction) {
    const PhysicalParams p = reference_plate();
    const double k = coupling_ratio_physical(p);
    EXPECT_LT(rel(k, anchors::coupling_ratio_physical), 1e-13);
    EXPECT_TRUE(is_weak_coupling(k));
    // mode 1 of the simply supported plate: A = alpha 4 pi^4, C = gamma (-2 pi^2)
    const DimensionlessParams d = dimensionless_from_physical(p);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double k_modal = coupling_ratio(d.alpha * 4.0 * pi2 * pi2, d.gamma * (-2.0 * pi2));
    EXPECT_LT(rel(k_modal, k), 1e-10);
}

TEST(CouplingRatio, WeakCouplingThreshold) {
    EXPECT_TRUE(is_weak_coupling(0.049));
    EXPECT_FALSE(is_weak_coupling(0.05));
}

TEST(PerfectSquare, Detection) {
    EXPECT_TRUE(is_perfect_square(49));
    EXPECT_TRUE(is_perfect_square(1));
    EXPECT_FALSE(is_perfect_square(50));
}
