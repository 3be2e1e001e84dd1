#pragma once

// Physical parameters of the piezo-electromechanical plate and the
// dimensionless groups that drive every other module. All dimensional
// bookkeeping lives here.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "piezoplate/errors.hpp"

namespace piezoplate {

/// Plate, actuator and network constants in SI units.
///
/// `half_thickness` is h with the plate occupying [-h, h]; the reference
/// plate reads the tabulated "h = 1 mm" as this half-thickness.
struct PhysicalParams {
    double side_length = 1.0;           // m
    double half_thickness = 1e-3;       // m
    double mass_density = 2700.0;       // kg/m^3
    double young_modulus = 70e9;        // Pa
    double poisson_ratio = 0.3;         // aluminium
    int actuator_count = 49;            // 7 x 7
    double piezo_coupling = 28e-5;      // N/V
    double piezo_capacitance = 0.6e-6;  // F
    double ground_capacitance = 1e-6;   // F
    double net_inductance = 1.0;        // H
    double net_resistance = 0.0;        // Ohm
};

/// Reference aluminium plate with 49 QP20W-class actuators.
inline PhysicalParams reference_plate() { return PhysicalParams{}; }

struct DerivedPhysical {
    double bending_stiffness;    // D_P, N m
    double total_mass;           // M_P, kg
    double area_capacitance;     // C_N, F/m^2
    double actuator_cell_area;   // d^2, m^2
    double char_pulsation;       // omega, rad/s
    double char_estate;          // V-bar, bookkeeping only
};

struct DimensionlessParams {
    double alpha = 1.0 / (std::numbers::pi * std::numbers::pi);
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
};

inline bool is_perfect_square(int n) {
    if (n < 0) return false;
    const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    return r * r == n;
}

/// Throws PreconditionError on invalid parameters; returns soft warnings.
inline std::vector<std::string> validate(const PhysicalParams& p) {
    auto positive = [](double x, const char* name) {
        require(std::isfinite(x) && x > 0.0, std::string(name) + " must be strictly positive");
    };
    positive(p.side_length, "side_length");
    positive(p.half_thickness, "half_thickness");
    positive(p.mass_density, "mass_density");
    positive(p.young_modulus, "young_modulus");
    positive(p.piezo_coupling, "piezo_coupling");
    positive(p.piezo_capacitance, "piezo_capacitance");
    positive(p.ground_capacitance, "ground_capacitance");
    positive(p.net_inductance, "net_inductance");
    require(std::isfinite(p.net_resistance) && p.net_resistance >= 0.0,
            "net_resistance must be non-negative");
    require(std::isfinite(p.poisson_ratio) && p.poisson_ratio >= 0.0 && p.poisson_ratio < 0.5,
            "poisson_ratio must lie in [0, 0.5)");
    require(p.actuator_count > 0 && is_perfect_square(p.actuator_count),
            "actuator_count must be a positive perfect square");

    std::vector<std::string> warnings;
    if (2.0 * p.half_thickness / p.side_length >= 0.1)
        warnings.emplace_back("thickness-to-side ratio 2h/l >= 0.1: thin-plate model is questionable");
    return warnings;
}

/// Validates geometry and material only (network knobs may be unset).
inline void validate_structure(PhysicalParams p) {
    p.net_inductance = 1.0;
    p.net_resistance = 0.0;
    validate(p);
}

/// 2 mu + lambda from Young's modulus and Poisson ratio.
inline double plate_modulus(double young, double poisson) {
    const double mu = young / (2.0 * (1.0 + poisson));
    const double lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    return 2.0 * mu + lambda;
}

inline DerivedPhysical derive_physical(const PhysicalParams& p) {
    validate_structure(p);
    const double l = p.side_length;
    const double h = p.half_thickness;
    DerivedPhysical d{};
    d.bending_stiffness = (2.0 * h * h * h / 3.0) * plate_modulus(p.young_modulus, p.poisson_ratio);
    d.total_mass = 2.0 * p.mass_density * l * l * h;
    d.actuator_cell_area = l * l / p.actuator_count;
    d.area_capacitance = (p.piezo_capacitance + p.ground_capacitance) / d.actuator_cell_area;
    d.char_pulsation = std::numbers::pi / l * std::sqrt(d.bending_stiffness / d.total_mass);
    d.char_estate = std::sqrt(d.total_mass / d.area_capacitance);
    return d;
}

inline DimensionlessParams dimensionless_from_physical(const PhysicalParams& p) {
    if (p.net_inductance == 0.0)
        throw PreconditionError("resistive-only network unsupported in dimensionless form (net_inductance = 0)");
    validate(p);
    const DerivedPhysical d = derive_physical(p);
    const double l = p.side_length;
    const double w = d.char_pulsation;
    DimensionlessParams out;
    out.alpha = d.bending_stiffness / (d.total_mass * l * l * w * w);
    out.beta = 1.0 / (p.net_inductance * d.area_capacitance * l * l * w * w);
    out.gamma = p.piezo_coupling / (l * w) * std::sqrt(1.0 / (d.total_mass * d.area_capacitance));
    out.delta = p.net_resistance / (p.net_inductance * w);
    return out;
}

/// k = C^2 / A for one modal pair.
inline double coupling_ratio(double A, double C) {
    require(A > 0.0, "coupling_ratio: modal stiffness A must be positive");
    return C * C / A;
}

/// k = g_me^2 / (D_P C_N), the same ratio from physical constants.
inline double coupling_ratio_physical(const PhysicalParams& p) {
    const DerivedPhysical d = derive_physical(p);
    return p.piezo_coupling * p.piezo_coupling / (d.bending_stiffness * d.area_capacitance);
}

inline constexpr double weak_coupling_threshold = 0.05;

inline bool is_weak_coupling(double k) { return k < weak_coupling_threshold; }

}  // namespace piezoplate
