#pragma once

// CSV exporters. Numbers use the shortest decimal string that parses back to
// the same double, so identical results give byte-identical files.

#include <charconv>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "piezoplate/dynamics.hpp"
#include "piezoplate/tuning.hpp"

namespace piezoplate {

inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline void write_row(std::ostream& os, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ',';
        os << format_number(values[i]);
    }
    os << '\n';
}

inline void write_header(std::ostream& os, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) os << ',';
        os << names[i];
    }
    os << '\n';
}

/// t, v_1..v_n, vdot_1..n, phi_1..n, phidot_1..n, the four energies, total.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const int n = traj.states.empty() ? 0 : traj.states.front().size();
    std::vector<std::string> head{"t"};
    for (const char* block : {"v", "vdot", "phi", "phidot"})
        for (int h = 1; h <= n; ++h) head.push_back(std::string(block) + "_" + std::to_string(h));
    for (const char* e : {"mech_elastic", "mech_kinetic", "elec_inductive", "elec_capacitive", "total"}) head.emplace_back(e);
    write_header(os, head);

    std::vector<double> row;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const ModalState& s = traj.states[i];
        const EnergyBreakdown& e = traj.energies[i];
        row.assign(1, traj.times[i]);
        for (const Eigen::VectorXd* block : {&s.v, &s.vdot, &s.phi, &s.phidot})
            row.insert(row.end(), block->data(), block->data() + block->size());
        row.insert(row.end(), {e.mech_elastic, e.mech_kinetic, e.elec_inductive, e.elec_capacitive, e.total});
        write_row(os, row);
    }
}

inline void write_frf_csv(std::ostream& os, const FrfCurves& frf) {
    write_header(os, {"omega", "mech_norm", "elec_norm", "coupling_norm"});
    for (std::size_t i = 0; i < frf.omega.size(); ++i) {
        const double row[] = {frf.omega[i], frf.mechanical[i], frf.electrical[i], frf.coupling[i]};
        write_row(os, row);
    }
}

inline void write_field_csv(std::ostream& os, const FieldSnapshot& snap) {
    write_header(os, {"x1", "x2", "w", "phi_field"});
    for (std::size_t i = 0; i < snap.w.size(); ++i) {
        const double row[] = {snap.x1[i], snap.x2[i], snap.w[i], snap.phi[i]};
        write_row(os, row);
    }
}

/// Root locus of a damping sweep: one row per grid point and branch.
inline void write_root_locus_csv(std::ostream& os, const DampingSweep& sweep, double C) {
    write_header(os, {"D_over_C", "branch", "re", "im", "coupling_weight"});
    for (std::size_t g = 0; g < sweep.D.size(); ++g) {
        const double ratio = sweep.D[g] / std::abs(C);
        os << format_number(ratio) << ",mechanical," << format_number(sweep.mechanical[g].real()) << ','
           << format_number(sweep.mechanical[g].imag()) << ',' << format_number(sweep.mechanical_weight[g]) << '\n';
        os << format_number(ratio) << ",electrical," << format_number(sweep.electrical[g].real()) << ','
           << format_number(sweep.electrical[g].imag()) << ',' << format_number(sweep.electrical_weight[g]) << '\n';
    }
}

}  // namespace piezoplate
