#pragma once

// Network tuning for one mechanical/electrical modal pair
//
//   v'' + A v - C phi' = 0
//   phi'' + B phi + C v' + D phi' + C D v = 0
//
// with A = alpha lambda_h, B = beta nu_h, C = gamma C_hh, D = delta:
// self-resonance band, transfer time, optimal net inductance/resistance and
// the root loci of the characteristic polynomials P and Q.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "piezoplate/errors.hpp"
#include "piezoplate/modal_basis.hpp"
#include "piezoplate/params.hpp"

namespace piezoplate {

using cplx = std::complex<double>;

struct ModalABCD {
    double A = 1.0;  // mechanical modal stiffness
    double B = 1.0;  // electrical modal stiffness
    double C = 0.0;  // modal coupling, may be negative
    double D = 0.0;  // network dissipation
};

inline void validate(const ModalABCD& m) {
    require(m.A > 0.0 && m.B > 0.0, "modal stiffnesses A and B must be positive");
    require(m.D >= 0.0, "modal dissipation D must be non-negative");
    require(std::isfinite(m.C), "modal coupling C must be finite");
}

/// (A - C^2, A + C^2): electrical stiffnesses giving self-resonance.
inline std::pair<double, double> self_resonance_band(double A, double C) {
    require(A > 0.0, "self_resonance_band: A must be positive");
    const double lo = A - C * C;
    if (lo <= 0.0) throw PreconditionError("self_resonance_band: coupling too strong, A - C^2 <= 0");
    return {lo, A + C * C};
}

/// Time, in periods of the uncoupled mechanical mode, to move the modal
/// energy into electrical form at B = A.
inline double transfer_time(double k) {
    require(k > 0.0 && k <= 1.0, "transfer_time: coupling ratio must lie in (0, 1]");
    const double r = std::sqrt(k);
    return 1.0 / (2.0 * (std::sqrt(1.0 + r) - std::sqrt(1.0 - r)));
}

// ---------------------------------------------------------------------------
// Optimal impedances

/// Net inductance tuning mode h of the simply supported plate into resonance.
inline double optimal_inductance_ss(ModeIndex h, const PhysicalParams& p) {
    const DerivedPhysical d = derive_physical(p);
    const double w = d.char_pulsation;
    return 1.0 / (h.wave_number_sq() * (p.piezo_capacitance + p.ground_capacitance) * p.actuator_count * w * w);
}

/// Mode-independent optimal net resistance for the simply supported plate.
inline double optimal_resistance_ss(const PhysicalParams& p) {
    const DerivedPhysical d = derive_physical(p);
    const double w = d.char_pulsation;
    const double kc = p.piezo_capacitance + p.ground_capacitance;
    const double na = p.actuator_count;
    return 2.0 * pi * pi * p.piezo_coupling / (kc * std::pow(na, 1.5) * w * w) *
           std::sqrt(1.0 / (d.total_mass * kc));
}

struct Impedance {
    double inductance;  // H
    double resistance;  // Ohm
};

/// Optimal (L, R) for mode h of the clamped plate; `stiffening` is c_h.
inline Impedance optimal_impedance_clamped(ModeIndex h, const PhysicalParams& p, double stiffening) {
    require(stiffening > 0.0, "optimal_impedance_clamped: stiffening ratio must be positive");
    const DerivedPhysical d = derive_physical(p);
    const double cn = d.area_capacitance;
    const double mp = d.total_mass;
    const double dp = d.bending_stiffness;
    Impedance z{};
    z.inductance = mp / (stiffening * h.wave_number_sq() * cn * pi * pi * dp);
    z.resistance = 2.0 * p.piezo_coupling / (stiffening * cn * p.side_length * dp) * std::sqrt(mp / cn);
    return z;
}

// ---------------------------------------------------------------------------
// Quartic roots

/// Monic quartic s^4 + c[0] s^3 + c[1] s^2 + c[2] s + c[3].
using Quartic = std::array<double, 4>;

inline Quartic quartic_P(const ModalABCD& m) {
    const double c2 = m.C * m.C;
    return {m.D, m.A + m.B + c2, m.D * (m.A + c2), m.A * m.B};
}

inline Quartic quartic_Q(double A, double C, double D) { return {D, 2.0 * A + C * C, D * A, A * A}; }

inline cplx evaluate(const Quartic& q, cplx s) { return (((s + q[0]) * s + q[1]) * s + q[2]) * s + q[3]; }

namespace detail {

inline cplx derivative(const Quartic& q, cplx s) { return ((4.0 * s + 3.0 * q[0]) * s + 2.0 * q[1]) * s + q[2]; }

// Sum |c_i| |s|^i: scale of the rounding error in evaluate().
inline double magnitude(const Quartic& q, cplx s) {
    const double r = std::abs(s);
    return (((r + std::abs(q[0])) * r + std::abs(q[1])) * r + std::abs(q[2])) * r + std::abs(q[3]);
}

}  // namespace detail

/// Companion-matrix eigenvalues, Newton-polished. Throws when a root's
/// backward residual exceeds 1e-9.
inline std::array<cplx, 4> quartic_roots(const Quartic& q) {
    Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
    companion(0, 0) = -q[0];
    companion(0, 1) = -q[1];
    companion(0, 2) = -q[2];
    companion(0, 3) = -q[3];
    companion(1, 0) = companion(2, 1) = companion(3, 2) = 1.0;
    Eigen::EigenSolver<Eigen::Matrix4d> solver(companion, false);
    if (solver.info() != Eigen::Success) throw NumericalError("quartic_roots: eigenvalue solver did not converge");
    std::array<cplx, 4> roots;
    for (int i = 0; i < 4; ++i) {
        cplx s = solver.eigenvalues()[i];
        for (int it = 0; it < 3; ++it) {
            const cplx d = detail::derivative(q, s);
            if (std::abs(d) < 1e-300) break;
            const cplx next = s - evaluate(q, s) / d;
            if (std::abs(evaluate(q, next)) >= std::abs(evaluate(q, s))) break;
            s = next;
        }
        if (std::abs(evaluate(q, s)) > 1e-9 * std::max(1.0, detail::magnitude(q, s)))
            throw NumericalError("quartic_roots: solver did not converge to a root");
        roots[i] = s;
    }
    return roots;
}

// ---------------------------------------------------------------------------
// Branch-labelled root sets

enum class Branch { mechanical, electrical };

struct RootSet {
    std::array<cplx, 4> roots{};
    std::array<Branch, 4> branch{};

    /// Root of the branch with the largest imaginary part.
    cplx representative(Branch b) const {
        cplx best{0.0, -1.0};
        bool found = false;
        for (int i = 0; i < 4; ++i) {
            if (branch[i] != b) continue;
            if (!found || roots[i].imag() > best.imag() ||
                (roots[i].imag() == best.imag() && roots[i].real() > best.real())) {
                best = roots[i];
                found = true;
            }
        }
        return best;
    }
    /// Damping ratio -Re of the branch representative.
    double damping(Branch b) const { return -representative(b).real(); }
};

namespace detail {

// Permutation of `next` minimising total displacement from `prev`.
inline std::array<cplx, 4> match_roots(const std::array<cplx, 4>& prev, const std::array<cplx, 4>& next) {
    std::array<int, 4> perm{0, 1, 2, 3};
    std::array<int, 4> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (int i = 0; i < 4; ++i) cost += std::abs(prev[i] - next[perm[i]]);
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::array<cplx, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = next[best[i]];
    return out;
}

inline std::array<cplx, 2> quadratic_roots(double b, double c) {
    const cplx disc = std::sqrt(cplx(b * b - 4.0 * c, 0.0));
    const cplx q = -0.5 * (b + (b >= 0.0 ? disc : -disc));
    if (std::abs(q) == 0.0) return {cplx(0.0), cplx(0.0)};
    return {q, c / q};
}

// Continuation in the coupling from 0 to C. At zero coupling the roots split
// into +-i sqrt(A) (mechanical) and the roots of s^2 + D s + B_e (electrical).
template <class Coeffs>
RootSet label_by_continuation(double A, double B_e, double D, double C, Coeffs&& coeffs) {
    std::array<cplx, 4> current;
    const double w = std::sqrt(A);
    const auto elec = quadratic_roots(D, B_e);
    current = {cplx(0.0, w), cplx(0.0, -w), elec[0], elec[1]};

    RootSet out;
    const bool degenerate =
        std::min(std::abs(elec[0] - current[0]), std::abs(elec[1] - current[0])) < 1e-9 * (1.0 + w);
    if (C == 0.0) {
        out.roots = current;
        out.branch = {Branch::mechanical, Branch::mechanical, Branch::electrical, Branch::electrical};
        return out;
    }
    constexpr int steps = 64;
    for (int k = 1; k <= steps; ++k) current = match_roots(current, quartic_roots(coeffs(C * k / steps)));
    out.roots = current;
    out.branch = {Branch::mechanical, Branch::mechanical, Branch::electrical, Branch::electrical};
    if (degenerate) {
        // Coincident uncoupled roots: the pair whose frequency lies closest to
        // sqrt(A) is called mechanical.
        std::array<int, 4> order{0, 1, 2, 3};
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return std::abs(std::abs(current[a].imag()) - w) < std::abs(std::abs(current[b].imag()) - w);
        });
        for (int i = 0; i < 4; ++i) out.branch[order[i]] = i < 2 ? Branch::mechanical : Branch::electrical;
    }
    return out;
}

}  // namespace detail

/// Roots of P(s) = s^4 + D s^3 + (A + B + C^2) s^2 + D (A + C^2) s + A B,
/// labelled mechanical/electrical by continuation from C = 0.
inline RootSet char_roots_P(const ModalABCD& m) {
    validate(m);
    return detail::label_by_continuation(m.A, m.B, m.D, m.C, [&](double c) {
        return quartic_P({m.A, m.B, c, m.D});
    });
}

/// Roots of Q(s) = s^2 C^2 + (s^2 + A)(s^2 + D s + A).
inline RootSet char_roots_Q(double A, double C, double D) {
    require(A > 0.0, "char_roots_Q: A must be positive");
    require(D >= 0.0, "char_roots_Q: D must be non-negative");
    return detail::label_by_continuation(A, A, D, C, [&](double c) { return quartic_Q(A, c, D); });
}

/// Balance of mechanical and electrical energy in the eigenvector of root s:
/// 1 when equal, 0 when purely one form.
inline double coupling_weight(const ModalABCD& m, cplx s) {
    // (s^2 + A) v = C s phi  and  C (s + D) v + (s^2 + D s + B) phi = 0
    cplx v = m.C * s, phi = s * s + m.A;
    const cplx v2 = -(s * s + m.D * s + m.B), phi2 = m.C * (s + m.D);
    if (std::abs(v2) + std::abs(phi2) > std::abs(v) + std::abs(phi)) {
        v = v2;
        phi = phi2;
    }
    const double em = (std::norm(s) + m.A) * std::norm(v);
    const double ee = (std::norm(s) + m.B) * std::norm(phi);
    if (em + ee == 0.0) return 0.0;
    return 4.0 * em * ee / ((em + ee) * (em + ee));
}

// ---------------------------------------------------------------------------
// Damping sweep

struct DampingSweep {
    std::vector<double> D;
    std::vector<cplx> mechanical;   // upper-half-plane root of each branch
    std::vector<cplx> electrical;
    std::vector<double> mechanical_weight;
    std::vector<double> electrical_weight;
    double D_opt = 0.0;
    double max_mechanical_damping = 0.0;  // -Re at D_opt
};

/// Tracks the roots of P along a sorted grid of D by minimal displacement.
/// The mechanical branch is the one whose frequency tends to sqrt(A) at the
/// largest D of the grid (its content turns purely mechanical as D grows);
/// the electrical branch is the other root starting in the upper half-plane.
inline DampingSweep damping_sweep(double A, double B, double C, std::span<const double> grid) {
    require(A > 0.0 && B > 0.0, "damping_sweep: A and B must be positive");
    require(grid.size() >= 2, "damping_sweep: grid needs at least two points");
    require(std::is_sorted(grid.begin(), grid.end()) && grid.front() > 0.0, "damping_sweep: grid must be positive and sorted");

    std::vector<std::array<cplx, 4>> track;
    track.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        auto roots = quartic_roots(quartic_P({A, B, C, grid[g]}));
        double scale = 1.0;
        for (const cplx& r : roots) scale = std::max(scale, std::abs(r));
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                if (std::abs(roots[i] - roots[j]) < 1e-6 * scale) {
                    std::ostringstream msg;
                    msg << "damping_sweep: roots collide at D = " << grid[g] << " (D/C = " << grid[g] / C << ")";
                    throw NumericalError(msg.str());
                }
        track.push_back(g == 0 ? roots : detail::match_roots(track.back(), roots));
    }

    const double w = std::sqrt(A);
    int mech = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        const cplx end = track.back()[i];
        if (end.imag() <= 0.0) continue;
        if (std::abs(end.imag() - w) < best) {
            best = std::abs(end.imag() - w);
            mech = i;
        }
    }
    int elec = -1;
    for (int i = 0; i < 4; ++i) {
        if (i == mech) continue;
        if (elec < 0 || track.front()[i].imag() > track.front()[elec].imag()) elec = i;
    }

    DampingSweep out;
    const ModalABCD base{A, B, C, 0.0};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        ModalABCD m = base;
        m.D = grid[g];
        out.D.push_back(grid[g]);
        out.mechanical.push_back(track[g][mech]);
        out.electrical.push_back(track[g][elec]);
        out.mechanical_weight.push_back(coupling_weight(m, track[g][mech]));
        out.electrical_weight.push_back(coupling_weight(m, track[g][elec]));
        const double damping = -track[g][mech].real();
        if (g == 0 || damping > out.max_mechanical_damping) {
            out.max_mechanical_damping = damping;
            out.D_opt = grid[g];
        }
    }
    return out;
}

/// Uniform grid of D over [lo, hi] * C.
inline std::vector<double> ratio_grid(double C, double lo, double hi, int points) {
    require(points >= 2 && lo > 0.0 && hi > lo, "ratio_grid: need 0 < lo < hi and >= 2 points");
    require(C != 0.0, "ratio_grid: C must be non-zero");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = std::abs(C) * (lo + (hi - lo) * i / (points - 1));
    return g;
}

}  // namespace piezoplate
