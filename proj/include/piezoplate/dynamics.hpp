#pragma once

// Time and frequency response of the truncated modal system
//
//   v_h''   + alpha lambda_h v_h - gamma sum_k C_hk phi_k'              = 0
//   phi_h'' + beta nu_h phi_h + delta phi_h' + gamma sum_k C_kh (delta v_k + v_k') = 0
//
// where C_hk couples mechanical mode h to electrical mode k (so the
// electrical equations use the transpose).

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "piezoplate/coupling.hpp"
#include "piezoplate/errors.hpp"
#include "piezoplate/modal_basis.hpp"
#include "piezoplate/params.hpp"
#include "piezoplate/tuning.hpp"

namespace piezoplate {

// ---------------------------------------------------------------------------
// Closed-form undamped beat

/// Undamped single pair released from rest with v(0) = v0, phi(0) = 0:
///   v   = V1 cos(a1 t) + V2 cos(a2 t)
///   phi = P1 sin(a1 t) + P2 sin(a2 t)
/// The phi amplitudes carry the sign fixed by v'' + A v - C phi' = 0.
struct BeatSolution {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double V1 = 0.0;
    double V2 = 0.0;
    double Phi1 = 0.0;
    double Phi2 = 0.0;

    double v(double t) const { return V1 * std::cos(alpha1 * t) + V2 * std::cos(alpha2 * t); }
    double vdot(double t) const { return -V1 * alpha1 * std::sin(alpha1 * t) - V2 * alpha2 * std::sin(alpha2 * t); }
    double phi(double t) const { return Phi1 * std::sin(alpha1 * t) + Phi2 * std::sin(alpha2 * t); }
    double phidot(double t) const { return Phi1 * alpha1 * std::cos(alpha1 * t) + Phi2 * alpha2 * std::cos(alpha2 * t); }

    /// Period of the slow energy exchange, 2 pi / |a2 - a1|.
    double beat_period() const { return 2.0 * pi / std::abs(alpha2 - alpha1); }
};

inline BeatSolution beat_solution(double A, double B, double C, double v0) {
    require(A > 0.0 && B > 0.0, "closed_form_undamped: A and B must be positive");
    const double sum = C * C + A + B;
    const double disc = std::sqrt(std::max(0.0, sum * sum - 4.0 * A * B));
    BeatSolution s;
    s.alpha1 = std::sqrt(0.5 * (sum - disc));
    s.alpha2 = std::sqrt(0.5 * (sum + disc));
    if (C == 0.0) {
        // uncoupled: the mechanical oscillator alone
        s.alpha1 = s.alpha2 = std::sqrt(A);
        s.V1 = v0;
        return s;
    }
    const double skew = (C * C - A + B) / disc;
    s.V1 = 0.5 * v0 * (1.0 + skew);
    s.V2 = 0.5 * v0 * (1.0 - skew);
    s.Phi1 = (A - s.alpha1 * s.alpha1) / (s.alpha1 * C) * s.V1;
    s.Phi2 = (A - s.alpha2 * s.alpha2) / (s.alpha2 * C) * s.V2;
    return s;
}

inline std::pair<std::vector<double>, std::vector<double>> closed_form_undamped(double A, double B, double C, double v0,
                                                                                std::span<const double> times) {
    const BeatSolution s = beat_solution(A, B, C, v0);
    std::vector<double> v, phi;
    v.reserve(times.size());
    phi.reserve(times.size());
    for (double t : times) {
        v.push_back(s.v(t));
        phi.push_back(s.phi(t));
    }
    return {std::move(v), std::move(phi)};
}

struct Envelopes {
    std::vector<double> upper;  // I_MAX
    std::vector<double> lower;  // I_min
    bool weak_coupling = true;  // C^2 < 0.1 A; the envelopes assume C^2 << A
};

/// Slow envelopes of the beat, (V1 + V2) cos(dt/2) and (V1 - V2) sin(dt/2)
/// with d = a1 - a2.
inline Envelopes envelopes(double A, double B, double C, double v0, std::span<const double> times) {
    const BeatSolution s = beat_solution(A, B, C, v0);
    Envelopes e;
    e.weak_coupling = C * C < 0.1 * A;
    const double half = 0.5 * (s.alpha1 - s.alpha2);
    for (double t : times) {
        e.upper.push_back((s.V1 + s.V2) * std::cos(half * t));
        e.lower.push_back((s.V1 - s.V2) * std::sin(half * t));
    }
    return e;
}

// ---------------------------------------------------------------------------
// Modal system

struct ModalSystem {
    int n = 0;
    DimensionlessParams params;
    Eigen::VectorXd lambda;    // mechanical eigenvalues
    Eigen::VectorXd nu;        // electrical eigenvalues
    Eigen::MatrixXd coupling;  // C_hk, mechanical rows

    double A(int h) const { return params.alpha * lambda[h]; }
    double B(int h) const { return params.beta * nu[h]; }
    double C(int h) const { return params.gamma * coupling(h, h); }
    double D() const { return params.delta; }
    ModalABCD pair(int h) const { return {A(h), B(h), C(h), D()}; }
};

inline ModalSystem assemble(const DimensionlessParams& params, std::span<const double> lambda,
                            std::span<const double> nu, const CouplingMatrix& c) {
    const auto n = static_cast<Eigen::Index>(lambda.size());
    if (n < 1 || static_cast<Eigen::Index>(nu.size()) != n || c.entries.rows() != n || c.entries.cols() != n)
        throw PreconditionError("assemble: dimension mismatch between eigenvalues and coupling matrix");
    require(params.delta >= 0.0 && params.gamma >= 0.0 && params.beta > 0.0, "assemble: invalid dimensionless parameters");
    ModalSystem sys;
    sys.n = static_cast<int>(n);
    sys.params = params;
    sys.lambda = Eigen::Map<const Eigen::VectorXd>(lambda.data(), n);
    sys.nu = Eigen::Map<const Eigen::VectorXd>(nu.data(), n);
    sys.coupling = c.entries;
    return sys;
}

/// State ordering: [v, v', phi, phi'].
struct ModalState {
    Eigen::VectorXd v, vdot, phi, phidot;

    static ModalState zero(int n) {
        return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    }
    int size() const { return static_cast<int>(v.size()); }

    std::vector<double> pack() const {
        const int n = size();
        std::vector<double> x(4 * n);
        for (int h = 0; h < n; ++h) {
            x[h] = v[h];
            x[n + h] = vdot[h];
            x[2 * n + h] = phi[h];
            x[3 * n + h] = phidot[h];
        }
        return x;
    }
    static ModalState unpack(std::span<const double> x) {
        const int n = static_cast<int>(x.size() / 4);
        ModalState s = zero(n);
        for (int h = 0; h < n; ++h) {
            s.v[h] = x[h];
            s.vdot[h] = x[n + h];
            s.phi[h] = x[2 * n + h];
            s.phidot[h] = x[3 * n + h];
        }
        return s;
    }
};

/// First-order system matrix acting on [v, v', phi, phi'].
inline Eigen::MatrixXd system_matrix(const ModalSystem& sys) {
    const int n = sys.n;
    const auto& p = sys.params;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4 * n, 4 * n);
    const Eigen::MatrixXd Ct = sys.coupling.transpose();
    M.block(0, n, n, n).setIdentity();
    M.block(2 * n, 3 * n, n, n).setIdentity();
    M.block(n, 0, n, n) = (-p.alpha * sys.lambda).asDiagonal();
    M.block(n, 3 * n, n, n) = p.gamma * sys.coupling;
    M.block(3 * n, 0, n, n) = -p.gamma * p.delta * Ct;
    M.block(3 * n, n, n, n) = -p.gamma * Ct;
    M.block(3 * n, 2 * n, n, n) = (-p.beta * sys.nu).asDiagonal();
    M.block(3 * n, 3 * n, n, n) = -p.delta * Eigen::MatrixXd::Identity(n, n);
    return M;
}

// ---------------------------------------------------------------------------
// Energies

struct EnergyBreakdown {
    double mech_elastic = 0.0;     // 1/2 sum alpha lambda_h v_h^2
    double mech_kinetic = 0.0;     // 1/2 sum v_h'^2
    double elec_inductive = 0.0;   // 1/2 sum beta nu_h phi_h^2
    double elec_capacitive = 0.0;  // 1/2 sum phi_h'^2
    double total = 0.0;

    double mechanical() const { return mech_elastic + mech_kinetic; }
    double electrical() const { return elec_inductive + elec_capacitive; }
};

inline void check_dimensions(const ModalState& s, const ModalSystem& sys) {
    if (s.size() != sys.n || s.vdot.size() != sys.n || s.phi.size() != sys.n || s.phidot.size() != sys.n)
        throw PreconditionError("modal state and system dimensions disagree");
}

inline EnergyBreakdown energies(const ModalState& s, const ModalSystem& sys) {
    check_dimensions(s, sys);
    EnergyBreakdown e;
    for (int h = 0; h < sys.n; ++h) {
        e.mech_elastic += 0.5 * sys.A(h) * s.v[h] * s.v[h];
        e.mech_kinetic += 0.5 * s.vdot[h] * s.vdot[h];
        e.elec_inductive += 0.5 * sys.B(h) * s.phi[h] * s.phi[h];
        e.elec_capacitive += 0.5 * s.phidot[h] * s.phidot[h];
    }
    e.total = e.mech_elastic + e.mech_kinetic + e.elec_inductive + e.elec_capacitive;
    return e;
}

struct ModeEnergies {
    Eigen::VectorXd mechanical;
    Eigen::VectorXd electrical;
};

inline ModeEnergies mode_energies(const ModalState& s, const ModalSystem& sys) {
    check_dimensions(s, sys);
    ModeEnergies out{Eigen::VectorXd(sys.n), Eigen::VectorXd(sys.n)};
    for (int h = 0; h < sys.n; ++h) {
        out.mechanical[h] = 0.5 * (s.vdot[h] * s.vdot[h] + sys.A(h) * s.v[h] * s.v[h]);
        out.electrical[h] = 0.5 * (s.phidot[h] * s.phidot[h] + sys.B(h) * s.phi[h] * s.phi[h]);
    }
    return out;
}

/// Rate at which the four-term total decreases:
/// -dE/dt = delta sum_h phi_h' (phi_h' + gamma sum_k C_kh v_k).
inline double power_loss(const ModalState& s, const ModalSystem& sys) {
    check_dimensions(s, sys);
    const Eigen::VectorXd drive = s.phidot + sys.params.gamma * sys.coupling.transpose() * s.v;
    return sys.params.delta * s.phidot.dot(drive);
}

/// Stored energy with the inductive term written through the branch current
/// I_h = phi_h + delta / (beta nu_h) (phi_h' + gamma sum_k C_kh v_k).
/// Its rate is -delta sum_h beta nu_h I_h^2, so it never increases; with
/// delta = 0 it equals EnergyBreakdown::total.
inline double network_energy(const ModalState& s, const ModalSystem& sys) {
    check_dimensions(s, sys);
    const auto& p = sys.params;
    const Eigen::VectorXd drive = s.phidot + p.gamma * sys.coupling.transpose() * s.v;
    double e = 0.0;
    for (int h = 0; h < sys.n; ++h) {
        const double b = sys.B(h);
        const double current = s.phi[h] + p.delta / b * drive[h];
        e += 0.5 * (s.vdot[h] * s.vdot[h] + sys.A(h) * s.v[h] * s.v[h] + s.phidot[h] * s.phidot[h] + b * current * current);
    }
    return e;
}

// ---------------------------------------------------------------------------
// Time integration

inline constexpr double default_rel_tol = 1e-9;

struct IntegratorStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    double rel_tol = default_rel_tol;
    double abs_tol = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ModalState> states;
    std::vector<EnergyBreakdown> energies;
    IntegratorStats stats;
};

/// Adaptive Dormand-Prince 5(4) with states reported at `sample_times` by
/// cubic Hermite interpolation between accepted steps. The absolute
/// tolerance is 0.1 rel_tol times the largest initial state component.
inline Trajectory integrate(const ModalSystem& sys, const ModalState& init, std::span<const double> sample_times,
                            double rel_tol = default_rel_tol) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<double>;

    check_dimensions(init, sys);
    require(rel_tol >= 1e-12 && rel_tol <= 1e-3, "integrate: rel_tol must lie in [1e-12, 1e-3]");
    require(!sample_times.empty(), "integrate: no sample times requested");
    for (std::size_t i = 1; i < sample_times.size(); ++i)
        require(sample_times[i] > sample_times[i - 1], "integrate: sample times must be strictly increasing");
    require(sample_times.front() >= 0.0, "integrate: sample times must start at t >= 0");

    const Eigen::MatrixXd M = system_matrix(sys);
    const auto dim = M.rows();
    auto rhs = [&M, dim](const State& x, State& dxdt, double /*t*/) {
        Eigen::Map<const Eigen::VectorXd> xv(x.data(), dim);
        Eigen::Map<Eigen::VectorXd> dv(dxdt.data(), dim);
        dv.noalias() = M * xv;
    };

    State x = init.pack();
    require(std::all_of(x.begin(), x.end(), [](double xi) { return std::isfinite(xi); }),
            "integrate: initial state must be finite");
    double scale = 0.0;
    for (double xi : x) scale = std::max(scale, std::abs(xi));
    if (scale == 0.0) scale = 1.0;

    Trajectory traj;
    traj.stats.rel_tol = rel_tol;
    traj.stats.abs_tol = 0.1 * rel_tol * scale;
    // error scale atol + rtol |x| (odeint's default also adds rtol dt |dx/dt|)
    using Dopri = odeint::runge_kutta_dopri5<State>;
    using Checker = odeint::default_error_checker<double, odeint::range_algebra, odeint::default_operations>;
    odeint::controlled_runge_kutta<Dopri, Checker> stepper(Checker(traj.stats.abs_tol, rel_tol, 1.0, 0.0));

    auto record = [&](double t, const State& state) {
        ModalState s = ModalState::unpack(state);
        traj.times.push_back(t);
        traj.energies.push_back(energies(s, sys));
        traj.states.push_back(std::move(s));
    };

    State dxdt(dim), x_prev(dim), f_prev(dim), sample(dim);
    rhs(x, dxdt, 0.0);
    double t = 0.0;
    const double t_end = sample_times.back();
    // initial step from the fastest undamped frequency
    double fastest = 1.0;
    for (int h = 0; h < sys.n; ++h) fastest = std::max({fastest, std::sqrt(sys.A(h)), std::sqrt(sys.B(h))});
    double dt = 0.01 / fastest;

    std::size_t next = 0;
    while (next < sample_times.size() && sample_times[next] == t) record(sample_times[next++], x);

    while (next < sample_times.size()) {
        dt = std::min(dt, t_end - t);
        x_prev = x;
        f_prev = dxdt;
        const double t_prev = t;
        const auto result = stepper.try_step(rhs, x, dxdt, t, dt);
        if (result == odeint::fail) {
            ++traj.stats.rejected;
            if (dt < 1e-14 * std::max(1.0, std::abs(t))) {
                std::ostringstream msg;
                msg << "integrate: step size underflow at t = " << t;
                throw NumericalError(msg.str());
            }
            continue;
        }
        ++traj.stats.steps;
        if (!std::all_of(x.begin(), x.end(), [](double xi) { return std::isfinite(xi); })) {
            std::ostringstream msg;
            msg << "integrate: state became non-finite at t = " << t;
            throw NumericalError(msg.str());
        }
        const double h = t - t_prev;
        while (next < sample_times.size() && sample_times[next] <= t) {
            const double ts = sample_times[next];
            if (ts == t) {
                record(ts, x);
            } else {
                const double th = (ts - t_prev) / h;
                const double th2 = th * th, th3 = th2 * th;
                const double h00 = 2 * th3 - 3 * th2 + 1, h10 = th3 - 2 * th2 + th;
                const double h01 = -2 * th3 + 3 * th2, h11 = th3 - th2;
                for (Eigen::Index i = 0; i < dim; ++i)
                    sample[i] = h00 * x_prev[i] + h10 * h * f_prev[i] + h01 * x[i] + h11 * h * dxdt[i];
                record(ts, sample);
            }
            ++next;
        }
    }
    return traj;
}

inline std::vector<double> uniform_times(double t_end, int samples) {
    require(t_end > 0.0 && samples >= 2, "uniform_times: need t_end > 0 and at least two samples");
    std::vector<double> out(samples);
    for (int i = 0; i < samples; ++i) out[i] = t_end * i / (samples - 1);
    out.back() = t_end;
    return out;
}

inline Trajectory integrate(const ModalSystem& sys, const ModalState& init, double t_end, double rel_tol, int samples) {
    const auto times = uniform_times(t_end, samples);
    return integrate(sys, init, times, rel_tol);
}

// ---------------------------------------------------------------------------
// Frequency response

/// Complex transfer matrix H(Omega), 2n x 2n, mapping harmonic generalized
/// forces [F_mech; F_elec] on the modal equations to amplitudes [v; phi].
inline Eigen::MatrixXcd transfer_matrix(const ModalSystem& sys, double omega) {
    const int n = sys.n;
    const auto& p = sys.params;
    const cplx iw(0.0, omega);
    Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int h = 0; h < n; ++h) {
        Z(h, h) = -omega * omega + sys.A(h);
        Z(n + h, n + h) = -omega * omega + sys.B(h) + iw * p.delta;
    }
    Z.block(0, n, n, n) = (-iw * p.gamma) * sys.coupling.cast<cplx>();
    Z.block(n, 0, n, n) = (p.gamma * (p.delta + iw)) * sys.coupling.transpose().cast<cplx>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Z);
    if (!(lu.rcond() > 1e-15)) {
        std::ostringstream msg;
        msg << "frf: singular system at Omega = " << omega << " (undamped resonance)";
        throw NumericalError(msg.str());
    }
    return lu.inverse();
}

struct FrfCurves {
    std::vector<double> omega;
    std::vector<double> mechanical;  // ||H_mm||: mechanical response to mechanical forcing
    std::vector<double> electrical;  // ||H_ee||: electrical response to electrical forcing
    std::vector<double> coupling;    // ||H_em||: electrical response to mechanical forcing
};

/// Frobenius norms of the transfer-matrix blocks, with columns weighted by
/// `forcing` (n modal force amplitudes; empty means unit forces).
inline FrfCurves frf(const ModalSystem& sys, std::span<const double> omega, std::span<const double> forcing = {}) {
    const int n = sys.n;
    require(forcing.empty() || static_cast<int>(forcing.size()) == n, "frf: forcing vector length must equal mode count");
    Eigen::VectorXd f = Eigen::VectorXd::Ones(n);
    if (!forcing.empty()) f = Eigen::Map<const Eigen::VectorXd>(forcing.data(), n);
    FrfCurves out;
    for (double w : omega) {
        const Eigen::MatrixXcd H = transfer_matrix(sys, w);
        const auto weights = f.cast<cplx>().asDiagonal();
        out.omega.push_back(w);
        out.mechanical.push_back((H.block(0, 0, n, n) * weights).norm());
        out.electrical.push_back((H.block(n, n, n, n) * weights).norm());
        out.coupling.push_back((H.block(n, 0, n, n) * weights).norm());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Impulse experiments and field reconstruction

/// Point impulse projected on the first n modes: v' = magnitude m_h(point),
/// everything else at rest. Without a magnitude the state is scaled to unit
/// total energy.
inline ModalState impulse_initial_state(std::array<double, 2> point, const ModalBasis& basis, int n,
                                        std::optional<double> magnitude = std::nullopt) {
    require(n >= 1 && n <= static_cast<int>(basis.size()), "impulse_initial_state: mode count out of range");
    const auto [x, y] = point;
    require(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0, "impulse_initial_state: point must lie in the open unit square");
    ModalState s = ModalState::zero(n);
    for (int h = 0; h < n; ++h) s.vdot[h] = basis[h].shape.value(x, y);
    const double norm = s.vdot.norm();
    if (!(norm > 1e-12)) throw PreconditionError("impulse_initial_state: point lies on nodal lines of every mode");
    s.vdot *= magnitude ? *magnitude : std::sqrt(2.0) / norm;
    return s;
}

struct FieldSnapshot {
    double t = 0.0;
    std::vector<double> x1, x2, w, phi;
};

/// Displacement and e-state fields sampled on a resolution x resolution grid
/// over [0, 1]^2 at the trajectory samples listed in `which`.
inline std::vector<FieldSnapshot> reconstruct_fields(const Trajectory& traj, const ModalBasis& mech,
                                                     const ModalBasis& elec, int resolution,
                                                     std::span<const std::size_t> which) {
    require(resolution >= 2, "reconstruct_fields: resolution must be >= 2");
    std::vector<FieldSnapshot> out;
    for (std::size_t idx : which) {
        require(idx < traj.states.size(), "reconstruct_fields: sample index out of range");
        const ModalState& s = traj.states[idx];
        require(static_cast<int>(mech.size()) >= s.size() && static_cast<int>(elec.size()) >= s.size(),
                "reconstruct_fields: bases hold fewer modes than the trajectory");
        FieldSnapshot snap;
        snap.t = traj.times[idx];
        for (int a = 0; a < resolution; ++a) {
            for (int b = 0; b < resolution; ++b) {
                const double x = static_cast<double>(a) / (resolution - 1);
                const double y = static_cast<double>(b) / (resolution - 1);
                double w = 0.0, phi = 0.0;
                for (int h = 0; h < s.size(); ++h) {
                    w += s.v[h] * mech[h].shape.value(x, y);
                    phi += s.phi[h] * elec[h].shape.value(x, y);
                }
                snap.x1.push_back(x);
                snap.x2.push_back(y);
                snap.w.push_back(w);
                snap.phi.push_back(phi);
            }
        }
        out.push_back(std::move(snap));
    }
    return out;
}

}  // namespace piezoplate
