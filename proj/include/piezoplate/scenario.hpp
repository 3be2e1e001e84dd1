#pragma once

// Scenario files: what plate, how many modes, which network tuning, which
// experiment. A run computes every artifact in memory first and only then
// touches the output directory, so a failing run leaves no files behind.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "piezoplate/config.hpp"
#include "piezoplate/coupling.hpp"
#include "piezoplate/csv.hpp"
#include "piezoplate/dynamics.hpp"
#include "piezoplate/modal_basis.hpp"
#include "piezoplate/params.hpp"
#include "piezoplate/tuning.hpp"

namespace piezoplate {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_config = 2;
inline constexpr int exit_precondition = 3;
inline constexpr int exit_numerical = 4;
inline constexpr int exit_io = 5;

inline constexpr const char* output_root_env = "PIEZOPLATE_OUTPUT_ROOT";

enum class Experiment { beat, damped_decay, frf, impulse };

inline std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::beat: return "beat";
        case Experiment::damped_decay: return "damped-decay";
        case Experiment::frf: return "frf";
        case Experiment::impulse: return "impulse";
    }
    return "unknown";
}

inline std::optional<Experiment> parse_experiment(const std::string& s) {
    for (Experiment e : {Experiment::beat, Experiment::damped_decay, Experiment::frf, Experiment::impulse})
        if (s == to_string(e)) return e;
    return std::nullopt;
}

struct Scenario {
    std::string name = "scenario";
    BasisKind boundary = BasisKind::mechanical_ss;
    int mode_count = 1;
    int tuning_mode = 1;                    // 1-based
    std::optional<double> net_inductance;  // empty: optimal for tuning_mode
    std::optional<double> net_resistance;  // empty: optimal for tuning_mode
    Experiment experiment = Experiment::beat;
    std::array<double, 2> impulse_point{0.6, 0.55};
    std::string output_dir;
    int quadrature_order = default_quadrature_order;
    double rel_tol = default_rel_tol;
    std::optional<double> t_end;  // empty: default horizon of the experiment
    int samples = 2001;
    std::optional<double> frf_omega_min, frf_omega_max;
    int frf_points = 4001;
    int field_resolution = 0;  // 0 disables field snapshots
    int field_snapshots = 5;
    PhysicalParams physical;
};

namespace detail {

inline std::optional<double> optimal_or_number(const Config& cfg, const std::string& key,
                                               std::optional<double> fallback) {
    if (!cfg.has(key)) return fallback;
    if (cfg.get_string(key, "") == "optimal") return std::nullopt;
    return cfg.get_double(key, 0.0);
}

}  // namespace detail

/// Builds a scenario from parsed configuration. Syntax problems and unknown
/// keys raise ConfigError; value-range problems are left to validate().
inline Scenario scenario_from_config(const Config& cfg, Experiment default_experiment = Experiment::beat) {
    Scenario s;
    s.name = cfg.get_string("name", s.name);

    const std::string boundary = cfg.get_string("boundary", "simply-supported");
    if (boundary == "simply-supported" || boundary == "ss")
        s.boundary = BasisKind::mechanical_ss;
    else if (boundary == "clamped")
        s.boundary = BasisKind::mechanical_clamped;
    else
        cfg.fail(cfg.line_of("boundary"), "boundary must be 'simply-supported' or 'clamped', got '" + boundary + "'");

    const std::string experiment = cfg.get_string("experiment", to_string(default_experiment));
    if (auto e = parse_experiment(experiment))
        s.experiment = *e;
    else
        cfg.fail(cfg.line_of("experiment"), "unknown experiment '" + experiment + "'");

    const bool impulse = s.experiment == Experiment::impulse;
    s.mode_count = cfg.get_int("mode_count", impulse ? 4 : 1);
    s.tuning_mode = cfg.get_int("tuning_mode", 1);
    s.net_inductance = detail::optimal_or_number(cfg, "net_inductance", std::nullopt);
    s.net_resistance = detail::optimal_or_number(
        cfg, "net_resistance", s.experiment == Experiment::beat ? std::optional<double>(0.0) : std::nullopt);
    const auto [px, py] = cfg.get_pair("impulse_point", {s.impulse_point[0], s.impulse_point[1]});
    s.impulse_point = {px, py};
    s.output_dir = cfg.get_string("output_dir", "out/" + s.name);
    s.quadrature_order = cfg.get_int("quadrature_order", s.quadrature_order);
    s.rel_tol = cfg.get_double("rel_tol", s.rel_tol);
    if (cfg.has("t_end")) s.t_end = cfg.get_double("t_end", 0.0);
    s.samples = cfg.get_int("samples", s.samples);
    if (cfg.has("frf_omega_min")) s.frf_omega_min = cfg.get_double("frf_omega_min", 0.0);
    if (cfg.has("frf_omega_max")) s.frf_omega_max = cfg.get_double("frf_omega_max", 0.0);
    s.frf_points = cfg.get_int("frf_points", s.frf_points);
    s.field_resolution = cfg.get_int("field_resolution", impulse ? 21 : 0);
    s.field_snapshots = cfg.get_int("field_snapshots", s.field_snapshots);

    PhysicalParams& p = s.physical;
    p.side_length = cfg.get_double("side_length", p.side_length);
    p.half_thickness = cfg.get_double("half_thickness", p.half_thickness);
    p.mass_density = cfg.get_double("mass_density", p.mass_density);
    p.young_modulus = cfg.get_double("young_modulus", p.young_modulus);
    p.poisson_ratio = cfg.get_double("poisson_ratio", p.poisson_ratio);
    p.actuator_count = cfg.get_int("actuator_count", p.actuator_count);
    p.piezo_coupling = cfg.get_double("piezo_coupling", p.piezo_coupling);
    p.piezo_capacitance = cfg.get_double("piezo_capacitance", p.piezo_capacitance);
    p.ground_capacitance = cfg.get_double("ground_capacitance", p.ground_capacitance);

    cfg.reject_unknown();
    return s;
}

/// Range checks. The tuning mode is only constrained when modes exist, so a
/// zero-mode scenario still yields an (empty) tuning table.
inline void validate(const Scenario& s) {
    require(s.mode_count >= 0, "mode_count must be non-negative");
    if (s.mode_count > 0)
        require(s.tuning_mode >= 1 && s.tuning_mode <= s.mode_count, "tuning_mode must lie in [1, mode_count]");
    require(s.quadrature_order >= 2 && s.quadrature_order <= 512, "quadrature_order must lie in [2, 512]");
    require(s.rel_tol >= 1e-12 && s.rel_tol <= 1e-3, "rel_tol must lie in [1e-12, 1e-3]");
    require(s.samples >= 2, "samples must be >= 2");
    require(!s.t_end || *s.t_end > 0.0, "t_end must be positive");
    require(s.frf_points >= 2, "frf_points must be >= 2");
    require(s.field_resolution == 0 || s.field_resolution >= 2, "field_resolution must be 0 or >= 2");
    require(s.field_snapshots >= 1, "field_snapshots must be >= 1");
    require(!s.net_inductance || *s.net_inductance > 0.0, "net_inductance must be positive");
    require(!s.net_resistance || *s.net_resistance >= 0.0, "net_resistance must be non-negative");
    validate_structure(s.physical);
}

// ---------------------------------------------------------------------------
// Tuning table

struct ModeRow {
    int h = 0;  // 1-based
    int i = 0, j = 0;
    double lambda = 0.0;
    double nu = 0.0;
    double coupling = 0.0;  // C_hh
    double inductance = 0.0;  // L*_h
    double resistance = 0.0;  // R*_h
    double stiffening = std::numeric_limits<double>::quiet_NaN();  // c_h, clamped only
    double transfer_time = 0.0;
};

struct ModalModel {
    ModalBasis mech;
    ModalBasis elec;
    CouplingMatrix coupling;
    std::vector<ModeRow> rows;
};

inline ModalModel build_model(const Scenario& s) {
    ModalModel m;
    const SquareQuadrature quad(s.quadrature_order);
    m.mech = make_basis(s.boundary, s.mode_count, quad);
    m.elec = make_basis(BasisKind::electrical_membrane, s.mode_count, quad);
    if (s.mode_count == 0) return m;
    m.coupling = s.boundary == BasisKind::mechanical_ss ? coupling_analytic_ss(s.mode_count)
                                                        : coupling_quadrature(m.mech, m.elec, s.mode_count, s.quadrature_order);

    PhysicalParams probe = s.physical;
    const DimensionlessParams dl = dimensionless_from_physical(probe);
    for (int h = 0; h < s.mode_count; ++h) {
        const ModeIndex idx = m.mech[h].index;
        ModeRow r;
        r.h = h + 1;
        r.i = idx.i;
        r.j = idx.j;
        r.lambda = m.mech[h].eigenvalue;
        r.nu = m.elec[h].eigenvalue;
        r.coupling = m.coupling(h, h);
        if (s.boundary == BasisKind::mechanical_ss) {
            r.inductance = optimal_inductance_ss(idx, s.physical);
            r.resistance = optimal_resistance_ss(s.physical);
        } else {
            r.stiffening = r.lambda / ss_mech_eigenpair(idx).eigenvalue;
            const Impedance z = optimal_impedance_clamped(idx, s.physical, r.stiffening);
            r.inductance = z.inductance;
            r.resistance = z.resistance;
        }
        const double k = coupling_ratio(dl.alpha * r.lambda, dl.gamma * r.coupling);
        r.transfer_time = k > 0.0 && k <= 1.0 ? piezoplate::transfer_time(k) : std::numeric_limits<double>::infinity();
        m.rows.push_back(r);
    }
    return m;
}

inline std::vector<ModeRow> tune_report(const Scenario& s) {
    validate(s);
    return build_model(s).rows;
}

inline void write_tune_csv(std::ostream& os, const std::vector<ModeRow>& rows, bool clamped) {
    std::vector<std::string> head{"h", "i", "j", "lambda", "nu", "C_hh", "L_opt", "R_opt"};
    if (clamped) head.push_back("c_h");
    head.push_back("T_tr");
    write_header(os, head);
    for (const ModeRow& r : rows) {
        std::vector<double> row{double(r.h), double(r.i), double(r.j), r.lambda, r.nu, r.coupling, r.inductance, r.resistance};
        if (clamped) row.push_back(r.stiffening);
        row.push_back(r.transfer_time);
        write_row(os, row);
    }
}

// ---------------------------------------------------------------------------
// Running

struct Artifact {
    std::string filename;
    std::string content;
};

struct RunResult {
    Scenario scenario;
    PhysicalParams physical;  // with the network impedances actually used
    DimensionlessParams dimensionless;
    ModalModel model;
    ModalSystem system;
    std::optional<Trajectory> trajectory;
    std::optional<FrfCurves> frf;
    std::optional<IntegratorStats> stats;
    double t_end = 0.0;
    std::vector<std::string> warnings;
    std::vector<Artifact> artifacts;  // manifest.json last
};

namespace detail {

/// Slowest decay rate of the tuned pair, min over its roots of -Re(s).
inline double slowest_decay_rate(const ModalABCD& m) {
    const RootSet r = char_roots_P(m);
    double rate = std::numeric_limits<double>::infinity();
    for (const cplx& s : r.roots) rate = std::min(rate, -s.real());
    return rate;
}

inline double default_horizon(const Scenario& s, const ModalSystem& sys) {
    const int h = s.tuning_mode - 1;
    const ModalABCD m = sys.pair(h);
    if (s.experiment == Experiment::beat) {
        require(m.C != 0.0, "beat experiment needs a coupled tuning mode (C_hh != 0)");
        return 10.0 * beat_solution(m.A, m.B, m.C, 1.0).beat_period();
    }
    require(m.D > 0.0, to_string(s.experiment) + " experiment needs net_resistance > 0 or an explicit t_end");
    const double rate = slowest_decay_rate(m);
    require(rate > 0.0 && std::isfinite(rate), "tuned pair does not decay; set t_end explicitly");
    return 5.0 / rate;
}

inline nlohmann::json manifest(const RunResult& r, const std::vector<std::string>& files) {
    using nlohmann::json;
    const Scenario& s = r.scenario;
    const DerivedPhysical d = derive_physical(r.physical);
    json j;
    j["name"] = s.name;
    j["boundary"] = to_string(s.boundary);
    j["experiment"] = to_string(s.experiment);
    j["mode_count"] = s.mode_count;
    j["tuning_mode"] = s.tuning_mode;
    const PhysicalParams& p = r.physical;
    j["physical"] = {{"side_length", p.side_length},           {"half_thickness", p.half_thickness},
                     {"mass_density", p.mass_density},         {"young_modulus", p.young_modulus},
                     {"poisson_ratio", p.poisson_ratio},       {"actuator_count", p.actuator_count},
                     {"piezo_coupling", p.piezo_coupling},     {"piezo_capacitance", p.piezo_capacitance},
                     {"ground_capacitance", p.ground_capacitance}, {"net_inductance", p.net_inductance},
                     {"net_resistance", p.net_resistance}};
    j["derived"] = {{"bending_stiffness", d.bending_stiffness}, {"total_mass", d.total_mass},
                    {"area_capacitance", d.area_capacitance},   {"char_pulsation", d.char_pulsation},
                    {"char_estate", d.char_estate}};
    j["dimensionless"] = {{"alpha", r.dimensionless.alpha},
                          {"beta", r.dimensionless.beta},
                          {"gamma", r.dimensionless.gamma},
                          {"delta", r.dimensionless.delta}};
    json modes = json::array();
    for (std::size_t h = 0; h < r.model.rows.size(); ++h) {
        const ModeRow& row = r.model.rows[h];
        const ModalABCD m = r.system.pair(static_cast<int>(h));
        json e = {{"h", row.h},     {"i", row.i},           {"j", row.j},          {"lambda", row.lambda},
                  {"nu", row.nu},   {"C_hh", row.coupling}, {"A", m.A},            {"B", m.B},
                  {"C", m.C},       {"D", m.D},             {"L_opt", row.inductance}, {"R_opt", row.resistance},
                  {"T_tr", std::isfinite(row.transfer_time) ? json(row.transfer_time) : json(nullptr)}};
        if (s.boundary == BasisKind::mechanical_clamped) e["c_h"] = row.stiffening;
        modes.push_back(e);
    }
    j["modes"] = modes;
    if (r.stats) {
        j["integrator"] = {{"method", "dopri5"},          {"rel_tol", r.stats->rel_tol},
                           {"abs_tol", r.stats->abs_tol}, {"steps", r.stats->steps},
                           {"rejected", r.stats->rejected}, {"t_end", r.t_end},
                           {"samples", s.samples}};
    }
    if (s.experiment == Experiment::impulse) j["impulse_point"] = {s.impulse_point[0], s.impulse_point[1]};
    j["quadrature_order"] = s.quadrature_order;
    j["warnings"] = r.warnings;
    j["files"] = files;
    return j;
}

template <class Writer>
std::string render(Writer&& w) {
    std::ostringstream os;
    w(os);
    return os.str();
}

}  // namespace detail

/// All computation for a scenario; nothing is written to disk.
inline RunResult compute_scenario(const Scenario& s) {
    validate(s);
    require(s.mode_count >= 1, "experiments need mode_count >= 1");

    RunResult r;
    r.scenario = s;
    r.model = build_model(s);
    const ModeRow& tuned = r.model.rows[s.tuning_mode - 1];
    r.physical = s.physical;
    r.physical.net_inductance = s.net_inductance.value_or(tuned.inductance);
    r.physical.net_resistance = s.net_resistance.value_or(tuned.resistance);
    r.warnings = validate(r.physical);
    r.dimensionless = dimensionless_from_physical(r.physical);

    const std::vector<double> lambda = r.model.mech.eigenvalues();
    const std::vector<double> nu = r.model.elec.eigenvalues();
    r.system = assemble(r.dimensionless, lambda, nu, r.model.coupling);

    const ModalABCD pair = r.system.pair(s.tuning_mode - 1);
    if (pair.C != 0.0 && pair.C * pair.C >= 0.1 * pair.A)
        r.warnings.emplace_back("tuned pair is not weakly coupled (C^2 >= 0.1 A); beat envelopes are approximate");

    std::vector<std::string> files;
    if (s.experiment == Experiment::frf) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int h = 0; h < r.system.n; ++h) {
            lo = std::min(lo, std::sqrt(r.system.A(h)));
            hi = std::max(hi, std::sqrt(r.system.A(h)));
        }
        const double wmin = s.frf_omega_min.value_or(0.5 * lo);
        const double wmax = s.frf_omega_max.value_or(1.5 * hi);
        require(wmin >= 0.0 && wmax > wmin, "frf: need 0 <= frf_omega_min < frf_omega_max");
        std::vector<double> grid(s.frf_points);
        for (int k = 0; k < s.frf_points; ++k) grid[k] = wmin + (wmax - wmin) * k / (s.frf_points - 1);
        r.frf = frf(r.system, grid);
        r.artifacts.push_back({"frf.csv", detail::render([&](std::ostream& os) { write_frf_csv(os, *r.frf); })});
    } else {
        ModalState init = ModalState::zero(r.system.n);
        if (s.experiment == Experiment::impulse)
            init = impulse_initial_state(s.impulse_point, r.model.mech, r.system.n);
        else
            init.v[s.tuning_mode - 1] = 1.0;
        r.t_end = s.t_end.value_or(detail::default_horizon(s, r.system));
        r.trajectory = integrate(r.system, init, uniform_times(r.t_end, s.samples), s.rel_tol);
        const Trajectory& traj = *r.trajectory;
        r.stats = traj.stats;
        r.artifacts.push_back(
            {"trajectory.csv", detail::render([&](std::ostream& os) { write_trajectory_csv(os, traj); })});
        if (s.field_resolution > 0) {
            std::vector<std::size_t> which;
            const int count = std::min<int>(s.field_snapshots, static_cast<int>(traj.times.size()));
            for (int k = 0; k < count; ++k)
                which.push_back(count == 1 ? 0 : (traj.times.size() - 1) * k / (count - 1));
            const auto snaps = reconstruct_fields(traj, r.model.mech, r.model.elec, s.field_resolution, which);
            for (std::size_t k = 0; k < snaps.size(); ++k) {
                char name[32];
                std::snprintf(name, sizeof name, "field_%04zu.csv", which[k]);
                r.artifacts.push_back({name, detail::render([&](std::ostream& os) { write_field_csv(os, snaps[k]); })});
            }
        }
    }
    r.artifacts.push_back({"tune.csv", detail::render([&](std::ostream& os) {
                               write_tune_csv(os, r.model.rows, s.boundary == BasisKind::mechanical_clamped);
                           })});
    for (const Artifact& a : r.artifacts) files.push_back(a.filename);
    files.emplace_back("manifest.json");
    r.artifacts.push_back({"manifest.json", detail::manifest(r, files).dump(2) + "\n"});
    return r;
}

/// Relative output directories are placed under $PIEZOPLATE_OUTPUT_ROOT when set.
inline std::filesystem::path resolve_output_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    if (p.is_relative()) {
        if (const char* root = std::getenv(output_root_env); root && *root) p = std::filesystem::path(root) / p;
    }
    return p;
}

inline void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    for (const Artifact& a : artifacts) {
        const auto path = dir / a.filename;
        std::ofstream out(path, std::ios::binary);
        out << a.content;
        if (!out) throw std::runtime_error("cannot write " + path.string());
    }
}

struct RunOverrides {
    std::optional<int> quadrature_order;
    std::optional<double> rel_tol;
    std::optional<std::string> output_dir;
    std::optional<Experiment> default_experiment;  // used when the file names none
};

struct RunOutcome {
    int exit_code = exit_ok;
    std::string message;
    std::filesystem::path output_dir;
    std::vector<std::string> warnings;
};

inline Scenario load_scenario(const std::string& config_path, const RunOverrides& o = {}) {
    Scenario s = scenario_from_config(Config::load(config_path), o.default_experiment.value_or(Experiment::beat));
    if (o.quadrature_order) s.quadrature_order = *o.quadrature_order;
    if (o.rel_tol) s.rel_tol = *o.rel_tol;
    if (o.output_dir) s.output_dir = *o.output_dir;
    return s;
}

/// Maps the error taxonomy onto exit codes; never throws.
template <class F>
RunOutcome guarded(F&& body) {
    RunOutcome out;
    try {
        body(out);
    } catch (const ConfigError& e) {
        out = {exit_config, std::string("configuration error: ") + e.what(), {}, {}};
    } catch (const PreconditionError& e) {
        out = {exit_precondition, std::string("invalid input: ") + e.what(), {}, {}};
    } catch (const NumericalError& e) {
        out = {exit_numerical, std::string("numerical failure: ") + e.what(), {}, {}};
    } catch (const std::exception& e) {
        out = {exit_io, std::string("error: ") + e.what(), {}, {}};
    }
    return out;
}

inline RunOutcome run_scenario(const std::string& config_path, const RunOverrides& overrides = {}) {
    return guarded([&](RunOutcome& out) {
        const Scenario s = load_scenario(config_path, overrides);
        RunResult r = compute_scenario(s);
        out.output_dir = resolve_output_dir(s.output_dir);
        write_artifacts(out.output_dir, r.artifacts);
        out.warnings = r.warnings;
        out.message = "wrote " + std::to_string(r.artifacts.size()) + " files to " + out.output_dir.string();
    });
}

}  // namespace piezoplate
