// Command-line front end for the piezoplate library.
//
//   piezoplate modes    --boundary clamped --count 9
//   piezoplate coupling --boundary clamped --count 9 [--report]
//   piezoplate locus    --A 1 --B 1 --C 0.1 [--from 0.05 --to 6 --points 400]
//   piezoplate tune     scenario.cfg
//   piezoplate simulate scenario.cfg      (beat or damped-decay)
//   piezoplate frf      scenario.cfg
//   piezoplate impulse  scenario.cfg
//   piezoplate run      scenario.cfg      (whatever the file asks for)

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "piezoplate/piezoplate.hpp"

namespace pp = piezoplate;

namespace {

struct Globals {
    std::optional<int> quadrature_order;
    std::optional<double> rel_tol;
    std::optional<std::string> output_dir;
};

pp::BasisKind boundary_kind(const std::string& s) {
    if (s == "clamped") return pp::BasisKind::mechanical_clamped;
    return pp::BasisKind::mechanical_ss;
}

int report(const pp::RunOutcome& out) {
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
    if (out.exit_code != pp::exit_ok)
        std::cerr << out.message << "\n";
    else if (!out.message.empty())
        std::cout << out.message << "\n";
    return out.exit_code;
}

int cmd_modes(const std::string& boundary, int count, const Globals& g) {
    return report(pp::guarded([&](pp::RunOutcome&) {
        const auto kind = boundary_kind(boundary);
        const auto basis = pp::make_basis(kind, count, g.quadrature_order.value_or(pp::default_quadrature_order));
        const auto elec = pp::make_basis(pp::BasisKind::electrical_membrane, count);
        const bool clamped = kind == pp::BasisKind::mechanical_clamped;
        std::vector<std::string> head{"k", "i", "j", "lambda_over_pi4", "nu_over_pi2"};
        if (clamped) head.emplace_back("c_k");
        pp::write_header(std::cout, head);
        const double pi2 = pp::pi * pp::pi;
        for (std::size_t k = 0; k < basis.size(); ++k) {
            const auto& idx = basis[k].index;
            std::vector<double> row{double(idx.ordinal), double(idx.i), double(idx.j), basis[k].eigenvalue / (pi2 * pi2),
                                    elec[k].eigenvalue / pi2};
            if (clamped) row.push_back(basis[k].eigenvalue / pp::ss_mech_eigenpair(idx).eigenvalue);
            pp::write_row(std::cout, row);
        }
    }));
}

int cmd_coupling(const std::string& boundary, int count, bool text, const Globals& g) {
    return report(pp::guarded([&](pp::RunOutcome&) {
        const int order = g.quadrature_order.value_or(pp::default_quadrature_order);
        const auto mech = pp::make_basis(boundary_kind(boundary), count, order);
        const auto elec = pp::make_basis(pp::BasisKind::electrical_membrane, count, order);
        const auto c = pp::coupling_quadrature(mech, elec, count, order);
        if (text) {
            std::cout << pp::coupling_report(c);
            return;
        }
        for (Eigen::Index h = 0; h < c.size(); ++h) {
            std::vector<double> row;
            for (Eigen::Index k = 0; k < c.size(); ++k) row.push_back(c(h, k));
            pp::write_row(std::cout, row);
        }
    }));
}

struct LocusArgs {
    double A = 1.0, B = 1.0, C = 0.1;
    double from = 0.05, to = 6.0;
    int points = 400;
};

int cmd_locus(const LocusArgs& a) {
    return report(pp::guarded([&](pp::RunOutcome&) {
        const auto grid = pp::ratio_grid(a.C, a.from, a.to, a.points);
        const pp::DampingSweep sweep = pp::damping_sweep(a.A, a.B, a.C, grid);
        pp::write_root_locus_csv(std::cout, sweep, a.C);
        std::cerr << "D_opt = " << pp::format_number(sweep.D_opt) << " (D/C = " << pp::format_number(sweep.D_opt / std::abs(a.C))
                  << "), mechanical damping " << pp::format_number(sweep.max_mechanical_damping) << "\n";
    }));
}

pp::RunOverrides overrides(const Globals& g, std::optional<pp::Experiment> fallback = std::nullopt) {
    return {g.quadrature_order, g.rel_tol, g.output_dir, fallback};
}

int cmd_tune(const std::string& path, const Globals& g) {
    return report(pp::guarded([&](pp::RunOutcome&) {
        const pp::Scenario s = pp::load_scenario(path, overrides(g));
        const auto rows = pp::tune_report(s);
        pp::write_tune_csv(std::cout, rows, s.boundary == pp::BasisKind::mechanical_clamped);
    }));
}

int cmd_params(const std::string& path, const Globals& g) {
    return report(pp::guarded([&](pp::RunOutcome& out) {
        const pp::Scenario s = pp::load_scenario(path, overrides(g));
        pp::RunResult r = pp::compute_scenario(s);
        out.warnings = r.warnings;
        std::cout << r.artifacts.back().content;
    }));
}

/// Runs a scenario whose experiment must belong to `allowed`.
int cmd_run(const std::string& path, const Globals& g, std::initializer_list<pp::Experiment> allowed,
            const char* command) {
    return report(pp::guarded([&](pp::RunOutcome& out) {
        const pp::Scenario s = pp::load_scenario(path, overrides(g, *allowed.begin()));
        if (std::find(allowed.begin(), allowed.end(), s.experiment) == allowed.end())
            throw pp::ConfigError(path + ": experiment '" + pp::to_string(s.experiment) + "' cannot run under '" +
                                  command + "'");
        pp::RunResult r = pp::compute_scenario(s);
        out.output_dir = pp::resolve_output_dir(s.output_dir);
        pp::write_artifacts(out.output_dir, r.artifacts);
        out.warnings = r.warnings;
        out.message = "wrote " + std::to_string(r.artifacts.size()) + " files to " + out.output_dir.string();
    }));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modal simulation and network tuning for piezo-electromechanical plates"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    int order = 0;
    double tol = 0.0;
    std::string outdir;
    auto* o_order = app.add_option("--quadrature-order", order, "Gauss-Legendre points per axis")->check(CLI::Range(2, 512));
    auto* o_tol = app.add_option("--rel-tol", tol, "integrator relative tolerance")->check(CLI::Range(1e-12, 1e-3));
    auto* o_out = app.add_option("--output-dir", outdir, "output directory (overrides the scenario)");

    std::string boundary = "simply-supported";
    int count = 9;
    bool text = false;
    auto* modes = app.add_subcommand("modes", "mode table: indices, eigenvalues, stiffening ratios");
    auto* coupling = app.add_subcommand("coupling", "coupling matrix as CSV or a text report");
    for (auto* sub : {modes, coupling}) {
        sub->add_option("--boundary", boundary, "simply-supported | clamped")
            ->check(CLI::IsMember({"simply-supported", "ss", "clamped"}));
        sub->add_option("--count", count, "number of modes")->check(CLI::Range(0, 400));
    }
    coupling->add_flag("--report", text, "human-readable pattern report");

    LocusArgs locus_args;
    auto* locus = app.add_subcommand("locus", "root locus of a single pair over D/C");
    locus->add_option("--A", locus_args.A, "mechanical modal stiffness")->check(CLI::PositiveNumber);
    locus->add_option("--B", locus_args.B, "electrical modal stiffness")->check(CLI::PositiveNumber);
    locus->add_option("--C", locus_args.C, "modal coupling (non-zero)");
    locus->add_option("--from", locus_args.from, "smallest D/C")->check(CLI::PositiveNumber);
    locus->add_option("--to", locus_args.to, "largest D/C")->check(CLI::PositiveNumber);
    locus->add_option("--points", locus_args.points, "grid points")->check(CLI::Range(2, 1000000));

    std::string config;
    auto* tune = app.add_subcommand("tune", "optimal impedance table for a scenario");
    auto* params = app.add_subcommand("params", "print the manifest of a scenario without writing files");
    auto* simulate = app.add_subcommand("simulate", "time integration (beat | damped-decay)");
    auto* frf = app.add_subcommand("frf", "frequency response curves");
    auto* impulse = app.add_subcommand("impulse", "point-impulse experiment");
    auto* run = app.add_subcommand("run", "run any scenario");
    for (auto* sub : {tune, params, simulate, frf, impulse, run})
        sub->add_option("config", config, "scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pp::exit_config;
    }
    if (o_order->count()) g.quadrature_order = order;
    if (o_tol->count()) g.rel_tol = tol;
    if (o_out->count()) g.output_dir = outdir;

    using E = pp::Experiment;
    if (*modes) return cmd_modes(boundary, count, g);
    if (*coupling) return cmd_coupling(boundary, count, text, g);
    if (*locus) return cmd_locus(locus_args);
    if (*tune) return cmd_tune(config, g);
    if (*params) return cmd_params(config, g);
    if (*simulate) return cmd_run(config, g, {E::beat, E::damped_decay}, "simulate");
    if (*frf) return cmd_run(config, g, {E::frf}, "frf");
    if (*impulse) return cmd_run(config, g, {E::impulse}, "impulse");
    return cmd_run(config, g, {E::beat, E::damped_decay, E::frf, E::impulse}, "run");
}
