// qdimer: command-line driver for dimer population sweeps
//
//   qdimer trace --config presets/fig2a.conf --out fig2a.csv --svg fig2a.svg
//   qdimer grid  --config presets/fig1a.conf --out fig1a.csv
//   qdimer ep-temp --config ep.conf           # single T_c, or a sweep when axes are set
//   qdimer passage --config passage.conf
//   qdimer validate-config --config x.conf
//
// Exit codes: 0 ok, 2 config error, 3 solver / no root, 4 I/O.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qdimer/analysis.hpp"
#include "qdimer/errors.hpp"
#include "qdimer/output.hpp"
#include "qdimer/sweep.hpp"

namespace {

enum Exit { ok = 0, config_error = 2, solver_error = 3, io_error = 4 };

struct Options {
    std::string config;
    std::string out;
    std::string svg;
    std::string units;
    std::optional<double> tol;
};

void add_common(CLI::App* cmd, Options& o, bool outputs) {
    cmd->add_option("--config", o.config, "key=value configuration file")->required();
    cmd->add_option("--units", o.units, "override the unit system")->check(CLI::IsMember({"physical", "natural"}));
    cmd->add_option("--tol", o.tol, "solver tolerance (relative)");
    if (outputs) {
        cmd->add_option("--out", o.out, "CSV destination (default: stdout)");
        cmd->add_option("--svg", o.svg, "SVG destination");
    }
}

qdimer::SweepSpec load(const Options& o, std::optional<qdimer::Observable> implied = std::nullopt) {
    auto spec = qdimer::load_config(o.config, implied);
    if (!o.units.empty()) qdimer::set_units(spec, o.units == "natural");
    if (o.tol) qdimer::set_parameter(spec, "tol", *o.tol);
    return spec;
}

void emit(const qdimer::SweepGrid& grid, const Options& o) {
    if (o.out.empty()) qdimer::write_csv(grid, std::cout);
    else qdimer::write_csv(grid, o.out);
    if (!o.svg.empty()) qdimer::render_svg(grid, o.svg);
}

int run_sweep_command(const Options& o, qdimer::Mode expected) {
    const auto spec = load(o);
    if (spec.mode != expected)
        throw qdimer::ConfigError(0, std::string("config is a ") + qdimer::to_string(spec.mode) + " sweep",
                                  std::string("use the ") + qdimer::to_string(spec.mode) + " subcommand");
    if (spec.axes.empty()) { // single point
        std::cout << qdimer::to_string(spec.observable) << " = " << qdimer::format_number(qdimer::evaluate_point(spec))
                  << '\n';
        return ok;
    }
    emit(qdimer::run_sweep(spec), o);
    return ok;
}

void print_pairs(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& kv) {
    for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
}

int ep_temp(const Options& o) {
    const auto spec = load(o, qdimer::Observable::T_c);
    if (!spec.axes.empty()) {
        emit(qdimer::run_sweep(spec), o);
        return ok;
    }
    const auto& f = spec.fixed;
    qdimer::BathParams bath{f.at("lambda_b"), f.at("omega0"), f.at("omega_min"), f.at("omega_max"), 0.0};
    const auto units = spec.natural_units ? qdimer::UnitSystem::natural() : qdimer::UnitSystem::physical();
    const auto r = qdimer::critical_temperature(f.at("delta_gamma"), f.at("V"), bath, f.at("T_lo"), f.at("T_hi"),
                                                f.at("tol"), units);
    print_pairs(std::cout, {{"T_c", qdimer::format_number(r.T_c)},
                            {"residual", qdimer::format_number(r.residual)},
                            {"bracket", qdimer::format_number(r.bracket.first) + " " + qdimer::format_number(r.bracket.second)},
                            {"iterations", std::to_string(r.iterations)}});
    return ok;
}

int passage(const Options& o) {
    const auto spec = load(o, qdimer::Observable::tau_p);
    if (!spec.axes.empty()) {
        emit(qdimer::run_sweep(spec), o);
        return ok;
    }
    const double tau = qdimer::evaluate_point(spec);
    print_pairs(std::cout, {{"tau_p", qdimer::format_number(tau)}});
    return ok;
}

int validate(const Options& o) {
    const auto spec = load(o);
    print_pairs(std::cout, spec.resolved());
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qdimer: exciton dimer populations, exceptional points and passage times"};
    app.require_subcommand(1);
    Options o;
    auto* trace = app.add_subcommand("trace", "one-axis sweep");
    auto* grid = app.add_subcommand("grid", "two-axis sweep");
    auto* ep = app.add_subcommand("ep-temp", "critical temperature of the exceptional point");
    auto* pass = app.add_subcommand("passage", "passage time from site l to site m");
    auto* check = app.add_subcommand("validate-config", "parse a config and print it with defaults resolved");
    for (auto* c : {trace, grid, ep, pass}) add_common(c, o, true);
    add_common(check, o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        if (*trace) return run_sweep_command(o, qdimer::Mode::Trace);
        if (*grid) return run_sweep_command(o, qdimer::Mode::Grid);
        if (*ep) return ep_temp(o);
        if (*pass) return passage(o);
        return validate(o);
    } catch (const qdimer::IoError& e) {
        std::cerr << "qdimer: " << e.what() << '\n';
        return io_error;
    } catch (const qdimer::ConfigError& e) {
        std::cerr << "qdimer: config: " << e.what() << '\n';
        return config_error;
    } catch (const qdimer::ValidationError& e) {
        std::cerr << "qdimer: config: " << e.what() << '\n';
        return config_error;
    } catch (const qdimer::InvalidInput& e) {
        std::cerr << "qdimer: config: " << e.what() << '\n';
        return config_error;
    } catch (const qdimer::Error& e) {
        std::cerr << "qdimer: " << e.what() << '\n';
        return solver_error;
    }
}
