#include "qdimer/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "qdimer/analysis.hpp"
#include "qdimer/bath.hpp"
#include "qdimer/dynamics.hpp"
#include "qdimer/errors.hpp"
#include "qdimer/output.hpp"

namespace qdimer {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t max_cells = 4'000'000;

const std::vector<std::string> axis_names{"t", "V", "T", "delta_gamma", "gamma_m"};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

bool is_population(Observable o) {
    return o == Observable::P_ll || o == Observable::P_lm || o == Observable::delta_P;
}

bool has_axis(const SweepSpec& s, const std::string& name) {
    return std::any_of(s.axes.begin(), s.axes.end(), [&](const Axis& a) { return a.name == name; });
}

int line_of(const SweepSpec& s, const std::string& key) {
    auto it = s.lines.find(key);
    return it == s.lines.end() ? 0 : it->second;
}

std::optional<Observable> observable_from(const std::string& v) {
    for (auto o : {Observable::P_ll, Observable::P_lm, Observable::delta_P, Observable::tau_p, Observable::T_c,
                   Observable::V_r, Observable::coherence_time})
        if (v == to_string(o)) return o;
    return std::nullopt;
}

} // namespace

const char* to_string(Mode m) { return m == Mode::Trace ? "trace" : "grid"; }
const char* to_string(Spacing s) { return s == Spacing::Linear ? "linear" : "log"; }

const char* to_string(Observable o) {
    switch (o) {
    case Observable::P_ll: return "P_ll";
    case Observable::P_lm: return "P_lm";
    case Observable::delta_P: return "delta_P";
    case Observable::tau_p: return "tau_p";
    case Observable::T_c: return "T_c";
    case Observable::V_r: return "V_r";
    case Observable::coherence_time: return "coherence_time";
    }
    return "?";
}

std::vector<double> Axis::points() const {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = double(i) / double(n - 1);
        p[i] = spacing == Spacing::Linear ? lo + (hi - lo) * f : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * f);
    }
    p.front() = lo;
    p.back() = hi;
    return p;
}

const std::vector<std::pair<std::string, double>>& known_parameters() {
    // NaN: required for some observables, or derived from other keys.
    static const std::vector<std::pair<std::string, double>> keys{
        {"t", nan},          {"V", nan},          {"T", 0.0},          {"delta_gamma", nan}, {"gamma_m", 0.0},
        {"gamma_l", nan},    {"E_l", 0.0},        {"E_m", 0.0},        {"lambda_b", 200.0},  {"omega0", 50.0},
        {"omega_min", nan},  {"omega_max", nan},  {"t_max", nan},      {"grid_n", 256.0},    {"T_lo", default_T_lo},
        {"T_hi", default_T_hi}, {"tol", 1e-8},    {"tol_ep", default_tol_ep}, {"threshold", 0.05},
    };
    return keys;
}

void resolve_defaults(SweepSpec& spec) {
    auto& f = spec.fixed;
    f.clear();
    for (const auto& [k, v] : known_parameters())
        if (!std::isnan(v)) f[k] = v;
    for (const auto& [k, v] : spec.given) f[k] = v;

    if (!spec.given.count("omega_min")) f["omega_min"] = 1e-3 * f["omega0"];
    if (!spec.given.count("omega_max")) f["omega_max"] = 1e3 * f["omega0"];
    if (!spec.given.count("t_max")) f["t_max"] = spec.natural_units ? 50.0 : 5.0;
    if (!spec.given.count("gamma_l") && !spec.given.count("delta_gamma") && !has_axis(spec, "delta_gamma"))
        f["gamma_l"] = 0.0;
    for (const auto& a : spec.axes) f.erase(a.name);
    spec.renormalized = spec.coupling_given.value_or(!spec.natural_units);
}

void check_spec(const SweepSpec& spec) {
    const bool trace = spec.mode == Mode::Trace;
    // A trace without axes is a single point (ep-temp, passage).
    if (trace ? spec.axes.size() > 1 : spec.axes.size() != 2) {
        throw ConfigError(line_of(spec, "mode"),
                          std::string("mode ") + to_string(spec.mode) + " needs " + (trace ? "one axis" : "two axes"),
                          trace ? "define x.* only" : "define both x.* and y.*");
    }
    std::size_t cells = 1;
    for (std::size_t i = 0; i < spec.axes.size(); ++i) {
        const auto& a = spec.axes[i];
        const std::string p = i == 0 ? "x." : "y.";
        const int ln = line_of(spec, p + "name");
        if (std::find(axis_names.begin(), axis_names.end(), a.name) == axis_names.end())
            throw ConfigError(ln, "unknown axis '" + a.name + "'", "one of t, V, T, delta_gamma, gamma_m");
        if (spec.given.count(a.name))
            throw ConfigError(line_of(spec, a.name), "'" + a.name + "' is both a fixed value and the " + p + " axis",
                              "remove the fixed value");
        if (!(a.lo < a.hi))
            throw ConfigError(line_of(spec, p + "hi"), p + "lo must be < " + p + "hi", "swap or widen the range");
        if (a.n < 2) throw ConfigError(line_of(spec, p + "n"), p + "n must be >= 2");
        cells *= a.n;
        if (a.spacing == Spacing::Log && !(a.lo > 0.0))
            throw ConfigError(line_of(spec, p + "lo"), "log spacing needs " + p + "lo > 0", "use x.spacing = linear");
        if ((a.name == "t" || a.name == "T" || a.name == "gamma_m") && a.lo < 0.0)
            throw ConfigError(line_of(spec, p + "lo"), a.name + " must be >= 0");
        if (a.name == "V" && !(a.lo > 0.0)) throw ConfigError(line_of(spec, p + "lo"), "V must be > 0");
        if (a.name == "t" && !is_population(spec.observable))
            throw ConfigError(ln, "a t axis applies to P_ll, P_lm and delta_P only",
                              "use t_max for tau_p and coherence_time");
    }
    if (spec.axes.size() == 2 && spec.axes[0].name == spec.axes[1].name)
        throw ConfigError(line_of(spec, "y.name"), "x and y sweep the same parameter");
    if (cells > max_cells) throw ConfigError(0, "grid has more than 4e6 cells", "reduce x.n or y.n");

    const auto& f = spec.fixed;
    auto need = [&](const std::string& key, const std::string& why) {
        if (!f.count(key) && !has_axis(spec, key))
            throw ConfigError(0, "missing required key '" + key + "'", why);
    };
    need("V", "set the bare coupling, e.g. V = 250");
    if (is_population(spec.observable)) need("t", "set t or sweep it on an axis");
    if (spec.observable == Observable::T_c) need("delta_gamma", "set delta_gamma or sweep it on an axis");
    if (spec.given.count("gamma_l") && (spec.given.count("delta_gamma") || has_axis(spec, "delta_gamma")))
        throw ConfigError(line_of(spec, "gamma_l"), "gamma_l and delta_gamma are mutually exclusive",
                          "delta_gamma sets gamma_l = gamma_m + delta_gamma");

    auto bad = [&](const std::string& key, bool ok, const std::string& msg) {
        if (f.count(key) && !ok) throw ConfigError(line_of(spec, key), key + " " + msg);
    };
    auto val = [&](const std::string& key) { return f.count(key) ? f.at(key) : nan; };
    bad("V", val("V") > 0.0, "must be > 0");
    bad("t", val("t") >= 0.0, "must be >= 0");
    bad("T", val("T") >= 0.0, "must be >= 0");
    bad("gamma_m", val("gamma_m") >= 0.0, "must be >= 0");
    bad("gamma_l", val("gamma_l") >= 0.0, "must be >= 0");
    bad("lambda_b", val("lambda_b") >= 0.0, "must be >= 0");
    bad("omega0", val("omega0") > 0.0, "must be > 0");
    if (!(val("omega_min") > 0.0))
        throw ConfigError(line_of(spec, "omega_min"), "omega_min must be > 0",
                          "the Franck-Condon integral diverges at omega -> 0 for T > 0");
    if (!(val("omega_min") < val("omega0")))
        throw ConfigError(line_of(spec, "omega_min"), "omega_min must be < omega0", "the default is 1e-3 * omega0");
    bad("omega_max", val("omega_max") > val("omega0"), "must exceed omega0");
    bad("t_max", val("t_max") > 0.0, "must be > 0");
    bad("grid_n", val("grid_n") >= 64.0 && val("grid_n") <= 1e8 && std::floor(val("grid_n")) == val("grid_n"),
        "must be an integer >= 64");
    bad("T_lo", val("T_lo") >= 0.0, "must be >= 0");
    bad("T_hi", val("T_hi") > val("T_lo"), "must exceed T_lo");
    bad("tol", val("tol") > 0.0 && val("tol") < 1.0, "must lie in (0, 1)");
    bad("tol_ep", val("tol_ep") > 0.0 && val("tol_ep") <= 1e-3, "must lie in (0, 1e-3]");
    bad("threshold", val("threshold") > 0.0 && val("threshold") < 1.0, "must lie in (0, 1)");
}

SweepSpec parse_config(std::string_view text, std::optional<Observable> implied) {
    SweepSpec spec;
    std::map<std::string, std::string> axis_raw;
    std::string units_raw = "physical";
    bool mode_set = false, observable_set = false;

    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;

        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(lineno, "expected 'key = value', got '" + line + "'", "one assignment per line");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError(lineno, "missing key before '='");
        if (value.empty()) throw ConfigError(lineno, "missing value for '" + key + "'");
        if (auto prev = spec.lines.find(key); prev != spec.lines.end()) {
            throw ConfigError(lineno, "duplicate key '" + key + "' (first set on line " + std::to_string(prev->second) + ")",
                              "keep one of lines " + std::to_string(prev->second) + " and " + std::to_string(lineno));
        }
        spec.lines[key] = lineno;

        if (key == "mode") {
            if (value == "trace") spec.mode = Mode::Trace;
            else if (value == "grid") spec.mode = Mode::Grid;
            else throw ConfigError(lineno, "unknown mode '" + value + "'", "trace or grid");
            mode_set = true;
        } else if (key == "observable") {
            auto o = observable_from(value);
            if (!o) throw ConfigError(lineno, "unknown observable '" + value + "'",
                                      "one of P_ll, P_lm, delta_P, tau_p, T_c, V_r, coherence_time");
            spec.observable = *o;
            observable_set = true;
        } else if (key == "units") {
            if (value != "physical" && value != "natural")
                throw ConfigError(lineno, "unknown units '" + value + "'", "physical or natural");
            units_raw = value;
        } else if (key == "coupling") {
            if (value == "bare") spec.coupling_given = false;
            else if (value == "renormalized") spec.coupling_given = true;
            else throw ConfigError(lineno, "unknown coupling '" + value + "'", "bare or renormalized");
        } else if (key.size() > 2 && (key[0] == 'x' || key[0] == 'y') && key[1] == '.') {
            const std::string field = key.substr(2);
            if (field != "name" && field != "lo" && field != "hi" && field != "n" && field != "spacing")
                throw ConfigError(lineno, "unknown axis field '" + key + "'", "name, lo, hi, n or spacing");
            axis_raw[key] = value;
        } else {
            const auto& known = known_parameters();
            if (std::none_of(known.begin(), known.end(), [&](const auto& kv) { return kv.first == key; }))
                throw ConfigError(lineno, "unknown key '" + key + "'", "see the README for the list of keys");
            auto v = parse_double(value);
            if (!v) throw ConfigError(lineno, "'" + value + "' is not a finite number", "e.g. " + key + " = 1.5");
            spec.given[key] = *v;
        }
    }

    for (const char prefix : {'x', 'y'}) {
        const std::string p = std::string(1, prefix) + ".";
        const bool any = std::any_of(axis_raw.begin(), axis_raw.end(), [&](const auto& kv) { return kv.first[0] == prefix; });
        if (!any) continue;
        for (const char* f : {"name", "lo", "hi", "n"})
            if (!axis_raw.count(p + f))
                throw ConfigError(line_of(spec, p + "name"), "axis " + std::string(1, prefix) + " is missing " + p + f);
        Axis a;
        a.name = axis_raw[p + "name"];
        for (const char* f : {"lo", "hi", "n"}) {
            auto v = parse_double(axis_raw[p + f]);
            if (!v) throw ConfigError(line_of(spec, p + f), "'" + axis_raw[p + f] + "' is not a finite number");
            if (std::string(f) == "lo") a.lo = *v;
            else if (std::string(f) == "hi") a.hi = *v;
            else {
                if (*v < 0.0 || std::floor(*v) != *v || *v > double(max_cells))
                    throw ConfigError(line_of(spec, p + f), p + "n must be a positive integer");
                a.n = std::size_t(*v);
            }
        }
        if (axis_raw.count(p + "spacing")) {
            const auto& s = axis_raw[p + "spacing"];
            if (s == "linear") a.spacing = Spacing::Linear;
            else if (s == "log") a.spacing = Spacing::Log;
            else throw ConfigError(line_of(spec, p + "spacing"), "unknown spacing '" + s + "'", "linear or log");
        }
        if (prefix == 'y' && spec.axes.empty())
            throw ConfigError(line_of(spec, "y.name"), "y axis given without an x axis", "rename y.* to x.*");
        spec.axes.push_back(a);
    }
    if (!mode_set) spec.mode = spec.axes.size() == 2 ? Mode::Grid : Mode::Trace;
    if (implied) {
        if (observable_set && spec.observable != *implied)
            throw ConfigError(line_of(spec, "observable"), std::string("this command computes ") + to_string(*implied),
                              "drop the observable key");
        spec.observable = *implied;
    } else if (!observable_set) {
        throw ConfigError(0, "missing required key 'observable'", "e.g. observable = delta_P");
    }

    spec.natural_units = units_raw == "natural";
    resolve_defaults(spec);
    check_spec(spec);
    return spec;
}

SweepSpec load_config(const std::string& path, std::optional<Observable> implied) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open config");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError(path, "read failed");
    return parse_config(ss.str(), implied);
}

void set_units(SweepSpec& spec, bool natural) {
    spec.natural_units = natural;
    resolve_defaults(spec);
    check_spec(spec);
}

void set_parameter(SweepSpec& spec, const std::string& key, double value) {
    const auto& known = known_parameters();
    if (std::none_of(known.begin(), known.end(), [&](const auto& kv) { return kv.first == key; }))
        throw ConfigError(0, "unknown key '" + key + "'");
    spec.given[key] = value;
    resolve_defaults(spec);
    check_spec(spec);
}

std::vector<std::pair<std::string, std::string>> SweepSpec::resolved() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("mode", to_string(mode));
    out.emplace_back("observable", to_string(observable));
    out.emplace_back("units", natural_units ? "natural" : "physical");
    out.emplace_back("coupling", renormalized ? "renormalized" : "bare");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const std::string p = i == 0 ? "x." : "y.";
        out.emplace_back(p + "name", axes[i].name);
        out.emplace_back(p + "lo", format_number(axes[i].lo));
        out.emplace_back(p + "hi", format_number(axes[i].hi));
        out.emplace_back(p + "n", std::to_string(axes[i].n));
        out.emplace_back(p + "spacing", to_string(axes[i].spacing));
    }
    for (const auto& [k, v] : fixed) out.emplace_back(k, format_number(v));
    std::sort(out.begin(), out.end());
    return out;
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("QDIMER_THREADS")) {
        unsigned n = 0;
        const std::string s(env);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
        if (ec == std::errc() && ptr == s.data() + s.size() && n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct Point {
    double t{nan}, V{nan}, T{0.0}, delta_gamma{nan}, gamma_m{0.0}, gamma_l{0.0}, E_l{0.0}, E_m{0.0};

    void set(const std::string& name, double v) {
        if (name == "t") t = v;
        else if (name == "V") V = v;
        else if (name == "T") T = v;
        else if (name == "delta_gamma") delta_gamma = v;
        else if (name == "gamma_m") gamma_m = v;
    }
};

struct Context {
    const SweepSpec& spec;
    UnitSystem units;
    BathParams bath;
    double t_max, tol, tol_ep, threshold, T_lo, T_hi;
    std::size_t grid_n;

    explicit Context(const SweepSpec& s)
        : spec(s), units(s.natural_units ? UnitSystem::natural() : UnitSystem::physical()) {
        const auto& f = s.fixed;
        bath = {f.at("lambda_b"), f.at("omega0"), f.at("omega_min"), f.at("omega_max"), 0.0};
        t_max = f.at("t_max");
        tol = f.at("tol");
        tol_ep = f.at("tol_ep");
        threshold = f.at("threshold");
        T_lo = f.at("T_lo");
        T_hi = f.at("T_hi");
        grid_n = std::size_t(f.at("grid_n"));
    }

    Point base() const {
        Point p;
        auto get = [&](const char* k, double& dst) {
            if (auto it = spec.fixed.find(k); it != spec.fixed.end()) dst = it->second;
        };
        get("t", p.t);
        get("V", p.V);
        get("T", p.T);
        get("delta_gamma", p.delta_gamma);
        get("gamma_m", p.gamma_m);
        get("gamma_l", p.gamma_l);
        get("E_l", p.E_l);
        get("E_m", p.E_m);
        return p;
    }

    double coupling(const Point& p) const {
        if (!spec.renormalized) return p.V;
        BathParams b = bath;
        b.temperature = p.T;
        return renormalized_coupling(p.V, b, 1e-10, units).vr;
    }

    // Throws qdimer::Error when the observable is undefined at p.
    double evaluate(const Point& p, double vr) const {
        if (spec.observable == Observable::V_r) return vr;
        if (spec.observable == Observable::T_c)
            return critical_temperature(p.delta_gamma, p.V, bath, T_lo, T_hi, tol, units).T_c;

        Dimer d{p.E_l, p.E_m, vr, std::isnan(p.delta_gamma) ? p.gamma_l : p.gamma_m + p.delta_gamma, p.gamma_m};
        switch (spec.observable) {
        case Observable::tau_p: {
            auto r = passage_time(d, t_max, grid_n, units);
            if (!r.tau_p) throw NotApplicable("no interior maximum of p_m on (0, t_max]");
            return *r.tau_p;
        }
        case Observable::coherence_time: return coherence_time(d, threshold, t_max, units, tol_ep).time;
        default: break;
        }
        double pll, plm;
        if (d.degenerate()) {
            const auto pop = populations_degenerate(d, p.t, units, tol_ep);
            pll = pop.P_ll;
            plm = pop.P_lm;
        } else {
            const auto c = propagate_general(d, p.t, units);
            pll = std::norm(c(0));
            plm = std::norm(c(1));
        }
        if (spec.observable == Observable::P_ll) return pll;
        if (spec.observable == Observable::P_lm) return plm;
        return pll - plm;
    }
};

template <typename F>
void parallel_for(std::size_t n, unsigned threads, const F& body) {
    threads = std::max(1u, std::min<unsigned>(threads, unsigned(std::max<std::size_t>(n, 1))));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
    };
    if (threads == 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

std::optional<double> guarded(const auto& fn) {
    try {
        const double v = fn();
        if (std::isfinite(v)) return v;
    } catch (const Error&) {
    }
    return std::nullopt;
}

} // namespace

SweepGrid run_sweep(const SweepSpec& spec, unsigned threads) {
    if (spec.axes.empty()) throw ConfigError(0, "nothing to sweep", "define an x axis");
    if (threads == 0) threads = default_thread_count();
    const Context ctx(spec);

    SweepGrid grid;
    grid.axes = spec.axes;
    for (const auto& a : spec.axes) grid.coords.push_back(a.points());
    grid.observable = to_string(spec.observable);

    const std::size_t nx = grid.coords[0].size();
    const std::size_t ny = grid.coords.size() > 1 ? grid.coords[1].size() : 1;
    std::vector<Point> points(nx * ny, ctx.base());
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            auto& p = points[i * ny + j];
            p.set(spec.axes[0].name, grid.coords[0][i]);
            if (spec.axes.size() > 1) p.set(spec.axes[1].name, grid.coords[1][j]);
        }

    // V_r depends on (V, T) only; evaluate each distinct pair once.
    std::map<std::pair<double, double>, std::size_t> key_index;
    std::vector<std::pair<double, double>> keys;
    std::vector<std::size_t> cell_key(points.size());
    for (std::size_t c = 0; c < points.size(); ++c) {
        const std::pair<double, double> k{points[c].V, points[c].T};
        auto [it, inserted] = key_index.emplace(k, keys.size());
        if (inserted) keys.push_back(k);
        cell_key[c] = it->second;
    }
    std::vector<std::optional<double>> vr(keys.size());
    const bool needs_vr = spec.observable != Observable::T_c;
    if (needs_vr) {
        parallel_for(keys.size(), threads, [&](std::size_t k) {
            Point p;
            p.V = keys[k].first;
            p.T = keys[k].second;
            vr[k] = guarded([&] { return ctx.coupling(p); });
        });
    }

    grid.field.assign(points.size(), std::nullopt);
    parallel_for(points.size(), threads, [&](std::size_t c) {
        double v = 0.0;
        if (needs_vr) {
            if (!vr[cell_key[c]]) return;
            v = *vr[cell_key[c]];
        }
        grid.field[c] = guarded([&] { return ctx.evaluate(points[c], v); });
    });

    grid.metadata.emplace_back("version", QDIMER_VERSION);
    grid.metadata.emplace_back("units", spec.natural_units ? "natural (hbar = kB = 1)" : "physical (cm^-1, ps, K)");
    for (const auto& [k, v] : spec.resolved()) grid.metadata.emplace_back("config." + k, v);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) grid.metadata.emplace_back("timestamp", epoch);
    return grid;
}

double evaluate_point(const SweepSpec& spec) {
    const Context ctx(spec);
    const Point p = ctx.base();
    const double vr = spec.observable == Observable::T_c ? 0.0 : ctx.coupling(p);
    const double v = ctx.evaluate(p, vr);
    if (!std::isfinite(v)) throw RangeError("observable is not finite");
    return v;
}

} // namespace qdimer
