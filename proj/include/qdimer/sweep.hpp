// sweep.hpp: key=value sweep configuration and grid evaluation
//
// A config document has one `key = value` per line; '#' starts a comment.
//
//   mode = grid              # trace (one axis) or grid (two axes)
//   observable = delta_P     # P_ll P_lm delta_P tau_p T_c V_r coherence_time
//   x.name = t               # t V T delta_gamma gamma_m
//   x.lo = 0
//   x.hi = 1
//   x.n = 201
//   x.spacing = linear       # or log
//   y.name = V ...
//   V = 250                  # fixed parameters, see known_parameters()
//
// The field is stored row-major with x as the slow index.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qdimer {

enum class Mode { Trace, Grid };
enum class Spacing { Linear, Log };
enum class Observable { P_ll, P_lm, delta_P, tau_p, T_c, V_r, coherence_time };

const char* to_string(Mode m);
const char* to_string(Spacing s);
const char* to_string(Observable o);

struct Axis {
    std::string name;
    double lo{0.0};
    double hi{1.0};
    std::size_t n{2};
    Spacing spacing{Spacing::Linear};

    std::vector<double> points() const;
};

struct SweepSpec {
    Mode mode{Mode::Trace};
    Observable observable{Observable::delta_P};
    std::vector<Axis> axes;              // 1 for trace, 2 for grid
    std::map<std::string, double> given; // scalar keys set in the document
    std::map<std::string, int> lines;    // source line of every key, for diagnostics
    std::map<std::string, double> fixed; // given plus defaults; unset optional keys absent
    bool natural_units{false};
    std::optional<bool> coupling_given;
    bool renormalized{true}; // V_r = V exp(-Phi(T)) instead of the bare V

    // Sorted key=value pairs describing the fully resolved configuration.
    std::vector<std::pair<std::string, std::string>> resolved() const;
};

// Scalar keys accepted in a config, with their defaults (NaN = required / no default).
const std::vector<std::pair<std::string, double>>& known_parameters();

// Throws ConfigError (with line number and hint where one applies). When `implied`
// is set the observable key may be omitted, and must match it if present.
SweepSpec parse_config(std::string_view text, std::optional<Observable> implied = std::nullopt);
// Reads and parses a file; IoError when it cannot be read.
SweepSpec load_config(const std::string& path, std::optional<Observable> implied = std::nullopt);

// Fills `fixed` and `renormalized` from `given` and the unit system.
void resolve_defaults(SweepSpec& spec);

// Constraint checks on the resolved spec; ConfigError names the offending line.
void check_spec(const SweepSpec& spec);

// Command-line overrides; both re-resolve the defaults and re-check the spec.
void set_units(SweepSpec& spec, bool natural);
void set_parameter(SweepSpec& spec, const std::string& key, double value);

struct SweepGrid {
    std::vector<Axis> axes;
    std::vector<std::vector<double>> coords;
    std::string observable;
    std::vector<std::optional<double>> field; // empty optional = not applicable
    std::vector<std::pair<std::string, std::string>> metadata;

    std::size_t size() const { return field.size(); }
    const std::optional<double>& at(std::size_t i, std::size_t j = 0) const {
        return field[i * (axes.size() > 1 ? coords[1].size() : 1) + j];
    }
};

// Worker count from QDIMER_THREADS, else the hardware concurrency.
unsigned default_thread_count();

// Evaluates every cell; per-cell failures become NA. threads = 0 picks default_thread_count().
SweepGrid run_sweep(const SweepSpec& spec, unsigned threads = 0);

// Evaluates a single point (the fixed parameters only) for the ep-temp and passage
// subcommands. Unlike run_sweep, solver errors propagate.
double evaluate_point(const SweepSpec& spec);

} // namespace qdimer
