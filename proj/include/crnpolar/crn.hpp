#pragma once

// Chemical reaction networks under deterministic mass-action kinetics.
//
// A Network is an immutable list of species and reactions built through a
// NetworkBuilder. Concentrations live in a State that is indexed by species
// position. All rate laws are mass action: the flux of a reaction is its
// rate constant times the product of reactant concentrations raised to their
// stoichiometric counts.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace crnpolar {

/// Raised for malformed networks, mismatched states and invalid arguments.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a probability readout is taken from an empty pair.
class ReadoutError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Species tag that removes a species from steady-state detection.
inline constexpr std::string_view kUnboundedTag = "unbounded";

/// True when `name` matches [A-Za-z0-9._]+.
bool is_valid_species_name(std::string_view name);

struct Term {
    std::size_t species = 0;
    int count = 1;

    friend bool operator==(const Term&, const Term&) = default;
};

struct Reaction {
    std::vector<Term> reactants;  // empty means the source (phi)
    std::vector<Term> products;   // empty means the sink (phi)
    double rate = 1.0;
};

/// (species name, stoichiometric count) used when adding reactions by name.
using NamedTerm = std::pair<std::string, int>;

class Network {
public:
    Network() = default;

    std::size_t species_count() const { return species_.size(); }
    std::size_t reaction_count() const { return reactions_.size(); }

    const std::vector<std::string>& species() const { return species_; }
    const std::vector<Reaction>& reactions() const { return reactions_; }

    std::optional<std::size_t> find(std::string_view name) const;

    /// Index of `name`; throws ConfigError for unknown species.
    std::size_t index_of(std::string_view name) const;

    /// Provenance of a reaction, e.g. "gadget=multiply:sc.s0.b0.f0.D".
    const std::string& provenance(std::size_t reaction) const { return provenance_[reaction]; }

    /// Gadget kind that created a species ("" when unspecified).
    const std::string& owner(std::size_t species) const { return owner_[species]; }

    const std::set<std::string>& tags(std::size_t species) const { return tags_[species]; }
    bool has_tag(std::size_t species, std::string_view tag) const;

    /// Net stoichiometric change of every species touched by reaction r.
    const std::vector<std::pair<std::size_t, int>>& net_change(std::size_t r) const { return net_change_[r]; }

private:
    friend class NetworkBuilder;

    std::vector<std::string> species_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> owner_;
    std::vector<std::set<std::string>> tags_;
    std::vector<Reaction> reactions_;
    std::vector<std::string> provenance_;
    std::vector<std::vector<std::pair<std::size_t, int>>> net_change_;
};

/// Single-owner builder; `build()` freezes the result into a Network.
class NetworkBuilder {
public:
    /// Adds a species. Throws ConfigError on a duplicate or invalid name.
    std::size_t add_species(const std::string& name, const std::string& owner = {});

    /// Returns the index of `name`, adding it when absent.
    std::size_t ensure_species(const std::string& name, const std::string& owner = {});

    bool contains(std::string_view name) const;
    std::optional<std::size_t> find(std::string_view name) const;

    void tag(const std::string& name, const std::string& tag);

    /// Adds a reaction. Species must already exist. Repeated species in a
    /// side are merged into one term.
    void add_reaction(const std::vector<NamedTerm>& reactants,
                      const std::vector<NamedTerm>& products,
                      double rate = 1.0,
                      std::string provenance = {});

    std::size_t species_count() const { return net_.species_.size(); }
    std::size_t reaction_count() const { return net_.reactions_.size(); }

    Network build() &&;

private:
    Network net_;
};

/// Concentrations indexed like Network::species(), at a given time.
struct State {
    double time = 0.0;
    std::vector<double> conc;
};

/// All-zero state at t = 0 sized for `net`.
State zero_state(const Network& net);

/// Sets the concentration of a named species.
void set_concentration(const Network& net, State& s, std::string_view name, double value);
double concentration(const Network& net, const State& s, std::string_view name);

/// Mass-action right-hand side. Throws ConfigError if `s` does not cover
/// exactly the species of `net`.
std::vector<double> derivative(const Network& net, const State& s);

/// Allocation-free variant used by the integrator.
void derivative_into(const Network& net, std::span<const double> conc, std::span<double> out);

/// [one] / ([zero] + [one]); throws ReadoutError when both are zero.
double readout_probability(const Network& net, const State& s,
                           std::string_view zero_species, std::string_view one_species);

// --- simulation -----------------------------------------------------------

struct Tolerances {
    double rtol = 1e-6;
    double atol = 1e-9;
};

/// Concentrations in (-kNegativeClamp, 0) are clamped to zero; anything at
/// or below -kNegativeClamp is never accepted into a trajectory.
inline constexpr double kNegativeClamp = 1e-9;

struct SimulateOptions {
    double record_interval = 0.5;
    Tolerances tol;
    double initial_step = 1e-3;
    double min_step = 1e-12;
    double max_step = 1.0;
    std::size_t max_steps = 50'000'000;
};

struct Trajectory {
    double record_interval = 0.0;
    std::vector<State> samples;
};

/// Integration could not continue; carries the last accepted state.
class SimulationFailure : public std::runtime_error {
public:
    SimulationFailure(const std::string& what, State last_good)
        : std::runtime_error(what), last_good_(std::move(last_good)) {}

    const State& last_good() const { return last_good_; }

private:
    State last_good_;
};

/// Adaptive Dormand-Prince 5(4) integrator over a fixed network.
class Integrator {
public:
    Integrator(const Network& net, State init, const SimulateOptions& opts = {});

    /// Integrates forward until state().time == t (no-op if already there).
    void advance_to(double t);

    const State& state() const { return state_; }
    std::size_t accepted_steps() const { return accepted_; }
    std::size_t rejected_steps() const { return rejected_; }

private:
    bool try_step(double h, double& err_norm);

    const Network* net_;
    SimulateOptions opts_;
    State state_;
    double h_;
    std::size_t accepted_ = 0;
    std::size_t rejected_ = 0;
    bool fsal_valid_ = false;
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y_new_;
};

/// Samples the ODE solution every `record_interval` and at `t_end`.
Trajectory simulate(const Network& net, const State& init, double t_end,
                    const SimulateOptions& opts = {});

/// Decision-gadget accumulators make the system stiffer as time grows; the
/// derivative noise of an explicit step is roughly [Y] * atol, so steady-state
/// detection runs with tighter tolerances than plain simulation.
inline SimulateOptions steady_state_sim_defaults()
{
    SimulateOptions o;
    o.tol.atol = 1e-12;
    o.tol.rtol = 1e-8;
    return o;
}

struct SteadyStateOptions {
    double max_time = 2000.0;
    double derivative_tol = 1e-8;
    double check_interval = 0.5;
    SimulateOptions sim = steady_state_sim_defaults();
};

struct SteadyState {
    State state;
    bool converged = false;
};

/// Integrates until every species not tagged `unbounded` has
/// |d[X]/dt| < derivative_tol at a check point, or max_time is reached.
/// `observer` (if set) sees the initial state and every check-point state.
SteadyState steady_state(const Network& net, const State& init,
                         const SteadyStateOptions& opts = {},
                         const std::function<void(const State&)>& observer = {});

/// Largest |d[X]/dt| over species that are not tagged `unbounded`.
double max_converging_derivative(const Network& net, const State& s);

// --- text formats ---------------------------------------------------------

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

struct ParseOptions {
    /// With a `.species` section present, reject undeclared species.
    bool strict = false;
};

/// Reaction text format:
///
///     # comment
///     .species A B C          optional declaration section
///     .owner multiply C0 C1   gadget kind that created the species
///     .tag unbounded X Y
///     .init A 0.5             initial concentration (default 0)
///     A + B -> C @ 2.0        rate defaults to 1
///     S + A0 -> 3 A0          integer multiplier, at most 3
///     A + B -> 0              0 is the empty set
///     A -> A + X  # gadget=decision:sc.u1
///
/// A trailing `# gadget=...` comment is stored as the reaction provenance.
Network parse_network(std::string_view text, const ParseOptions& opts = {});

/// Initial concentrations from `.init` lines of `text`, sized for `net`.
State parse_initial_state(std::string_view text, const Network& net);

/// Writes `net` (and `init` when given) in the reaction text format.
std::string serialize_network(const Network& net, const State* init = nullptr);

/// CSV with header `time,<species...>`, species sorted lexicographically.
std::string trajectory_csv(const Network& net, const Trajectory& traj);

}  // namespace crnpolar
