#pragma once

// Shared helpers for the test suites: small network constructors, random
// generators and independent reference computations.

#include "crnpolar/compiler.hpp"
#include "crnpolar/crn.hpp"
#include "crnpolar/gadgets.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace crnpolar::test {

/// Builds a network from reaction text (no metadata).
inline Network net_from(const std::string& text)
{
    return parse_network(text);
}

inline State state_of(const Network& net, const std::vector<std::pair<std::string, double>>& values)
{
    State s = zero_state(net);
    for (const auto& [name, v] : values)
        set_concentration(net, s, name, v);
    return s;
}

/// Uniform draw in [lo, hi].
inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Steady state with a generous time budget; fails the caller on
/// non-convergence via the returned flag.
inline SteadyState settle(const Network& net, const State& init, double max_time = 2000.0)
{
    SteadyStateOptions o;
    o.max_time = max_time;
    return steady_state(net, init, o);
}

inline double readout(const Network& net, const State& s, const Pair& p)
{
    return readout_probability(net, s, p.zero, p.one);
}

/// Mass-action derivative through the stoichiometry matrix and per-reaction
/// monomials built with std::pow over every species. Independent of the
/// library's sparse evaluation.
inline std::vector<double> dense_mass_action(const Network& net, const std::vector<double>& conc)
{
    const std::size_t n = net.species_count();
    const std::size_t m = net.reaction_count();
    std::vector<std::vector<double>> stoich(n, std::vector<double>(m, 0.0));
    std::vector<double> flux(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const auto& rx = net.reactions()[r];
        std::vector<int> order(n, 0);
        for (const auto& t : rx.reactants) {
            order[t.species] += t.count;
            stoich[t.species][r] -= t.count;
        }
        for (const auto& t : rx.products)
            stoich[t.species][r] += t.count;
        double v = rx.rate;
        for (std::size_t i = 0; i < n; ++i)
            v *= std::pow(conc[i], order[i]);
        flux[r] = v;
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t r = 0; r < m; ++r)
            out[i] += stoich[i][r] * flux[r];
    return out;
}

/// True when no sample holds a negative concentration.
inline bool nonnegative(const Trajectory& t)
{
    for (const auto& s : t.samples)
        for (double c : s.conc)
            if (c < 0.0)
                return false;
    return true;
}

}  // namespace crnpolar::test
