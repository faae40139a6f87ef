#include "crnpolar/crn.hpp"

#include <algorithm>
#include <cmath>

namespace crnpolar {

bool is_valid_species_name(std::string_view name)
{
    if (name.empty())
        return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
               c == '.' || c == '_';
    });
}

std::optional<std::size_t> Network::find(std::string_view name) const
{
    auto it = index_.find(std::string(name));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::size_t Network::index_of(std::string_view name) const
{
    if (auto i = find(name))
        return *i;
    throw ConfigError("unknown species '" + std::string(name) + "'");
}

bool Network::has_tag(std::size_t species, std::string_view tag) const
{
    return tags_[species].count(std::string(tag)) != 0;
}

std::size_t NetworkBuilder::add_species(const std::string& name, const std::string& owner)
{
    if (!is_valid_species_name(name))
        throw ConfigError("invalid species name '" + name + "'");
    if (net_.index_.count(name))
        throw ConfigError("duplicate species '" + name + "'");
    const std::size_t idx = net_.species_.size();
    net_.species_.push_back(name);
    net_.index_.emplace(name, idx);
    net_.owner_.push_back(owner);
    net_.tags_.emplace_back();
    return idx;
}

std::size_t NetworkBuilder::ensure_species(const std::string& name, const std::string& owner)
{
    if (auto i = find(name))
        return *i;
    return add_species(name, owner);
}

bool NetworkBuilder::contains(std::string_view name) const
{
    return net_.find(name).has_value();
}

std::optional<std::size_t> NetworkBuilder::find(std::string_view name) const
{
    return net_.find(name);
}

void NetworkBuilder::tag(const std::string& name, const std::string& tag)
{
    net_.tags_[net_.index_of(name)].insert(tag);
}

namespace {

std::vector<Term> resolve(const Network& net, const std::vector<NamedTerm>& side)
{
    std::map<std::size_t, int> merged;
    for (const auto& [name, count] : side) {
        if (count < 1)
            throw ConfigError("stoichiometric count must be >= 1 for '" + name + "'");
        merged[net.index_of(name)] += count;
    }
    std::vector<Term> out;
    out.reserve(merged.size());
    for (auto [idx, count] : merged)
        out.push_back({idx, count});
    return out;
}

}  // namespace

void NetworkBuilder::add_reaction(const std::vector<NamedTerm>& reactants,
                                  const std::vector<NamedTerm>& products,
                                  double rate, std::string provenance)
{
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw ConfigError("reaction rate must be positive and finite");
    Reaction r;
    r.reactants = resolve(net_, reactants);
    r.products = resolve(net_, products);
    r.rate = rate;
    if (r.reactants.empty() && r.products.empty())
        throw ConfigError("reaction has neither reactants nor products");

    std::map<std::size_t, int> delta;
    for (const auto& t : r.reactants)
        delta[t.species] -= t.count;
    for (const auto& t : r.products)
        delta[t.species] += t.count;
    std::vector<std::pair<std::size_t, int>> change;
    for (auto [idx, d] : delta)
        if (d != 0)
            change.emplace_back(idx, d);

    net_.reactions_.push_back(std::move(r));
    net_.provenance_.push_back(std::move(provenance));
    net_.net_change_.push_back(std::move(change));
}

Network NetworkBuilder::build() &&
{
    return std::move(net_);
}

State zero_state(const Network& net)
{
    State s;
    s.conc.assign(net.species_count(), 0.0);
    return s;
}

void set_concentration(const Network& net, State& s, std::string_view name, double value)
{
    if (s.conc.size() != net.species_count())
        throw ConfigError("state does not match network");
    if (!(value >= 0.0))
        throw ConfigError("concentration must be nonnegative for '" + std::string(name) + "'");
    s.conc[net.index_of(name)] = value;
}

double concentration(const Network& net, const State& s, std::string_view name)
{
    if (s.conc.size() != net.species_count())
        throw ConfigError("state does not match network");
    return s.conc[net.index_of(name)];
}

void derivative_into(const Network& net, std::span<const double> conc, std::span<double> out)
{
    std::fill(out.begin(), out.end(), 0.0);
    const auto& rxns = net.reactions();
    for (std::size_t r = 0; r < rxns.size(); ++r) {
        double flux = rxns[r].rate;
        for (const auto& t : rxns[r].reactants) {
            const double c = conc[t.species];
            switch (t.count) {
            case 1: flux *= c; break;
            case 2: flux *= c * c; break;
            case 3: flux *= c * c * c; break;
            default: flux *= std::pow(c, t.count); break;
            }
        }
        if (flux == 0.0)
            continue;
        for (auto [idx, d] : net.net_change(r))
            out[idx] += d * flux;
    }
}

std::vector<double> derivative(const Network& net, const State& s)
{
    if (s.conc.size() != net.species_count())
        throw ConfigError("state covers " + std::to_string(s.conc.size()) + " species, network has " +
                          std::to_string(net.species_count()));
    std::vector<double> out(net.species_count());
    derivative_into(net, s.conc, out);
    return out;
}

double readout_probability(const Network& net, const State& s,
                           std::string_view zero_species, std::string_view one_species)
{
    const double zero = concentration(net, s, zero_species);
    const double one = concentration(net, s, one_species);
    if (zero + one <= 0.0)
        throw ReadoutError("undefined readout: [" + std::string(zero_species) + "] + [" +
                           std::string(one_species) + "] is zero");
    return one / (zero + one);
}

double max_converging_derivative(const Network& net, const State& s)
{
    const auto d = derivative(net, s);
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (!net.has_tag(i, kUnboundedTag))
            worst = std::max(worst, std::abs(d[i]));
    return worst;
}

}  // namespace crnpolar
