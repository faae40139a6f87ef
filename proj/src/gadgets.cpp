#include "crnpolar/gadgets.hpp"

namespace crnpolar {

namespace gk = gadget_kind;

std::string provenance_tag(const std::string& kind, const std::string& instance)
{
    return "gadget=" + kind + ":" + instance;
}

std::pair<std::string, std::string> GadgetBuilder::key(const Pair& p)
{
    return p.zero < p.one ? std::pair{p.zero, p.one} : std::pair{p.one, p.zero};
}

Pair GadgetBuilder::add_pair(const std::string& base, const std::string& owner, double init_zero,
                             double init_one)
{
    Pair p{base + "0", base + "1"};
    net_.add_species(p.zero, owner);
    init_.push_back(init_zero);
    net_.add_species(p.one, owner);
    init_.push_back(init_one);
    return p;
}

std::string GadgetBuilder::add_aux(const std::string& name, const std::string& owner)
{
    net_.add_species(name, owner);
    init_.push_back(0.0);
    return name;
}

void GadgetBuilder::transfer(const std::vector<std::string>& catalysts, const std::string& from,
                             const std::string& to, const std::string& provenance)
{
    std::vector<NamedTerm> lhs, rhs;
    for (const auto& c : catalysts) {
        lhs.emplace_back(c, 1);
        rhs.emplace_back(c, 1);
    }
    lhs.emplace_back(from, 1);
    rhs.emplace_back(to, 1);
    net_.add_reaction(lhs, rhs, 1.0, provenance);
}

void GadgetBuilder::react(const std::vector<NamedTerm>& reactants,
                          const std::vector<NamedTerm>& products, const std::string& provenance)
{
    net_.add_reaction(reactants, products, 1.0, provenance);
}

void GadgetBuilder::claim_output(const Pair& pair, const std::string& instance)
{
    if (!driven_.insert(key(pair)).second)
        throw BuilderError("pair (" + pair.zero + ", " + pair.one + ") already driven; '" +
                           instance + "' cannot write it");
}

bool GadgetBuilder::is_driven(const Pair& pair) const
{
    return driven_.count(key(pair)) != 0;
}

bool GadgetBuilder::is_exclusive(const Pair& pair) const
{
    return exclusive_.count(key(pair)) != 0;
}

void GadgetBuilder::mark_exclusive(const Pair& pair)
{
    if (!exclusive_.insert(key(pair)).second)
        throw BuilderError("pair (" + pair.zero + ", " + pair.one +
                           ") already has an exclusivity gadget");
}

void GadgetBuilder::set_initial(const std::string& species, double value)
{
    const auto idx = net_.find(species);
    if (!idx)
        throw ConfigError("unknown species '" + species + "'");
    init_[*idx] = value;
}

std::pair<Network, State> GadgetBuilder::build() &&
{
    Network net = std::move(net_).build();
    State init = zero_state(net);
    init.conc = std::move(init_);
    return {std::move(net), std::move(init)};
}

namespace {

void require_pair(const GadgetBuilder& b, const Pair& p)
{
    if (!b.contains(p.zero) || !b.contains(p.one))
        throw BuilderError("pair (" + p.zero + ", " + p.one + ") is not registered");
}

// Multiply and divide without the single-writer check, for use inside f/g.
void multiply_reactions(GadgetBuilder& b, const Pair& a, const Pair& bb, const Pair& c,
                        const std::string& tag)
{
    b.transfer({a.zero}, c.one, c.zero, tag);
    b.transfer({a.one, bb.zero}, c.one, c.zero, tag);
    b.transfer({a.one, bb.one}, c.zero, c.one, tag);
}

void divide_reactions(GadgetBuilder& b, const Pair& a, const Pair& bb, const Pair& c,
                      const std::vector<std::string>& gate, const std::string& tag)
{
    auto with = [&](const std::string& s) {
        auto cats = gate;
        cats.push_back(s);
        return cats;
    };
    // A1 moves C toward 1 and B1 toward 0, so [C1]:[C0] = [A1]:[B1].
    b.transfer(with(a.one), c.zero, c.one, tag);
    b.transfer(with(bb.one), c.one, c.zero, tag);
}

// Internal multiply with its own intermediate pair initialized to (0.5, 0.5).
Pair intermediate_product(GadgetBuilder& b, const Pair& a, const Pair& bb,
                          const std::string& instance, const std::string& owner,
                          std::vector<std::string>& aux)
{
    Pair out = b.add_pair(instance, owner);
    aux.push_back(out.zero);
    aux.push_back(out.one);
    multiply_reactions(b, a, bb, out, provenance_tag(gk::kMultiply, instance));
    return out;
}

}  // namespace

GadgetHandle emit_exclusive_bit(GadgetBuilder& b, const Pair& pair, const std::string& instance)
{
    require_pair(b, pair);
    b.mark_exclusive(pair);
    const auto tag = provenance_tag(gk::kExclusive, instance);
    const auto s = b.add_aux(instance + ".S", gk::kExclusive);
    b.react({{pair.zero, 1}, {pair.one, 1}}, {{s, 1}}, tag);
    b.react({{s, 1}, {pair.zero, 1}}, {{pair.zero, 3}}, tag);
    b.react({{s, 1}, {pair.one, 1}}, {{pair.one, 3}}, tag);
    return {gk::kExclusive, instance, {pair}, pair, {s}, tag};
}

GadgetHandle emit_multiply(GadgetBuilder& b, const Pair& a, const Pair& b_in, const Pair& c,
                           const std::string& instance)
{
    for (const auto* p : {&a, &b_in, &c})
        require_pair(b, *p);
    b.claim_output(c, instance);
    const auto tag = provenance_tag(gk::kMultiply, instance);
    multiply_reactions(b, a, b_in, c, tag);
    return {gk::kMultiply, instance, {a, b_in}, c, {}, tag};
}

GadgetHandle emit_divide(GadgetBuilder& b, const Pair& a, const Pair& b_in, const Pair& c,
                         const std::string& instance)
{
    for (const auto* p : {&a, &b_in, &c})
        require_pair(b, *p);
    b.claim_output(c, instance);
    const auto tag = provenance_tag(gk::kDivide, instance);
    divide_reactions(b, a, b_in, c, {}, tag);
    return {gk::kDivide, instance, {a, b_in}, c, {}, tag};
}

GadgetHandle emit_xor(GadgetBuilder& b, const Pair& a, const Pair& b_in, const Pair& c,
                      const std::string& instance)
{
    for (const auto* p : {&a, &b_in, &c})
        require_pair(b, *p);
    b.claim_output(c, instance);
    const auto tag = provenance_tag(gk::kXor, instance);
    // Primed signals: P1 asks for C = 1, P0 for C = 0.
    const auto p1 = b.add_aux(instance + ".P1", gk::kXor);
    const auto p0 = b.add_aux(instance + ".P0", gk::kXor);

    b.react({{a.zero, 1}, {b_in.one, 1}}, {{a.zero, 1}, {b_in.one, 1}, {p1, 1}}, tag);
    b.react({{a.one, 1}, {b_in.zero, 1}}, {{a.one, 1}, {b_in.zero, 1}, {p1, 1}}, tag);
    b.react({{p1, 1}}, {}, tag);
    b.react({{p1, 1}, {c.zero, 1}}, {{c.one, 1}}, tag);
    b.react({{a.zero, 1}, {b_in.zero, 1}}, {{a.zero, 1}, {b_in.zero, 1}, {p0, 1}}, tag);
    b.react({{a.one, 1}, {b_in.one, 1}}, {{a.one, 1}, {b_in.one, 1}, {p0, 1}}, tag);
    b.react({{p0, 1}}, {}, tag);
    b.react({{p0, 1}, {c.one, 1}}, {{c.zero, 1}}, tag);
    return {gk::kXor, instance, {a, b_in}, c, {p1, p0}, tag};
}

GadgetHandle emit_copy(GadgetBuilder& b, const Pair& a, const Pair& c, const std::string& instance)
{
    require_pair(b, a);
    const Pair zero = frozen_pair(b, 0, instance + ".Z");
    GadgetHandle h = emit_xor(b, a, zero, c, instance);
    h.kind = gk::kCopy;
    h.inputs = {a};
    h.auxiliary.push_back(zero.zero);
    h.auxiliary.push_back(zero.one);
    return h;
}

GadgetHandle emit_f(GadgetBuilder& b, const Pair& a, const Pair& b_in, const Pair& c,
                    const std::string& instance)
{
    for (const auto* p : {&a, &b_in, &c})
        require_pair(b, *p);
    b.claim_output(c, instance);
    std::vector<std::string> aux;
    const Pair d = intermediate_product(b, a, b_in, instance + ".D", gk::kF, aux);
    const Pair e = intermediate_product(b, a.complement(), b_in, instance + ".E", gk::kF, aux);
    const Pair f = intermediate_product(b, a, b_in.complement(), instance + ".F", gk::kF, aux);
    const Pair g = intermediate_product(b, a.complement(), b_in.complement(), instance + ".G", gk::kF, aux);

    const auto tag = provenance_tag(gk::kF, instance);
    b.transfer({f.one}, c.zero, c.one, tag);
    b.transfer({e.one}, c.zero, c.one, tag);
    b.transfer({d.one}, c.one, c.zero, tag);
    b.transfer({g.one}, c.one, c.zero, tag);
    return {gk::kF, instance, {a, b_in}, c, std::move(aux), tag};
}

GadgetHandle emit_g(GadgetBuilder& b, const Pair& a, const Pair& b_in, const Pair& u, const Pair& c,
                    const std::string& instance)
{
    for (const auto* p : {&a, &b_in, &u, &c})
        require_pair(b, *p);
    b.claim_output(c, instance);
    std::vector<std::string> aux;
    // Branch u = 0: D = P_A P_B over G = P^c_A P^c_B.
    const Pair d = intermediate_product(b, a, b_in, instance + ".D", gk::kG, aux);
    const Pair g = intermediate_product(b, a.complement(), b_in.complement(), instance + ".G", gk::kG, aux);
    // Branch u = 1: E = P^c_A P_B over F = P_A P^c_B.
    const Pair e = intermediate_product(b, a.complement(), b_in, instance + ".E", gk::kG, aux);
    const Pair f = intermediate_product(b, a, b_in.complement(), instance + ".F", gk::kG, aux);

    const auto tag = provenance_tag(gk::kG, instance);
    divide_reactions(b, d, g, c, {u.zero}, tag);
    divide_reactions(b, e, f, c, {u.one}, tag);
    return {gk::kG, instance, {a, b_in, u}, c, std::move(aux), tag};
}

GadgetHandle emit_decision(GadgetBuilder& b, const Pair& a, const Pair& u,
                           const std::string& instance)
{
    require_pair(b, a);
    require_pair(b, u);
    if (!b.is_exclusive(u))
        throw BuilderError("decision pair (" + u.zero + ", " + u.one +
                           ") needs an exclusivity gadget first");
    b.claim_output(u, instance);
    const auto tag = provenance_tag(gk::kDecision, instance);
    const auto x = b.add_aux(instance + ".X", gk::kDecision);
    const auto y = b.add_aux(instance + ".Y", gk::kDecision);
    b.tag(x, std::string(kUnboundedTag));
    b.tag(y, std::string(kUnboundedTag));

    // X accumulates evidence for 1, Y for 0; the survivor steers U.
    b.react({{a.one, 1}}, {{a.one, 1}, {x, 1}}, tag);
    b.react({{a.zero, 1}}, {{a.zero, 1}, {y, 1}}, tag);
    b.react({{x, 1}, {y, 1}}, {}, tag);
    b.transfer({x}, u.zero, u.one, tag);
    b.transfer({y}, u.one, u.zero, tag);
    return {gk::kDecision, instance, {a}, u, {x, y}, tag};
}

Pair frozen_pair(GadgetBuilder& b, int value, const std::string& base)
{
    if (value != 0 && value != 1)
        throw BuilderError("frozen value must be 0 or 1");
    return b.add_pair(base, gk::kFrozen, value == 0 ? 1.0 : 0.0, value == 0 ? 0.0 : 1.0);
}

}  // namespace crnpolar
