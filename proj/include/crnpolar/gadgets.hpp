#pragma once

// Reusable reaction sub-networks over complementary species pairs.
//
// A probability P is carried by a pair (zero, one) as [one] / ([zero] + [one]).
// Every gadget writes a namespaced set of reactions into a GadgetBuilder and
// returns a handle describing what it touched. All rates are 1.
//
// Steady-state contracts (inputs normalized to total 1):
//   multiply   P_C = P_A P_B
//   divide     P_C = [A1] / ([A1] + [B1])
//   f          P_C = P_A (1 - P_B) + P_B (1 - P_A)
//   g          P_C = P_A P_B / (P_A P_B + (1-P_A)(1-P_B))        when U = 0
//                    (1-P_A) P_B / ((1-P_A) P_B + P_A (1-P_B))    when U = 1
//   xor        C = A xor B for digital A, B
//   decision   U = 1 iff [A1] > [A0]
//   exclusive  the smaller species of the pair is driven to zero

#include "crnpolar/crn.hpp"

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace crnpolar {

/// Complementary species pair A^0 / A^1.
struct Pair {
    std::string zero;
    std::string one;

    /// Same species with the roles swapped: P^c = 1 - P.
    Pair complement() const { return {one, zero}; }

    friend bool operator==(const Pair&, const Pair&) = default;
};

class BuilderError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

namespace gadget_kind {
inline constexpr const char* kExclusive = "exclusive";
inline constexpr const char* kMultiply = "multiply";
inline constexpr const char* kDivide = "divide";
inline constexpr const char* kXor = "xor";
inline constexpr const char* kCopy = "copy";
inline constexpr const char* kF = "f";
inline constexpr const char* kG = "g";
inline constexpr const char* kDecision = "decision";
inline constexpr const char* kFrozen = "frozen";
}  // namespace gadget_kind

struct GadgetHandle {
    std::string kind;
    std::string instance;
    std::vector<Pair> inputs;
    Pair output;
    std::vector<std::string> auxiliary;  // species private to this instance
    std::string provenance;              // "gadget=<kind>:<instance>"
};

/// Network builder that also tracks initial concentrations, which pairs are
/// already driven by a gadget, and which pairs carry an exclusivity gadget.
class GadgetBuilder {
public:
    /// Creates species `<base>0` and `<base>1` with the given initial values.
    Pair add_pair(const std::string& base, const std::string& owner, double init_zero = 0.5,
                  double init_one = 0.5);

    /// Adds a private auxiliary species (initial concentration 0).
    std::string add_aux(const std::string& name, const std::string& owner);

    /// `catalysts + from -> catalysts + to`.
    void transfer(const std::vector<std::string>& catalysts, const std::string& from,
                  const std::string& to, const std::string& provenance);

    void react(const std::vector<NamedTerm>& reactants, const std::vector<NamedTerm>& products,
               const std::string& provenance);

    /// Registers `pair` as written by one gadget; throws BuilderError if it
    /// already is.
    void claim_output(const Pair& pair, const std::string& instance);

    bool is_driven(const Pair& pair) const;
    bool is_exclusive(const Pair& pair) const;
    void mark_exclusive(const Pair& pair);

    void tag(const std::string& species, const std::string& tag) { net_.tag(species, tag); }
    bool contains(const std::string& species) const { return net_.contains(species); }

    void set_initial(const std::string& species, double value);

    std::size_t species_count() const { return net_.species_count(); }
    std::size_t reaction_count() const { return net_.reaction_count(); }

    /// Freezes the network and returns it with its initial state.
    std::pair<Network, State> build() &&;

private:
    static std::pair<std::string, std::string> key(const Pair& p);

    NetworkBuilder net_;
    std::vector<double> init_;
    std::set<std::pair<std::string, std::string>> driven_;
    std::set<std::pair<std::string, std::string>> exclusive_;
};

std::string provenance_tag(const std::string& kind, const std::string& instance);

/// A0 + A1 -> S, S + A0 -> 3 A0, S + A1 -> 3 A1 with a private S.
GadgetHandle emit_exclusive_bit(GadgetBuilder& b, const Pair& pair, const std::string& instance);

/// C <- A * B. B must be normalized to total 1.
GadgetHandle emit_multiply(GadgetBuilder& b, const Pair& a, const Pair& b_in, const Pair& c,
                           const std::string& instance);

/// C <- A / (A + B) on the `one` species. Scale-free in A and B.
GadgetHandle emit_divide(GadgetBuilder& b, const Pair& a, const Pair& b_in, const Pair& c,
                         const std::string& instance);

/// C <- A xor B. C should carry an exclusivity gadget.
GadgetHandle emit_xor(GadgetBuilder& b, const Pair& a, const Pair& b_in, const Pair& c,
                      const std::string& instance);

/// C <- A xor 0, using a private constant-zero pair.
GadgetHandle emit_copy(GadgetBuilder& b, const Pair& a, const Pair& c, const std::string& instance);

/// SC f message.
GadgetHandle emit_f(GadgetBuilder& b, const Pair& a, const Pair& b_in, const Pair& c,
                    const std::string& instance);

/// SC g message, branch selected by the decision pair U. Each branch's
/// division carries the matching U species as an extra catalyst.
GadgetHandle emit_g(GadgetBuilder& b, const Pair& a, const Pair& b_in, const Pair& u, const Pair& c,
                    const std::string& instance);

/// Hard decision U from the soft pair A. U must already carry an
/// exclusivity gadget. X and Y are tagged unbounded.
GadgetHandle emit_decision(GadgetBuilder& b, const Pair& a, const Pair& u,
                           const std::string& instance);

/// Constant pair holding `value`; no reactions.
Pair frozen_pair(GadgetBuilder& b, int value, const std::string& base);

}  // namespace crnpolar
