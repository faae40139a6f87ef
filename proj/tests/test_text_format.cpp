#include "support.hpp"

#include <doctest.h>

using namespace crnpolar;
using namespace crnpolar::test;

TEST_CASE("parse reaction lines")
{
    const auto net = parse_network("# header\n"
                                   "A + B -> C @ 2.5\n"
                                   "\n"
                                   "S + A0 -> 3 A0\n"
                                   "A + B -> 0\n"
                                   "0 -> A\n"
                                   "A -> A + X  # gadget=decision:sc.u1\n");
    REQUIRE(net.reaction_count() == 5);
    CHECK(net.reactions()[0].rate == 2.5);
    CHECK(net.reactions()[1].products == std::vector<Term>{{net.index_of("A0"), 3}});
    CHECK(net.reactions()[2].products.empty());
    CHECK(net.reactions()[3].reactants.empty());
    CHECK(net.provenance(4) == "gadget=decision:sc.u1");
    CHECK(net.provenance(0).empty());
}

TEST_CASE("directives carry metadata")
{
    const std::string text = ".species A B X\n"
                             ".owner multiply A B\n"
                             ".tag unbounded X\n"
                             ".init A 0.25\n"
                             "A + B -> X\n";
    const auto net = parse_network(text);
    CHECK(net.species() == std::vector<std::string>{"A", "B", "X"});
    CHECK(net.owner(net.index_of("A")) == "multiply");
    CHECK(net.owner(net.index_of("X")).empty());
    CHECK(net.has_tag(net.index_of("X"), kUnboundedTag));
    const auto init = parse_initial_state(text, net);
    CHECK(init.conc == std::vector<double>{0.25, 0.0, 0.0});
}

TEST_CASE("stoichiometry above 3 is rejected")
{
    CHECK_NOTHROW(parse_network("3 A -> B"));
    try {
        parse_network("A -> B\n4 A -> B\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 1);
    }
}

TEST_CASE("syntax errors report line and column")
{
    struct Case {
        const char* text;
        std::size_t line;
    };
    for (const Case c : {Case{"A + -> B", 1}, Case{"A B", 1}, Case{"A -> B\nA => B", 2},
                         Case{"A -> B @ x", 1}, Case{"A -> B @ -1", 1}, Case{"A$ -> B", 1},
                         Case{"\n\n.init A", 3}}) {
        CAPTURE(c.text);
        try {
            parse_network(c.text);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == c.line);
            CHECK(e.column() >= 1);
        }
    }
}

TEST_CASE("strict mode rejects undeclared species")
{
    const std::string text = ".species A B\nA -> C\n";
    CHECK_NOTHROW(parse_network(text));
    CHECK_THROWS_AS(parse_network(text, ParseOptions{true}), ParseError);
    // Without a declaration section strict mode has nothing to check against.
    CHECK_NOTHROW(parse_network("A -> C", ParseOptions{true}));
}

TEST_CASE("property: serialize then parse reproduces the network")
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        NetworkBuilder b;
        const int ns = 1 + static_cast<int>(rng() % 6);
        std::vector<std::string> names;
        for (int i = 0; i < ns; ++i) {
            names.push_back("s" + std::to_string(i) + ".x" + std::to_string(rng() % 2));
            if (b.contains(names.back())) {
                names.pop_back();
                continue;
            }
            b.add_species(names.back(), rng() % 2 ? "multiply" : "");
            if (rng() % 4 == 0)
                b.tag(names.back(), std::string(kUnboundedTag));
        }
        const int nr = static_cast<int>(rng() % 8);
        for (int r = 0; r < nr; ++r) {
            std::vector<NamedTerm> lhs, rhs;
            // Distinct species per side so merged counts stay within the limit.
            for (std::size_t k = 0; k < names.size(); ++k) {
                if (rng() % 3 == 0)
                    lhs.emplace_back(names[k], 1 + static_cast<int>(rng() % 3));
                if (rng() % 3 == 0)
                    rhs.emplace_back(names[k], 1 + static_cast<int>(rng() % 3));
            }
            if (lhs.empty() && rhs.empty())
                lhs.emplace_back(names[0], 1);
            const double rate = rng() % 2 ? 1.0 : uniform(rng, 0.01, 10.0);
            b.add_reaction(lhs, rhs, rate, rng() % 2 ? "gadget=f:t" + std::to_string(r) : "");
        }
        const auto net = std::move(b).build();
        State init = zero_state(net);
        for (auto& c : init.conc)
            c = rng() % 2 ? uniform(rng, 0.0, 1.0) : 0.0;

        const auto text = serialize_network(net, &init);
        const auto back = parse_network(text, ParseOptions{true});
        REQUIRE(back.species() == net.species());
        REQUIRE(back.reaction_count() == net.reaction_count());
        for (std::size_t r = 0; r < net.reaction_count(); ++r) {
            const auto& x = net.reactions()[r];
            const auto& y = back.reactions()[r];
            CHECK(x.reactants == y.reactants);
            CHECK(x.products == y.products);
            CHECK(x.rate == y.rate);
            CHECK(net.provenance(r) == back.provenance(r));
        }
        for (std::size_t i = 0; i < net.species_count(); ++i) {
            CHECK(net.owner(i) == back.owner(i));
            CHECK(net.tags(i) == back.tags(i));
        }
        CHECK(parse_initial_state(text, back).conc == init.conc);
        CHECK(serialize_network(back, &init) == text);
    }
}

TEST_CASE("trajectory CSV has a sorted header and one row per sample")
{
    const auto net = parse_network("B -> A");
    const auto traj = simulate(net, state_of(net, {{"B", 1}}), 1.0);
    const auto csv = trajectory_csv(net, traj);
    CHECK(csv.rfind("time,A,B\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == traj.samples.size() + 1);
}
