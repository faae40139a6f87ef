#include "support.hpp"

#include <doctest.h>

using namespace crnpolar;
using namespace crnpolar::test;

namespace {

struct Rig {
    GadgetBuilder b;
    Pair in(const std::string& base, double p, double total = 1.0)
    {
        return b.add_pair(base, "input", total * (1.0 - p), total * p);
    }
    Pair out(const std::string& base, double p = 0.5) { return b.add_pair(base, "output", 1.0 - p, p); }
};

struct Settled {
    Network net;
    SteadyState ss;
    double p(const Pair& pair) const { return readout(net, ss.state, pair); }
    double c(const std::string& species) const { return concentration(net, ss.state, species); }
};

Settled run(Rig& r, double max_time = 2000.0)
{
    auto [net, init] = std::move(r.b).build();
    auto ss = settle(net, init, max_time);
    return {std::move(net), std::move(ss)};
}

// Reference values computed directly from the definitions.
double ref_f(double a, double b) { return a * (1 - b) + b * (1 - a); }
double ref_g(double a, double b, int u)
{
    const double num = u == 0 ? a * b : (1 - a) * b;
    const double den = u == 0 ? a * b + (1 - a) * (1 - b) : (1 - a) * b + a * (1 - b);
    return num / den;
}

}  // namespace

TEST_CASE("exclusive bit keeps the majority")
{
    for (auto [z, o, expect] : {std::tuple{0.3, 0.7, 1}, std::tuple{0.8, 0.2, 0}, std::tuple{0.45, 0.55, 1}}) {
        Rig r;
        const Pair p = r.b.add_pair("A", "input", z, o);
        emit_exclusive_bit(r.b, p, "ex");
        const auto s = run(r);
        CHECK(s.ss.converged);
        CHECK(s.p(p) == doctest::Approx(expect).epsilon(1e-3));
    }
}

TEST_CASE("multiply")
{
    SUBCASE("half times half")
    {
        Rig r;
        const Pair a = r.in("A", 0.5), b = r.in("B", 0.5), c = r.out("C");
        emit_multiply(r.b, a, b, c, "m");
        const auto s = run(r);
        CHECK(s.ss.converged);
        CHECK(s.p(c) == doctest::Approx(0.25).epsilon(1e-4));
    }
    SUBCASE("independent of the C starting split")
    {
        for (double c0 : {0.0, 0.3, 1.0}) {
            Rig r;
            const Pair a = r.in("A", 0.6), b = r.in("B", 0.7), c = r.out("C", c0);
            emit_multiply(r.b, a, b, c, "m");
            const auto s = run(r);
            CHECK(std::abs(s.p(c) - 0.42) < 1e-4);
        }
    }
}

TEST_CASE("divide is scale free")
{
    for (double scale : {0.1, 1.0, 10.0}) {
        Rig r;
        const Pair a = r.b.add_pair("A", "input", 0.0, 0.3 * scale);
        const Pair b = r.b.add_pair("B", "input", 0.0, 0.6 * scale);
        const Pair c = r.out("C");
        emit_divide(r.b, a, b, c, "d");
        const auto s = run(r);
        CHECK(s.ss.converged);
        CHECK(std::abs(s.p(c) - 1.0 / 3.0) < 1e-5);
    }
}

TEST_CASE("xor and copy truth tables")
{
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            Rig r;
            const Pair a = r.in("A", x), b = r.in("B", y), c = r.out("C");
            emit_xor(r.b, a, b, c, "x");
            emit_exclusive_bit(r.b, c, "x.excl");
            const auto s = run(r);
            CAPTURE(x);
            CAPTURE(y);
            CHECK(s.ss.converged);
            CHECK(std::abs(s.p(c) - (x ^ y)) < 1e-3);
        }
    for (int x = 0; x < 2; ++x) {
        Rig r;
        const Pair a = r.in("A", x), c = r.out("C", 1.0 - x);
        const auto h = emit_copy(r.b, a, c, "cp");
        emit_exclusive_bit(r.b, c, "cp.excl");
        const auto s = run(r);
        CHECK(h.kind == "copy");
        CHECK(std::abs(s.p(c) - x) < 1e-3);
    }
}

TEST_CASE("f gadget")
{
    SUBCASE("documented example")
    {
        Rig r;
        const Pair a = r.in("A", 0.2), b = r.in("B", 0.1), c = r.out("C");
        emit_f(r.b, a, b, c, "f");
        const auto s = run(r);
        CHECK(s.ss.converged);
        CHECK(std::abs(s.p(c) - 0.26) < 1e-4);
    }
    SUBCASE("certain inputs")
    {
        Rig r;
        const Pair a = r.in("A", 1.0), b = r.in("B", 1.0), c = r.out("C");
        emit_f(r.b, a, b, c, "f");
        CHECK(std::abs(run(r).p(c)) < 1e-4);
    }
}

TEST_CASE("g gadget follows the selected branch")
{
    for (int u = 0; u < 2; ++u) {
        Rig r;
        const Pair a = r.in("A", 0.2), b = r.in("B", 0.1), c = r.out("C");
        const Pair up = frozen_pair(r.b, u, "U");
        emit_g(r.b, a, b, up, c, "g");
        const auto s = run(r);
        CAPTURE(u);
        CHECK(s.ss.converged);
        CHECK(std::abs(s.p(c) - ref_g(0.2, 0.1, u)) < 1e-4);
    }
    // 0.2 * 0.1 / (0.02 + 0.72) and 0.8 * 0.1 / (0.08 + 0.18)
    CHECK(ref_g(0.2, 0.1, 0) == doctest::Approx(0.027027).epsilon(1e-4));
    CHECK(ref_g(0.2, 0.1, 1) == doctest::Approx(0.307692).epsilon(1e-4));
}

TEST_CASE("decision gadget")
{
    for (auto [p, expect] : {std::pair{0.7, 1}, std::pair{0.2, 0}, std::pair{0.62, 1}, std::pair{0.38, 0}}) {
        Rig r;
        const Pair a = r.in("A", p), u = r.out("U");
        emit_exclusive_bit(r.b, u, "u.excl");
        const auto h = emit_decision(r.b, a, u, "dec");
        const auto s = run(r);
        CAPTURE(p);
        CHECK(s.ss.converged);
        CHECK(std::abs(s.p(u) - expect) < 1e-3);
        REQUIRE(h.auxiliary.size() == 2);
        CHECK(s.net.has_tag(s.net.index_of(h.auxiliary[0]), kUnboundedTag));
    }
}

TEST_CASE("decision requires an exclusivity gadget on U")
{
    Rig r;
    const Pair a = r.in("A", 0.7), u = r.out("U");
    CHECK_THROWS_AS(emit_decision(r.b, a, u, "dec"), BuilderError);
}

TEST_CASE("single writer and duplicate exclusivity are errors")
{
    Rig r;
    const Pair a = r.in("A", 0.5), b = r.in("B", 0.5), c = r.out("C");
    emit_multiply(r.b, a, b, c, "m1");
    CHECK_THROWS_AS(emit_f(r.b, a, b, c, "m2"), BuilderError);
    emit_exclusive_bit(r.b, a, "e1");
    CHECK_THROWS_AS(emit_exclusive_bit(r.b, a, "e2"), BuilderError);
    CHECK_THROWS_AS(emit_multiply(r.b, a, b, Pair{"Q0", "Q1"}, "m3"), BuilderError);
    CHECK_THROWS_AS(frozen_pair(r.b, 2, "Z"), BuilderError);
}

TEST_CASE("gadget species are namespaced by instance")
{
    Rig r;
    const Pair a = r.in("A", 0.5), b = r.in("B", 0.5);
    const Pair c1 = r.out("C1x"), c2 = r.out("C2x");
    const auto h1 = emit_f(r.b, a, b, c1, "one");
    const auto h2 = emit_f(r.b, a, b, c2, "two");
    for (const auto& s : h1.auxiliary)
        CHECK(s.rfind("one.", 0) == 0);
    for (const auto& s : h2.auxiliary)
        CHECK(s.rfind("two.", 0) == 0);
    CHECK(h1.provenance == "gadget=f:one");
    const auto [net, init] = std::move(r.b).build();
    std::size_t tagged = 0;
    for (std::size_t i = 0; i < net.reaction_count(); ++i)
        tagged += net.provenance(i).find(":one") != std::string::npos;
    // four internal multiplies of three reactions plus four transfers
    CHECK(tagged == 16);
}

TEST_CASE("property: gadgets conserve every pair total and stay nonnegative")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Rig r;
        const double pa = uniform(rng, 0.05, 0.95), pb = uniform(rng, 0.05, 0.95);
        const Pair a = r.in("A", pa), b = r.in("B", pb);
        const Pair cf = r.out("CF", uniform(rng, 0, 1)), cg = r.out("CG", uniform(rng, 0, 1));
        const Pair u = frozen_pair(r.b, static_cast<int>(rng() % 2), "U");
        const auto hf = emit_f(r.b, a, b, cf, "f");
        const auto hg = emit_g(r.b, a, b, u, cg, "g");
        auto [net, init] = std::move(r.b).build();
        std::vector<Pair> pairs{a, b, cf, cg, u};
        for (const auto* h : {&hf, &hg})
            for (std::size_t k = 0; k + 1 < h->auxiliary.size(); k += 2)
                pairs.push_back({h->auxiliary[k], h->auxiliary[k + 1]});
        std::vector<double> totals;
        for (const auto& p : pairs)
            totals.push_back(concentration(net, init, p.zero) + concentration(net, init, p.one));
        const auto traj = simulate(net, init, 40.0);
        CHECK(nonnegative(traj));
        for (const auto& s : traj.samples)
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                const double t = concentration(net, s, pairs[k].zero) + concentration(net, s, pairs[k].one);
                CHECK(std::abs(t - totals[k]) < 1e-5);
            }
    }
}

TEST_CASE("property: multiply reaches the product for random inputs")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        Rig r;
        const double pa = uniform(rng, 0.0, 1.0), pb = uniform(rng, 0.0, 1.0);
        const Pair a = r.in("A", pa, uniform(rng, 0.5, 2.0)), b = r.in("B", pb);
        const Pair c = r.out("C", uniform(rng, 0.0, 1.0));
        emit_multiply(r.b, a, b, c, "m");
        const auto s = run(r);
        CAPTURE(pa);
        CAPTURE(pb);
        CHECK(s.ss.converged);
        CHECK(std::abs(s.p(c) - pa * pb) < 1e-4);
    }
}

TEST_CASE("property: f and g reach their reference values for random inputs")
{
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        Rig r;
        const double pa = uniform(rng, 0.05, 0.95), pb = uniform(rng, 0.05, 0.95);
        const int u = static_cast<int>(rng() % 2);
        const Pair a = r.in("A", pa), b = r.in("B", pb);
        const Pair cf = r.out("CF"), cg = r.out("CG");
        const Pair up = frozen_pair(r.b, u, "U");
        emit_f(r.b, a, b, cf, "f");
        emit_g(r.b, a, b, up, cg, "g");
        const auto s = run(r);
        CAPTURE(pa);
        CAPTURE(pb);
        CAPTURE(u);
        CHECK(s.ss.converged);
        CHECK(std::abs(s.p(cf) - ref_f(pa, pb)) < 1e-4);
        CHECK(std::abs(s.p(cg) - ref_g(pa, pb, u)) < 1e-4);
    }
}
