#include "crnpolar/crn.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace crnpolar {

ParseError::ParseError(const std::string& msg, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + msg),
      line_(line), column_(column)
{
}

namespace {

constexpr int kMaxStoichiometry = 3;

struct Token {
    std::string text;
    std::size_t column;  // 1-based
};

std::vector<Token> split_ws(std::string_view line, std::size_t offset)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        if (i > start)
            out.push_back({std::string(line.substr(start, i - start)), offset + start + 1});
    }
    return out;
}

bool all_digits(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

double parse_real(const Token& tok, std::size_t line_no)
{
    double value = 0.0;
    const char* first = tok.text.data();
    const char* last = first + tok.text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ParseError("expected a number, got '" + tok.text + "'", line_no, tok.column);
    return value;
}

// One side of a reaction: "0" or "[k] Name + [k] Name ...".
std::vector<NamedTerm> parse_side(std::string_view text, std::size_t offset, std::size_t line_no,
                                  std::vector<std::pair<std::string, std::size_t>>& names_seen)
{
    const auto toks = split_ws(text, offset);
    if (toks.empty())
        throw ParseError("empty reaction side", line_no, offset + 1);
    if (toks.size() == 1 && toks[0].text == "0")
        return {};

    std::vector<NamedTerm> terms;
    std::size_t i = 0;
    while (i < toks.size()) {
        int count = 1;
        if (all_digits(toks[i].text)) {
            const auto& tk = toks[i];
            count = std::stoi(tk.text);
            if (count < 1)
                throw ParseError("stoichiometric count must be at least 1", line_no, tk.column);
            if (count > kMaxStoichiometry)
                throw ParseError("stoichiometric count " + tk.text + " exceeds the limit of " +
                                     std::to_string(kMaxStoichiometry),
                                 line_no, tk.column);
            ++i;
            if (i >= toks.size())
                throw ParseError("missing species after multiplier", line_no, tk.column);
        }
        const auto& name = toks[i];
        if (name.text == "+")
            throw ParseError("unexpected '+'", line_no, name.column);
        if (!is_valid_species_name(name.text) || all_digits(name.text))
            throw ParseError("invalid species name '" + name.text + "'", line_no, name.column);
        terms.emplace_back(name.text, count);
        names_seen.emplace_back(name.text, name.column);
        ++i;
        if (i < toks.size()) {
            if (toks[i].text != "+")
                throw ParseError("expected '+', got '" + toks[i].text + "'", line_no, toks[i].column);
            ++i;
            if (i >= toks.size())
                throw ParseError("dangling '+'", line_no, toks[i - 1].column);
        }
    }
    return terms;
}

struct Line {
    std::string_view body;     // text before any '#'
    std::string_view comment;  // text after '#', trimmed
    std::size_t number;
};

std::vector<Line> split_lines(std::string_view text)
{
    std::vector<Line> out;
    std::size_t start = 0, number = 1;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view raw = text.substr(start, end - start);
        if (!raw.empty() && raw.back() == '\r')
            raw.remove_suffix(1);
        Line ln{raw, {}, number};
        if (auto hash = raw.find('#'); hash != std::string_view::npos) {
            ln.body = raw.substr(0, hash);
            auto c = raw.substr(hash + 1);
            while (!c.empty() && std::isspace(static_cast<unsigned char>(c.front())))
                c.remove_prefix(1);
            while (!c.empty() && std::isspace(static_cast<unsigned char>(c.back())))
                c.remove_suffix(1);
            ln.comment = c;
        }
        out.push_back(ln);
        if (end == text.size())
            break;
        start = end + 1;
        ++number;
    }
    return out;
}

bool blank(std::string_view s)
{
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::string_view trim_left(std::string_view s, std::size_t& offset)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
        ++offset;
    }
    return s;
}

}  // namespace

Network parse_network(std::string_view text, const ParseOptions& opts)
{
    struct PendingReaction {
        std::vector<NamedTerm> reactants, products;
        double rate;
        std::string provenance;
        std::vector<std::pair<std::string, std::size_t>> names;
        std::size_t line;
    };

    std::vector<std::string> declared;
    std::map<std::string, std::string> owners;
    std::vector<std::pair<std::string, std::string>> tags;  // (species, tag)
    std::vector<PendingReaction> pending;

    for (const auto& ln : split_lines(text)) {
        std::size_t offset = 0;
        const auto body = trim_left(ln.body, offset);
        if (blank(body))
            continue;

        if (body.front() == '.') {
            const auto toks = split_ws(body, offset);
            const auto& kw = toks[0].text;
            if (kw == ".species") {
                for (std::size_t i = 1; i < toks.size(); ++i) {
                    if (!is_valid_species_name(toks[i].text))
                        throw ParseError("invalid species name '" + toks[i].text + "'", ln.number,
                                         toks[i].column);
                    declared.push_back(toks[i].text);
                }
            } else if (kw == ".owner" || kw == ".tag") {
                if (toks.size() < 2)
                    throw ParseError(kw + " needs a value", ln.number, toks[0].column);
                for (std::size_t i = 2; i < toks.size(); ++i) {
                    if (kw == ".owner")
                        owners[toks[i].text] = toks[1].text;
                    else
                        tags.emplace_back(toks[i].text, toks[1].text);
                }
            } else if (kw == ".init") {
                if (toks.size() != 3)
                    throw ParseError(".init expects a species and a value", ln.number, toks[0].column);
                parse_real(toks[2], ln.number);
            } else {
                throw ParseError("unknown directive '" + kw + "'", ln.number, toks[0].column);
            }
            continue;
        }

        const auto arrow = body.find("->");
        if (arrow == std::string_view::npos)
            throw ParseError("expected '->'", ln.number, offset + 1);
        PendingReaction pr;
        pr.line = ln.number;
        pr.rate = 1.0;
        std::string_view lhs = body.substr(0, arrow);
        std::string_view rhs = body.substr(arrow + 2);
        const std::size_t rhs_offset = offset + arrow + 2;
        if (auto at = rhs.find('@'); at != std::string_view::npos) {
            const auto rate_toks = split_ws(rhs.substr(at + 1), rhs_offset + at + 1);
            if (rate_toks.size() != 1)
                throw ParseError("expected a single rate after '@'", ln.number, rhs_offset + at + 1);
            pr.rate = parse_real(rate_toks[0], ln.number);
            if (!(pr.rate > 0.0))
                throw ParseError("rate must be positive", ln.number, rate_toks[0].column);
            rhs = rhs.substr(0, at);
        }
        pr.reactants = parse_side(lhs, offset, ln.number, pr.names);
        pr.products = parse_side(rhs, rhs_offset, ln.number, pr.names);
        if (pr.reactants.empty() && pr.products.empty())
            throw ParseError("reaction 0 -> 0 has no species", ln.number, offset + 1);
        if (ln.comment.starts_with("gadget="))
            pr.provenance = std::string(ln.comment);
        pending.push_back(std::move(pr));
    }

    auto owner_of = [&](const std::string& name) {
        auto it = owners.find(name);
        return it == owners.end() ? std::string{} : it->second;
    };
    NetworkBuilder b;
    for (const auto& name : declared)
        b.ensure_species(name, owner_of(name));
    const bool check_declared = opts.strict && !declared.empty();
    for (const auto& pr : pending)
        for (const auto& [name, column] : pr.names) {
            if (b.contains(name))
                continue;
            if (check_declared)
                throw ParseError("undeclared species '" + name + "'", pr.line, column);
            b.add_species(name, owner_of(name));
        }
    for (const auto& pr : pending)
        b.add_reaction(pr.reactants, pr.products, pr.rate, pr.provenance);
    for (const auto& [name, tag] : tags) {
        if (!b.contains(name))
            throw ConfigError("tag for unknown species '" + name + "'");
        b.tag(name, tag);
    }
    Network net = std::move(b).build();
    return net;
}

State parse_initial_state(std::string_view text, const Network& net)
{
    State s = zero_state(net);
    for (const auto& ln : split_lines(text)) {
        std::size_t offset = 0;
        const auto body = trim_left(ln.body, offset);
        if (!body.starts_with(".init"))
            continue;
        const auto toks = split_ws(body, offset);
        if (toks.size() != 3)
            throw ParseError(".init expects a species and a value", ln.number, toks[0].column);
        const auto idx = net.find(toks[1].text);
        if (!idx)
            throw ParseError("unknown species '" + toks[1].text + "'", ln.number, toks[1].column);
        const double v = parse_real(toks[2], ln.number);
        if (!(v >= 0.0))
            throw ParseError("initial concentration must be nonnegative", ln.number, toks[2].column);
        s.conc[*idx] = v;
    }
    return s;
}

namespace {

std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_side(const Network& net, const std::vector<Term>& side)
{
    if (side.empty())
        return "0";
    std::string out;
    for (std::size_t i = 0; i < side.size(); ++i) {
        if (i)
            out += " + ";
        if (side[i].count != 1)
            out += std::to_string(side[i].count) + " ";
        out += net.species()[side[i].species];
    }
    return out;
}

}  // namespace

std::string serialize_network(const Network& net, const State* init)
{
    std::ostringstream out;
    out << "# " << net.species_count() << " species, " << net.reaction_count() << " reactions\n";

    for (std::size_t i = 0; i < net.species_count(); ++i)
        out << ".species " << net.species()[i] << "\n";

    std::map<std::string, std::vector<std::string>> by_owner, by_tag;
    for (std::size_t i = 0; i < net.species_count(); ++i) {
        if (!net.owner(i).empty())
            by_owner[net.owner(i)].push_back(net.species()[i]);
        for (const auto& t : net.tags(i))
            by_tag[t].push_back(net.species()[i]);
    }
    for (const auto& [owner, names] : by_owner) {
        out << ".owner " << owner;
        for (const auto& n : names)
            out << ' ' << n;
        out << "\n";
    }
    for (const auto& [tag, names] : by_tag) {
        out << ".tag " << tag;
        for (const auto& n : names)
            out << ' ' << n;
        out << "\n";
    }
    if (init) {
        if (init->conc.size() != net.species_count())
            throw ConfigError("initial state does not match network");
        for (std::size_t i = 0; i < net.species_count(); ++i)
            if (init->conc[i] != 0.0)
                out << ".init " << net.species()[i] << ' ' << format_real(init->conc[i]) << "\n";
    }

    for (std::size_t r = 0; r < net.reaction_count(); ++r) {
        const auto& rx = net.reactions()[r];
        out << format_side(net, rx.reactants) << " -> " << format_side(net, rx.products);
        if (rx.rate != 1.0)
            out << " @ " << format_real(rx.rate);
        if (!net.provenance(r).empty())
            out << "  # " << net.provenance(r);
        out << "\n";
    }
    return out.str();
}

std::string trajectory_csv(const Network& net, const Trajectory& traj)
{
    std::vector<std::size_t> order(net.species_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return net.species()[a] < net.species()[b]; });

    std::ostringstream out;
    out << "time";
    for (auto i : order)
        out << ',' << net.species()[i];
    out << "\n";
    char buf[32];
    for (const auto& s : traj.samples) {
        std::snprintf(buf, sizeof buf, "%.12g", s.time);
        out << buf;
        for (auto i : order) {
            std::snprintf(buf, sizeof buf, "%.12g", s.conc[i]);
            out << ',' << buf;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace crnpolar
