#include "crnpolar/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace crnpolar::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kDefaultSeed = 20190101;

std::string join(const std::vector<int>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string join(const std::vector<double>& v)
{
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s << (i ? "," : "") << v[i];
    return s.str();
}

std::string fmt(double v, int precision = 6)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw InputError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text)
{
    if (p.has_parent_path())
        fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + p.string());
    out << text;
}

// Published reference values for the (4,2) code with rows {0,2} frozen and
// priors (0.2, 0.4, 0.1, 0.2): {table value, value quoted in the text}.
struct Reported {
    double table;
    double text;
};

std::optional<std::vector<Reported>> reported_values(CircuitKind kind, const PolarCode& code,
                                                     const std::vector<double>& priors)
{
    const std::vector<double> reference{0.2, 0.4, 0.1, 0.2};
    if (code.stages() != 2 || code.frozen() != std::vector<int>{0, 2} || priors != reference)
        return std::nullopt;
    if (kind == CircuitKind::ScDecoder)
        return std::vector<Reported>{{0.249, 0.23}, {0.005, 0.0005}};
    if (kind == CircuitKind::MlDecoder)
        return std::vector<Reported>{{0.143, 0.143}, {0.027, 0.027}};
    return std::nullopt;
}

CompiledArtifact obtain_artifact(const RunConfig& cfg, const PolarCode& code)
{
    if (cfg.network_path.empty())
        return compile(cfg.kind, code, {cfg.share_subtrees});
    fs::path map_path = cfg.node_map_path.empty()
                            ? fs::path(cfg.network_path).parent_path() / "nodemap.csv"
                            : fs::path(cfg.node_map_path);
    return load_artifact(cfg.kind, code, read_file(cfg.network_path), read_file(map_path));
}

State initial_state(const RunConfig& cfg, const CompiledArtifact& art)
{
    if (cfg.kind == CircuitKind::Encoder) {
        if (cfg.message.empty())
            throw InputError("--message is required for encoder circuits");
        return with_message(art, cfg.message);
    }
    if (cfg.priors.empty())
        throw InputError("--priors is required for decoder circuits");
    return with_priors(art, cfg.priors);
}

std::string count_text(const CompiledArtifact& art, const CountReport& rep)
{
    std::ostringstream out;
    out << "circuit " << to_string(art.kind) << " n=" << art.code.stages()
        << " N=" << art.code.length() << " K=" << art.code.dimension()
        << " frozen=" << join(art.code.frozen()) << "\n";
    out << "reactions " << rep.reactions << "\n";
    out << "species " << rep.species << "\n";
    out << std::left << std::setw(14) << "kind" << std::right << std::setw(10) << "reactions"
        << std::setw(10) << "species" << "\n";
    for (const auto& [kind, c] : rep.by_kind)
        out << std::left << std::setw(14) << kind << std::right << std::setw(10) << c.reactions
            << std::setw(10) << c.species << "\n";
    return out.str();
}

nlohmann::json count_json(const CompiledArtifact& art, const CountReport& rep)
{
    nlohmann::json j;
    j["circuit"] = to_string(art.kind);
    j["n"] = art.code.stages();
    j["N"] = art.code.length();
    j["K"] = art.code.dimension();
    j["frozen"] = art.code.frozen();
    j["reactions"] = rep.reactions;
    j["species"] = rep.species;
    for (const auto& [kind, c] : rep.by_kind)
        j["by_kind"][kind] = {{"reactions", c.reactions}, {"species", c.species}};
    return j;
}

struct VerifyOutcome {
    bool converged = false;
    bool mismatch = false;
};

// Single verification run; prints one block to `out`.
VerifyOutcome verify_once(const RunConfig& cfg, const PolarCode& code, const CompiledArtifact& art,
                          const std::vector<double>& priors, std::ostream& out)
{
    const double tol = cfg.tol.value_or(default_tolerance(cfg.kind));
    State init;
    std::vector<double> expected;
    ScResult sc;
    if (cfg.kind == CircuitKind::Encoder) {
        init = with_message(art, cfg.message);
        for (auto bit : encode_message(code, cfg.message))
            expected.push_back(bit);
    } else {
        init = with_priors(art, priors);
        if (cfg.kind == CircuitKind::ScDecoder) {
            sc = sc_oracle(code, priors);
            for (int i : code.data())
                expected.push_back(sc.bits.posterior[static_cast<std::size_t>(i)]);
        } else {
            expected = ml_bitwise_posteriors(code, priors);
        }
    }

    SteadyStateOptions opts;
    opts.max_time = cfg.max_time;
    const auto ss = steady_state(art.network, init, opts);
    const auto got = output_readouts(art, ss.state);

    VerifyOutcome outcome;
    outcome.converged = ss.converged;
    out << (ss.converged ? "converged" : "NOT CONVERGED") << " at t=" << fmt(ss.state.time, 1)
        << "\n";

    const auto reported = cfg.kind == CircuitKind::Encoder
                              ? std::nullopt
                              : reported_values(cfg.kind, code, priors);
    out << std::left << std::setw(24) << "output" << std::right << std::setw(12) << "chemical"
        << std::setw(12) << "oracle" << std::setw(12) << "delta";
    if (reported)
        out << std::setw(16) << "reported_table" << std::setw(15) << "reported_text";
    out << "  result\n";

    auto row = [&](const std::string& name, double chem, double oracle,
                   const std::optional<Reported>& rep) {
        const double delta = std::abs(chem - oracle);
        const bool ok = delta <= tol;
        outcome.mismatch |= !ok;
        out << std::left << std::setw(24) << name << std::right << std::setw(12) << fmt(chem)
            << std::setw(12) << fmt(oracle) << std::setw(12) << sci(delta);
        if (reported) {
            if (rep)
                out << std::setw(16) << rep->table << std::setw(15) << rep->text;
            else
                out << std::setw(16) << "-" << std::setw(15) << "-";
        }
        out << "  " << (ok ? "ok" : "MISMATCH") << "\n";
    };

    for (std::size_t k = 0; k < got.size(); ++k) {
        std::string name;
        if (cfg.kind == CircuitKind::Encoder)
            name = "enc.x" + std::to_string(k);
        else
            name = (cfg.kind == CircuitKind::ScDecoder ? "sc.u" : "ml.u") +
                   std::to_string(code.data()[k]);
        std::optional<Reported> rep;
        if (reported)
            rep = (*reported)[k];
        row(name, got[k], expected[k], rep);
    }

    if (cfg.internal_nodes && cfg.kind == CircuitKind::ScDecoder) {
        // g nodes are only comparable once every decision is digital and
        // agrees with the oracle's hard decision.
        bool gates_settled = true;
        for (std::size_t k = 0; k < art.decisions.size(); ++k) {
            const double u = readout_probability(art.network, ss.state, art.decisions[k].zero,
                                                 art.decisions[k].one);
            const int want = sc.bits.decision[static_cast<std::size_t>(code.data()[k])];
            gates_settled &= std::abs(u - want) < 1e-2;
        }
        for (const auto& node : sc.nodes) {
            if (node.kind == 'g' && !gates_settled)
                continue;
            const auto* entry = find_node(art, node.node_id);
            if (!entry)
                continue;
            row(node.node_id, readout_probability(art.network, ss.state, entry->pair.zero, entry->pair.one),
                node.value, std::nullopt);
        }
    }
    return outcome;
}

}  // namespace

double default_tolerance(CircuitKind kind)
{
    switch (kind) {
    case CircuitKind::ScDecoder: return 2e-2;
    case CircuitKind::MlDecoder: return 5e-3;
    case CircuitKind::Encoder: return 1e-2;
    }
    return 1e-2;
}

PolarCode validate(const RunConfig& cfg)
{
    PolarCode code(cfg.n, cfg.frozen);
    if (cfg.kind != CircuitKind::Encoder && !cfg.priors.empty() &&
        cfg.priors.size() != static_cast<std::size_t>(code.length()))
        throw InputError("--priors needs " + std::to_string(code.length()) + " values");
    if (cfg.kind == CircuitKind::Encoder && !cfg.message.empty() &&
        cfg.message.size() != static_cast<std::size_t>(code.dimension()))
        throw InputError("--message needs " + std::to_string(code.dimension()) + " bits");
    if (!(cfg.record_dt > 0.0))
        throw InputError("--record-dt must be positive");
    if (cfg.tol && !(*cfg.tol > 0.0))
        throw InputError("--tol must be positive");
    return code;
}

CompiledArtifact load_artifact(CircuitKind kind, const PolarCode& code, const std::string& network_text,
                               const std::string& node_map_text)
{
    Network net = parse_network(network_text);
    State init = parse_initial_state(network_text, net);

    std::vector<NodeMapEntry> rows;
    std::istringstream in(node_map_text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (header) {
            header = false;
            if (line != "node_id,species_zero,species_one,oracle_role")
                throw InputError("node map has an unexpected header");
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ls(line);
        std::string col;
        while (std::getline(ls, col, ','))
            cols.push_back(col);
        if (cols.size() != 4)
            throw InputError("malformed node map row '" + line + "'");
        NodeMapEntry e{cols[0], {cols[1], cols[2]}, cols[3]};
        net.index_of(e.pair.zero);
        net.index_of(e.pair.one);
        rows.push_back(std::move(e));
    }

    std::vector<Pair> inputs, outputs, decisions;
    const std::string input_role = kind == CircuitKind::Encoder ? node_role::kMessage : node_role::kPrior;
    const std::string output_role = kind == CircuitKind::Encoder ? node_role::kCodeword : node_role::kPosterior;
    for (const auto& r : rows) {
        if (r.role == input_role)
            inputs.push_back(r.pair);
        else if (r.role == output_role)
            outputs.push_back(r.pair);
        else if (r.role == node_role::kDecision)
            decisions.push_back(r.pair);
    }
    const std::size_t want_in = kind == CircuitKind::Encoder ? static_cast<std::size_t>(code.dimension())
                                                             : static_cast<std::size_t>(code.length());
    const std::size_t want_out = kind == CircuitKind::Encoder ? static_cast<std::size_t>(code.length())
                                                              : static_cast<std::size_t>(code.dimension());
    if (inputs.size() != want_in || outputs.size() != want_out)
        throw InputError("node map does not match the code: " + std::to_string(inputs.size()) +
                         " inputs, " + std::to_string(outputs.size()) + " outputs");
    return CompiledArtifact{kind,           code,           std::move(net),      std::move(init),
                            std::move(inputs), std::move(outputs), std::move(decisions), std::move(rows)};
}

std::uint64_t sweep_seed()
{
    if (const char* s = std::getenv("CRNPOLAR_SEED")) {
        char* end = nullptr;
        const auto v = std::strtoull(s, &end, 10);
        if (end && *end == '\0' && end != s)
            return v;
        throw InputError("CRNPOLAR_SEED must be an unsigned integer");
    }
    return kDefaultSeed;
}

std::vector<std::vector<double>> random_priors(std::uint64_t seed, int count, int length)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.05, 0.95);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(count));
    for (auto& v : out) {
        v.resize(static_cast<std::size_t>(length));
        for (auto& p : v)
            p = dist(rng);
    }
    return out;
}

PolarCode count_table_code(int n)
{
    if (n == 2)
        return PolarCode(2, {0, 2});
    return half_rate_min_weight_code(n);
}

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            throw InputError("'" + item + "' is not an integer");
        }
        if (used != item.size())
            throw InputError("'" + item + "' is not an integer");
        out.push_back(v);
    }
    return out;
}

std::vector<double> parse_real_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw InputError("'" + item + "' is not a number");
        }
        if (used != item.size())
            throw InputError("'" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

std::vector<std::uint8_t> parse_bit_string(const std::string& text)
{
    std::vector<std::uint8_t> out;
    for (char c : text) {
        if (c == ',')
            continue;
        if (c != '0' && c != '1')
            throw InputError("message must be a string of 0 and 1");
        out.push_back(c == '1');
    }
    return out;
}

int cmd_compile(const RunConfig& cfg, std::ostream& out)
{
    try {
        const auto code = validate(cfg);
        const auto art = compile(cfg.kind, code, {cfg.share_subtrees});
        const auto rep = count_stats(art);
        const fs::path dir(cfg.out_dir);
        write_file(dir / "network.crn", serialize_network(art.network, &art.initial));
        write_file(dir / "nodemap.csv", node_map_csv(art));
        const auto text = count_text(art, rep);
        write_file(dir / "counts.txt", text);
        write_file(dir / "counts.json", count_json(art, rep).dump(2) + "\n");
        out << text;
        out << "wrote " << (dir / "network.crn").string() << ", nodemap.csv, counts.txt, counts.json\n";
        return kPass;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return kUsageError;
    }
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out)
{
    std::optional<CompiledArtifact> loaded;
    State init;
    try {
        if (!(cfg.t_end > 0.0))
            throw InputError("--t-end must be positive");
        const auto code = validate(cfg);
        loaded = obtain_artifact(cfg, code);
        init = initial_state(cfg, *loaded);
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return kUsageError;
    }

    const auto& art = *loaded;
    SimulateOptions opts;
    opts.record_interval = cfg.record_dt;
    Trajectory traj;
    try {
        traj = simulate(art.network, init, cfg.t_end, opts);
    } catch (const SimulationFailure& e) {
        out << "simulation failed: " << e.what() << " (last good t=" << e.last_good().time << ")\n";
        return kNotConverged;
    }
    const fs::path path = fs::path(cfg.out_dir) / "trajectory.csv";
    try {
        write_file(path, trajectory_csv(art.network, traj));
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return kUsageError;
    }

    const auto& last = traj.samples.back();
    out << "wrote " << path.string() << " (" << traj.samples.size() << " samples)\n";
    out << "readouts at t=" << last.time << "\n";
    for (const auto& e : art.node_map) {
        if (e.role != node_role::kPosterior && e.role != node_role::kCodeword &&
            e.role != node_role::kDecision && e.role != node_role::kLikelihood)
            continue;
        out << "  " << std::left << std::setw(20) << e.node_id << std::setw(12) << e.role
            << fmt(readout_probability(art.network, last, e.pair.zero, e.pair.one)) << "\n";
    }
    return kPass;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out)
{
    try {
        const auto code = validate(cfg);
        const auto art = obtain_artifact(cfg, code);

        std::vector<std::vector<double>> runs;
        if (cfg.kind == CircuitKind::Encoder) {
            if (cfg.message.empty())
                throw InputError("--message is required for encoder circuits");
            runs.push_back({});
        } else if (cfg.sweep > 0) {
            runs = random_priors(sweep_seed(), cfg.sweep, code.length());
        } else {
            if (cfg.priors.empty())
                throw InputError("--priors or --sweep is required for decoder circuits");
            runs.push_back(cfg.priors);
        }

        bool any_mismatch = false, any_unconverged = false;
        for (std::size_t r = 0; r < runs.size(); ++r) {
            out << "== verify " << to_string(cfg.kind) << " n=" << code.stages() << " frozen="
                << join(code.frozen());
            if (cfg.kind == CircuitKind::Encoder) {
                out << " message=";
                for (auto b : cfg.message)
                    out << int(b);
            } else {
                out << " priors=" << join(runs[r]);
            }
            out << "\n";
            const auto o = verify_once(cfg, code, art, runs[r], out);
            any_mismatch |= o.mismatch;
            any_unconverged |= !o.converged;
        }
        if (any_unconverged) {
            out << "RESULT NOT CONVERGED\n";
            return kNotConverged;
        }
        out << (any_mismatch ? "RESULT FAIL\n" : "RESULT PASS\n");
        return any_mismatch ? kToleranceViolation : kPass;
    } catch (const SimulationFailure& e) {
        out << "simulation failed: " << e.what() << " (last good t=" << e.last_good().time << ")\n";
        return kNotConverged;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return kUsageError;
    }
}

int cmd_count_table(const RunConfig& cfg, std::ostream& out)
{
    struct Published {
        std::size_t reactions, species;
    };
    // Reported sizes for N = 4, 8, 16.
    const Published sc_pub[] = {{222, 124}, {640, 356}, {1704, 912}};
    const Published ml_pub[] = {{44, 36}, {224, 152}, {4352, 2608}};

    struct Row {
        int N;
        CountReport sc, ml;
    };
    std::vector<Row> rows;
    for (int n = 2; n <= 4; ++n) {
        const auto code = count_table_code(n);
        rows.push_back({code.length(), count_stats(compile_sc_decoder(code)),
                        count_stats(compile_ml_decoder(code, {cfg.share_subtrees}))});
    }

    auto delta = [](std::size_t ours, std::size_t theirs) {
        const long long d = static_cast<long long>(ours) - static_cast<long long>(theirs);
        return (d > 0 ? "+" : "") + std::to_string(d);
    };
    out << "Half-rate decoders: reactions / species (ours, reported, delta)\n";
    out << std::left << std::setw(5) << "N" << std::setw(8) << "decoder" << std::right
        << std::setw(10) << "rx" << std::setw(10) << "rx_rep" << std::setw(9) << "rx_d"
        << std::setw(10) << "sp" << std::setw(10) << "sp_rep" << std::setw(9) << "sp_d"
        << "  frozen\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto code = count_table_code(static_cast<int>(i) + 2);
        for (int which = 0; which < 2; ++which) {
            const auto& rep = which == 0 ? rows[i].sc : rows[i].ml;
            const auto& pub = which == 0 ? sc_pub[i] : ml_pub[i];
            out << std::left << std::setw(5) << rows[i].N << std::setw(8) << (which == 0 ? "sc" : "ml")
                << std::right << std::setw(10) << rep.reactions << std::setw(10) << pub.reactions
                << std::setw(9) << delta(rep.reactions, pub.reactions) << std::setw(10) << rep.species
                << std::setw(10) << pub.species << std::setw(9) << delta(rep.species, pub.species)
                << "  " << join(code.frozen()) << "\n";
        }
    }

    bool ok = true;
    auto check = [&](const std::string& what, bool cond) {
        out << (cond ? "ok    " : "FAIL  ") << what << "\n";
        ok &= cond;
    };
    const auto& small = rows.front();
    const auto& large = rows.back();
    check("N=4: ml reactions < sc reactions", small.ml.reactions < small.sc.reactions);
    check("N=4: ml species < sc species", small.ml.species < small.sc.species);
    check("N=16: ml reactions > sc reactions", large.ml.reactions > large.sc.reactions);
    check("N=16: ml species > sc species", large.ml.species > large.sc.species);

    for (const auto& r : rows) {
        for (int which = 0; which < 2; ++which) {
            const auto& rep = which == 0 ? r.sc : r.ml;
            std::size_t rx = 0, sp = 0;
            out << "breakdown N=" << r.N << ' ' << (which == 0 ? "sc" : "ml") << ":";
            for (const auto& [kind, c] : rep.by_kind) {
                out << ' ' << kind << '=' << c.reactions << '/' << c.species;
                rx += c.reactions;
                sp += c.species;
            }
            out << "\n";
            check("breakdown accounts for every reaction and species (N=" + std::to_string(r.N) +
                      ")",
                  rx == rep.reactions && sp == rep.species);
        }
    }
    return ok ? kPass : kToleranceViolation;
}

}  // namespace crnpolar::cli
