#include "crnpolar/compiler.hpp"

#include <sstream>

namespace crnpolar {

namespace gk = gadget_kind;

std::string to_string(CircuitKind kind)
{
    switch (kind) {
    case CircuitKind::Encoder: return "encoder";
    case CircuitKind::ScDecoder: return "sc";
    case CircuitKind::MlDecoder: return "ml";
    }
    return "?";
}

CircuitKind parse_circuit_kind(const std::string& text)
{
    if (text == "encoder")
        return CircuitKind::Encoder;
    if (text == "sc")
        return CircuitKind::ScDecoder;
    if (text == "ml")
        return CircuitKind::MlDecoder;
    throw InputError("unknown circuit kind '" + text + "' (expected sc, ml or encoder)");
}

namespace {

constexpr const char* kPriorOwner = "prior";
constexpr const char* kMessageOwner = "message";
constexpr const char* kMarginalize = "marginalize";

std::string bit_string(std::span<const std::uint8_t> bits)
{
    std::string s;
    for (auto b : bits)
        s += b ? '1' : '0';
    return s;
}

CompiledArtifact finish(CircuitKind kind, const PolarCode& code, GadgetBuilder&& b,
                        std::vector<Pair> inputs, std::vector<Pair> outputs,
                        std::vector<Pair> decisions, std::vector<NodeMapEntry> node_map)
{
    auto [net, init] = std::move(b).build();
    return CompiledArtifact{kind,
                            code,
                            std::move(net),
                            std::move(init),
                            std::move(inputs),
                            std::move(outputs),
                            std::move(decisions),
                            std::move(node_map)};
}

// Partial-sum butterfly: returns (upper xor lower, copy(lower)).
std::vector<Pair> combine(GadgetBuilder& b, const std::vector<Pair>& upper,
                          const std::vector<Pair>& lower, const std::string& prefix,
                          const char* role, std::vector<NodeMapEntry>& node_map)
{
    const std::size_t half = upper.size();
    std::vector<Pair> out(2 * half);
    for (std::size_t j = 0; j < 2 * half; ++j) {
        const std::string inst = prefix + ".s" + std::to_string(j);
        const bool is_xor = j < half;
        out[j] = b.add_pair(inst + ".C", is_xor ? gk::kXor : gk::kCopy);
        emit_exclusive_bit(b, out[j], inst + ".excl");
        if (is_xor)
            emit_xor(b, upper[j], lower[j], out[j], inst);
        else
            emit_copy(b, lower[j - half], out[j], inst);
        node_map.push_back({inst, out[j], role});
    }
    return out;
}

class ScLowering {
public:
    ScLowering(GadgetBuilder& b, const PolarCode& code) : b_(b), code_(code)
    {
        const auto N = static_cast<std::size_t>(code.length());
        posterior_.resize(N);
        decision_.resize(N);
    }

    std::vector<Pair> decode(const std::vector<Pair>& leaves, int depth, int offset, bool need_partial)
    {
        const std::size_t m = leaves.size();
        if (m == 1)
            return {decide(leaves[0], offset)};

        const std::size_t half = m / 2;
        std::vector<Pair> upper(half), lower(half);
        for (std::size_t j = 0; j < half; ++j) {
            const auto id = sc_node_id(depth, offset, 'f', static_cast<int>(j));
            upper[j] = b_.add_pair(id + ".C", gk::kF);
            emit_f(b_, leaves[j], leaves[j + half], upper[j], id);
            node_map_.push_back({id, upper[j], node_role::kF});
        }
        const auto upper_hat = decode(upper, depth + 1, offset, true);
        for (std::size_t j = 0; j < half; ++j) {
            const auto id = sc_node_id(depth, offset, 'g', static_cast<int>(j));
            lower[j] = b_.add_pair(id + ".C", gk::kG);
            emit_g(b_, leaves[j], leaves[j + half], upper_hat[j], lower[j], id);
            node_map_.push_back({id, lower[j], node_role::kG});
        }
        const auto lower_hat = decode(lower, depth + 1, offset + static_cast<int>(half), need_partial);
        if (!need_partial)
            return {};
        const std::string prefix = "sc.d" + std::to_string(depth) + ".b" + std::to_string(offset);
        return combine(b_, upper_hat, lower_hat, prefix, node_role::kPartialSum, node_map_);
    }

    std::vector<Pair> data_outputs() const { return pick(posterior_); }
    std::vector<Pair> data_decisions() const { return pick(decision_); }
    std::vector<NodeMapEntry>& node_map() { return node_map_; }

private:
    Pair decide(const Pair& soft, int position)
    {
        const auto i = static_cast<std::size_t>(position);
        const std::string base = "sc.u" + std::to_string(position);
        posterior_[i] = soft;
        if (code_.is_frozen(position)) {
            decision_[i] = frozen_pair(b_, 0, base + ".U");
            node_map_.push_back({base + ".hat", decision_[i], node_role::kFrozen});
            return decision_[i];
        }
        node_map_.push_back({base, soft, node_role::kPosterior});
        decision_[i] = b_.add_pair(base + ".U", gk::kDecision);
        emit_exclusive_bit(b_, decision_[i], base + ".excl");
        emit_decision(b_, soft, decision_[i], base + ".dec");
        node_map_.push_back({base + ".hat", decision_[i], node_role::kDecision});
        return decision_[i];
    }

    std::vector<Pair> pick(const std::vector<Pair>& all) const
    {
        std::vector<Pair> out;
        for (int i : code_.data())
            out.push_back(all[static_cast<std::size_t>(i)]);
        return out;
    }

    GadgetBuilder& b_;
    const PolarCode& code_;
    std::vector<Pair> posterior_;
    std::vector<Pair> decision_;
    std::vector<NodeMapEntry> node_map_;
};

}  // namespace

CompiledArtifact compile_encoder(const PolarCode& code)
{
    if (code.stages() > kMaxEncoderStages)
        throw InputError("encoder compilation supports n <= " + std::to_string(kMaxEncoderStages));
    GadgetBuilder b;
    std::vector<NodeMapEntry> node_map;
    std::vector<Pair> leaves, inputs;
    for (int i = 0; i < code.length(); ++i) {
        const std::string base = "enc.u" + std::to_string(i);
        if (code.is_frozen(i)) {
            leaves.push_back(frozen_pair(b, 0, base + ".M"));
            node_map.push_back({base, leaves.back(), node_role::kFrozen});
        } else {
            leaves.push_back(b.add_pair(base + ".M", kMessageOwner));
            emit_exclusive_bit(b, leaves.back(), base + ".excl");
            inputs.push_back(leaves.back());
            node_map.push_back({base, leaves.back(), node_role::kMessage});
        }
    }

    // x = (encode(first half) xor encode(second half), encode(second half)).
    auto encode_block = [&](auto&& self, std::size_t lo, std::size_t hi, int depth) -> std::vector<Pair> {
        if (hi - lo == 1)
            return {leaves[lo]};
        const std::size_t mid = (lo + hi) / 2;
        const auto upper = self(self, lo, mid, depth + 1);
        const auto lower = self(self, mid, hi, depth + 1);
        const std::string prefix = "enc.d" + std::to_string(depth) + ".b" + std::to_string(lo);
        return combine(b, upper, lower, prefix, node_role::kPartialSum, node_map);
    };
    auto outputs = encode_block(encode_block, 0, leaves.size(), 0);
    for (std::size_t i = 0; i < outputs.size(); ++i)
        node_map.push_back({"enc.x" + std::to_string(i), outputs[i], node_role::kCodeword});
    return finish(CircuitKind::Encoder, code, std::move(b), std::move(inputs), std::move(outputs), {},
                  std::move(node_map));
}

CompiledArtifact compile_sc_decoder(const PolarCode& code)
{
    if (code.stages() > kMaxScStages)
        throw InputError("SC compilation supports n <= " + std::to_string(kMaxScStages));
    GadgetBuilder b;
    std::vector<Pair> priors;
    std::vector<NodeMapEntry> prior_rows;
    for (int i = 0; i < code.length(); ++i) {
        priors.push_back(b.add_pair("sc.p" + std::to_string(i) + ".A", kPriorOwner));
        prior_rows.push_back({"sc.p" + std::to_string(i), priors.back(), node_role::kPrior});
    }
    ScLowering lower(b, code);
    lower.decode(priors, 0, 0, false);
    auto node_map = std::move(prior_rows);
    for (auto& row : lower.node_map())
        node_map.push_back(std::move(row));
    return finish(CircuitKind::ScDecoder, code, std::move(b), priors, lower.data_outputs(),
                  lower.data_decisions(), std::move(node_map));
}

CompiledArtifact compile_ml_decoder(const PolarCode& code, const CompileOptions& opts)
{
    if (code.length() > kMaxMlLength || code.dimension() > kMaxMlDimension)
        throw InputError("ML compilation supports N <= " + std::to_string(kMaxMlLength) +
                         " and K <= " + std::to_string(kMaxMlDimension));
    GadgetBuilder b;
    std::vector<NodeMapEntry> node_map;
    std::vector<Pair> priors;
    for (int i = 0; i < code.length(); ++i) {
        priors.push_back(b.add_pair("ml.p" + std::to_string(i) + ".A", kPriorOwner));
        node_map.push_back({"ml.p" + std::to_string(i), priors.back(), node_role::kPrior});
    }

    const auto codewords = enumerate_codewords(code);
    std::map<std::string, Pair> shared;
    std::vector<Pair> roots;
    for (std::size_t r = 0; r < codewords.size(); ++r) {
        const auto& bits = codewords[r].bits;
        // Balanced binary multiply tree over leaves [lo, hi), left to right.
        auto tree = [&](auto&& self, std::size_t lo, std::size_t hi) -> Pair {
            if (hi - lo == 1)
                return bits[lo] ? priors[lo] : priors[lo].complement();
            const std::size_t mid = (lo + hi) / 2;
            const std::string span = "t" + std::to_string(lo) + "_" + std::to_string(hi);
            std::string inst = "ml.c" + std::to_string(r) + "." + span;
            if (opts.share_subtrees) {
                inst = "ml.shared." + span + ".x" +
                       bit_string(std::span(bits).subspan(lo, hi - lo));
                if (auto it = shared.find(inst); it != shared.end())
                    return it->second;
            }
            const Pair left = self(self, lo, mid);
            const Pair right = self(self, mid, hi);
            const Pair out = b.add_pair(inst + ".P", gk::kMultiply);
            emit_multiply(b, left, right, out, inst);
            if (opts.share_subtrees)
                shared.emplace(inst, out);
            return out;
        };
        roots.push_back(tree(tree, 0, bits.size()));
        node_map.push_back({"ml.cw" + bit_string(bits), roots.back(), node_role::kLikelihood});
    }

    std::vector<Pair> outputs;
    const auto K = static_cast<std::size_t>(code.dimension());
    for (std::size_t k = 0; k < K; ++k) {
        const std::string inst = "ml.bit" + std::to_string(k);
        const Pair l = b.add_pair(inst + ".L", kMarginalize);
        b.claim_output(l, inst);
        const auto tag = provenance_tag(kMarginalize, inst);
        for (std::size_t r = 0; r < codewords.size(); ++r) {
            if (codewords[r].labels[k])
                b.transfer({roots[r].one}, l.zero, l.one, tag);
            else
                b.transfer({roots[r].one}, l.one, l.zero, tag);
        }
        outputs.push_back(l);
        node_map.push_back({"ml.u" + std::to_string(code.data()[k]), l, node_role::kPosterior});
    }
    return finish(CircuitKind::MlDecoder, code, std::move(b), std::move(priors), std::move(outputs), {},
                  std::move(node_map));
}

CompiledArtifact compile(CircuitKind kind, const PolarCode& code, const CompileOptions& opts)
{
    switch (kind) {
    case CircuitKind::Encoder: return compile_encoder(code);
    case CircuitKind::ScDecoder: return compile_sc_decoder(code);
    case CircuitKind::MlDecoder: return compile_ml_decoder(code, opts);
    }
    throw InputError("unknown circuit kind");
}

State with_priors(const CompiledArtifact& art, std::span<const double> priors)
{
    if (art.kind == CircuitKind::Encoder)
        throw InputError("encoder circuits take a message, not priors");
    if (priors.size() != art.inputs.size())
        throw InputError("expected " + std::to_string(art.inputs.size()) + " priors, got " +
                         std::to_string(priors.size()));
    State s = art.initial;
    for (std::size_t i = 0; i < priors.size(); ++i) {
        if (!(priors[i] >= 0.0 && priors[i] <= 1.0))
            throw InputError("prior probabilities must lie in [0, 1]");
        set_concentration(art.network, s, art.inputs[i].zero, 1.0 - priors[i]);
        set_concentration(art.network, s, art.inputs[i].one, priors[i]);
    }
    return s;
}

State with_message(const CompiledArtifact& art, std::span<const std::uint8_t> message)
{
    if (art.kind != CircuitKind::Encoder)
        throw InputError("only encoder circuits take a message");
    if (message.size() != art.inputs.size())
        throw InputError("expected " + std::to_string(art.inputs.size()) + " message bits, got " +
                         std::to_string(message.size()));
    State s = art.initial;
    for (std::size_t k = 0; k < message.size(); ++k) {
        if (message[k] > 1)
            throw InputError("message bits must be 0 or 1");
        set_concentration(art.network, s, art.inputs[k].zero, message[k] ? 0.0 : 1.0);
        set_concentration(art.network, s, art.inputs[k].one, message[k] ? 1.0 : 0.0);
    }
    return s;
}

const NodeMapEntry* find_node(const CompiledArtifact& art, const std::string& node_id)
{
    for (const auto& e : art.node_map)
        if (e.node_id == node_id)
            return &e;
    return nullptr;
}

std::vector<double> output_readouts(const CompiledArtifact& art, const State& s)
{
    std::vector<double> out;
    out.reserve(art.outputs.size());
    for (const auto& p : art.outputs)
        out.push_back(readout_probability(art.network, s, p.zero, p.one));
    return out;
}

CountReport count_stats(const CompiledArtifact& art)
{
    CountReport rep;
    const auto& net = art.network;
    rep.reactions = net.reaction_count();
    rep.species = net.species_count();
    for (std::size_t r = 0; r < net.reaction_count(); ++r) {
        std::string kind = "untagged";
        const auto& prov = net.provenance(r);
        if (prov.starts_with("gadget=")) {
            const auto colon = prov.find(':');
            kind = prov.substr(7, colon == std::string::npos ? std::string::npos : colon - 7);
        }
        ++rep.by_kind[kind].reactions;
    }
    for (std::size_t i = 0; i < net.species_count(); ++i)
        ++rep.by_kind[net.owner(i).empty() ? "untagged" : net.owner(i)].species;
    return rep;
}

std::string node_map_csv(const CompiledArtifact& art)
{
    std::ostringstream out;
    out << "node_id,species_zero,species_one,oracle_role\n";
    for (const auto& e : art.node_map)
        out << e.node_id << ',' << e.pair.zero << ',' << e.pair.one << ',' << e.role << "\n";
    return out.str();
}

}  // namespace crnpolar
