#pragma once

// Lowers a polar code into encoder, SC-decoder and bitwise-ML-decoder
// reaction networks built from the gadget library.

#include "crnpolar/crn.hpp"
#include "crnpolar/gadgets.hpp"
#include "crnpolar/polar.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace crnpolar {

enum class CircuitKind { Encoder, ScDecoder, MlDecoder };

std::string to_string(CircuitKind kind);

/// Parses "encoder", "sc" or "ml"; throws InputError otherwise.
CircuitKind parse_circuit_kind(const std::string& text);

namespace node_role {
inline constexpr const char* kPrior = "prior";
inline constexpr const char* kMessage = "message";
inline constexpr const char* kFrozen = "frozen";
inline constexpr const char* kCodeword = "codeword";
inline constexpr const char* kF = "f";
inline constexpr const char* kG = "g";
inline constexpr const char* kPosterior = "posterior";
inline constexpr const char* kDecision = "decision";
inline constexpr const char* kPartialSum = "partial_sum";
inline constexpr const char* kLikelihood = "likelihood";
}  // namespace node_role

struct NodeMapEntry {
    std::string node_id;
    Pair pair;
    std::string role;
};

struct CompiledArtifact {
    CircuitKind kind;
    PolarCode code;
    Network network;
    /// Gadget outputs at (0.5, 0.5), frozen pairs at their constant, inputs
    /// at (0.5, 0.5) until set by with_priors / with_message.
    State initial;
    /// Priors (length N) for decoders, message pairs (length K) for encoders.
    std::vector<Pair> inputs;
    /// Codeword pairs (N) for encoders, data posterior pairs (K) for decoders,
    /// ordered by data position.
    std::vector<Pair> outputs;
    /// SC decision pairs, one per data position.
    std::vector<Pair> decisions;
    std::vector<NodeMapEntry> node_map;
};

struct CompileOptions {
    /// ML only: reuse identical multiply subtrees across codewords.
    bool share_subtrees = false;
};

inline constexpr int kMaxEncoderStages = 4;
inline constexpr int kMaxScStages = 4;
inline constexpr int kMaxMlLength = 16;
inline constexpr int kMaxMlDimension = 8;

CompiledArtifact compile_encoder(const PolarCode& code);
CompiledArtifact compile_sc_decoder(const PolarCode& code);
CompiledArtifact compile_ml_decoder(const PolarCode& code, const CompileOptions& opts = {});
CompiledArtifact compile(CircuitKind kind, const PolarCode& code, const CompileOptions& opts = {});

/// Initial state with prior pair i set to (1 - p_i, p_i).
State with_priors(const CompiledArtifact& art, std::span<const double> priors);

/// Initial state with message pair k set to the digital value of bit k.
State with_message(const CompiledArtifact& art, std::span<const std::uint8_t> message);

const NodeMapEntry* find_node(const CompiledArtifact& art, const std::string& node_id);

/// Readout of each output pair.
std::vector<double> output_readouts(const CompiledArtifact& art, const State& s);

struct KindCount {
    std::size_t reactions = 0;
    std::size_t species = 0;
};

struct CountReport {
    std::size_t reactions = 0;
    std::size_t species = 0;
    /// Keyed by gadget kind (reactions by provenance, species by owner).
    std::map<std::string, KindCount> by_kind;
};

CountReport count_stats(const CompiledArtifact& art);

/// `node_id,species_zero,species_one,oracle_role` rows with a header.
std::string node_map_csv(const CompiledArtifact& art);

}  // namespace crnpolar
