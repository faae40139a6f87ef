#pragma once

// Floating-point reference implementations for polar codes: generator
// construction, encoding, successive-cancellation decoding in the
// probability domain, and brute-force bitwise maximum-likelihood decoding.
// These are the ground truth that chemical steady states are checked against.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crnpolar {

class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Bits = std::vector<std::uint8_t>;
using BitMatrix = std::vector<Bits>;

inline constexpr int kMaxStages = 8;

/// Block length N = 2^n with a set of frozen (always-zero) input rows.
class PolarCode {
public:
    /// Throws InputError for n outside [1, kMaxStages] or frozen indices
    /// outside [0, N). Duplicate frozen indices are rejected.
    PolarCode(int n, std::vector<int> frozen);

    int stages() const { return n_; }
    int length() const { return 1 << n_; }
    int dimension() const { return static_cast<int>(data_.size()); }
    double rate() const { return static_cast<double>(dimension()) / length(); }

    /// Sorted frozen row indices.
    const std::vector<int>& frozen() const { return frozen_; }
    /// Sorted data row indices (the complement of frozen()).
    const std::vector<int>& data() const { return data_; }
    bool is_frozen(int i) const { return frozen_mask_[static_cast<std::size_t>(i)] != 0; }

    friend bool operator==(const PolarCode&, const PolarCode&) = default;

private:
    int n_;
    std::vector<int> frozen_;
    std::vector<int> data_;
    Bits frozen_mask_;
};

/// Half-rate code whose frozen rows are those of smallest Hamming weight in
/// the generator, ties broken toward the lower index.
PolarCode half_rate_min_weight_code(int n);

/// n-fold Kronecker power of [[1,0],[1,1]] over GF(2), natural row order.
BitMatrix generator_matrix(int n);

/// x = u G over GF(2). `u` has length N with frozen positions zero.
Bits encode(const PolarCode& code, std::span<const std::uint8_t> u);

/// Encodes K data bits placed on the data rows of `code`.
Bits encode_message(const PolarCode& code, std::span<const std::uint8_t> message);

/// Per-position soft output. Entries for frozen positions hold the frozen
/// value (0) with posterior 0.
struct BitPosteriors {
    std::vector<double> posterior;  // P(bit = 1), length N
    Bits decision;                  // posterior > 0.5, ties to 0
};

/// f message: probability that the XOR of two independent bits is 1.
double sc_f(double pa, double pb);

/// g message given the partial-sum bit u decided upstream.
double sc_g(double pa, double pb, int u);

/// Message computed at one f or g node of the SC graph.
struct ScNodeMessage {
    std::string node_id;
    char kind;  // 'f' or 'g'
    double value;
};

struct ScResult {
    BitPosteriors bits;
    std::vector<ScNodeMessage> nodes;  // in emission order
};

/// Node identifier shared by the oracle and the compiled SC network:
/// `sc.d<depth>.b<block offset>.<kind><index>`.
std::string sc_node_id(int depth, int block_offset, char kind, int index);

/// Successive cancellation with natural-order leaves. Throws InputError if
/// `priors` does not have length N or holds values outside [0,1].
ScResult sc_oracle(const PolarCode& code, std::span<const double> priors);

/// A codeword together with the data bits that label it for bitwise ML.
struct LabeledCodeword {
    Bits bits;    // length N
    Bits labels;  // length K: label k is bit (K-1-k) of the codeword's rank
};

/// All 2^K codewords in ascending lexicographic order (bit 0 most
/// significant). Throws InputError for K > 16.
std::vector<LabeledCodeword> enumerate_codewords(const PolarCode& code);

/// Product over positions of p_i or (1 - p_i) according to the codeword bit.
double codeword_likelihood(std::span<const std::uint8_t> codeword, std::span<const double> priors);

/// Bitwise ML by enumeration; data bit k is reported at position data()[k].
BitPosteriors ml_bitwise_oracle(const PolarCode& code, std::span<const double> priors);

/// Bitwise ML posteriors indexed by data bit (length K).
std::vector<double> ml_bitwise_posteriors(const PolarCode& code, std::span<const double> priors);

}  // namespace crnpolar
