#include "crnpolar/polar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace crnpolar {

PolarCode::PolarCode(int n, std::vector<int> frozen) : n_(n), frozen_(std::move(frozen))
{
    if (n < 1 || n > kMaxStages)
        throw InputError("stage count n=" + std::to_string(n) + " outside [1, " +
                         std::to_string(kMaxStages) + "]");
    const int N = 1 << n;
    std::sort(frozen_.begin(), frozen_.end());
    if (std::adjacent_find(frozen_.begin(), frozen_.end()) != frozen_.end())
        throw InputError("duplicate frozen index");
    frozen_mask_.assign(static_cast<std::size_t>(N), 0);
    for (int f : frozen_) {
        if (f < 0 || f >= N)
            throw InputError("frozen index " + std::to_string(f) + " outside [0, " +
                             std::to_string(N) + ")");
        frozen_mask_[static_cast<std::size_t>(f)] = 1;
    }
    for (int i = 0; i < N; ++i)
        if (!frozen_mask_[static_cast<std::size_t>(i)])
            data_.push_back(i);
}

PolarCode half_rate_min_weight_code(int n)
{
    if (n < 1 || n > kMaxStages)
        throw InputError("stage count out of range");
    const int N = 1 << n;
    std::vector<int> rows(static_cast<std::size_t>(N));
    std::iota(rows.begin(), rows.end(), 0);
    // Row i of the Kronecker power has weight 2^popcount(i).
    std::stable_sort(rows.begin(), rows.end(), [](int a, int b) {
        return std::popcount(static_cast<unsigned>(a)) < std::popcount(static_cast<unsigned>(b));
    });
    rows.resize(static_cast<std::size_t>(N / 2));
    return PolarCode(n, rows);
}

BitMatrix generator_matrix(int n)
{
    if (n < 1 || n > kMaxStages)
        throw InputError("stage count n=" + std::to_string(n) + " outside [1, " +
                         std::to_string(kMaxStages) + "]");
    BitMatrix g{{1, 0}, {1, 1}};
    for (int s = 1; s < n; ++s) {
        const std::size_t m = g.size();
        BitMatrix next(2 * m, Bits(2 * m, 0));
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < m; ++c) {
                next[r][c] = g[r][c];
                next[r + m][c] = g[r][c];
                next[r + m][c + m] = g[r][c];
            }
        g = std::move(next);
    }
    return g;
}

Bits encode(const PolarCode& code, std::span<const std::uint8_t> u)
{
    const auto N = static_cast<std::size_t>(code.length());
    if (u.size() != N)
        throw InputError("message vector has length " + std::to_string(u.size()) + ", expected " +
                         std::to_string(N));
    for (std::size_t i = 0; i < N; ++i) {
        if (u[i] > 1)
            throw InputError("message entries must be 0 or 1");
        if (code.is_frozen(static_cast<int>(i)) && u[i])
            throw InputError("frozen position " + std::to_string(i) + " is nonzero");
    }
    Bits x(u.begin(), u.end());
    // In-place butterfly: x = u F^{(x)n}.
    for (std::size_t h = 1; h < N; h *= 2)
        for (std::size_t i = 0; i < N; i += 2 * h)
            for (std::size_t j = i; j < i + h; ++j)
                x[j] ^= x[j + h];
    return x;
}

Bits encode_message(const PolarCode& code, std::span<const std::uint8_t> message)
{
    if (message.size() != static_cast<std::size_t>(code.dimension()))
        throw InputError("message has " + std::to_string(message.size()) + " bits, code carries " +
                         std::to_string(code.dimension()));
    Bits u(static_cast<std::size_t>(code.length()), 0);
    for (std::size_t k = 0; k < message.size(); ++k)
        u[static_cast<std::size_t>(code.data()[k])] = message[k];
    return encode(code, u);
}

double sc_f(double pa, double pb)
{
    return pa * (1.0 - pb) + pb * (1.0 - pa);
}

double sc_g(double pa, double pb, int u)
{
    const double num = u == 0 ? pa * pb : (1.0 - pa) * pb;
    const double other = u == 0 ? (1.0 - pa) * (1.0 - pb) : pa * (1.0 - pb);
    const double den = num + other;
    return den > 0.0 ? num / den : 0.5;
}

std::string sc_node_id(int depth, int block_offset, char kind, int index)
{
    return "sc.d" + std::to_string(depth) + ".b" + std::to_string(block_offset) + "." + kind +
           std::to_string(index);
}

namespace {

void check_priors(const PolarCode& code, std::span<const double> priors)
{
    if (priors.size() != static_cast<std::size_t>(code.length()))
        throw InputError("prior vector has length " + std::to_string(priors.size()) +
                         ", expected " + std::to_string(code.length()));
    for (double p : priors)
        if (!(p >= 0.0 && p <= 1.0))
            throw InputError("prior probabilities must lie in [0, 1]");
}

class ScRecursion {
public:
    ScRecursion(const PolarCode& code, ScResult& out) : code_(code), out_(out) {}

    // Decodes the block of leaves starting at input index `offset`; returns
    // the re-encoded hard decisions of the block.
    Bits decode(const std::vector<double>& leaves, int depth, int offset)
    {
        const std::size_t m = leaves.size();
        if (m == 1) {
            const auto i = static_cast<std::size_t>(offset);
            if (code_.is_frozen(offset)) {
                out_.bits.posterior[i] = 0.0;
                out_.bits.decision[i] = 0;
            } else {
                out_.bits.posterior[i] = leaves[0];
                out_.bits.decision[i] = leaves[0] > 0.5 ? 1 : 0;
            }
            return {out_.bits.decision[i]};
        }
        const std::size_t half = m / 2;
        std::vector<double> upper(half), lower(half);
        for (std::size_t j = 0; j < half; ++j) {
            upper[j] = sc_f(leaves[j], leaves[j + half]);
            out_.nodes.push_back({sc_node_id(depth, offset, 'f', static_cast<int>(j)), 'f', upper[j]});
        }
        const Bits upper_hat = decode(upper, depth + 1, offset);
        for (std::size_t j = 0; j < half; ++j) {
            lower[j] = sc_g(leaves[j], leaves[j + half], upper_hat[j]);
            out_.nodes.push_back({sc_node_id(depth, offset, 'g', static_cast<int>(j)), 'g', lower[j]});
        }
        const Bits lower_hat = decode(lower, depth + 1, offset + static_cast<int>(half));
        Bits partial(m);
        for (std::size_t j = 0; j < half; ++j) {
            partial[j] = upper_hat[j] ^ lower_hat[j];
            partial[j + half] = lower_hat[j];
        }
        return partial;
    }

private:
    const PolarCode& code_;
    ScResult& out_;
};

}  // namespace

ScResult sc_oracle(const PolarCode& code, std::span<const double> priors)
{
    check_priors(code, priors);
    ScResult out;
    const auto N = static_cast<std::size_t>(code.length());
    out.bits.posterior.assign(N, 0.0);
    out.bits.decision.assign(N, 0);
    ScRecursion(code, out).decode(std::vector<double>(priors.begin(), priors.end()), 0, 0);
    return out;
}

std::vector<LabeledCodeword> enumerate_codewords(const PolarCode& code)
{
    const int K = code.dimension();
    if (K > 16)
        throw InputError("bitwise ML enumeration supports K <= 16, got " + std::to_string(K));
    const std::size_t count = std::size_t{1} << K;
    std::vector<Bits> words;
    words.reserve(count);
    Bits msg(static_cast<std::size_t>(K));
    for (std::size_t m = 0; m < count; ++m) {
        for (int k = 0; k < K; ++k)
            msg[static_cast<std::size_t>(k)] = (m >> (K - 1 - k)) & 1u;
        words.push_back(encode_message(code, msg));
    }
    std::sort(words.begin(), words.end());
    std::vector<LabeledCodeword> out;
    out.reserve(count);
    for (std::size_t rank = 0; rank < count; ++rank) {
        LabeledCodeword cw{std::move(words[rank]), Bits(static_cast<std::size_t>(K))};
        for (int k = 0; k < K; ++k)
            cw.labels[static_cast<std::size_t>(k)] = (rank >> (K - 1 - k)) & 1u;
        out.push_back(std::move(cw));
    }
    return out;
}

double codeword_likelihood(std::span<const std::uint8_t> codeword, std::span<const double> priors)
{
    if (codeword.size() != priors.size())
        throw InputError("codeword and prior lengths differ");
    double l = 1.0;
    for (std::size_t i = 0; i < codeword.size(); ++i)
        l *= codeword[i] ? priors[i] : 1.0 - priors[i];
    return l;
}

std::vector<double> ml_bitwise_posteriors(const PolarCode& code, std::span<const double> priors)
{
    check_priors(code, priors);
    const auto K = static_cast<std::size_t>(code.dimension());
    std::vector<double> ones(K, 0.0);
    double total = 0.0;
    for (const auto& cw : enumerate_codewords(code)) {
        const double l = codeword_likelihood(cw.bits, priors);
        total += l;
        for (std::size_t k = 0; k < K; ++k)
            if (cw.labels[k])
                ones[k] += l;
    }
    for (double& p : ones)
        p = total > 0.0 ? p / total : 0.5;
    return ones;
}

BitPosteriors ml_bitwise_oracle(const PolarCode& code, std::span<const double> priors)
{
    const auto per_bit = ml_bitwise_posteriors(code, priors);
    BitPosteriors out;
    const auto N = static_cast<std::size_t>(code.length());
    out.posterior.assign(N, 0.0);
    out.decision.assign(N, 0);
    for (std::size_t k = 0; k < per_bit.size(); ++k) {
        const auto pos = static_cast<std::size_t>(code.data()[k]);
        out.posterior[pos] = per_bit[k];
        out.decision[pos] = per_bit[k] > 0.5 ? 1 : 0;
    }
    return out;
}

}  // namespace crnpolar
