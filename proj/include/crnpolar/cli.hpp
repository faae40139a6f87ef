#pragma once

// Command implementations behind the crnpolar executable. Each command
// writes human-readable output to `out` and returns a process exit code.

#include "crnpolar/compiler.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace crnpolar::cli {

enum ExitCode : int {
    kPass = 0,
    kToleranceViolation = 1,
    kNotConverged = 2,
    kUsageError = 3,
};

struct RunConfig {
    int n = 0;
    std::vector<int> frozen;
    CircuitKind kind = CircuitKind::ScDecoder;
    std::vector<double> priors;
    std::vector<std::uint8_t> message;
    double t_end = 50.0;
    double record_dt = 0.5;
    /// Verification tolerance; defaults per circuit kind when unset.
    std::optional<double> tol;
    double max_time = 1000.0;
    std::string out_dir = ".";
    /// When set, simulate/verify load this network instead of compiling.
    std::string network_path;
    std::string node_map_path;
    bool share_subtrees = false;
    /// verify: number of random prior vectors (seeded by CRNPOLAR_SEED).
    int sweep = 0;
    /// verify: also compare internal SC f/g nodes.
    bool internal_nodes = false;
};

/// Default verification tolerance: 2e-2 (sc), 5e-3 (ml), 1e-2 (encoder).
double default_tolerance(CircuitKind kind);

/// Validates n, frozen set and input lengths; throws InputError.
PolarCode validate(const RunConfig& cfg);

/// Rebuilds a CompiledArtifact from a serialized network and node map.
CompiledArtifact load_artifact(CircuitKind kind, const PolarCode& code,
                               const std::string& network_text, const std::string& node_map_text);

/// Seed for random prior sweeps: CRNPOLAR_SEED if set, else a fixed default.
std::uint64_t sweep_seed();

/// Uniform random priors in [0.05, 0.95].
std::vector<std::vector<double>> random_priors(std::uint64_t seed, int count, int length);

int cmd_compile(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);
int cmd_count_table(const RunConfig& cfg, std::ostream& out);

/// Half-rate codes used for count reporting: N = 4 freezes rows {0, 2};
/// larger N freeze the minimum-weight rows.
PolarCode count_table_code(int n);

/// Comma-separated parsing helpers shared with the executable.
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
std::vector<std::uint8_t> parse_bit_string(const std::string& text);

}  // namespace crnpolar::cli
