// crnpolar: compile polar encoders/decoders into reaction networks, simulate
// them, and verify their steady states against floating-point oracles.

#include "crnpolar/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using crnpolar::cli::RunConfig;

struct RawFlags {
    std::string frozen;
    std::string decoder = "sc";
    std::string priors;
    std::string message;
    double tol = 0.0;
};

void add_code_flags(CLI::App* cmd, RunConfig& cfg, RawFlags& raw)
{
    cmd->add_option("--n", cfg.n, "Number of stages, N = 2^n")->required();
    cmd->add_option("--frozen", raw.frozen, "Comma-separated frozen row indices");
    cmd->add_option("--decoder", raw.decoder, "Circuit kind: sc, ml or encoder")
        ->check(CLI::IsMember({"sc", "ml", "encoder"}));
    cmd->add_flag("--share-subtrees", cfg.share_subtrees, "ML: reuse identical multiply subtrees");
    cmd->add_option("--out-dir", cfg.out_dir, "Directory for output files");
}

void add_input_flags(CLI::App* cmd, RunConfig& cfg, RawFlags& raw)
{
    cmd->add_option("--priors", raw.priors, "Comma-separated P(x_i = 1) per codeword bit");
    cmd->add_option("--message", raw.message, "Message bits for encoder circuits, e.g. 10");
    cmd->add_option("--network", cfg.network_path, "Load a compiled network instead of compiling");
    cmd->add_option("--node-map", cfg.node_map_path, "Node map for --network (default: alongside it)");
}

}  // namespace

int main(int argc, char** argv)
{
    namespace cli = crnpolar::cli;

    CLI::App app{"Polar encoders and decoders as chemical reaction networks"};
    app.require_subcommand(1);

    RunConfig cfg;
    RawFlags raw;

    auto* compile = app.add_subcommand("compile", "Emit network, node map and count report");
    add_code_flags(compile, cfg, raw);

    auto* simulate = app.add_subcommand("simulate", "Integrate a network and write trajectory.csv");
    add_code_flags(simulate, cfg, raw);
    add_input_flags(simulate, cfg, raw);
    simulate->add_option("--t-end", cfg.t_end, "End time in seconds");
    simulate->add_option("--record-dt", cfg.record_dt, "Sampling interval in seconds");

    auto* verify = app.add_subcommand("verify", "Compare steady-state readouts with the oracles");
    add_code_flags(verify, cfg, raw);
    add_input_flags(verify, cfg, raw);
    verify->add_option("--tol", raw.tol, "Absolute tolerance (default depends on the decoder)");
    verify->add_option("--max-time", cfg.max_time, "Give up on convergence after this many seconds");
    verify->add_option("--sweep", cfg.sweep, "Verify this many random prior vectors (CRNPOLAR_SEED)");
    verify->add_flag("--internal", cfg.internal_nodes, "Also compare internal SC f/g nodes");

    auto* table = app.add_subcommand("count-table", "Reaction and species counts for N = 4, 8, 16");
    table->add_flag("--share-subtrees", cfg.share_subtrees, "ML: reuse identical multiply subtrees");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kUsageError;
    }

    try {
        cfg.kind = crnpolar::parse_circuit_kind(raw.decoder);
        cfg.frozen = cli::parse_int_list(raw.frozen);
        if (!raw.priors.empty())
            cfg.priors = cli::parse_real_list(raw.priors);
        if (!raw.message.empty())
            cfg.message = cli::parse_bit_string(raw.message);
        if (raw.tol > 0.0)
            cfg.tol = raw.tol;
        else if (verify->count("--tol"))
            throw crnpolar::InputError("--tol must be positive");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kUsageError;
    }

    if (*compile)
        return cli::cmd_compile(cfg, std::cout);
    if (*simulate)
        return cli::cmd_simulate(cfg, std::cout);
    if (*verify)
        return cli::cmd_verify(cfg, std::cout);
    return cli::cmd_count_table(cfg, std::cout);
}
