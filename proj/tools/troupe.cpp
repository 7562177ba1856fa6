#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "troupe/config.hpp"
#include "troupe/errors.hpp"
#include "troupe/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitRuntime = 4;

struct Flags {
    std::string config_path;
    std::optional<std::string> stream;
    std::optional<std::string> snapshot_in;
    std::optional<std::string> snapshot_out;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> parallelism;
};

void add_common_flags(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--config", flags.config_path, "run configuration file (JSON)");
    cmd->add_option("--stream", flags.stream, "query stream file (JSON lines)");
    cmd->add_option("--snapshot-in", flags.snapshot_in, "trust snapshot to start from");
    cmd->add_option("--snapshot-out", flags.snapshot_out, "where to write the final snapshot");
    cmd->add_option("--out-dir", flags.out_dir, "directory for reports and exports");
    cmd->add_option("--seed", flags.seed, "run seed (simulated pools)");
    cmd->add_option("--parallelism", flags.parallelism, "worker count for frozen evaluation");
}

// Flags win over the config file.
troupe::RunConfig resolve(const Flags& flags) {
    troupe::RunConfig config;
    if (!flags.config_path.empty()) config = troupe::load_config(flags.config_path);
    if (flags.stream) config.stream_path = *flags.stream;
    if (flags.snapshot_in) config.snapshot_in = *flags.snapshot_in;
    if (flags.snapshot_out) config.snapshot_out = *flags.snapshot_out;
    if (flags.out_dir) config.out_dir = *flags.out_dir;
    if (flags.seed) config.seed = *flags.seed;
    if (flags.parallelism) config.parallelism = *flags.parallelism;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"test-time trust orchestration for multi-agent answering"};
    app.require_subcommand(1);

    Flags flags;
    CLI::App* optimize = app.add_subcommand(
        "optimize", "run sequential trust optimization over a ground-truth stream");
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "answer a stream with frozen trust state");
    CLI::App* simulate = app.add_subcommand(
        "simulate", "seeded ablation and size-sweep experiment on a simulated pool");
    CLI::App* exp = app.add_subcommand("export", "render a snapshot as a score table");
    for (CLI::App* cmd : {optimize, evaluate, simulate, exp}) add_common_flags(cmd, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        troupe::RunConfig config = resolve(flags);
        if (optimize->parsed()) {
            troupe::run_optimize(config, std::cout);
        } else if (evaluate->parsed()) {
            troupe::run_evaluate(config, std::cout);
        } else if (simulate->parsed()) {
            troupe::run_simulate(config, std::cout);
        } else if (exp->parsed()) {
            std::cout << troupe::run_export(config, std::cout);
        }
        return kExitOk;
    } catch (const troupe::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const troupe::io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const troupe::parse_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
