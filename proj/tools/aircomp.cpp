// SPDX-License-Identifier: Apache-2.0
// Command-line front end: run / validate / reproduce.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <mutex>

#include <CLI11.hpp>

#include "aircomp/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;

constexpr const char* kOutDirEnv = "AIRCOMP_OUT_DIR";

struct CommonOptions {
    std::string out;
    int threads = 0;
    bool timing = false;
    bool quiet = false;
};

// --out beats the environment, which beats the config file.
std::filesystem::path resolve_output_dir(const CommonOptions& o, const aircomp::ExperimentConfig& cfg) {
    if (!o.out.empty()) return o.out;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return cfg.output_dir;
}

void print_summary(const aircomp::ResultsTable& table) {
    std::printf("%-12s %8s %-16s %7s %8s %15s\n", "sweep", "value", "algorithm", "trials", "failures", "mean_mse");
    for (const auto& a : table.aggregates)
        std::printf("%-12s %8d %-16s %7d %8d %15s\n", aircomp::to_string(a.sweep_variable), a.sweep_value,
                    aircomp::to_string(a.algorithm), a.trials, a.failures,
                    a.mean_mse ? aircomp::format_real(*a.mean_mse).c_str() : "-");
}

int execute(const aircomp::ExperimentConfig& cfg, const CommonOptions& o) {
    const auto dir = resolve_output_dir(o, cfg);
    aircomp::preflight_output(dir);

    aircomp::RunOptions ro;
    ro.threads = o.threads;
    ro.timing = o.timing;
    std::mutex io;
    std::size_t done = 0;
    const std::size_t total =
        cfg.sweep_points().size() * static_cast<std::size_t>(cfg.trials) * cfg.algorithms.size();
    if (!o.quiet)
        ro.on_record = [&](const aircomp::TrialRecord&) {
            std::lock_guard lock(io);
            ++done;
            std::fprintf(stderr, "\r%zu/%zu runs", done, total);
            if (done == total) std::fprintf(stderr, "\n");
        };
    const auto table = aircomp::run_experiment(cfg, ro);
    const auto paths = aircomp::emit_results(table, cfg, dir);
    if (!o.quiet) {
        print_summary(table);
        std::printf("wrote %s\n", paths.csv.string().c_str());
        std::printf("wrote %s\n", paths.aggregate_csv.string().c_str());
        std::printf("wrote %s\n", paths.json.string().c_str());
        if (cfg.record_traces) std::printf("wrote %s\n", paths.trace_csv.string().c_str());
    }
    return kExitOk;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--out", o.out, std::string("Output directory (overrides $") + kOutDirEnv + " and the config)");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--timing", o.timing, "Record wall_time_ms (makes output non-reproducible)");
    cmd->add_flag("-q,--quiet", o.quiet, "No progress or summary output");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IRS-assisted over-the-air computation: transceiver and phase design experiments"};
    app.set_version_flag("--version", aircomp::kVersion);
    app.require_subcommand(1);

    CommonOptions common;
    std::string config_path;

    auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
    run->add_option("config", config_path, "Config file")->required();
    add_common(run, common);

    auto* validate = app.add_subcommand("validate", "Check a config file and print its normalized form");
    validate->add_option("config", config_path, "Config file")->required();

    std::string figure;
    int trials = 0;
    std::uint64_t seed = 0;
    auto* reproduce = app.add_subcommand("reproduce", "Run a built-in figure experiment");
    reproduce->add_option("figure", figure, "fig3a | fig3b | fig3c | fig3d")
        ->required()
        ->check(CLI::IsMember(aircomp::preset_names()));
    auto* trials_opt = reproduce->add_option("--trials", trials, "Channel realizations per sweep point")
                           ->check(CLI::PositiveNumber);
    auto* seed_opt = reproduce->add_option("--seed", seed, "Base seed");
    add_common(reproduce, common);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            const auto cfg = aircomp::load_config(config_path);
            std::cout << aircomp::config_to_json(cfg) << "\n";
            return kExitOk;
        }
        if (*run) return execute(aircomp::load_config(config_path), common);
        if (*reproduce) {
            auto cfg = aircomp::preset(figure);
            if (*trials_opt) cfg.trials = trials;
            if (*seed_opt) cfg.base_seed = seed;
            cfg.validate();
            return execute(cfg, common);
        }
    } catch (const aircomp::InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const aircomp::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
