// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aircomp/algorithms.hpp"
#include "aircomp/scenario.hpp"

namespace aircomp {

inline constexpr const char* kVersion = "0.1.0";

enum class SweepVariable { N, M, K, convergence };

const char* to_string(SweepVariable v);
std::optional<SweepVariable> parse_sweep_variable(const std::string& s);

struct Sweep {
    SweepVariable variable = SweepVariable::convergence;
    std::vector<int> values;  // empty for convergence
};

struct ExperimentConfig {
    std::string name = "run";
    Scenario scenario{};
    Sweep sweep{};
    std::vector<Algorithm> algorithms{Algorithm::alternating_dc};
    int trials = 10;
    std::uint64_t base_seed = 42;
    AlgorithmParams<double> params{};
    bool record_traces = false;  // per-iteration MSE file
    std::string output_dir = "results";

    /// Scenario at one sweep point.
    Scenario scenario_at(int sweep_value) const;
    /// Sweep values; a single placeholder 0 for convergence runs.
    std::vector<int> sweep_points() const;
    void validate() const;
};

/// Parses a JSON config. Missing keys keep their defaults; unknown keys and
/// malformed values throw InvalidInput.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Normalized JSON echo of a config (every field present).
std::string config_to_json(const ExperimentConfig& cfg, int indent = 2);

/// Built-in settings for the four figure experiments.
ExperimentConfig preset(const std::string& figure);
std::vector<std::string> preset_names();

struct TrialRecord {
    SweepVariable sweep_variable = SweepVariable::convergence;
    int sweep_value = 0;
    Algorithm algorithm = Algorithm::alternating_dc;
    int trial = 0;
    std::uint64_t seed = 0;
    std::optional<double> mse;  // absent when the run failed
    int iterations = 0;
    Termination terminated_by = Termination::failed;
    std::optional<double> wall_time_ms;
    std::string channel_hash;
    std::vector<double> mse_trace;      // best so far
    std::vector<double> raw_mse_trace;  // per outer iteration
    std::string message;
};

struct AggregateRow {
    SweepVariable sweep_variable = SweepVariable::convergence;
    int sweep_value = 0;
    Algorithm algorithm = Algorithm::alternating_dc;
    int trials = 0;
    int failures = 0;
    std::optional<double> mean_mse;  // over successful trials
};

struct ResultsTable {
    std::vector<TrialRecord> records;
    std::vector<AggregateRow> aggregates;
};

struct RunOptions {
    int threads = 0;  // 0: hardware concurrency
    bool timing = false;
    std::function<void(const TrialRecord&)> on_record;  // called from worker threads
};

/// Seed of trial `trial`; shared by every sweep point so that sweep points
/// see paired user drops.
std::uint64_t trial_seed(std::uint64_t base_seed, int trial);

/// FNV-1a over the raw channel coefficients, as 16 hex digits.
std::string channel_hash(const ChannelSetd& ch);

/// Every (sweep point, trial) draws one channel realization and runs each
/// requested algorithm on it. Records come back in canonical order
/// (sweep point, trial, algorithm as listed in the config).
ResultsTable run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Means over successful trials per (sweep point, algorithm).
std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records, const ExperimentConfig& cfg);

struct OutputPaths {
    std::filesystem::path csv, json, aggregate_csv, trace_csv;
};

OutputPaths output_paths(const std::filesystem::path& dir, const std::string& name);

/// Creates `dir` if needed and checks that a file can be written in it.
/// Throws IoError otherwise.
void preflight_output(const std::filesystem::path& dir);

/// Writes the per-trial CSV, the JSON document, the aggregate CSV, and the
/// trace CSV when traces were recorded.
OutputPaths emit_results(const ResultsTable& table, const ExperimentConfig& cfg, const std::filesystem::path& dir);

std::string format_real(double x);
std::string records_csv(const std::vector<TrialRecord>& records);
std::string aggregates_csv(const std::vector<AggregateRow>& rows);
std::string traces_csv(const std::vector<TrialRecord>& records);
std::string results_json(const ResultsTable& table, const ExperimentConfig& cfg);

}  // namespace aircomp
