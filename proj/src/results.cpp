// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <fstream>
#include <sstream>

#include "aircomp/experiment.hpp"
#include "config_json.hpp"

namespace aircomp {

using nlohmann::json;

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

std::string opt_real(const std::optional<double>& x) { return x ? format_real(*x) : std::string(); }

json opt_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

}  // namespace

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

OutputPaths output_paths(const std::filesystem::path& dir, const std::string& name) {
    return {dir / (name + ".csv"), dir / (name + ".json"), dir / (name + "_aggregate.csv"),
            dir / (name + "_trace.csv")};
}

void preflight_output(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
    const auto probe = dir / ".write_probe";
    {
        std::ofstream out(probe, std::ios::trunc);
        if (!out) throw IoError("output directory " + dir.string() + " is not writable");
    }
    std::filesystem::remove(probe, ec);
}

std::string records_csv(const std::vector<TrialRecord>& records) {
    std::ostringstream os;
    os << "sweep_variable,sweep_value,algorithm,trial,seed,mse,iterations,terminated_by,wall_time_ms\n";
    for (const auto& r : records) {
        os << to_string(r.sweep_variable) << ',' << r.sweep_value << ',' << to_string(r.algorithm) << ',' << r.trial
           << ',' << r.seed << ',' << opt_real(r.mse) << ',' << r.iterations << ',' << to_string(r.terminated_by)
           << ',' << opt_real(r.wall_time_ms) << '\n';
    }
    return os.str();
}

std::string aggregates_csv(const std::vector<AggregateRow>& rows) {
    std::ostringstream os;
    os << "sweep_variable,sweep_value,algorithm,trials,failures,mean_mse\n";
    for (const auto& r : rows)
        os << to_string(r.sweep_variable) << ',' << r.sweep_value << ',' << to_string(r.algorithm) << ',' << r.trials
           << ',' << r.failures << ',' << opt_real(r.mean_mse) << '\n';
    return os.str();
}

std::string traces_csv(const std::vector<TrialRecord>& records) {
    std::ostringstream os;
    os << "sweep_variable,sweep_value,algorithm,trial,iteration,mse,raw_mse\n";
    for (const auto& r : records)
        for (std::size_t i = 0; i < r.mse_trace.size(); ++i)
            os << to_string(r.sweep_variable) << ',' << r.sweep_value << ',' << to_string(r.algorithm) << ','
               << r.trial << ',' << i + 1 << ',' << format_real(r.mse_trace[i]) << ','
               << format_real(r.raw_mse_trace[i]) << '\n';
    return os.str();
}

std::string results_json(const ResultsTable& table, const ExperimentConfig& cfg) {
    json records = json::array();
    for (const auto& r : table.records) {
        json j = {{"sweep_variable", to_string(r.sweep_variable)},
                  {"sweep_value", r.sweep_value},
                  {"algorithm", to_string(r.algorithm)},
                  {"trial", r.trial},
                  {"seed", r.seed},
                  {"mse", opt_json(r.mse)},
                  {"iterations", r.iterations},
                  {"terminated_by", to_string(r.terminated_by)},
                  {"wall_time_ms", opt_json(r.wall_time_ms)},
                  {"channel_hash", r.channel_hash},
                  {"message", r.message}};
        if (cfg.record_traces) {
            j["mse_per_iteration"] = r.mse_trace;
            j["raw_mse_per_iteration"] = r.raw_mse_trace;
        }
        records.push_back(std::move(j));
    }
    json aggregates = json::array();
    for (const auto& a : table.aggregates)
        aggregates.push_back({{"sweep_variable", to_string(a.sweep_variable)},
                              {"sweep_value", a.sweep_value},
                              {"algorithm", to_string(a.algorithm)},
                              {"trials", a.trials},
                              {"failures", a.failures},
                              {"mean_mse", opt_json(a.mean_mse)}});
    json doc = {{"version", kVersion},
                {"config", detail::config_json(cfg)},
                {"notes",
                 {{"mse_evaluation", "per outer iteration, after both the decoding-vector and the phase step"},
                  {"mse_per_iteration", "best MSE so far; raw_mse_per_iteration holds the iteration's own value"},
                  {"aggregates", "mean over successful trials; failures counted separately"}}},
                {"records", records},
                {"aggregates", aggregates}};
    return doc.dump(2) + "\n";
}

OutputPaths emit_results(const ResultsTable& table, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    preflight_output(dir);
    const auto paths = output_paths(dir, cfg.name);
    write_file(paths.csv, records_csv(table.records));
    write_file(paths.aggregate_csv, aggregates_csv(table.aggregates));
    write_file(paths.json, results_json(table, cfg));
    if (cfg.record_traces) write_file(paths.trace_csv, traces_csv(table.records));
    return paths;
}

}  // namespace aircomp
