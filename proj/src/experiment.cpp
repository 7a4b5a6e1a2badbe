// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

#include "aircomp/experiment.hpp"

namespace aircomp {

namespace {

// Substream indices under a trial seed.
constexpr std::uint64_t kChannelStream = 0;
constexpr std::uint64_t kPhaseStream = 1;

struct Task {
    std::size_t point = 0;
    int trial = 0;
};

void fnv1a(std::uint64_t& h, double x) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
}

void hash_vector(std::uint64_t& h, const CVectord& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        fnv1a(h, v(i).real());
        fnv1a(h, v(i).imag());
    }
}

std::vector<TrialRecord> run_task(const ExperimentConfig& cfg, const Task& task, bool timing) {
    const int value = cfg.sweep_points()[task.point];
    const Scenario sc = cfg.scenario_at(value);
    const std::uint64_t seed = trial_seed(cfg.base_seed, task.trial);

    SeededRng channel_rng = SeededRng::substream(seed, kChannelStream);
    const auto users = place_users(sc, channel_rng);
    const ChannelSetd ch = gen_channels(sc, users, channel_rng);
    const std::string hash = channel_hash(ch);

    std::vector<TrialRecord> out;
    for (Algorithm a : cfg.algorithms) {
        TrialRecord rec;
        rec.sweep_variable = cfg.sweep.variable;
        rec.sweep_value = value;
        rec.algorithm = a;
        rec.trial = task.trial;
        rec.seed = seed;
        rec.channel_hash = hash;
        // Every algorithm starts from the same phase stream.
        SeededRng phase_rng = SeededRng::substream(seed, kPhaseStream);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const auto res = run_algorithm(a, ch, sc, cfg.params, phase_rng);
            rec.iterations = res.iterations;
            rec.terminated_by = res.terminated_by;
            rec.message = res.message;
            if (res.ok()) {
                rec.mse = res.mse;
                rec.mse_trace = res.mse_per_iteration;
                rec.raw_mse_trace = res.raw_mse_per_iteration;
            }
        } catch (const std::exception& e) {
            rec.terminated_by = Termination::failed;
            rec.message = e.what();
        }
        if (timing)
            rec.wall_time_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base_seed, int trial) {
    return SeededRng::substream(base_seed, static_cast<std::uint64_t>(trial)).next_u64();
}

std::string channel_hash(const ChannelSetd& ch) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& v : ch.h_direct) hash_vector(h, v);
    for (const auto& v : ch.h_irs_user) hash_vector(h, v);
    for (Eigen::Index j = 0; j < ch.G.cols(); ++j) hash_vector(h, ch.G.col(j));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ResultsTable run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    std::vector<Task> tasks;
    const auto points = cfg.sweep_points();
    for (std::size_t p = 0; p < points.size(); ++p)
        for (int t = 0; t < cfg.trials; ++t) tasks.push_back({p, t});

    std::vector<std::vector<TrialRecord>> slots(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                slots[i] = run_task(cfg, tasks[i], opts.timing);
                if (opts.on_record)
                    for (const auto& r : slots[i]) opts.on_record(r);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = tasks.size();
                return;
            }
        }
    };

    int threads = opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    ResultsTable table;
    for (auto& s : slots)
        for (auto& r : s) table.records.push_back(std::move(r));
    table.aggregates = aggregate(table.records, cfg);
    return table;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records, const ExperimentConfig& cfg) {
    std::vector<AggregateRow> rows;
    for (int value : cfg.sweep_points()) {
        for (Algorithm a : cfg.algorithms) {
            AggregateRow row;
            row.sweep_variable = cfg.sweep.variable;
            row.sweep_value = value;
            row.algorithm = a;
            double sum = 0;
            int ok = 0;
            for (const auto& r : records) {
                if (r.sweep_value != value || r.algorithm != a) continue;
                ++row.trials;
                if (r.mse) {
                    sum += *r.mse;
                    ++ok;
                } else {
                    ++row.failures;
                }
            }
            if (ok > 0) row.mean_mse = sum / ok;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace aircomp
