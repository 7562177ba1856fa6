#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "troupe/config.hpp"
#include "troupe/persistence.hpp"

namespace troupe {

struct AccuracyReport {
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_category; // correct, total
    std::size_t correct = 0;
    std::size_t total = 0;

    double overall() const { return total ? static_cast<double>(correct) / total : 0.0; }
};

struct OptimizeOutcome {
    TrustStore store;
    std::vector<TrajectoryRow> rows;
    AccuracyReport accuracy;
    std::string snapshot_path;
    std::string trajectory_path;
    std::string summary_path;
};

struct EvaluateOutcome {
    AccuracyReport accuracy;
    // (agent, role) -> number of queries with that assignment
    std::map<std::pair<std::string, std::string>, std::size_t> routing_histogram;
    std::string report_path;
};

struct AblationResult {
    std::string variant;
    double routing_correctness = 0.0; // mean over trials
    double accuracy = 0.0;            // mean final-answer accuracy over trials
};

struct SizeSweepRow {
    int size = 0;
    double routing_correctness = 0.0;
    double accuracy = 0.0;
};

struct SimulateOutcome {
    std::vector<AblationResult> ablation; // reward_only, plus_scaling, plus_bayes, full
    std::vector<SizeSweepRow> sweep;
    std::string report_path;
};

// Sequential trust optimization over the configured stream. Writes the final
// snapshot, the per-update trajectory export, and a text summary into
// out_dir, and fails fast (before the first step) on missing ground truth.
OptimizeOutcome run_optimize(const RunConfig& config, std::ostream& log);

// Frozen-state evaluation: loads the snapshot named by snapshot_in, answers
// the stream without mutating anything, and reports per-category accuracy
// plus a routing histogram.
EvaluateOutcome run_evaluate(const RunConfig& config, std::ostream& log);

// Seeded synthetic experiment on an all-simulated pool: update-chain
// ablations at the configured step count, then a full-chain sweep over
// optimization sizes. Routing-correctness is the fraction of
// (step, uniquely-best profile cell) pairs whose best agent actually
// received that role.
SimulateOutcome run_simulate(const RunConfig& config, std::ostream& log);

// Renders a snapshot as a score table (one row per entry) for inspection.
std::string run_export(const RunConfig& config, std::ostream& log);

} // namespace troupe
