#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "troupe/hyperparams.hpp"
#include "troupe/query.hpp"
#include "troupe/trust.hpp"

namespace troupe {

inline constexpr int kSnapshotFormatVersion = 1;

// One trust-state update, as exported for trajectory analysis.
struct TrajectoryRow {
    std::uint64_t step = 0;
    std::string query_id;
    std::string category;
    std::string agent_id;
    std::string role_id;
    double reward_raw = 0.0;
    double reward_scaled = 0.0;
    double posterior_mean = 0.5;
    double ema_short = 0.0;
    double ema_long = 0.5;
    double score = 0.5;
};

// Trust snapshot file: a JSON object with format_version, the hyperparameters
// the state was produced under, the step counter, per-category query counts,
// and entries sorted by (agent, role, category). Serialization is canonical:
// two saves of equal stores are byte-identical, and doubles round-trip
// exactly.
std::string snapshot_to_string(const TrustStore& store, const HyperParams& params);
void save_snapshot(const TrustStore& store, const HyperParams& params, const std::string& path);

struct LoadedSnapshot {
    TrustStore store;
    HyperParams params;
};

// Throws version_error on a format_version this reader does not understand,
// parse_error on malformed content (never yielding a partial store), and
// io_error when the file cannot be read.
LoadedSnapshot snapshot_from_string(const std::string& text);
LoadedSnapshot load_snapshot(const std::string& path);

// Line-delimited query stream. Each line is an object with query_id, text,
// kind, and optionally image, category, options, truth. Records are returned
// in file order. With skip_invalid set, a bad line is reported to stderr and
// skipped; otherwise it aborts the read with a parse error naming the line.
std::vector<QueryItem> read_query_stream(const std::string& path, bool skip_invalid = false);
std::vector<QueryItem> parse_query_stream(const std::string& text, bool skip_invalid = false);

// At most n items per category, chosen by a seeded draw; the relative order
// of the survivors is the stream order. Items must carry a category hint.
std::vector<QueryItem> stratified_subsample(const std::vector<QueryItem>& items,
                                            std::size_t n_per_category, std::uint64_t seed);

// Delimiter-separated export with the fixed header
// step,query_id,category,agent_id,role_id,reward_raw,reward_scaled,
// posterior_mean,ema_short,ema_long,score
std::string trajectories_to_string(const std::vector<TrajectoryRow>& rows);
void export_trajectories(const std::vector<TrajectoryRow>& rows, const std::string& path);

} // namespace troupe
