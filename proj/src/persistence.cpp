#include "troupe/persistence.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "troupe/errors.hpp"

namespace troupe {
namespace {

using ordered_json = nlohmann::ordered_json;
using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw io_error("write to '" + path + "' failed");
}

// shortest decimal form that parses back to the same double
std::string number_repr(double x) { return json(x).dump(); }

Answer truth_from_json(const json& truth, AnswerKind kind,
                       const std::vector<std::string>& options) {
    switch (kind) {
    case AnswerKind::choice:
        if (!truth.is_string()) throw parse_error("choice truth must be a string");
        {
            Answer a = Answer::make_choice(truth.get<std::string>());
            bool known = options.empty();
            for (const auto& opt : options)
                if (opt == a.choice) known = true;
            if (!known) throw parse_error("truth '" + a.choice + "' is not among the options");
            return a;
        }
    case AnswerKind::numeric:
        if (!truth.is_number()) throw parse_error("numeric truth must be a number");
        return Answer::make_numeric(truth.get<double>());
    case AnswerKind::text:
        if (!truth.is_string()) throw parse_error("text truth must be a string");
        return Answer::make_text(truth.get<std::string>());
    }
    throw parse_error("unhandled answer kind");
}

QueryItem query_from_json(const json& obj) {
    if (!obj.is_object()) throw parse_error("stream record must be an object");
    QueryItem q;
    q.query_id = obj.at("query_id").get<std::string>();
    q.text = obj.at("text").get<std::string>();
    q.answer_kind = answer_kind_from_string(obj.at("kind").get<std::string>());
    if (obj.contains("image") && !obj["image"].is_null())
        q.image_ref = obj["image"].get<std::string>();
    if (obj.contains("category") && !obj["category"].is_null())
        q.category_hint = obj["category"].get<std::string>();
    if (obj.contains("options") && !obj["options"].is_null()) {
        for (const auto& opt : obj["options"]) {
            Answer canonical = Answer::make_choice(opt.get<std::string>());
            q.options.push_back(canonical.choice);
        }
    }
    if (obj.contains("truth") && !obj["truth"].is_null())
        q.ground_truth = truth_from_json(obj["truth"], q.answer_kind, q.options);
    q.validate();
    return q;
}

} // namespace

std::string snapshot_to_string(const TrustStore& store, const HyperParams& params) {
    ordered_json root;
    root["format_version"] = kSnapshotFormatVersion;
    ordered_json hp;
    hp["kappa"] = params.kappa;
    hp["mu"] = params.mu;
    hp["gamma"] = params.gamma;
    hp["lambda_f"] = params.lambda_f;
    hp["lambda_g"] = params.lambda_g;
    hp["ramp_t"] = params.ramp_t;
    hp["beta"] = params.beta;
    hp["top_k"] = params.top_k;
    root["hyperparams"] = hp;
    root["step"] = store.step();
    ordered_json counts = ordered_json::object();
    for (const auto& [category, n] : store.category_counts()) counts[category] = n;
    root["category_counts"] = counts;
    ordered_json entries = ordered_json::array();
    for (const auto& [key, entry] : store.entries()) {
        ordered_json e;
        e["agent_id"] = key.agent_id;
        e["role_id"] = key.role_id;
        e["category_id"] = key.category_id;
        e["pos_count"] = entry.pos_count;
        e["neg_count"] = entry.neg_count;
        e["ema_short"] = entry.ema_short;
        e["ema_long"] = entry.ema_long;
        e["score"] = entry.score;
        entries.push_back(std::move(e));
    }
    root["entries"] = entries;
    return root.dump(2) + "\n";
}

void save_snapshot(const TrustStore& store, const HyperParams& params,
                   const std::string& path) {
    write_file(path, snapshot_to_string(store, params));
}

LoadedSnapshot snapshot_from_string(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("snapshot: invalid JSON: ") + e.what());
    }
    try {
        int version = root.at("format_version").get<int>();
        if (version != kSnapshotFormatVersion)
            throw version_error("snapshot: unsupported format_version " +
                                std::to_string(version) + " (reader understands " +
                                std::to_string(kSnapshotFormatVersion) + ")");

        LoadedSnapshot out;
        const json& hp = root.at("hyperparams");
        out.params.kappa = hp.at("kappa").get<double>();
        out.params.mu = hp.at("mu").get<double>();
        out.params.gamma = hp.at("gamma").get<double>();
        out.params.lambda_f = hp.at("lambda_f").get<double>();
        out.params.lambda_g = hp.at("lambda_g").get<double>();
        out.params.ramp_t = hp.at("ramp_t").get<double>();
        out.params.beta = hp.at("beta").get<double>();
        out.params.top_k = hp.at("top_k").get<int>();
        out.params.validate();

        TrustStore::EntryMap entries;
        for (const json& e : root.at("entries")) {
            TrustKey key{e.at("agent_id").get<std::string>(), e.at("role_id").get<std::string>(),
                         e.at("category_id").get<std::string>()};
            TrustEntry entry;
            entry.pos_count = e.at("pos_count").get<double>();
            entry.neg_count = e.at("neg_count").get<double>();
            entry.ema_short = e.at("ema_short").get<double>();
            entry.ema_long = e.at("ema_long").get<double>();
            entry.score = e.at("score").get<double>();
            if (!entries.emplace(std::move(key), entry).second)
                throw parse_error("snapshot: duplicate entry key");
        }
        std::map<std::string, std::uint64_t> counts;
        for (const auto& [category, n] : root.at("category_counts").items())
            counts[category] = n.get<std::uint64_t>();

        out.store.restore(std::move(entries), std::move(counts),
                          root.at("step").get<std::uint64_t>());
        return out;
    } catch (const json::exception& e) {
        throw parse_error(std::string("snapshot: missing or mistyped field: ") + e.what());
    }
}

LoadedSnapshot load_snapshot(const std::string& path) {
    return snapshot_from_string(read_file(path));
}

std::vector<QueryItem> parse_query_stream(const std::string& text, bool skip_invalid) {
    std::vector<QueryItem> items;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
        if (blank) continue;
        try {
            items.push_back(query_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            std::string msg =
                "query stream line " + std::to_string(lineno) + ": " + e.what();
            if (!skip_invalid) throw parse_error(msg);
            std::cerr << "warning: skipping " << msg << "\n";
        }
    }
    return items;
}

std::vector<QueryItem> read_query_stream(const std::string& path, bool skip_invalid) {
    return parse_query_stream(read_file(path), skip_invalid);
}

std::vector<QueryItem> stratified_subsample(const std::vector<QueryItem>& items,
                                            std::size_t n_per_category, std::uint64_t seed) {
    std::map<std::string, std::vector<std::size_t>> by_category;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!items[i].category_hint)
            throw domain_error("stratified subsample: query '" + items[i].query_id +
                               "' has no category");
        by_category[*items[i].category_hint].push_back(i);
    }
    std::vector<std::size_t> chosen;
    for (auto& [category, indices] : by_category) {
        std::seed_seq seq{seed, static_cast<std::uint64_t>(std::hash<std::string>{}(category))};
        std::mt19937_64 rng(seq);
        std::shuffle(indices.begin(), indices.end(), rng);
        indices.resize(std::min(indices.size(), n_per_category));
        chosen.insert(chosen.end(), indices.begin(), indices.end());
    }
    std::sort(chosen.begin(), chosen.end()); // keep stream order
    std::vector<QueryItem> out;
    out.reserve(chosen.size());
    for (std::size_t i : chosen) out.push_back(items[i]);
    return out;
}

std::string trajectories_to_string(const std::vector<TrajectoryRow>& rows) {
    std::ostringstream out;
    out << "step,query_id,category,agent_id,role_id,reward_raw,reward_scaled,"
           "posterior_mean,ema_short,ema_long,score\n";
    for (const auto& r : rows) {
        out << r.step << ',' << r.query_id << ',' << r.category << ',' << r.agent_id << ','
            << r.role_id << ',' << number_repr(r.reward_raw) << ','
            << number_repr(r.reward_scaled) << ',' << number_repr(r.posterior_mean) << ','
            << number_repr(r.ema_short) << ',' << number_repr(r.ema_long) << ','
            << number_repr(r.score) << '\n';
    }
    return out.str();
}

void export_trajectories(const std::vector<TrajectoryRow>& rows, const std::string& path) {
    write_file(path, trajectories_to_string(rows));
}

} // namespace troupe
