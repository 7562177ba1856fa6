#include "troupe/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "troupe/errors.hpp"

namespace troupe {
namespace {

namespace fs = std::filesystem;

std::string join_path(const std::string& dir, const std::string& leaf) {
    return (fs::path(dir) / leaf).string();
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory '" + dir + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw io_error("write to '" + path + "' failed");
}

std::string number(double x) { return nlohmann::json(x).dump(); }

void tally(AccuracyReport& report, const std::string& category, bool correct) {
    auto& [hits, total] = report.per_category[category];
    ++total;
    ++report.total;
    if (correct) {
        ++hits;
        ++report.correct;
    }
}

std::string accuracy_text(const AccuracyReport& report) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    for (const auto& [category, counts] : report.per_category) {
        double acc = counts.second ? static_cast<double>(counts.first) / counts.second : 0.0;
        out << "  " << category << ": " << acc << " (" << counts.first << "/" << counts.second
            << ")\n";
    }
    out << "  overall: " << report.overall() << " (" << report.correct << "/" << report.total
        << ")\n";
    return out.str();
}

std::string score_table(const TrustStore& store) {
    std::ostringstream out;
    out << "agent_id,role_id,category_id,score,pos_count,neg_count,ema_short,ema_long\n";
    for (const auto& [key, entry] : store.entries()) {
        out << key.agent_id << ',' << key.role_id << ',' << key.category_id << ','
            << number(entry.score) << ',' << number(entry.pos_count) << ','
            << number(entry.neg_count) << ',' << number(entry.ema_short) << ','
            << number(entry.ema_long) << '\n';
    }
    return out.str();
}

std::vector<QueryItem> load_stream(const RunConfig& config) {
    if (config.stream_path.empty())
        throw config_error("this command requires a query stream (--stream)");
    std::vector<QueryItem> items = read_query_stream(config.stream_path);
    if (config.stratify_per_category)
        items = stratified_subsample(items, *config.stratify_per_category, config.seed);
    return items;
}

std::string option_letter(int index) { return std::string(1, static_cast<char>('A' + index)); }

// Synthetic stream for the simulate command: one multiple-choice query per
// step, ground truth pinned to the first option so that wrong answers are
// uniform over the rest. The query id depends on the step only; trial
// variation enters through the pool seed.
QueryItem synthetic_query(int step, const SimulateConfig& sim) {
    QueryItem q;
    q.query_id = "sim-" + std::to_string(step);
    q.text = "synthetic probe " + std::to_string(step);
    q.category_hint = sim.category;
    q.answer_kind = AnswerKind::choice;
    for (int i = 0; i < sim.option_count; ++i) q.options.push_back(option_letter(i));
    q.ground_truth = Answer::make_choice("A");
    return q;
}

// The profile cells the router is expected to discover: per role, the agent
// with the strictly highest accuracy in the scenario category.
std::vector<std::pair<std::string, std::string>> best_cells(const RunConfig& config) {
    std::vector<std::pair<std::string, std::string>> cells;
    for (const auto& role : config.roles.roles) {
        const AgentConfig* best = nullptr;
        bool unique = false;
        for (const auto& a : config.pool) {
            double p = a.profile.cell(role, config.simulate.category);
            if (!best || p > best->profile.cell(role, config.simulate.category)) {
                best = &a;
                unique = true;
            } else if (p == best->profile.cell(role, config.simulate.category)) {
                unique = false;
            }
        }
        if (best && unique) cells.emplace_back(best->agent_id, role);
    }
    return cells;
}

AgentPool seeded_pool(const RunConfig& config, std::uint64_t trial_seed) {
    AgentPool pool;
    for (const auto& a : config.pool) {
        ReliabilityProfile profile = a.profile;
        profile.seed = trial_seed;
        pool.push_back(std::make_shared<SimulatedAgent>(a.agent_id, a.display_name, profile));
    }
    return pool;
}

struct TrialStats {
    double routing_correctness = 0.0;
    double accuracy = 0.0;
};

TrialStats simulate_trial(const RunConfig& config, std::uint64_t trial_seed, int steps,
                          const UpdateToggles& toggles,
                          const std::vector<std::pair<std::string, std::string>>& targets) {
    AgentPool pool = seeded_pool(config, trial_seed);
    OrchestratorOptions options = build_orchestrator_options(config);
    options.toggles = toggles;
    options.parallel_specialists = false; // tight loop, thread spawn overhead dominates
    TrustStore store;

    std::size_t hits = 0, correct = 0;
    for (int t = 0; t < steps; ++t) {
        QueryItem q = synthetic_query(t, config.simulate);
        StepResult result = run_step(q, store, pool, config.params, RunMode::optimize, options);
        for (const auto& [agent, role] : targets) {
            const Assignment* a = result.plan.find_agent(agent);
            if (a && a->role_id == role) ++hits;
        }
        if (result.agreement && *result.agreement) ++correct;
    }
    TrialStats stats;
    std::size_t denom = static_cast<std::size_t>(steps) * std::max<std::size_t>(1, targets.size());
    stats.routing_correctness = static_cast<double>(hits) / static_cast<double>(denom);
    stats.accuracy = static_cast<double>(correct) / steps;
    return stats;
}

TrialStats simulate_mean(const RunConfig& config, int steps, const UpdateToggles& toggles,
                         const std::vector<std::pair<std::string, std::string>>& targets) {
    TrialStats mean;
    for (int trial = 0; trial < config.simulate.trials; ++trial) {
        TrialStats s = simulate_trial(config, config.seed + trial, steps, toggles, targets);
        mean.routing_correctness += s.routing_correctness;
        mean.accuracy += s.accuracy;
    }
    mean.routing_correctness /= config.simulate.trials;
    mean.accuracy /= config.simulate.trials;
    return mean;
}

} // namespace

OptimizeOutcome run_optimize(const RunConfig& config, std::ostream& log) {
    config.validate();
    std::vector<QueryItem> items = load_stream(config);
    for (const auto& q : items)
        if (!q.ground_truth)
            throw domain_error("optimize: query '" + q.query_id + "' has no ground truth");

    ensure_out_dir(config.out_dir);
    OptimizeOutcome outcome;
    if (!config.snapshot_in.empty()) outcome.store = load_snapshot(config.snapshot_in).store;

    AgentPool pool = build_pool(config);
    OrchestratorOptions options = build_orchestrator_options(config);

    for (const auto& q : items) {
        StepResult result =
            run_step(q, outcome.store, pool, config.params, RunMode::optimize, options);
        tally(outcome.accuracy, result.category, result.agreement.value_or(false));
        for (const auto& u : result.updates) {
            TrajectoryRow row;
            row.step = outcome.store.step();
            row.query_id = q.query_id;
            row.category = u.category_id;
            row.agent_id = u.agent_id;
            row.role_id = u.role_id;
            row.reward_raw = u.reward_raw;
            row.reward_scaled = u.reward_scaled;
            row.posterior_mean = u.posterior_mean;
            row.ema_short = u.ema_short;
            row.ema_long = u.ema_long;
            row.score = u.score;
            outcome.rows.push_back(std::move(row));
        }
    }

    outcome.snapshot_path = config.snapshot_out.empty()
                                ? join_path(config.out_dir, "snapshot.json")
                                : config.snapshot_out;
    outcome.trajectory_path = join_path(config.out_dir, "trajectories.csv");
    outcome.summary_path = join_path(config.out_dir, "summary.txt");

    save_snapshot(outcome.store, config.params, outcome.snapshot_path);
    export_trajectories(outcome.rows, outcome.trajectory_path);

    std::ostringstream summary;
    summary << "optimization run: " << items.size() << " queries, " << outcome.store.step()
            << " trust updates\n\naccuracy during optimization\n"
            << accuracy_text(outcome.accuracy) << "\nfinal trust scores\n"
            << score_table(outcome.store);
    write_text(outcome.summary_path, summary.str());

    log << "optimize: " << items.size() << " queries done, overall accuracy "
        << outcome.accuracy.overall() << "\n"
        << "  snapshot:     " << outcome.snapshot_path << "\n"
        << "  trajectories: " << outcome.trajectory_path << "\n"
        << "  summary:      " << outcome.summary_path << "\n";
    return outcome;
}

EvaluateOutcome run_evaluate(const RunConfig& config, std::ostream& log) {
    config.validate();
    if (config.snapshot_in.empty())
        throw config_error("evaluate requires a trust snapshot (--snapshot-in)");
    LoadedSnapshot snapshot = load_snapshot(config.snapshot_in);
    std::vector<QueryItem> items = load_stream(config);
    ensure_out_dir(config.out_dir);

    AgentPool pool = build_pool(config);
    OrchestratorOptions options = build_orchestrator_options(config);

    std::vector<StepResult> results(items.size());
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            results[i] = run_step(items[i], snapshot.store, pool, snapshot.params,
                                  RunMode::evaluate, options);
    };
    std::size_t workers = std::min<std::size_t>(config.parallelism, std::max<std::size_t>(1, items.size()));
    if (workers <= 1) {
        worker(0, items.size());
    } else {
        // frozen state makes per-query work independent
        std::vector<std::future<void>> futures;
        std::size_t chunk = (items.size() + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            std::size_t begin = w * chunk;
            std::size_t end = std::min(items.size(), begin + chunk);
            if (begin >= end) break;
            futures.push_back(std::async(std::launch::async, worker, begin, end));
        }
        for (auto& f : futures) f.get();
    }

    EvaluateOutcome outcome;
    for (const auto& r : results) {
        if (r.agreement) tally(outcome.accuracy, r.category, *r.agreement);
        for (const auto& a : r.plan.assignments)
            ++outcome.routing_histogram[{a.agent_id, a.role_id}];
    }

    std::ostringstream report;
    report << "frozen evaluation: " << items.size() << " queries\n\naccuracy\n"
           << accuracy_text(outcome.accuracy) << "\nrouting histogram (agent, role, queries)\n";
    for (const auto& [key, count] : outcome.routing_histogram)
        report << "  " << key.first << "  " << key.second << "  " << count << "\n";
    outcome.report_path = join_path(config.out_dir, "evaluation.txt");
    write_text(outcome.report_path, report.str());

    log << "evaluate: " << items.size() << " queries, overall accuracy "
        << outcome.accuracy.overall() << "\n  report: " << outcome.report_path << "\n";
    return outcome;
}

SimulateOutcome run_simulate(const RunConfig& config, std::ostream& log) {
    config.validate();
    for (const auto& a : config.pool)
        if (a.backend != "simulated")
            throw config_error("simulate: pool must be all-simulated (agent '" + a.agent_id +
                               "' is " + a.backend + ")");
    ensure_out_dir(config.out_dir);

    std::vector<std::pair<std::string, std::string>> targets = best_cells(config);

    const std::vector<std::pair<std::string, UpdateToggles>> variants = {
        {"reward_only", {false, false, false}},
        {"plus_scaling", {true, false, false}},
        {"plus_bayes", {true, true, false}},
        {"full", {true, true, true}},
    };

    SimulateOutcome outcome;
    std::ostringstream report;
    report << std::fixed << std::setprecision(4);
    report << "update-chain ablation: " << config.simulate.trials << " trials x "
           << config.simulate.steps << " steps, category " << config.simulate.category
           << "\ntarget cells:";
    for (const auto& [agent, role] : targets) report << " (" << agent << ", " << role << ")";
    report << "\n\nvariant            routing_correctness  accuracy\n";
    for (const auto& [name, toggles] : variants) {
        TrialStats stats = simulate_mean(config, config.simulate.steps, toggles, targets);
        outcome.ablation.push_back({name, stats.routing_correctness, stats.accuracy});
        report << "  " << std::left << std::setw(16) << name << " " << std::right
               << stats.routing_correctness << "               " << stats.accuracy << "\n";
        log << "simulate ablation " << name << ": routing_correctness "
            << stats.routing_correctness << ", accuracy " << stats.accuracy << "\n";
    }

    report << "\noptimization size sweep (full chain)\nsize  routing_correctness  accuracy\n";
    for (int size : config.simulate.sizes) {
        TrialStats stats = simulate_mean(config, size, {true, true, true}, targets);
        outcome.sweep.push_back({size, stats.routing_correctness, stats.accuracy});
        report << "  " << std::left << std::setw(5) << size << " " << std::right
               << stats.routing_correctness << "               " << stats.accuracy << "\n";
        log << "simulate sweep size " << size << ": routing_correctness "
            << stats.routing_correctness << ", accuracy " << stats.accuracy << "\n";
    }

    outcome.report_path = join_path(config.out_dir, "simulation.txt");
    write_text(outcome.report_path, report.str());
    log << "  report: " << outcome.report_path << "\n";
    return outcome;
}

std::string run_export(const RunConfig& config, std::ostream& log) {
    if (config.snapshot_in.empty())
        throw config_error("export requires a trust snapshot (--snapshot-in)");
    LoadedSnapshot snapshot = load_snapshot(config.snapshot_in);
    ensure_out_dir(config.out_dir);
    std::string table = score_table(snapshot.store);
    std::string path = join_path(config.out_dir, "scores.csv");
    write_text(path, table);
    log << "export: " << snapshot.store.entries().size() << " entries\n  table: " << path
        << "\n";
    return table;
}

} // namespace troupe
