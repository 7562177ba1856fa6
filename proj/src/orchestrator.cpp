#include "troupe/orchestrator.hpp"

#include <algorithm>
#include <cctype>
#include <future>

#include "troupe/errors.hpp"

namespace troupe {
namespace {

std::string lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool contains_any(const std::string& text, std::initializer_list<const char*> words) {
    for (const char* w : words)
        if (text.find(w) != std::string::npos) return true;
    return false;
}

const Assignment& assignment_for(const RoutingPlan& plan, const std::string& agent_id) {
    const Assignment* a = plan.find_agent(agent_id);
    if (!a) throw contract_error("orchestrator: evidence from unassigned agent '" + agent_id + "'");
    return *a;
}

} // namespace

std::string keyword_classify(const std::string& text) {
    std::string t = lower(text);
    if (contains_any(t, {"how many", "count"})) return "counting";
    if (contains_any(t, {"closer", "closest", "farther", "farthest", "further", "distance",
                         "depth", "how far", "near the camera", "proximity"}))
        return "distance_depth";
    if (contains_any(t, {"taller", "bigger", "larger", "smaller", "how big", "wider",
                         "size", "longer", "how large"}))
        return "size";
    if (contains_any(t, {"facing", "left", "right", "front", "behind", "parallel",
                         "perpendicular", "which way", "direction", "oriented"}))
        return "orientation";
    if (contains_any(t, {"above", "below", "next to", "between", "on top", "under",
                         "beneath", "higher", "beside"}))
        return "spatial_relation";
    return "spatial_relation";
}

ClassifyOutcome classify(const QueryItem& query, const OrchestratorOptions& options) {
    if (query.category_hint) {
        if (!options.taxonomy.contains(*query.category_hint))
            return {options.default_category, true};
        return {*query.category_hint, false};
    }
    std::string raw =
        options.classifier ? options.classifier(query) : keyword_classify(query.text);
    // classifier replies may carry whitespace; trim before matching
    std::string trimmed;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
    for (const auto& cat : options.taxonomy.categories)
        if (lower(trimmed) == cat) return {cat, false};
    return {options.default_category, true};
}

Answer weight_majority_vote(const std::vector<WeightedEvidence>& evidence) {
    std::vector<const WeightedEvidence*> usable;
    for (const auto& e : evidence)
        if (!e.record.parse_failed) usable.push_back(&e);
    if (usable.empty()) throw domain_error("aggregate: no usable votes");

    const WeightedEvidence* heaviest = usable.front();
    for (const auto* e : usable)
        if (e->weight > heaviest->weight) heaviest = e;

    AnswerKind kind = usable.front()->record.answer.kind;
    if (kind == AnswerKind::numeric) {
        // weighted median over the voted values
        std::vector<std::pair<double, double>> votes; // (value, weight)
        double total = 0.0;
        for (const auto* e : usable) {
            votes.emplace_back(e->record.answer.number, e->weight);
            total += e->weight;
        }
        if (total <= 0.0) return heaviest->record.answer;
        std::sort(votes.begin(), votes.end());
        double acc = 0.0;
        for (const auto& [value, weight] : votes) {
            acc += weight;
            if (acc >= total / 2.0) return Answer::make_numeric(value);
        }
        return Answer::make_numeric(votes.back().first);
    }

    // choice and text: largest total weight per distinct answer
    std::map<std::string, double> tally;
    for (const auto* e : usable) {
        const auto& a = e->record.answer;
        tally[kind == AnswerKind::choice ? a.choice : a.text] += e->weight;
    }
    double best = -1.0;
    for (const auto& [answer, weight] : tally) best = std::max(best, weight);

    // ties resolve to the highest-weight voter among the tied answers
    const WeightedEvidence* winner = nullptr;
    for (const auto* e : usable) {
        const auto& a = e->record.answer;
        const std::string& key = kind == AnswerKind::choice ? a.choice : a.text;
        if (tally[key] < best - 1e-12) continue;
        if (!winner || e->weight > winner->weight) winner = e;
    }
    return winner->record.answer;
}

Answer aggregate(const QueryItem& query, const std::vector<WeightedEvidence>& evidence,
                 const ReasonerFn& reasoner, bool& fell_back) {
    fell_back = false;
    if (reasoner) {
        try {
            std::string reply = reasoner(query, evidence);
            return parse_answer(reply, query.answer_kind, query.options);
        } catch (const error&) {
            fell_back = true;
        }
    }
    return weight_majority_vote(evidence);
}

StepResult run_step(const QueryItem& query, TrustStore& store, const AgentPool& pool,
                    const HyperParams& params, RunMode mode,
                    const OrchestratorOptions& options) {
    query.validate();
    if (mode == RunMode::optimize && !query.ground_truth)
        throw domain_error("run_step: optimize mode requires ground truth (query '" +
                           query.query_id + "')");

    StepResult result;
    result.query_id = query.query_id;

    auto classified = classify(query, options);
    result.category = classified.category;
    result.category_flagged = classified.flagged;

    result.plan = build_routing_plan(store, pool_ids(pool), result.category, options.roles,
                                     params, mode == RunMode::optimize);

    auto run_one = [&](const Assignment& a) -> EvidenceRecord {
        for (const auto& agent : pool) {
            if (agent->id() != a.agent_id) continue;
            try {
                return agent->execute(query, a.role_id, result.category);
            } catch (const std::exception& e) {
                EvidenceRecord rec;
                rec.agent_id = a.agent_id;
                rec.role_id = a.role_id;
                rec.answer.kind = query.answer_kind;
                rec.parse_failed = true;
                rec.trace = std::string("specialist failure: ") + e.what();
                return rec;
            }
        }
        throw contract_error("run_step: plan references unknown agent '" + a.agent_id + "'");
    };

    if (options.parallel_specialists && result.plan.assignments.size() > 1) {
        std::vector<std::future<EvidenceRecord>> futures;
        futures.reserve(result.plan.assignments.size());
        for (const auto& a : result.plan.assignments)
            futures.push_back(std::async(std::launch::async, run_one, std::cref(a)));
        for (auto& f : futures) result.evidence.push_back(f.get());
    } else {
        for (const auto& a : result.plan.assignments) result.evidence.push_back(run_one(a));
    }

    std::vector<WeightedEvidence> weighted;
    weighted.reserve(result.evidence.size());
    for (const auto& rec : result.evidence)
        weighted.push_back({rec, assignment_for(result.plan, rec.agent_id).weight});

    result.final_answer =
        aggregate(query, weighted, options.reasoner, result.aggregation_fell_back);

    if (query.ground_truth) {
        const Answer& truth = *query.ground_truth;
        result.agreement = is_agreement(result.final_answer, truth);
        std::map<std::string, double> sims;
        for (const auto& rec : result.evidence)
            sims[rec.agent_id] = rec.parse_failed ? 0.0 : sim(rec.answer, truth);
        result.per_agent_similarity = sims;

        if (mode == RunMode::optimize) {
            double final_sim = sim(result.final_answer, truth);
            result.updates = apply_outcome(store, result.plan, sims, final_sim,
                                           *result.agreement, params, options.toggles);
        }
    }
    return result;
}

} // namespace troupe
