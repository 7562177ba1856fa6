#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "troupe/agents.hpp"
#include "troupe/plan.hpp"
#include "troupe/prompts.hpp"
#include "troupe/query.hpp"
#include "troupe/routing.hpp"
#include "troupe/trust.hpp"

namespace troupe {

enum class RunMode { optimize, evaluate };

// Everything produced while answering one query.
struct StepResult {
    std::string query_id;
    std::string category;
    bool category_flagged = false; // classifier output was out of taxonomy
    RoutingPlan plan;
    std::vector<EvidenceRecord> evidence; // one record per assignment, same order
    Answer final_answer;
    bool aggregation_fell_back = false; // reasoner reply unusable, vote used
    std::optional<bool> agreement;      // present iff ground truth present
    std::optional<std::map<std::string, double>> per_agent_similarity;
    std::vector<UpdateRecord> updates; // optimize mode only
};

// Raw category text for a query, e.g. a remote head agent call.
using ClassifierFn = std::function<std::string(const QueryItem&)>;
// Raw reasoner reply for a query plus weighted evidence.
using ReasonerFn =
    std::function<std::string(const QueryItem&, const std::vector<WeightedEvidence>&)>;

struct OrchestratorOptions {
    CategoryTaxonomy taxonomy = CategoryTaxonomy::canonical();
    RoleSet roles = RoleSet::canonical();
    std::string default_category = "spatial_relation"; // landing spot for bad classifier output
    ClassifierFn classifier; // empty: built-in keyword classifier
    ReasonerFn reasoner;     // empty: weight-majority vote
    UpdateToggles toggles;
    bool parallel_specialists = true;
};

// Deterministic keyword fallback for the head classifier. Rule order:
// count phrasing, camera depth, physical size, facing/side words, then
// positional words; anything else lands in spatial_relation.
std::string keyword_classify(const std::string& text);

struct ClassifyOutcome {
    std::string category;
    bool flagged = false;
};

// Category hint wins outright; otherwise the configured backend runs and
// out-of-taxonomy output falls back to the default category, flagged.
ClassifyOutcome classify(const QueryItem& query, const OrchestratorOptions& options);

// Weight-majority vote over non-failed records: choice and text answers win
// by the largest total weight; numeric answers take the weighted median.
// Ties resolve to the answer of the single highest-weight voter.
// Throws domain_error when no usable vote exists.
Answer weight_majority_vote(const std::vector<WeightedEvidence>& evidence);

// Final answer for the query. With a reasoner backend, renders the
// evidence-integration prompt and parses the reply; a parse failure falls
// back to the vote and sets the flag.
Answer aggregate(const QueryItem& query, const std::vector<WeightedEvidence>& evidence,
                 const ReasonerFn& reasoner, bool& fell_back);

// The full per-query pipeline: classify, route, run specialists fork-join,
// aggregate, and in optimize mode score the outcome and update trust.
// Evaluate mode leaves the store untouched. A failed specialist contributes
// a zero-similarity sentinel record; the step itself never aborts.
StepResult run_step(const QueryItem& query, TrustStore& store, const AgentPool& pool,
                    const HyperParams& params, RunMode mode,
                    const OrchestratorOptions& options = {});

} // namespace troupe
