#include "troupe/agents.hpp"

#include <cmath>
#include <utility>

#include "troupe/errors.hpp"

namespace troupe {
namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    // field separator so ("ab","c") and ("a","bc") hash apart
    h ^= 0x1f;
    h *= kFnvPrime;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// uniform in [0,1)
double next_unit(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

std::uint64_t next_below(std::uint64_t& state, std::uint64_t n) {
    return splitmix64(state) % n;
}

const std::vector<std::string>& text_distractors() {
    static const std::vector<std::string> pool = {
        "indeterminate from this viewpoint",
        "partially occluded region",
        "background clutter dominates",
        "mirrored arrangement instead",
        "opposite side entirely",
        "neither candidate fits",
    };
    return pool;
}

Answer wrong_answer(const QueryItem& query, const Answer& truth, std::uint64_t& state,
                    int distractor_count) {
    switch (truth.kind) {
    case AnswerKind::choice: {
        std::vector<std::string> wrong;
        for (const auto& opt : query.options)
            if (opt != truth.choice) wrong.push_back(opt);
        if (wrong.empty())
            throw domain_error("simulated agent: query '" + query.query_id +
                               "' has no wrong option to emit");
        return Answer::make_choice(wrong[next_below(state, wrong.size())]);
    }
    case AnswerKind::numeric: {
        double u = 0.3 + 0.7 * next_unit(state);
        double sign = (splitmix64(state) & 1) ? 1.0 : -1.0;
        double base = truth.number;
        // relative perturbation, absolute when the truth is at zero
        double value = (std::abs(base) > 1e-12) ? base * (1.0 + sign * u) : sign * u;
        return Answer::make_numeric(value);
    }
    case AnswerKind::text: {
        const auto& pool = text_distractors();
        std::uint64_t n = std::min<std::uint64_t>(
            pool.size(), static_cast<std::uint64_t>(std::max(distractor_count, 1)));
        return Answer::make_text(pool[next_below(state, n)]);
    }
    }
    throw contract_error("simulated agent: unhandled answer kind");
}

} // namespace

std::uint64_t derive_stream_seed(std::uint64_t seed, const std::string& query_id,
                                 const std::string& agent_id, const std::string& role_id) {
    std::uint64_t h = kFnvOffset;
    for (int i = 0; i < 8; ++i) {
        h ^= (seed >> (8 * i)) & 0xff;
        h *= kFnvPrime;
    }
    fnv_mix(h, query_id);
    fnv_mix(h, agent_id);
    fnv_mix(h, role_id);
    return h;
}

double ReliabilityProfile::cell(const std::string& role, const std::string& category) const {
    auto it = accuracy.find({role, category});
    if (it == accuracy.end())
        throw config_error("reliability profile: no accuracy for role '" + role +
                           "' in category '" + category + "'");
    return it->second;
}

ReliabilityProfile ReliabilityProfile::uniform(const std::vector<std::string>& roles,
                                               const std::vector<std::string>& categories,
                                               double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0)
        throw config_error("reliability profile: accuracy must lie in [0,1]");
    ReliabilityProfile profile;
    profile.seed = seed;
    for (const auto& r : roles)
        for (const auto& c : categories) profile.accuracy[{r, c}] = p;
    return profile;
}

SimulatedAgent::SimulatedAgent(std::string agent_id, std::string display_name,
                               ReliabilityProfile profile)
    : id_(std::move(agent_id)), name_(std::move(display_name)), profile_(std::move(profile)) {
    if (id_.empty()) throw config_error("simulated agent: empty agent id");
}

EvidenceRecord SimulatedAgent::execute(const QueryItem& query, const std::string& role_id,
                                       const std::string& category) {
    if (!query.ground_truth)
        throw domain_error("simulated agent: query '" + query.query_id +
                           "' carries no ground truth");
    double p = profile_.cell(role_id, category);

    std::uint64_t state = derive_stream_seed(profile_.seed, query.query_id, id_, role_id);
    bool correct = next_unit(state) < p;

    EvidenceRecord rec;
    rec.agent_id = id_;
    rec.role_id = role_id;
    rec.answer = correct ? *query.ground_truth
                         : wrong_answer(query, *query.ground_truth, state,
                                        profile_.distractor_count);
    rec.trace = correct ? "simulated correct response" : "simulated distractor response";
    return rec;
}

std::vector<std::string> pool_ids(const AgentPool& pool) {
    std::vector<std::string> ids;
    ids.reserve(pool.size());
    for (const auto& a : pool) ids.push_back(a->id());
    return ids;
}

} // namespace troupe
