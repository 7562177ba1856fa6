#include "troupe/trust.hpp"

#include <algorithm>
#include <cmath>

#include "troupe/errors.hpp"

namespace troupe {

TrustEntry TrustStore::entry(const TrustKey& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? TrustEntry{} : it->second;
}

double TrustStore::score(const std::string& agent, const std::string& role,
                         const std::string& category) const {
    auto it = entries_.find(TrustKey{agent, role, category});
    return it == entries_.end() ? 0.5 : it->second.score;
}

std::uint64_t TrustStore::category_count(const std::string& category) const {
    auto it = category_counts_.find(category);
    return it == category_counts_.end() ? 0 : it->second;
}

double compute_reward(double sim_agent, double sim_final, bool agreement, double kappa) {
    if (!(sim_agent >= 0.0 && sim_agent <= 1.0))
        throw domain_error("compute_reward: sim_agent outside [0,1]");
    if (!(sim_final >= 0.0 && sim_final <= 1.0))
        throw domain_error("compute_reward: sim_final outside [0,1]");
    double r = 2.0 * sim_agent - 1.0;
    if (!agreement) {
        // Penalize agents that underperformed the already-wrong final answer.
        double delta = std::max(0.0, sim_final - sim_agent);
        r -= kappa * delta;
    }
    return r;
}

double clamp_reward(double raw) { return std::clamp(raw, -1.0, 1.0); }

double ramp_factor(std::uint64_t category_count, double ramp_t) {
    return 1.0 - std::exp(-static_cast<double>(category_count) / ramp_t);
}

double bayes_update(TrustEntry& entry, double success_fraction) {
    entry.pos_count += success_fraction;
    entry.neg_count += 1.0 - success_fraction;
    return entry.posterior_mean();
}

void ema_update(TrustEntry& entry, double scaled_reward, double posterior_mean,
                const HyperParams& params) {
    entry.ema_short = (1.0 - params.lambda_f) * entry.ema_short + params.lambda_f * scaled_reward;
    entry.ema_long = (1.0 - params.lambda_g) * entry.ema_long + params.lambda_g * posterior_mean;
}

double final_score(double ema_short, double ema_long, double scaled_reward,
                   const HyperParams& params) {
    double s = params.mu * ema_short + (1.0 - params.mu) * ema_long +
               params.gamma * scaled_reward;
    return std::clamp(s, 0.0, 1.0);
}

std::vector<UpdateRecord> apply_outcome(TrustStore& store, const RoutingPlan& plan,
                                        const std::map<std::string, double>& per_agent_similarity,
                                        double final_similarity, bool agreement,
                                        const HyperParams& params,
                                        const UpdateToggles& toggles) {
    // The ramp reads the category count recorded at routing time, which
    // already includes the current query.
    const double phi = toggles.use_scaling
                           ? ramp_factor(store.category_count(plan.category), params.ramp_t)
                           : 1.0;

    std::vector<UpdateRecord> records;
    records.reserve(plan.assignments.size());
    for (const auto& a : plan.assignments) {
        auto sim_it = per_agent_similarity.find(a.agent_id);
        if (sim_it == per_agent_similarity.end())
            throw contract_error("apply_outcome: no similarity for selected agent '" +
                                 a.agent_id + "'");

        TrustEntry& e = store.obtain(TrustKey{a.agent_id, a.role_id, plan.category});

        Reward reward;
        reward.raw = compute_reward(sim_it->second, final_similarity, agreement, params.kappa);
        reward.clamped = clamp_reward(reward.raw);
        reward.scaled = phi * reward.clamped;
        reward.success_fraction = (reward.scaled + 1.0) / 2.0;

        double q = 0.5;
        if (toggles.use_bayes) q = bayes_update(e, reward.success_fraction);

        if (toggles.use_dual_ema) {
            ema_update(e, reward.scaled, q, params);
            e.score = final_score(e.ema_short, e.ema_long, reward.scaled, params);
        } else {
            e.score = std::clamp(reward.scaled, 0.0, 1.0);
        }

        records.push_back(UpdateRecord{a.agent_id, a.role_id, plan.category, reward.raw,
                                       reward.scaled, q, e.ema_short, e.ema_long, e.score});
    }
    store.advance_step();
    return records;
}

} // namespace troupe
