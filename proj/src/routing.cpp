#include "troupe/routing.hpp"

#include <algorithm>
#include <cmath>

#include "troupe/errors.hpp"

namespace troupe {

double aggregate_score(const TrustStore& store, const std::string& agent,
                       const std::string& category, const RoleSet& roles) {
    if (roles.roles.empty()) throw domain_error("aggregate_score: empty role set");
    double sum = 0.0;
    for (const auto& role : roles.roles) sum += store.score(agent, role, category);
    return sum / static_cast<double>(roles.roles.size());
}

std::vector<std::string> select_topk(const TrustStore& store,
                                     const std::vector<std::string>& pool,
                                     const std::string& category, const RoleSet& roles,
                                     int k) {
    if (pool.empty()) throw domain_error("select_topk: empty pool");
    if (k < 1) throw domain_error("select_topk: k must be >= 1");

    std::vector<std::pair<double, std::string>> ranked;
    ranked.reserve(pool.size());
    for (const auto& agent : pool)
        ranked.emplace_back(aggregate_score(store, agent, category, roles), agent);
    // Descending score, then ascending agent id, regardless of pool order.
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    std::vector<std::string> out;
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(ranked[i].second);
    return out;
}

std::vector<std::pair<std::string, std::string>> assign_roles(
    const TrustStore& store, const std::vector<std::string>& selected,
    const std::string& category, const RoleSet& roles) {
    if (selected.empty()) throw domain_error("assign_roles: no selected agents");

    std::vector<std::string> agents = selected;
    std::vector<std::string> open_roles = roles.roles;
    std::vector<std::pair<std::string, std::string>> result;

    while (!agents.empty() && !open_roles.empty()) {
        std::size_t best_a = 0, best_r = 0;
        bool have = false;
        double best_score = 0.0, best_agg = 0.0;
        for (std::size_t ai = 0; ai < agents.size(); ++ai) {
            const double agg = aggregate_score(store, agents[ai], category, roles);
            for (std::size_t ri = 0; ri < open_roles.size(); ++ri) {
                const double s = store.score(agents[ai], open_roles[ri], category);
                // Tie chain: score, aggregate, agent id, role order. Agents and
                // roles are scanned in id/role order, so "keep the first" is
                // exactly the documented tie-break.
                bool better = false;
                if (!have) {
                    better = true;
                } else if (s != best_score) {
                    better = s > best_score;
                } else if (agg != best_agg) {
                    better = agg > best_agg;
                } else if (agents[ai] != agents[best_a]) {
                    better = agents[ai] < agents[best_a];
                }
                if (better) {
                    best_a = ai;
                    best_r = ri;
                    best_score = s;
                    best_agg = agg;
                    have = true;
                }
            }
        }
        result.emplace_back(agents[best_a], open_roles[best_r]);
        agents.erase(agents.begin() + static_cast<std::ptrdiff_t>(best_a));
        open_roles.erase(open_roles.begin() + static_cast<std::ptrdiff_t>(best_r));
    }

    // Present pairs in the selection order of `selected`.
    std::vector<std::pair<std::string, std::string>> ordered;
    for (const auto& agent : selected)
        for (auto& p : result)
            if (p.first == agent) ordered.push_back(p);
    return ordered;
}

std::vector<double> role_weights(const TrustStore& store, const std::string& agent,
                                 const std::string& category, const RoleSet& roles,
                                 double beta) {
    if (roles.roles.empty()) throw domain_error("role_weights: empty role set");
    std::vector<double> scores;
    scores.reserve(roles.roles.size());
    for (const auto& role : roles.roles)
        scores.push_back(store.score(agent, role, category));

    const double mx = *std::max_element(scores.begin(), scores.end());
    std::vector<double> w(scores.size());
    double denom = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        w[i] = std::exp(beta * (scores[i] - mx));
        denom += w[i];
    }
    for (auto& x : w) x /= denom;
    return w;
}

RoutingPlan build_routing_plan(TrustStore& store, const std::vector<std::string>& pool,
                               const std::string& category, const RoleSet& roles,
                               const HyperParams& params, bool record_query) {
    if (record_query) store.record_query(category);

    RoutingPlan plan;
    plan.category = category;
    plan.step = store.step();

    const auto selected = select_topk(store, pool, category, roles, params.top_k);
    const auto pairs = assign_roles(store, selected, category, roles);
    for (const auto& [agent, role] : pairs) {
        const auto weights = role_weights(store, agent, category, roles, params.beta);
        std::size_t role_ix = 0;
        while (roles.roles[role_ix] != role) ++role_ix;
        plan.assignments.push_back(Assignment{agent, role, weights[role_ix]});
    }
    return plan;
}

} // namespace troupe
