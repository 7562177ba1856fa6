#pragma once

#include <string>
#include <vector>

#include "troupe/plan.hpp"
#include "troupe/trust.hpp"

namespace troupe {

// The ordered set of reasoning-strategy roles. Order is stable and is the
// final tie-breaker in role assignment.
struct RoleSet {
    std::vector<std::string> roles;

    static RoleSet canonical() {
        return RoleSet{{"implicit_visual", "explicit_3d", "scene_graph"}};
    }

    bool contains(const std::string& role) const {
        for (const auto& r : roles)
            if (r == role) return true;
        return false;
    }
};

// Mean trust score over all roles for one agent in one category.
// Missing entries read as 0.5. Throws domain_error on an empty role set.
double aggregate_score(const TrustStore& store, const std::string& agent,
                       const std::string& category, const RoleSet& roles);

// The k agents with the highest aggregate score, descending; ties broken by
// agent-id order. Returns the whole pool if it is smaller than k.
// Throws domain_error on an empty pool or k < 1.
std::vector<std::string> select_topk(const TrustStore& store,
                                     const std::vector<std::string>& pool,
                                     const std::string& category, const RoleSet& roles,
                                     int k);

// Greedy global matching: repeatedly takes the unassigned (agent, role) pair
// with the highest trust score; ties break by higher aggregate score, then
// agent id, then role order. Returns min(|selected|, |roles|) pairs, ordered
// to match `selected`.
std::vector<std::pair<std::string, std::string>> assign_roles(
    const TrustStore& store, const std::vector<std::string>& selected,
    const std::string& category, const RoleSet& roles);

// Softmax of one agent's role scores, sharpness beta, computed with
// max-subtraction. beta = 0 gives the uniform distribution.
std::vector<double> role_weights(const TrustStore& store, const std::string& agent,
                                 const std::string& category, const RoleSet& roles,
                                 double beta);

// Composes select_topk, assign_roles and role_weights into a plan.
// When record_query is set (the optimize path), increments the category's
// query count; frozen evaluation passes false and leaves the store untouched.
RoutingPlan build_routing_plan(TrustStore& store, const std::vector<std::string>& pool,
                               const std::string& category, const RoleSet& roles,
                               const HyperParams& params, bool record_query = true);

} // namespace troupe
