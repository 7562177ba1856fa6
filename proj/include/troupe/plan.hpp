#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace troupe {

// One selected agent with its assigned role and role-conditioned weight.
struct Assignment {
    std::string agent_id;
    std::string role_id;
    double weight = 0.0; // softmax over this agent's own role scores, in [0,1]
};

// The per-query routing decision. Assignments form a bijection: no agent
// and no role appears twice.
struct RoutingPlan {
    std::string category;
    std::vector<Assignment> assignments;
    std::uint64_t step = 0; // store step at which the plan was built

    const Assignment* find_agent(const std::string& agent_id) const {
        for (const auto& a : assignments)
            if (a.agent_id == agent_id) return &a;
        return nullptr;
    }
};

} // namespace troupe
