#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "troupe/agents.hpp"
#include "troupe/query.hpp"

namespace troupe {

// Embedded prompt templates. These are generated from assets/prompts at
// build time so the binaries and the checked-in files cannot drift.
const std::string& head_template();
const std::string& reasoning_template();
// Throws config_error on an unknown role.
const std::string& role_template(const std::string& role_id);

// All occurrences of `placeholder` replaced by `value`.
std::string substitute(const std::string& tpl, const std::string& placeholder,
                       const std::string& value);

// Head-classifier prompt with the question filled in.
std::string render_head_prompt(const QueryItem& query);

// Role prompt with the question filled in; byte-stable given identical inputs.
std::string render_role_prompt(const std::string& role_id, const QueryItem& query);

struct WeightedEvidence {
    EvidenceRecord record;
    double weight = 0.0;
};

// Reasoning-agent prompt: the evidence block lists every specialist's agent
// id, role, trust weight, answer, and trace; traces longer than
// trace_byte_budget are truncated with a marker.
std::string render_reasoning_prompt(const QueryItem& query,
                                    const std::vector<WeightedEvidence>& evidence,
                                    std::size_t trace_byte_budget = 2000);

} // namespace troupe
