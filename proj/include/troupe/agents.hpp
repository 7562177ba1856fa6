#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "troupe/answer.hpp"
#include "troupe/query.hpp"

namespace troupe {

// One specialist's output for one query.
struct EvidenceRecord {
    std::string agent_id;
    std::string role_id;
    Answer answer;
    std::string trace;     // reasoning trace / serialized tool output, may be empty
    double latency = 0.0;  // seconds
    bool parse_failed = false; // sentinel: answer carries sim-0 placeholder
};

// Accuracy profile of a simulated specialist: success probability per
// (role, category) cell. The profile plus its seed fully determine the
// answer stream; per-query randomness is derived from
// (seed, query_id, agent_id, role_id) so execution order and concurrency
// cannot change outcomes.
struct ReliabilityProfile {
    std::map<std::pair<std::string, std::string>, double> accuracy; // (role, category) -> p
    int distractor_count = 3; // size of the wrong-answer space, >= 1
    std::uint64_t seed = 0;

    double cell(const std::string& role, const std::string& category) const;

    // Uniform profile over the given roles and categories, override cells after.
    static ReliabilityProfile uniform(const std::vector<std::string>& roles,
                                      const std::vector<std::string>& categories, double p,
                                      std::uint64_t seed);
};

// A pluggable answer-producing specialist.
class Agent {
  public:
    virtual ~Agent() = default;
    virtual const std::string& id() const = 0;
    virtual const std::string& display_name() const = 0;
    // Produces evidence for the query under the given role. Must not throw
    // on model-side failures; those degrade to a parse_failed sentinel.
    virtual EvidenceRecord execute(const QueryItem& query, const std::string& role_id,
                                   const std::string& category) = 0;
};

using AgentPool = std::vector<std::shared_ptr<Agent>>;

std::vector<std::string> pool_ids(const AgentPool& pool);

// Synthetic specialist: answers correctly with the profiled probability,
// otherwise emits a wrong option / perturbed numeric / distractor text.
// Requires queries to carry ground truth. Missing profile cells are a
// config error.
class SimulatedAgent : public Agent {
  public:
    SimulatedAgent(std::string agent_id, std::string display_name, ReliabilityProfile profile);

    const std::string& id() const override { return id_; }
    const std::string& display_name() const override { return name_; }
    const ReliabilityProfile& profile() const { return profile_; }

    EvidenceRecord execute(const QueryItem& query, const std::string& role_id,
                           const std::string& category) override;

  private:
    std::string id_;
    std::string name_;
    ReliabilityProfile profile_;
};

// Stable 64-bit hash used to derive per-(seed, query, agent, role) RNG streams.
std::uint64_t derive_stream_seed(std::uint64_t seed, const std::string& query_id,
                                 const std::string& agent_id, const std::string& role_id);

} // namespace troupe
