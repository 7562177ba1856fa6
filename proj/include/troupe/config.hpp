#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "troupe/agents.hpp"
#include "troupe/hyperparams.hpp"
#include "troupe/orchestrator.hpp"
#include "troupe/remote.hpp"

namespace troupe {

// One pool member as configured: either a simulated profile or a remote
// endpoint.
struct AgentConfig {
    std::string agent_id;
    std::string display_name;
    std::string backend = "simulated"; // simulated | remote
    ReliabilityProfile profile;        // simulated backend
    bool profile_seed_set = false;     // explicit seed in config beats the run seed
    RemoteEndpoint endpoint;           // remote backend
};

// Settings of the synthetic convergence/ablation experiment.
struct SimulateConfig {
    int trials = 50;
    int steps = 200;
    std::vector<int> sizes = {50, 100, 150, 200, 300};
    std::string category = "counting";
    int option_count = 4;
};

// A full declarative run description. Loaded from a JSON file; CLI flags
// overwrite individual fields afterwards.
struct RunConfig {
    HyperParams params;
    RoleSet roles = RoleSet::canonical();
    CategoryTaxonomy taxonomy = CategoryTaxonomy::canonical();
    std::string default_category = "spatial_relation";
    std::vector<AgentConfig> pool;
    std::string classifier_backend = "keyword"; // keyword | remote
    RemoteEndpoint classifier_endpoint;
    std::string reasoner_backend = "vote"; // vote | remote
    RemoteEndpoint reasoner_endpoint;
    std::string stream_path;
    std::string snapshot_in;
    std::string snapshot_out;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int parallelism = 1;
    std::optional<std::size_t> stratify_per_category;
    SimulateConfig simulate;

    void validate() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Instantiates the agent pool. Simulated profiles without an explicit seed
// inherit the run seed, so a run is reproducible from (config, seed) alone.
// With allow_remote false, remote members are a config error (simulation-only
// commands).
AgentPool build_pool(const RunConfig& config, bool allow_remote = true);

// Orchestrator wiring from the config: taxonomy, roles, classifier and
// reasoner backends.
OrchestratorOptions build_orchestrator_options(const RunConfig& config);

} // namespace troupe
