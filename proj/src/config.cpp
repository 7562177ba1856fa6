#include "troupe/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "troupe/errors.hpp"
#include "troupe/prompts.hpp"

namespace troupe {
namespace {

using nlohmann::json;

RetryPolicy retry_from_json(const json& obj) {
    RetryPolicy policy;
    if (obj.contains("attempts")) policy.attempts = obj["attempts"].get<int>();
    if (obj.contains("initial_backoff_ms"))
        policy.initial_backoff = std::chrono::milliseconds(obj["initial_backoff_ms"].get<long>());
    if (obj.contains("backoff_multiplier"))
        policy.backoff_multiplier = obj["backoff_multiplier"].get<double>();
    return policy;
}

RemoteEndpoint endpoint_from_json(const json& obj) {
    RemoteEndpoint ep;
    ep.base_url = obj.at("base_url").get<std::string>();
    ep.model_name = obj.at("model_name").get<std::string>();
    if (obj.contains("api_key_env_var"))
        ep.api_key_env_var = obj["api_key_env_var"].get<std::string>();
    if (obj.contains("temperature")) ep.temperature = obj["temperature"].get<double>();
    if (obj.contains("top_p")) ep.top_p = obj["top_p"].get<double>();
    if (obj.contains("max_tokens")) ep.max_tokens = obj["max_tokens"].get<int>();
    if (obj.contains("timeout_ms"))
        ep.timeout = std::chrono::milliseconds(obj["timeout_ms"].get<long>());
    if (obj.contains("path")) ep.path = obj["path"].get<std::string>();
    if (obj.contains("retry")) ep.retry = retry_from_json(obj["retry"]);
    return ep;
}

// Profile cells are keyed "role/category"; the "default" value seeds every
// (role, category) pair first, explicit cells overwrite.
ReliabilityProfile profile_from_json(const json& obj, const RoleSet& roles,
                                     const CategoryTaxonomy& taxonomy, bool& seed_set) {
    double base = obj.contains("default") ? obj["default"].get<double>() : 0.5;
    ReliabilityProfile profile =
        ReliabilityProfile::uniform(roles.roles, taxonomy.categories, base, 0);
    if (obj.contains("cells")) {
        for (const auto& [key, value] : obj["cells"].items()) {
            auto slash = key.find('/');
            if (slash == std::string::npos)
                throw config_error("profile cell key '" + key + "' is not 'role/category'");
            std::string role = key.substr(0, slash);
            std::string category = key.substr(slash + 1);
            if (!roles.contains(role))
                throw config_error("profile cell '" + key + "': unknown role");
            if (!taxonomy.contains(category))
                throw config_error("profile cell '" + key + "': unknown category");
            double p = value.get<double>();
            if (p < 0.0 || p > 1.0)
                throw config_error("profile cell '" + key + "': accuracy outside [0,1]");
            profile.accuracy[{role, category}] = p;
        }
    }
    if (obj.contains("distractor_count")) {
        profile.distractor_count = obj["distractor_count"].get<int>();
        if (profile.distractor_count < 1)
            throw config_error("profile: distractor_count must be >= 1");
    }
    seed_set = obj.contains("seed");
    if (seed_set) profile.seed = obj["seed"].get<std::uint64_t>();
    return profile;
}

} // namespace

void RunConfig::validate() const {
    params.validate();
    if (roles.roles.empty()) throw config_error("config: empty role set");
    if (taxonomy.categories.empty()) throw config_error("config: empty taxonomy");
    if (!taxonomy.contains(default_category))
        throw config_error("config: default_category '" + default_category +
                           "' is not in the taxonomy");
    if (pool.empty()) throw config_error("config: empty agent pool");
    std::vector<std::string> seen;
    for (const auto& a : pool) {
        if (a.agent_id.empty()) throw config_error("config: pool member without agent_id");
        for (const auto& s : seen)
            if (s == a.agent_id)
                throw config_error("config: duplicate agent_id '" + a.agent_id + "'");
        seen.push_back(a.agent_id);
        if (a.backend != "simulated" && a.backend != "remote")
            throw config_error("config: agent '" + a.agent_id + "': unknown backend '" +
                               a.backend + "'");
        if (a.backend == "remote") a.endpoint.validate();
    }
    if (classifier_backend != "keyword" && classifier_backend != "remote")
        throw config_error("config: unknown classifier backend '" + classifier_backend + "'");
    if (reasoner_backend != "vote" && reasoner_backend != "remote")
        throw config_error("config: unknown reasoner backend '" + reasoner_backend + "'");
    if (classifier_backend == "remote") classifier_endpoint.validate();
    if (reasoner_backend == "remote") reasoner_endpoint.validate();
    if (parallelism < 1) throw config_error("config: parallelism must be >= 1");
    if (simulate.trials < 1) throw config_error("config: simulate.trials must be >= 1");
    if (simulate.steps < 1) throw config_error("config: simulate.steps must be >= 1");
    if (simulate.option_count < 2)
        throw config_error("config: simulate.option_count must be >= 2");
    if (!taxonomy.contains(simulate.category))
        throw config_error("config: simulate.category '" + simulate.category +
                           "' is not in the taxonomy");
}

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config: invalid JSON: ") + e.what());
    }
    try {
        RunConfig cfg;
        if (root.contains("hyperparams")) {
            const json& hp = root["hyperparams"];
            if (hp.contains("kappa")) cfg.params.kappa = hp["kappa"].get<double>();
            if (hp.contains("mu")) cfg.params.mu = hp["mu"].get<double>();
            if (hp.contains("gamma")) cfg.params.gamma = hp["gamma"].get<double>();
            if (hp.contains("lambda_f")) cfg.params.lambda_f = hp["lambda_f"].get<double>();
            if (hp.contains("lambda_g")) cfg.params.lambda_g = hp["lambda_g"].get<double>();
            if (hp.contains("ramp_t")) cfg.params.ramp_t = hp["ramp_t"].get<double>();
            if (hp.contains("beta")) cfg.params.beta = hp["beta"].get<double>();
            if (hp.contains("top_k")) cfg.params.top_k = hp["top_k"].get<int>();
        }
        if (root.contains("roles"))
            cfg.roles.roles = root["roles"].get<std::vector<std::string>>();
        if (root.contains("categories"))
            cfg.taxonomy.categories = root["categories"].get<std::vector<std::string>>();
        if (root.contains("default_category"))
            cfg.default_category = root["default_category"].get<std::string>();
        if (root.contains("pool")) {
            for (const json& a : root["pool"]) {
                AgentConfig ac;
                ac.agent_id = a.at("agent_id").get<std::string>();
                ac.display_name = a.contains("display_name")
                                      ? a["display_name"].get<std::string>()
                                      : ac.agent_id;
                if (a.contains("backend")) ac.backend = a["backend"].get<std::string>();
                if (ac.backend == "simulated")
                    ac.profile = profile_from_json(a.contains("profile") ? a["profile"]
                                                                         : json::object(),
                                                   cfg.roles, cfg.taxonomy,
                                                   ac.profile_seed_set);
                else if (a.contains("endpoint"))
                    ac.endpoint = endpoint_from_json(a["endpoint"]);
                cfg.pool.push_back(std::move(ac));
            }
        }
        if (root.contains("classifier")) {
            const json& c = root["classifier"];
            cfg.classifier_backend = c.value("backend", std::string("keyword"));
            if (c.contains("endpoint"))
                cfg.classifier_endpoint = endpoint_from_json(c["endpoint"]);
        }
        if (root.contains("reasoner")) {
            const json& r = root["reasoner"];
            cfg.reasoner_backend = r.value("backend", std::string("vote"));
            if (r.contains("endpoint"))
                cfg.reasoner_endpoint = endpoint_from_json(r["endpoint"]);
        }
        if (root.contains("stream")) cfg.stream_path = root["stream"].get<std::string>();
        if (root.contains("snapshot_in"))
            cfg.snapshot_in = root["snapshot_in"].get<std::string>();
        if (root.contains("snapshot_out"))
            cfg.snapshot_out = root["snapshot_out"].get<std::string>();
        if (root.contains("out_dir")) cfg.out_dir = root["out_dir"].get<std::string>();
        if (root.contains("seed")) cfg.seed = root["seed"].get<std::uint64_t>();
        if (root.contains("parallelism")) cfg.parallelism = root["parallelism"].get<int>();
        if (root.contains("stratify_per_category"))
            cfg.stratify_per_category = root["stratify_per_category"].get<std::size_t>();
        if (root.contains("simulate")) {
            const json& s = root["simulate"];
            if (s.contains("trials")) cfg.simulate.trials = s["trials"].get<int>();
            if (s.contains("steps")) cfg.simulate.steps = s["steps"].get<int>();
            if (s.contains("sizes"))
                cfg.simulate.sizes = s["sizes"].get<std::vector<int>>();
            if (s.contains("category"))
                cfg.simulate.category = s["category"].get<std::string>();
            if (s.contains("option_count"))
                cfg.simulate.option_count = s["option_count"].get<int>();
        }
        return cfg;
    } catch (const json::exception& e) {
        throw config_error(std::string("config: missing or mistyped field: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

AgentPool build_pool(const RunConfig& config, bool allow_remote) {
    AgentPool pool;
    for (const auto& a : config.pool) {
        if (a.backend == "simulated") {
            ReliabilityProfile profile = a.profile;
            if (!a.profile_seed_set) profile.seed = config.seed;
            pool.push_back(
                std::make_shared<SimulatedAgent>(a.agent_id, a.display_name, profile));
        } else {
            if (!allow_remote)
                throw config_error("agent '" + a.agent_id +
                                   "': remote backends are not allowed for this command");
            pool.push_back(std::make_shared<RemoteAgent>(a.agent_id, a.display_name, a.endpoint));
        }
    }
    return pool;
}

OrchestratorOptions build_orchestrator_options(const RunConfig& config) {
    OrchestratorOptions options;
    options.taxonomy = config.taxonomy;
    options.roles = config.roles;
    options.default_category = config.default_category;
    if (config.classifier_backend == "remote") {
        RemoteEndpoint endpoint = config.classifier_endpoint;
        options.classifier = [endpoint](const QueryItem& query) {
            return chat_completion(endpoint, render_head_prompt(query), query.image_ref);
        };
    }
    if (config.reasoner_backend == "remote") {
        RemoteEndpoint endpoint = config.reasoner_endpoint;
        options.reasoner = [endpoint](const QueryItem& query,
                                      const std::vector<WeightedEvidence>& evidence) {
            return chat_completion(endpoint, render_reasoning_prompt(query, evidence),
                                   query.image_ref);
        };
    }
    return options;
}

} // namespace troupe
