#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "troupe/agents.hpp"
#include "troupe/answer.hpp"
#include "troupe/errors.hpp"

namespace troupe {

// Request failed in a way a retry might fix (network, timeout, 5xx).
struct transient_error : io_error {
    using io_error::io_error;
};

// Request rejected by the server (4xx); retrying cannot help.
struct permanent_error : io_error {
    using io_error::io_error;
};

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};
    double backoff_multiplier = 2.0;
};

// Connection settings for a chat-completion inference server.
// Credentials never live in config files; only the name of the environment
// variable that holds the API key does.
struct RemoteEndpoint {
    std::string base_url;     // scheme://host[:port]
    std::string model_name;
    std::string api_key_env_var;
    double temperature = 0.7;
    double top_p = 0.9;
    int max_tokens = 1024;    // 64 is the classifier setting
    std::chrono::milliseconds timeout{30000};
    RetryPolicy retry;
    std::string path = "/v1/chat/completions";

    void validate() const;
};

// One chat-completion round trip: builds the message list (with an optional
// image content part, passed through as a URL or data URI), retries
// transient failures per policy, and returns the assistant message text.
// Throws transient_error after exhausting retries, permanent_error on 4xx,
// parse_error on an unreadable response body.
std::string chat_completion(const RemoteEndpoint& endpoint, const std::string& prompt,
                            const std::optional<std::string>& image_ref = std::nullopt);

// Round trip plus answer extraction. Transport failures propagate; a reply
// that parse_answer cannot handle degrades to a parse_failed sentinel record
// with the raw reply preserved in the trace.
EvidenceRecord execute_remote(const RemoteEndpoint& endpoint, const std::string& prompt,
                              const std::optional<std::string>& image_ref, AnswerKind kind,
                              const std::vector<std::string>& options,
                              const std::string& agent_id, const std::string& role_id);

// Specialist backed by a remote endpoint. Renders the role prompt for the
// query and calls the endpoint; any failure (transport included) degrades to
// a parse_failed sentinel so one dead endpoint cannot stall a stream.
class RemoteAgent : public Agent {
  public:
    RemoteAgent(std::string agent_id, std::string display_name, RemoteEndpoint endpoint);

    const std::string& id() const override { return id_; }
    const std::string& display_name() const override { return name_; }
    const RemoteEndpoint& endpoint() const { return endpoint_; }

    EvidenceRecord execute(const QueryItem& query, const std::string& role_id,
                           const std::string& category) override;

  private:
    std::string id_;
    std::string name_;
    RemoteEndpoint endpoint_;
};

} // namespace troupe
