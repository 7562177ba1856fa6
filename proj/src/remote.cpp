#include "troupe/remote.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "troupe/prompts.hpp"

namespace troupe {
namespace {

using nlohmann::json;

bool looks_like_uri(const std::string& ref) {
    return ref.rfind("http://", 0) == 0 || ref.rfind("https://", 0) == 0 ||
           ref.rfind("data:", 0) == 0;
}

std::string base64_encode(const std::string& bytes) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= bytes.size()) {
        unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                     (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                     static_cast<unsigned char>(bytes[i + 2]);
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        out += alphabet[v & 63];
        i += 3;
    }
    std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += "==";
    } else if (rest == 2) {
        unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                     (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

std::string image_uri(const std::string& ref) {
    if (looks_like_uri(ref)) return ref;
    // local path: inline as a data URI
    std::ifstream in(ref, std::ios::binary);
    if (!in) throw io_error("remote: cannot read image file '" + ref + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return "data:image/jpeg;base64," + base64_encode(buf.str());
}

json build_request(const RemoteEndpoint& endpoint, const std::string& prompt,
                   const std::optional<std::string>& image_ref) {
    json content;
    if (image_ref) {
        content = json::array();
        content.push_back({{"type", "text"}, {"text", prompt}});
        content.push_back(
            {{"type", "image_url"}, {"image_url", {{"url", image_uri(*image_ref)}}}});
    } else {
        content = prompt;
    }
    return json{{"model", endpoint.model_name},
                {"messages", json::array({json{{"role", "user"}, {"content", content}}})},
                {"temperature", endpoint.temperature},
                {"top_p", endpoint.top_p},
                {"max_tokens", endpoint.max_tokens}};
}

std::string extract_message(const std::string& body) {
    json reply;
    try {
        reply = json::parse(body);
    } catch (const json::exception& e) {
        throw parse_error(std::string("remote: response is not valid JSON: ") + e.what());
    }
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw parse_error("remote: response missing choices[0].message.content: " + body);
    }
}

} // namespace

void RemoteEndpoint::validate() const {
    if (base_url.empty()) throw config_error("remote endpoint: empty base_url");
    if (model_name.empty()) throw config_error("remote endpoint: empty model_name");
    if (max_tokens < 1) throw config_error("remote endpoint: max_tokens must be >= 1");
    if (retry.attempts < 1) throw config_error("remote endpoint: retry attempts must be >= 1");
}

std::string chat_completion(const RemoteEndpoint& endpoint, const std::string& prompt,
                            const std::optional<std::string>& image_ref) {
    endpoint.validate();

    httplib::Client client(endpoint.base_url);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
    client.set_connection_timeout(std::max<long>(1, secs.count()), 0);
    client.set_read_timeout(std::max<long>(1, secs.count()), 0);

    httplib::Headers headers;
    if (!endpoint.api_key_env_var.empty()) {
        const char* key = std::getenv(endpoint.api_key_env_var.c_str());
        if (!key)
            throw config_error("remote: environment variable '" + endpoint.api_key_env_var +
                               "' is not set");
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    std::string body = build_request(endpoint, prompt, image_ref).dump();

    auto backoff = endpoint.retry.initial_backoff;
    std::string last_failure = "no attempt made";
    for (int attempt = 1; attempt <= endpoint.retry.attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(static_cast<long long>(
                static_cast<double>(backoff.count()) * endpoint.retry.backoff_multiplier));
        }
        auto res = client.Post(endpoint.path, headers, body, "application/json");
        if (!res) {
            last_failure = "connection failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) return extract_message(res->body);
        if (res->status >= 400 && res->status < 500)
            throw permanent_error("remote: HTTP " + std::to_string(res->status) + ": " +
                                  res->body);
        last_failure = "HTTP " + std::to_string(res->status);
    }
    throw transient_error("remote: giving up after " +
                          std::to_string(endpoint.retry.attempts) + " attempts, last: " +
                          last_failure);
}

EvidenceRecord execute_remote(const RemoteEndpoint& endpoint, const std::string& prompt,
                              const std::optional<std::string>& image_ref, AnswerKind kind,
                              const std::vector<std::string>& options,
                              const std::string& agent_id, const std::string& role_id) {
    auto started = std::chrono::steady_clock::now();
    std::string reply = chat_completion(endpoint, prompt, image_ref);
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);

    EvidenceRecord rec;
    rec.agent_id = agent_id;
    rec.role_id = role_id;
    rec.trace = reply;
    rec.latency = elapsed.count();
    try {
        rec.answer = parse_answer(reply, kind, options);
    } catch (const parse_error&) {
        rec.answer.kind = kind;
        rec.parse_failed = true;
    }
    return rec;
}

RemoteAgent::RemoteAgent(std::string agent_id, std::string display_name, RemoteEndpoint endpoint)
    : id_(std::move(agent_id)), name_(std::move(display_name)), endpoint_(std::move(endpoint)) {
    if (id_.empty()) throw config_error("remote agent: empty agent id");
    endpoint_.validate();
}

EvidenceRecord RemoteAgent::execute(const QueryItem& query, const std::string& role_id,
                                    const std::string& /*category*/) {
    std::string prompt = render_role_prompt(role_id, query);
    try {
        return execute_remote(endpoint_, prompt, query.image_ref, query.answer_kind,
                              query.options, id_, role_id);
    } catch (const error& e) {
        EvidenceRecord rec;
        rec.agent_id = id_;
        rec.role_id = role_id;
        rec.answer.kind = query.answer_kind;
        rec.parse_failed = true;
        rec.trace = std::string("specialist failure: ") + e.what();
        return rec;
    }
}

} // namespace troupe
