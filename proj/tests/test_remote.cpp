#include <atomic>
#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"

#include "troupe/remote.hpp"

using namespace troupe;
using nlohmann::json;

namespace {

// Minimal in-process chat-completion server. reply_for decides the body;
// fail_first injects that many 500 responses before answering normally.
struct MockServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> fail_first{0};
    std::atomic<int> requests{0};
    std::string reply = "Answer: (C)";

    MockServer() {
        server.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
            ++requests;
            if (fail_first.load() > 0) {
                --fail_first;
                res.status = 500;
                res.set_content("upstream overloaded", "text/plain");
                return;
            }
            auto body = json::parse(req.body);
            json out = {
                {"choices", {{{"message", {{"role", "assistant"}, {"content", reply}}}}}},
                {"model", body.value("model", "")},
            };
            res.set_content(out.dump(), "application/json");
        });
        server.Post("/reject", [](const httplib::Request&, httplib::Response& res) {
            res.status = 401;
            res.set_content("bad key", "text/plain");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~MockServer() {
        server.stop();
        thread.join();
    }

    RemoteEndpoint endpoint() const {
        RemoteEndpoint ep;
        ep.base_url = "http://127.0.0.1:" + std::to_string(port);
        ep.model_name = "mock-model";
        ep.timeout = std::chrono::milliseconds(5000);
        ep.retry.attempts = 3;
        ep.retry.initial_backoff = std::chrono::milliseconds(2);
        return ep;
    }
};

} // namespace

TEST_CASE("chat completion round trip") {
    MockServer mock;
    auto text = chat_completion(mock.endpoint(), "which side is the mug on?");
    CHECK(text == "Answer: (C)");
    CHECK(mock.requests.load() == 1);
}

TEST_CASE("transient server failures are retried until success") {
    MockServer mock;
    mock.fail_first = 2;
    auto text = chat_completion(mock.endpoint(), "hello");
    CHECK(text == "Answer: (C)");
    CHECK(mock.requests.load() == 3);
}

TEST_CASE("persistent failures exhaust the retry budget") {
    MockServer mock;
    mock.fail_first = 100;
    CHECK_THROWS_AS(chat_completion(mock.endpoint(), "hello"), transient_error);
    CHECK(mock.requests.load() == 3);
}

TEST_CASE("unreachable host fails transient after retries") {
    RemoteEndpoint ep;
    ep.base_url = "http://127.0.0.1:9"; // discard port, nothing listens
    ep.model_name = "mock-model";
    ep.timeout = std::chrono::milliseconds(200);
    ep.retry.attempts = 2;
    ep.retry.initial_backoff = std::chrono::milliseconds(1);
    CHECK_THROWS_AS(chat_completion(ep, "hello"), transient_error);
}

TEST_CASE("client errors are permanent and not retried") {
    MockServer mock;
    auto ep = mock.endpoint();
    ep.path = "/reject";
    CHECK_THROWS_AS(chat_completion(ep, "hello"), permanent_error);
    CHECK(mock.requests.load() == 0); // never reached the normal handler
}

TEST_CASE("a named but unset key variable is a configuration error") {
    MockServer mock;
    auto ep = mock.endpoint();
    ep.api_key_env_var = "TROUPE_TEST_KEY_THAT_DOES_NOT_EXIST";
    unsetenv("TROUPE_TEST_KEY_THAT_DOES_NOT_EXIST");
    CHECK_THROWS_AS(chat_completion(ep, "hello"), config_error);
}

TEST_CASE("remote execution parses the structured reply") {
    MockServer mock;
    auto rec = execute_remote(mock.endpoint(), "prompt", std::nullopt, AnswerKind::choice,
                              {"A", "B", "C", "D"}, "remote-1", "implicit_visual");
    CHECK_FALSE(rec.parse_failed);
    CHECK(rec.answer.choice == "C");
    CHECK(rec.agent_id == "remote-1");
}

TEST_CASE("an unparseable reply degrades to a sentinel with the raw text kept") {
    MockServer mock;
    mock.reply = "I cannot tell from this image.";
    auto rec = execute_remote(mock.endpoint(), "prompt", std::nullopt, AnswerKind::numeric,
                              {}, "remote-1", "explicit_3d");
    CHECK(rec.parse_failed);
    CHECK(rec.trace.find("I cannot tell") != std::string::npos);
}

TEST_CASE("a remote specialist absorbs transport failure into a sentinel") {
    RemoteEndpoint ep;
    ep.base_url = "http://127.0.0.1:9";
    ep.model_name = "mock-model";
    ep.timeout = std::chrono::milliseconds(200);
    ep.retry.attempts = 1;
    ep.retry.initial_backoff = std::chrono::milliseconds(1);
    RemoteAgent agent("dead", "dead endpoint", ep);

    QueryItem q;
    q.query_id = "q1";
    q.text = "Which object is closer?";
    q.answer_kind = AnswerKind::choice;
    q.options = {"A", "B"};
    auto rec = agent.execute(q, "implicit_visual", "distance_depth");
    CHECK(rec.parse_failed);
    CHECK(rec.agent_id == "dead");
    CHECK(rec.trace.find("specialist failure") != std::string::npos);
}

TEST_CASE("endpoint validation") {
    RemoteEndpoint ep;
    CHECK_THROWS_AS(ep.validate(), config_error); // no url, no model
    ep.base_url = "http://localhost:8000";
    ep.model_name = "m";
    CHECK_NOTHROW(ep.validate());
    ep.retry.attempts = 0;
    CHECK_THROWS_AS(ep.validate(), config_error);
}
