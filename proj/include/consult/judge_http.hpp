#pragma once

// HTTP chat-completion plumbing: one shared POST helper, the judge transport
// built on it, and an answer source that asks a live candidate model.
// Network trouble, HTTP 429 and 5xx surface as JudgeUnavailable (the gateway
// retries those); other failures are permanent errors.

#include <cstdlib>
#include <memory>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "consult/errors.hpp"
#include "consult/judge.hpp"
#include "consult/knowledge.hpp"

namespace consult {

struct ChatEndpoint {
    std::string base_url;  // e.g. "http://127.0.0.1:8089"
    std::string chat_path = "/v1/chat/completions";
    std::string model_id = "judge-1";
    std::string api_key_env = "CONSULT_JUDGE_API_KEY";
    double temperature = 0.0;
    int timeout_seconds = 60;
};

/// One chat completion round-trip; returns the first choice's content.
inline std::string chat_complete(const ChatEndpoint& endpoint, const std::string& system,
                                 const std::string& user) {
    if (endpoint.base_url.empty()) throw ConfigError("chat endpoint base_url is empty");
    const nlohmann::json body{{"model", endpoint.model_id},
                              {"temperature", endpoint.temperature},
                              {"messages",
                               {{{"role", "system"}, {"content", system}},
                                {{"role", "user"}, {"content", user}}}}};

    httplib::Client client(endpoint.base_url);
    client.set_connection_timeout(endpoint.timeout_seconds);
    client.set_read_timeout(endpoint.timeout_seconds);
    httplib::Headers headers;
    if (const char* key = std::getenv(endpoint.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    const auto res = client.Post(endpoint.chat_path, headers, body.dump(), "application/json");
    if (!res)
        throw JudgeUnavailable("chat endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500)
        throw JudgeUnavailable("chat endpoint returned HTTP " + std::to_string(res->status));
    if (res->status != 200)
        throw Error("chat endpoint returned HTTP " + std::to_string(res->status) + ": " +
                    res->body);
    try {
        const auto j = nlohmann::json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed chat response: ") + e.what());
    }
}

struct HttpJudgeOptions {
    std::string base_url;
    std::string chat_path = "/v1/chat/completions";
    std::string model_id = "judge-1";
    std::string api_key_env = "CONSULT_JUDGE_API_KEY";
    double temperature = 0.0;
    int timeout_seconds = 60;
};

/// Judge transport over a chat endpoint: the request's prompt template
/// supplies the system text and the user text rendered from payload fields.
class HttpJudge : public Judge {
public:
    HttpJudge(HttpJudgeOptions options, PromptLibrary prompts)
        : options_(std::move(options)), prompts_(std::move(prompts)) {
        if (options_.base_url.empty()) throw ConfigError("judge base_url is empty");
    }

    std::string complete(const JudgeRequest& request) override {
        const PromptTemplate& tpl = prompts_.get(request.prompt_template_id);
        const nlohmann::json payload = nlohmann::json::parse(request.payload);
        ChatEndpoint ep;
        ep.base_url = options_.base_url;
        ep.chat_path = options_.chat_path;
        ep.model_id = request.model_id;
        ep.api_key_env = options_.api_key_env;
        ep.temperature = options_.temperature;
        ep.timeout_seconds = options_.timeout_seconds;
        return chat_complete(ep, tpl.system, render_prompt(tpl.user, payload));
    }

    std::string name() const override { return "http:" + options_.base_url; }

private:
    HttpJudgeOptions options_;
    PromptLibrary prompts_;
};

/// Answers knowledge questions by asking a live candidate model.
class EndpointAnswers : public AnswerSource {
public:
    explicit EndpointAnswers(ChatEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

    std::optional<std::string> answer(const KnowledgeItem& item) override {
        return chat_complete(endpoint_, "Answer the medical question concisely.", item.question);
    }

    std::string name() const override { return "endpoint:" + endpoint_.base_url; }

private:
    ChatEndpoint endpoint_;
};

}  // namespace consult
