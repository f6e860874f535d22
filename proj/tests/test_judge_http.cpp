#include <doctest.h>

#include <atomic>
#include <chrono>
#include <memory>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "consult/gateway.hpp"
#include "consult/judge_http.hpp"

using namespace consult;

namespace {

/// Local chat-completion endpoint with a scriptable failure budget.
class FakeEndpoint {
public:
    FakeEndpoint() {
        server_.Post("/v1/chat/completions",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         requests.fetch_add(1);
                         if (fail_remaining.fetch_sub(1) > 0) {
                             res.status = 503;
                             return;
                         }
                         last_body = req.body;
                         const nlohmann::json reply{
                             {"choices",
                              {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
                         res.set_content(reply.dump(), "application/json");
                     });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~FakeEndpoint() {
        server_.stop();
        thread_.join();
    }

    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

    std::atomic<int> requests{0};
    std::atomic<int> fail_remaining{0};
    std::string content = "professionalism: 81\nexplainability: 77\nemotional_support: 69";
    std::string last_body;

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

ConsultationRecord simple_record() {
    ConsultationRecord r;
    r.id = "r1";
    r.turns = {{Role::patient, "hi", 0}, {Role::doctor, "hello", 1}};
    return r;
}

GatewayOptions fast_options() {
    GatewayOptions o;
    o.retry.base_delay = std::chrono::milliseconds(1);
    return o;
}

}  // namespace

TEST_CASE("the http judge round-trips scores through a chat endpoint") {
    FakeEndpoint endpoint;
    HttpJudgeOptions opts;
    opts.base_url = endpoint.base_url();
    auto judge = std::make_shared<HttpJudge>(opts, PromptLibrary::defaults());
    JudgeGateway gw(judge, fast_options());
    const auto s = gw.rate_soft_skills(simple_record());
    CHECK(s.professionalism == doctest::Approx(81));
    CHECK(s.explainability == doctest::Approx(77));
    CHECK(s.emotional_support == doctest::Approx(69));

    // the outgoing body carries the rendered prompt and zero temperature
    const auto body = nlohmann::json::parse(endpoint.last_body);
    CHECK(body.at("temperature").get<double>() == 0.0);
    const auto user = body.at("messages").at(1).at("content").get<std::string>();
    CHECK(user.find("patient: hi") != std::string::npos);
    CHECK(user.find("{transcript}") == std::string::npos);  // placeholder resolved
}

TEST_CASE("5xx responses are retried and then succeed") {
    FakeEndpoint endpoint;
    endpoint.fail_remaining = 2;
    HttpJudgeOptions opts;
    opts.base_url = endpoint.base_url();
    JudgeGateway gw(std::make_shared<HttpJudge>(opts, PromptLibrary::defaults()),
                    fast_options());
    CHECK_NOTHROW(gw.rate_soft_skills(simple_record()));
    CHECK(endpoint.requests.load() == 3);
}

TEST_CASE("persistent 5xx exhausts the budget and surfaces JudgeUnavailable") {
    FakeEndpoint endpoint;
    endpoint.fail_remaining = 100;
    HttpJudgeOptions opts;
    opts.base_url = endpoint.base_url();
    JudgeGateway gw(std::make_shared<HttpJudge>(opts, PromptLibrary::defaults()),
                    fast_options());
    CHECK_THROWS_AS(gw.rate_soft_skills(simple_record()), JudgeUnavailable);
    CHECK(endpoint.requests.load() == 4);  // budget 3 -> 4 attempts
}

TEST_CASE("an unreachable endpoint surfaces JudgeUnavailable") {
    HttpJudgeOptions opts;
    opts.base_url = "http://127.0.0.1:1";  // nothing listens there
    opts.timeout_seconds = 1;
    GatewayOptions go = fast_options();
    go.retry.budget = 0;
    JudgeGateway gw(std::make_shared<HttpJudge>(opts, PromptLibrary::defaults()), go);
    CHECK_THROWS_AS(gw.rate_soft_skills(simple_record()), JudgeUnavailable);
}

TEST_CASE("chat_complete feeds the endpoint answer source") {
    FakeEndpoint endpoint;
    endpoint.content = "It treats mild pain and fever.";
    ChatEndpoint ep;
    ep.base_url = endpoint.base_url();
    EndpointAnswers source(ep);
    const auto ans = source.answer({"What does X treat?", "ref", KnowledgeKind::medicine});
    REQUIRE(ans.has_value());
    CHECK(*ans == "It treats mild pain and fever.");
}

TEST_CASE("prompt placeholders render from payload fields") {
    const nlohmann::json payload{{"question", "Q?"}, {"reference", "R"}, {"candidate", "C"}};
    const auto rendered = render_prompt(
        "Question: {question}\nReference answer: {reference}\nCandidate answer: {candidate}",
        payload);
    CHECK(rendered == "Question: Q?\nReference answer: R\nCandidate answer: C");
    CHECK(render_prompt("keep {unknown} braces", payload) == "keep {unknown} braces");
}
