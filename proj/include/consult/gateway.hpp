#pragma once

// The one choke point for external-LLM traffic. Wraps any Judge transport
// with a persistent response cache, per-key single-flight, exponential-
// backoff retries and a bound on concurrent in-flight requests, and exposes
// the four typed operations the pipeline needs. Shareable across worker
// threads.

#include <chrono>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include "consult/cache.hpp"
#include "consult/corpus.hpp"
#include "consult/errors.hpp"
#include "consult/judge.hpp"

namespace consult {

struct RetryPolicy {
    int budget = 3;  // retries after the first attempt
    std::chrono::milliseconds base_delay{50};
};

struct GatewayOptions {
    std::optional<std::filesystem::path> cache_dir;  // nullopt disables caching
    int max_in_flight = 8;
    RetryPolicy retry;
    std::string model_id = "judge-1";
    std::string soft_skills_template = "soft_skills_v1";
    std::string eval_metrics_template = "eval_metrics_v1";
    std::string grade_template = "grade_v1";
    std::string simulate_template = "patient_sim_v1";
    std::string classify_template = "classify_v1";
};

class JudgeGateway {
public:
    JudgeGateway(std::shared_ptr<Judge> judge, GatewayOptions options)
        : judge_(std::move(judge)),
          options_(std::move(options)),
          semaphore_(std::max(1, options_.max_in_flight)) {
        if (options_.cache_dir) cache_.emplace(*options_.cache_dir);
    }

    /// Cached, single-flight, retried completion.
    std::string complete(const JudgeRequest& request) {
        const std::string key = request.cache_key();
        if (cache_) {
            if (auto hit = cache_->get(key)) {
                ++cache_hits_;
                return *hit;
            }
        }

        std::shared_future<std::string> fut;
        {
            std::unique_lock lock(inflight_mu_);
            const auto it = inflight_.find(key);
            if (it != inflight_.end()) {
                fut = it->second;
            } else {
                std::promise<std::string> prom;
                fut = prom.get_future().share();
                inflight_.emplace(key, fut);
                lock.unlock();
                try {
                    std::string value = call_with_retry(request);
                    if (cache_) cache_->put(key, value);
                    prom.set_value(value);
                } catch (...) {
                    prom.set_exception(std::current_exception());
                    erase_inflight(key);
                    std::rethrow_exception(std::current_exception());
                }
                erase_inflight(key);
                return fut.get();
            }
        }
        return fut.get();  // follower: value or the leader's exception
    }

    /// Three curation-rubric scores for one record.
    SoftSkillScores rate_soft_skills(const ConsultationRecord& record) {
        require_valid(record);
        const auto s = parse_scores(
            complete({JudgeTask::rate_soft_skills, rating_payload(record),
                      options_.soft_skills_template, options_.model_id}),
            {"professionalism", "explainability", "emotional_support"});
        return {s[0], s[1], s[2]};
    }

    /// Four evaluation-rubric scores for one record.
    EvalScores rate_eval_metrics(const ConsultationRecord& record) {
        require_valid(record);
        const auto s = parse_scores(
            complete({JudgeTask::rate_eval_metrics, rating_payload(record),
                      options_.eval_metrics_template, options_.model_id}),
            {"professionalism", "accuracy", "satisfaction", "trustworthiness"});
        return {s[0], s[1], s[2], s[3]};
    }

    /// Binary grade of a candidate answer. A candidate identical to the
    /// reference is correct without consulting the judge.
    Verdict grade_answer(const std::string& question, const std::string& reference,
                         const std::string& candidate) {
        if (question.empty() || reference.empty() || candidate.empty())
            throw PreconditionViolation("grade_answer requires non-empty strings");
        if (candidate == reference) return Verdict::correct;
        return parse_verdict(complete({JudgeTask::grade_answer,
                                       grade_payload(question, reference, candidate),
                                       options_.grade_template, options_.model_id}));
    }

    /// Next simulated patient message, or nullopt when the judge signals END
    /// or the conversation already holds `max_rounds` patient turns.
    std::optional<std::string> simulate_patient_turn(const ConsultationRecord& seed,
                                                     const std::vector<Turn>& conversation,
                                                     std::size_t max_rounds) {
        if (conversation.empty())
            throw PreconditionViolation("conversation must start with the seed patient turn");
        const Turn* first_patient = nullptr;
        for (const Turn& t : seed.turns)
            if (t.role == Role::patient) {
                first_patient = &t;
                break;
            }
        if (!first_patient || conversation.front().role != Role::patient ||
            conversation.front().text != first_patient->text)
            throw PreconditionViolation(
                "conversation must start with the seed record's first patient turn");
        std::size_t patient_turns = 0;
        for (const Turn& t : conversation)
            if (t.role == Role::patient) ++patient_turns;
        if (patient_turns >= max_rounds) return std::nullopt;
        const std::string reply =
            complete({JudgeTask::simulate_patient_turn, simulate_payload(seed, conversation),
                      options_.simulate_template, options_.model_id});
        if (is_end_signal(reply)) return std::nullopt;
        return detail::trim(reply);
    }

    /// Department classification; labels outside the closed set map to
    /// Others.
    Department classify_department(const ConsultationRecord& record) {
        require_valid(record);
        const std::string reply =
            complete({JudgeTask::classify_department, rating_payload(record),
                      options_.classify_template, options_.model_id});
        const auto dept = department_from_label(detail::trim(reply));
        if (!dept || *dept == Department::unclassified) return Department::others;
        return *dept;
    }

    std::size_t upstream_calls() const { return upstream_calls_.load(); }
    std::size_t cache_hits() const { return cache_hits_.load(); }
    const GatewayOptions& options() const { return options_; }

private:
    static void require_valid(const ConsultationRecord& record) {
        const auto violations = validate(record);
        if (!violations.empty())
            throw PreconditionViolation("record " + record.id +
                                        " is invalid: " + violations.front().path + ": " +
                                        violations.front().message);
    }

    std::string call_with_retry(const JudgeRequest& request) {
        for (int attempt = 0;; ++attempt) {
            try {
                semaphore_.acquire();
                struct Release {
                    std::counting_semaphore<>* s;
                    ~Release() { s->release(); }
                } release{&semaphore_};
                ++upstream_calls_;
                return judge_->complete(request);
            } catch (const JudgeUnavailable&) {
                if (attempt >= options_.retry.budget) throw;
                std::this_thread::sleep_for(options_.retry.base_delay * (1LL << attempt));
            }
        }
    }

    void erase_inflight(const std::string& key) {
        std::lock_guard lock(inflight_mu_);
        inflight_.erase(key);
    }

    std::shared_ptr<Judge> judge_;
    GatewayOptions options_;
    std::optional<ResponseCache> cache_;
    std::counting_semaphore<> semaphore_;
    std::mutex inflight_mu_;
    std::map<std::string, std::shared_future<std::string>> inflight_;
    std::atomic<std::size_t> upstream_calls_{0};
    std::atomic<std::size_t> cache_hits_{0};
};

/// Drive one full simulated consultation: the gateway plays the patient
/// grounded in `seed`, `responder` plays the candidate doctor. The result
/// carries the seed id plus "#<stage>" so style analysis can re-pair it.
template <typename Responder>
ConsultationRecord simulate_conversation(JudgeGateway& gateway, const ConsultationRecord& seed,
                                         const std::string& stage, Responder&& responder,
                                         std::size_t max_rounds) {
    const Turn* first_patient = nullptr;
    for (const Turn& t : seed.turns)
        if (t.role == Role::patient) {
            first_patient = &t;
            break;
        }
    if (!first_patient) throw PreconditionViolation("seed record has no patient turn");

    ConsultationRecord out;
    out.id = seed.id + "#" + stage;
    out.department = seed.department;
    out.source = Source::model;
    out.turns.push_back({Role::patient, first_patient->text, 0});
    for (;;) {
        out.turns.push_back({Role::doctor, responder(out.turns), out.turns.size()});
        const auto next = gateway.simulate_patient_turn(seed, out.turns, max_rounds);
        if (!next) break;
        out.turns.push_back({Role::patient, *next, out.turns.size()});
    }
    for (std::size_t i = 0; i < out.turns.size(); ++i) out.turns[i].index = i;
    return out;
}

}  // namespace consult
