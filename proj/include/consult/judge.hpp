#pragma once

// The abstract judge transport plus everything both transports share:
// request/payload construction, prompt templates, tolerant reply parsers,
// and the deterministic mock used by tests, fixtures and offline runs.

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "consult/corpus.hpp"
#include "consult/detail/io.hpp"
#include "consult/detail/sha256.hpp"
#include "consult/errors.hpp"

namespace consult {

enum class JudgeTask {
    rate_soft_skills,
    rate_eval_metrics,
    grade_answer,
    simulate_patient_turn,
    classify_department,
};

inline std::string to_string(JudgeTask t) {
    switch (t) {
        case JudgeTask::rate_soft_skills: return "rate_soft_skills";
        case JudgeTask::rate_eval_metrics: return "rate_eval_metrics";
        case JudgeTask::grade_answer: return "grade_answer";
        case JudgeTask::simulate_patient_turn: return "simulate_patient_turn";
        case JudgeTask::classify_department: return "classify_department";
    }
    return "rate_soft_skills";
}

enum class Verdict { correct, incorrect };

struct JudgeRequest {
    JudgeTask task = JudgeTask::rate_soft_skills;
    std::string payload;  // compact JSON, see payload builders below
    std::string prompt_template_id;
    std::string model_id;

    std::string cache_key() const {
        detail::Sha256 h;
        h.update(to_string(task));
        h.update("\x1f", 1);
        h.update(payload);
        h.update("\x1f", 1);
        h.update(prompt_template_id);
        h.update("\x1f", 1);
        h.update(model_id);
        return detail::to_hex(h.finish());
    }
};

/// Transport interface. Implementations must be safe for concurrent calls;
/// transient trouble is signalled with JudgeUnavailable so the gateway can
/// retry it.
class Judge {
public:
    virtual ~Judge() = default;
    virtual std::string complete(const JudgeRequest& request) = 0;
    virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// Payload builders. Payloads are compact JSON so both transports and the
// mock can read them unambiguously; nlohmann's sorted keys keep the bytes
// (and therefore cache keys) deterministic.

inline std::string transcript_text(const std::vector<Turn>& turns) {
    std::string out;
    for (const Turn& t : turns) {
        out += to_string(t.role);
        out += ": ";
        out += t.text;
        out += '\n';
    }
    return out;
}

inline std::string rating_payload(const ConsultationRecord& r) {
    return nlohmann::json{{"id", r.id}, {"transcript", transcript_text(r.turns)}}.dump();
}

inline std::string grade_payload(const std::string& question, const std::string& reference,
                                 const std::string& candidate) {
    return nlohmann::json{{"question", question}, {"reference", reference},
                          {"candidate", candidate}}
        .dump();
}

inline std::string simulate_payload(const ConsultationRecord& seed,
                                    const std::vector<Turn>& conversation) {
    nlohmann::json seed_patient_turns = nlohmann::json::array();
    for (const Turn& t : seed.turns)
        if (t.role == Role::patient) seed_patient_turns.push_back(t.text);
    std::size_t patient_turns_so_far = 0;
    for (const Turn& t : conversation)
        if (t.role == Role::patient) ++patient_turns_so_far;
    return nlohmann::json{{"seed_id", seed.id},
                          {"seed_transcript", transcript_text(seed.turns)},
                          {"seed_patient_turns", std::move(seed_patient_turns)},
                          {"patient_turns_so_far", patient_turns_so_far},
                          {"transcript", transcript_text(conversation)}}
        .dump();
}

// ---------------------------------------------------------------------------
// Prompt templates (system + user text with {field} placeholders resolved
// from payload fields). The defaults live here; a config directory may
// override any template id with a `<id>.json` file of the same shape.

struct PromptTemplate {
    std::string system;
    std::string user;
};

inline std::string render_prompt(const std::string& tpl, const nlohmann::json& payload) {
    std::string out;
    out.reserve(tpl.size());
    std::size_t i = 0;
    while (i < tpl.size()) {
        if (tpl[i] == '{') {
            const auto end = tpl.find('}', i);
            if (end != std::string::npos) {
                const std::string key = tpl.substr(i + 1, end - i - 1);
                const auto it = payload.find(key);
                if (it != payload.end()) {
                    out += it->is_string() ? it->get<std::string>() : it->dump();
                    i = end + 1;
                    continue;
                }
            }
        }
        out.push_back(tpl[i++]);
    }
    return out;
}

class PromptLibrary {
public:
    static PromptLibrary defaults() {
        PromptLibrary lib;
        lib.templates_["soft_skills_v1"] = {
            "You are reviewing online medical consultations. Rate the doctor on each requested "
            "dimension with an integer from 0 (poor) to 100 (excellent). Reply with one "
            "\"name: score\" line per dimension and nothing else.",
            "Dimensions: professionalism, explainability, emotional_support.\n\n"
            "Consultation {id}:\n{transcript}"};
        lib.templates_["eval_metrics_v1"] = {
            "You are reviewing online medical consultations. Rate the doctor on each requested "
            "dimension with an integer from 0 (poor) to 100 (excellent). Reply with one "
            "\"name: score\" line per dimension and nothing else.",
            "Dimensions: professionalism, accuracy, satisfaction, trustworthiness.\n\n"
            "Consultation {id}:\n{transcript}"};
        lib.templates_["grade_v1"] = {
            "You are grading a candidate answer against a reference answer. Reply with exactly "
            "one word: CORRECT or INCORRECT.",
            "Question: {question}\nReference answer: {reference}\nCandidate answer: {candidate}"};
        lib.templates_["patient_sim_v1"] = {
            "You play the patient described by the consultation record below. Continue the "
            "conversation with the next patient message only, grounded in the record. Reply "
            "END when the consultation has reached its natural end.",
            "Full record:\n{seed_transcript}\nConversation so far:\n{transcript}"};
        lib.templates_["classify_v1"] = {
            "Assign the consultation to exactly one outpatient department from this list: "
            "Internal Medicine, Orthopedics, Otorhinolaryngology (ENT), Dermatovenereology, "
            "Psychiatry, Gynecology, Ophthalmology, Oral and Maxillofacial Surgery, Surgery, "
            "Andrology, Others. Reply with the department name only.",
            "Consultation {id}:\n{transcript}"};
        return lib;
    }

    /// Overlay `<id>.json` files ({"system":...,"user":...}) from a directory.
    void load_overrides(const std::filesystem::path& dir) {
        namespace fs = std::filesystem;
        if (!fs::exists(dir)) throw ConfigError("prompt directory " + dir.string() + " not found");
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().extension() != ".json") continue;
            const auto j = nlohmann::json::parse(detail::read_file(entry.path()));
            if (!j.is_object() || !j.contains("system") || !j.contains("user"))
                throw ConfigError("prompt file " + entry.path().string() +
                                  " must be {\"system\",\"user\"}");
            templates_[entry.path().stem().string()] = {j["system"].get<std::string>(),
                                                        j["user"].get<std::string>()};
        }
    }

    const PromptTemplate& get(const std::string& id) const {
        const auto it = templates_.find(id);
        if (it == templates_.end()) throw ConfigError("unknown prompt template id \"" + id + "\"");
        return it->second;
    }

private:
    std::map<std::string, PromptTemplate> templates_;
};

// ---------------------------------------------------------------------------
// Reply parsers

namespace detail {

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

/// Find `key` (case-insensitively, underscore also matching a space) and
/// parse the first number after it.
inline std::optional<double> find_key_number(const std::string& reply_lower,
                                             const std::string& key) {
    auto variants = std::vector<std::string>{key};
    if (key.find('_') != std::string::npos) {
        std::string spaced = key;
        for (char& c : spaced)
            if (c == '_') c = ' ';
        variants.push_back(spaced);
    }
    for (const auto& k : variants) {
        std::size_t pos = reply_lower.find(k);
        while (pos != std::string::npos) {
            std::size_t i = pos + k.size();
            while (i < reply_lower.size() &&
                   (reply_lower[i] == ':' || reply_lower[i] == '=' || reply_lower[i] == ' ' ||
                    reply_lower[i] == '\t'))
                ++i;
            std::size_t j = i;
            if (j < reply_lower.size() && (reply_lower[j] == '-' || reply_lower[j] == '+')) ++j;
            bool has_digit = false;
            while (j < reply_lower.size() &&
                   (std::isdigit(static_cast<unsigned char>(reply_lower[j])) ||
                    reply_lower[j] == '.')) {
                has_digit = has_digit || std::isdigit(static_cast<unsigned char>(reply_lower[j]));
                ++j;
            }
            if (has_digit) return std::stod(reply_lower.substr(i, j - i));
            pos = reply_lower.find(k, pos + 1);
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Parse the named numeric fields from a judge reply; every score must be
/// present and inside [0,100]. Scores outside the range are rejected, not
/// clamped, so a misbehaving judge cannot skew downstream distributions.
inline std::vector<double> parse_scores(const std::string& reply,
                                        const std::vector<std::string>& fields) {
    const std::string lower = detail::to_lower(reply);
    std::vector<double> out;
    out.reserve(fields.size());
    for (const auto& f : fields) {
        const auto v = detail::find_key_number(lower, detail::to_lower(f));
        if (!v)
            throw UnparseableScore("judge reply lacks a numeric \"" + f + "\" field: " + reply);
        if (!(*v >= 0.0 && *v <= 100.0))
            throw OutOfRange("judge score " + f + "=" + std::to_string(*v) + " outside [0,100]");
        out.push_back(*v);
    }
    return out;
}

inline Verdict parse_verdict(const std::string& reply) {
    const std::string lower = detail::to_lower(reply);
    if (lower.find("incorrect") != std::string::npos) return Verdict::incorrect;
    if (lower.find("correct") != std::string::npos) return Verdict::correct;
    throw UnparseableVerdict("judge reply is neither CORRECT nor INCORRECT: " + reply);
}

inline bool is_end_signal(const std::string& reply) {
    return detail::to_lower(detail::trim(reply)) == "end";
}

// ---------------------------------------------------------------------------
// Deterministic mock

/// Pure-hash judge: replies depend only on the request, so two runs over the
/// same corpus produce byte-identical outputs and warm-cache reruns are
/// exact. Grading can be steered with a fixture table keyed by question
/// digest; otherwise a candidate differing from the reference is incorrect.
class MockJudge : public Judge {
public:
    MockJudge() = default;

    void set_grade_fixture(const std::string& question, Verdict v) {
        grade_fixtures_[detail::sha256_hex(question)] = v;
    }

    std::string complete(const JudgeRequest& request) override {
        const nlohmann::json payload = nlohmann::json::parse(request.payload);
        switch (request.task) {
            case JudgeTask::rate_soft_skills:
                return score_lines(payload.at("id").get<std::string>(),
                                   {"professionalism", "explainability", "emotional_support"});
            case JudgeTask::rate_eval_metrics:
                return score_lines(payload.at("id").get<std::string>(),
                                   {"professionalism", "accuracy", "satisfaction",
                                    "trustworthiness"});
            case JudgeTask::grade_answer: {
                const auto question = payload.at("question").get<std::string>();
                const auto it = grade_fixtures_.find(detail::sha256_hex(question));
                if (it != grade_fixtures_.end())
                    return it->second == Verdict::correct ? "CORRECT" : "INCORRECT";
                return payload.at("candidate") == payload.at("reference") ? "CORRECT"
                                                                          : "INCORRECT";
            }
            case JudgeTask::simulate_patient_turn: {
                const auto& turns = payload.at("seed_patient_turns");
                const auto k = payload.at("patient_turns_so_far").get<std::size_t>();
                if (k >= turns.size()) return "END";
                return turns[k].get<std::string>();
            }
            case JudgeTask::classify_department: {
                const auto id = payload.at("id").get<std::string>();
                const std::size_t idx =
                    detail::sha256_u64("department|" + id) % std::size(kAllDepartments);
                return display_name(kAllDepartments[idx]);
            }
        }
        throw Error("unhandled judge task");
    }

    std::string name() const override { return "mock"; }

private:
    static std::string score_lines(const std::string& id,
                                   const std::vector<std::string>& fields) {
        std::string out;
        for (const auto& f : fields) {
            const std::uint64_t v = detail::sha256_u64(id + "|" + f) % 101;
            out += f;
            out += ": ";
            out += std::to_string(v);
            out += '\n';
        }
        return out;
    }

    std::map<std::string, Verdict> grade_fixtures_;
};

}  // namespace consult
