#pragma once

// Line-delimited JSON corpora: consultation records, disease knowledge,
// medicine knowledge, Q&A pairs. Field names are part of the external
// contract (see README "File formats"); parsing is strict about unknown
// keys so schema drift is caught at the boundary rather than downstream.
//
// Record line   {"id","department","turns":[{"role","text"}],"doctor_meta"?,
//                "source","soft_skills"?,"eval_scores"?}
// Disease line  {"name","aspects":{...}}
// Medicine line {"name","aspects":{...}}
// Q&A line      {"question","answer","kind","source_name","aspect"}

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "consult/corpus.hpp"
#include "consult/detail/io.hpp"
#include "consult/detail/sha256.hpp"
#include "consult/errors.hpp"

namespace consult {

enum class ParseMode { strict, lenient };

enum class CorpusKind { records, diseases, medicines };

inline std::string to_string(CorpusKind k) {
    switch (k) {
        case CorpusKind::records: return "records";
        case CorpusKind::diseases: return "diseases";
        case CorpusKind::medicines: return "medicines";
    }
    return "records";
}

struct CorpusManifest {
    std::string path;
    CorpusKind kind = CorpusKind::records;
    std::size_t count = 0;
    std::string content_hash;  // sha256 hex of the file bytes

    friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

namespace detail {

using nlohmann::json;

inline void expect_keys(const json& obj, const std::set<std::string>& allowed,
                        const std::string& where) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key()))
            throw Error("unknown key \"" + item.key() + "\" in " + where);
    }
}

inline const json& require(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw Error("missing field \"" + std::string(key) + "\" in " + where);
    return *it;
}

inline std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) throw Error("field \"" + std::string(key) + "\" must be a string");
    return v.get<std::string>();
}

inline int require_nonneg_int(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw Error("field \"" + std::string(key) + "\" must be a non-negative integer in " + where);
    return static_cast<int>(v.get<long long>());
}

inline double require_number(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number()) throw Error("field \"" + std::string(key) + "\" must be a number in " + where);
    return v.get<double>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// ConsultationRecord <-> JSON

inline nlohmann::json record_to_json(const ConsultationRecord& r) {
    nlohmann::json turns = nlohmann::json::array();
    for (const Turn& t : r.turns)
        turns.push_back({{"role", to_string(t.role)}, {"text", t.text}});
    nlohmann::json j{{"id", r.id},
                     {"department", to_string(r.department)},
                     {"turns", std::move(turns)},
                     {"source", to_string(r.source)}};
    if (r.doctor_meta) {
        const DoctorMeta& m = *r.doctor_meta;
        nlohmann::json meta{{"experience_years", m.experience_years},
                            {"hospital_city_tier", to_string(m.hospital_city_tier)},
                            {"hospital_prestige", to_string(m.hospital_prestige)},
                            {"gender", to_string(m.gender)},
                            {"times_consulted", m.times_consulted},
                            {"title", to_string(m.title)}};
        if (m.age) meta["age"] = *m.age;
        j["doctor_meta"] = std::move(meta);
    }
    if (r.soft_skills)
        j["soft_skills"] = {{"professionalism", r.soft_skills->professionalism},
                            {"explainability", r.soft_skills->explainability},
                            {"emotional_support", r.soft_skills->emotional_support}};
    if (r.eval_scores)
        j["eval_scores"] = {{"professionalism", r.eval_scores->professionalism},
                            {"accuracy", r.eval_scores->accuracy},
                            {"satisfaction", r.eval_scores->satisfaction},
                            {"trustworthiness", r.eval_scores->trustworthiness}};
    return j;
}

/// Parse one record object. The department field takes the canonical
/// lowercase tokens; a missing field means `unclassified` and an unknown
/// label falls back to `others`, mirroring the closed-enum ingestion rule.
inline ConsultationRecord record_from_json(const nlohmann::json& j) {
    using detail::require;
    if (!j.is_object()) throw Error("record line must be a JSON object");
    detail::expect_keys(j,
                        {"id", "department", "turns", "doctor_meta", "source", "soft_skills",
                         "eval_scores"},
                        "record");
    ConsultationRecord r;
    r.id = detail::require_string(j, "id", "record");
    if (r.id.empty()) throw Error("record id is empty");

    if (const auto it = j.find("department"); it != j.end()) {
        if (!it->is_string()) throw Error("field \"department\" must be a string");
        const std::string label = it->get<std::string>();
        bool exact = false;
        for (Department d : kAllDepartments) {
            if (label == to_string(d)) {
                r.department = d;
                exact = true;
                break;
            }
        }
        if (!exact) r.department = label == "unclassified" ? Department::unclassified
                                                           : Department::others;
    }

    const nlohmann::json& turns = require(j, "turns", "record");
    if (!turns.is_array()) throw Error("field \"turns\" must be an array");
    for (const auto& tj : turns) {
        if (!tj.is_object()) throw Error("turn must be a JSON object");
        detail::expect_keys(tj, {"role", "text"}, "turn");
        Turn t;
        const std::string role = detail::require_string(tj, "role", "turn");
        if (role == "patient")
            t.role = Role::patient;
        else if (role == "doctor")
            t.role = Role::doctor;
        else
            throw Error("unknown turn role \"" + role + "\"");
        t.text = detail::require_string(tj, "text", "turn");
        t.index = r.turns.size();
        r.turns.push_back(std::move(t));
    }

    const std::string source = detail::require_string(j, "source", "record");
    if (source == "human")
        r.source = Source::human;
    else if (source == "model")
        r.source = Source::model;
    else if (source == "simulated")
        r.source = Source::simulated;
    else
        throw Error("unknown source \"" + source + "\"");

    if (const auto it = j.find("doctor_meta"); it != j.end()) {
        const nlohmann::json& mj = *it;
        if (!mj.is_object()) throw Error("field \"doctor_meta\" must be an object");
        detail::expect_keys(mj,
                            {"experience_years", "hospital_city_tier", "hospital_prestige",
                             "gender", "age", "times_consulted", "title"},
                            "doctor_meta");
        DoctorMeta m;
        m.experience_years = detail::require_nonneg_int(mj, "experience_years", "doctor_meta");
        const std::string tier = detail::require_string(mj, "hospital_city_tier", "doctor_meta");
        if (tier == "tier1")
            m.hospital_city_tier = CityTier::tier1;
        else if (tier == "tier2")
            m.hospital_city_tier = CityTier::tier2;
        else if (tier == "tier3")
            m.hospital_city_tier = CityTier::tier3;
        else
            throw Error("unknown hospital_city_tier \"" + tier + "\"");
        const std::string prestige = detail::require_string(mj, "hospital_prestige", "doctor_meta");
        if (prestige == "ordinary")
            m.hospital_prestige = HospitalPrestige::ordinary;
        else if (prestige == "well_known")
            m.hospital_prestige = HospitalPrestige::well_known;
        else if (prestige == "top_tier")
            m.hospital_prestige = HospitalPrestige::top_tier;
        else
            throw Error("unknown hospital_prestige \"" + prestige + "\"");
        const std::string gender = detail::require_string(mj, "gender", "doctor_meta");
        if (gender == "male")
            m.gender = Gender::male;
        else if (gender == "female")
            m.gender = Gender::female;
        else if (gender == "unknown")
            m.gender = Gender::unknown;
        else
            throw Error("unknown gender \"" + gender + "\"");
        if (const auto ait = mj.find("age"); ait != mj.end() && !ait->is_null()) {
            if (!ait->is_number_integer() || ait->get<long long>() < 0)
                throw Error("field \"age\" must be a non-negative integer or absent");
            m.age = static_cast<int>(ait->get<long long>());
        }
        m.times_consulted = detail::require_nonneg_int(mj, "times_consulted", "doctor_meta");
        const std::string title = detail::require_string(mj, "title", "doctor_meta");
        if (title == "junior")
            m.title = DoctorTitle::junior;
        else if (title == "attending")
            m.title = DoctorTitle::attending;
        else if (title == "associate")
            m.title = DoctorTitle::associate;
        else if (title == "chief")
            m.title = DoctorTitle::chief;
        else if (title == "unknown")
            m.title = DoctorTitle::unknown;
        else
            throw Error("unknown title \"" + title + "\"");
        r.doctor_meta = m;
    }

    if (const auto it = j.find("soft_skills"); it != j.end()) {
        const nlohmann::json& sj = *it;
        if (!sj.is_object()) throw Error("field \"soft_skills\" must be an object");
        detail::expect_keys(sj, {"professionalism", "explainability", "emotional_support"},
                            "soft_skills");
        SoftSkillScores s;
        s.professionalism = detail::require_number(sj, "professionalism", "soft_skills");
        s.explainability = detail::require_number(sj, "explainability", "soft_skills");
        s.emotional_support = detail::require_number(sj, "emotional_support", "soft_skills");
        r.soft_skills = s;
    }
    if (const auto it = j.find("eval_scores"); it != j.end()) {
        const nlohmann::json& ej = *it;
        if (!ej.is_object()) throw Error("field \"eval_scores\" must be an object");
        detail::expect_keys(ej, {"professionalism", "accuracy", "satisfaction", "trustworthiness"},
                            "eval_scores");
        EvalScores e;
        e.professionalism = detail::require_number(ej, "professionalism", "eval_scores");
        e.accuracy = detail::require_number(ej, "accuracy", "eval_scores");
        e.satisfaction = detail::require_number(ej, "satisfaction", "eval_scores");
        e.trustworthiness = detail::require_number(ej, "trustworthiness", "eval_scores");
        r.eval_scores = e;
    }
    return r;
}

// ---------------------------------------------------------------------------
// KnowledgeEntry <-> JSON

inline nlohmann::json knowledge_to_json(const KnowledgeEntry& e) {
    nlohmann::json aspects = nlohmann::json::object();
    for (const auto& [aspect, text] : e.aspects) aspects[to_string(aspect)] = text;
    return nlohmann::json{{"name", e.name}, {"aspects", std::move(aspects)}};
}

inline KnowledgeEntry knowledge_from_json(const nlohmann::json& j, KnowledgeKind kind) {
    if (!j.is_object()) throw Error("knowledge line must be a JSON object");
    detail::expect_keys(j, {"name", "aspects"}, "knowledge entry");
    KnowledgeEntry e;
    e.kind = kind;
    e.name = detail::require_string(j, "name", "knowledge entry");
    if (e.name.empty()) throw Error("entry name is empty");
    const nlohmann::json& aspects = detail::require(j, "aspects", "knowledge entry");
    if (!aspects.is_object()) throw Error("field \"aspects\" must be an object");
    for (const auto& item : aspects.items()) {
        const auto aspect = aspect_from_string(item.key());
        if (!aspect || !aspect_allowed(kind, *aspect))
            throw Error("aspect \"" + item.key() + "\" not allowed for " + to_string(kind));
        if (!item.value().is_string() || item.value().get<std::string>().empty())
            throw Error("aspect \"" + item.key() + "\" must be a non-empty string");
        e.aspects[*aspect] = item.value().get<std::string>();
    }
    if (e.aspects.empty()) throw Error("entry has no aspects");
    return e;
}

// ---------------------------------------------------------------------------
// QAPair <-> JSON

inline nlohmann::json qa_to_json(const QAPair& p) {
    return nlohmann::json{{"question", p.question},
                          {"answer", p.answer},
                          {"kind", to_string(p.kind)},
                          {"source_name", p.source_name},
                          {"aspect", to_string(p.aspect)}};
}

inline QAPair qa_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error("qa line must be a JSON object");
    detail::expect_keys(j, {"question", "answer", "kind", "source_name", "aspect"}, "qa pair");
    QAPair p;
    p.question = detail::require_string(j, "question", "qa pair");
    p.answer = detail::require_string(j, "answer", "qa pair");
    const std::string kind = detail::require_string(j, "kind", "qa pair");
    if (kind == "disease")
        p.kind = KnowledgeKind::disease;
    else if (kind == "medicine")
        p.kind = KnowledgeKind::medicine;
    else
        throw Error("unknown kind \"" + kind + "\"");
    p.source_name = detail::require_string(j, "source_name", "qa pair");
    const auto aspect = aspect_from_string(detail::require_string(j, "aspect", "qa pair"));
    if (!aspect) throw Error("unknown aspect");
    p.aspect = *aspect;
    return p;
}

// ---------------------------------------------------------------------------
// Line-by-line loading

namespace detail {

template <typename T, typename ParseLine>
struct LoadOutcome {
    std::vector<T> items;
    std::vector<ParseError> skipped;
    std::size_t total_lines = 0;
};

/// Shared JSONL reader: parse_line(line_json) -> T. In strict mode the first
/// bad line aborts the load; in lenient mode bad lines are skipped and
/// reported, so items.size() + skipped.size() == total_lines always holds.
template <typename T, typename ParseLine>
LoadOutcome<T, ParseLine> load_jsonl(const std::filesystem::path& path, ParseMode mode,
                                     ParseLine&& parse_line) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    LoadOutcome<T, ParseLine> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        ++out.total_lines;
        try {
            if (line.empty()) throw Error("empty line");
            nlohmann::json j = nlohmann::json::parse(line);
            out.items.push_back(parse_line(j));
        } catch (const DuplicateName&) {
            if (mode == ParseMode::strict) throw;
            out.skipped.push_back(ParseError(line_no, "duplicate entry name"));
        } catch (const nlohmann::json::exception& e) {
            ParseError err(line_no, e.what());
            if (mode == ParseMode::strict) throw err;
            out.skipped.push_back(std::move(err));
        } catch (const Error& e) {
            ParseError err(line_no, e.what());
            if (mode == ParseMode::strict) throw err;
            out.skipped.push_back(std::move(err));
        }
    }
    return out;
}

}  // namespace detail

struct RecordLoadResult {
    std::vector<ConsultationRecord> records;
    std::vector<ParseError> skipped;
    std::size_t total_lines = 0;
};

/// Load, normalize and validate a record corpus. Lines that fail to parse,
/// normalize or validate abort the load in strict mode and are skipped (and
/// reported) in lenient mode.
inline RecordLoadResult load_records(const std::filesystem::path& path,
                                     ParseMode mode = ParseMode::strict) {
    auto outcome = detail::load_jsonl<ConsultationRecord>(path, mode, [](const nlohmann::json& j) {
        ConsultationRecord r = normalize(record_from_json(j));
        const auto violations = validate(r);
        if (!violations.empty())
            throw Error("invalid record: " + violations.front().path + ": " +
                        violations.front().message);
        return r;
    });
    return {std::move(outcome.items), std::move(outcome.skipped), outcome.total_lines};
}

struct KnowledgeLoadResult {
    std::vector<KnowledgeEntry> entries;
    std::vector<ParseError> skipped;
    std::size_t total_lines = 0;
};

inline KnowledgeLoadResult load_knowledge(const std::filesystem::path& path, KnowledgeKind kind,
                                          ParseMode mode = ParseMode::strict) {
    std::set<std::string> seen;
    auto outcome = detail::load_jsonl<KnowledgeEntry>(path, mode, [&](const nlohmann::json& j) {
        KnowledgeEntry e = knowledge_from_json(j, kind);
        if (!seen.insert(e.name).second) throw DuplicateName(e.name);
        return e;
    });
    return {std::move(outcome.items), std::move(outcome.skipped), outcome.total_lines};
}

struct QALoadResult {
    std::vector<QAPair> pairs;
    std::vector<ParseError> skipped;
    std::size_t total_lines = 0;
};

inline QALoadResult load_qa_pairs(const std::filesystem::path& path,
                                  ParseMode mode = ParseMode::strict) {
    auto outcome = detail::load_jsonl<QAPair>(path, mode,
                                              [](const nlohmann::json& j) { return qa_from_json(j); });
    return {std::move(outcome.items), std::move(outcome.skipped), outcome.total_lines};
}

// ---------------------------------------------------------------------------
// Writing

inline CorpusManifest write_records(const std::filesystem::path& path,
                                    const std::vector<ConsultationRecord>& records) {
    std::string buf;
    for (const auto& r : records) {
        const auto violations = validate(r);
        if (!violations.empty())
            throw PreconditionViolation("refusing to write invalid record " + r.id + ": " +
                                        violations.front().path);
        buf += record_to_json(r).dump();
        buf += '\n';
    }
    detail::write_file_atomic(path, buf);
    return {path.string(), CorpusKind::records, records.size(), detail::sha256_hex(buf)};
}

inline CorpusManifest write_knowledge(const std::filesystem::path& path,
                                      const std::vector<KnowledgeEntry>& entries,
                                      KnowledgeKind kind) {
    std::string buf;
    for (const auto& e : entries) {
        const auto violations = validate(e);
        if (!violations.empty())
            throw PreconditionViolation("refusing to write invalid entry " + e.name + ": " +
                                        violations.front().path);
        buf += knowledge_to_json(e).dump();
        buf += '\n';
    }
    detail::write_file_atomic(path, buf);
    return {path.string(),
            kind == KnowledgeKind::disease ? CorpusKind::diseases : CorpusKind::medicines,
            entries.size(), detail::sha256_hex(buf)};
}

inline void write_qa_pairs(const std::filesystem::path& path, const std::vector<QAPair>& pairs) {
    std::string buf;
    for (const auto& p : pairs) {
        buf += qa_to_json(p).dump();
        buf += '\n';
    }
    detail::write_file_atomic(path, buf);
}

inline nlohmann::json manifest_to_json(const CorpusManifest& m) {
    return nlohmann::json{{"path", m.path},
                          {"kind", to_string(m.kind)},
                          {"count", m.count},
                          {"content_hash", m.content_hash}};
}

}  // namespace consult
