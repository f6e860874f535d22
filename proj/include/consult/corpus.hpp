#pragma once

// Domain types shared by every pipeline stage: consultation records with
// their turn structure and doctor metadata, judge score bundles, and the
// structured knowledge entries that feed Q&A generation. All types are
// immutable values once built; workers may share and copy them freely.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "consult/errors.hpp"

namespace consult {

enum class Role { patient, doctor };

enum class Source { human, model, simulated };

/// Closed outpatient-department set plus a fallback for records that have
/// not been classified yet.
enum class Department {
    internal_medicine,
    orthopedics,
    otorhinolaryngology,
    dermatovenereology,
    psychiatry,
    gynecology,
    ophthalmology,
    oral_maxillofacial_surgery,
    surgery,
    andrology,
    others,
    unclassified,
};

inline constexpr Department kAllDepartments[] = {
    Department::internal_medicine,  Department::orthopedics,
    Department::otorhinolaryngology, Department::dermatovenereology,
    Department::psychiatry,          Department::gynecology,
    Department::ophthalmology,       Department::oral_maxillofacial_surgery,
    Department::surgery,             Department::andrology,
    Department::others,
};

inline std::string to_string(Role r) { return r == Role::patient ? "patient" : "doctor"; }

inline std::string to_string(Source s) {
    switch (s) {
        case Source::human: return "human";
        case Source::model: return "model";
        case Source::simulated: return "simulated";
    }
    return "human";
}

inline std::string to_string(Department d) {
    switch (d) {
        case Department::internal_medicine: return "internal_medicine";
        case Department::orthopedics: return "orthopedics";
        case Department::otorhinolaryngology: return "otorhinolaryngology";
        case Department::dermatovenereology: return "dermatovenereology";
        case Department::psychiatry: return "psychiatry";
        case Department::gynecology: return "gynecology";
        case Department::ophthalmology: return "ophthalmology";
        case Department::oral_maxillofacial_surgery: return "oral_maxillofacial_surgery";
        case Department::surgery: return "surgery";
        case Department::andrology: return "andrology";
        case Department::others: return "others";
        case Department::unclassified: return "unclassified";
    }
    return "unclassified";
}

inline std::string display_name(Department d) {
    switch (d) {
        case Department::internal_medicine: return "Internal Medicine";
        case Department::orthopedics: return "Orthopedics";
        case Department::otorhinolaryngology: return "Otorhinolaryngology (ENT)";
        case Department::dermatovenereology: return "Dermatovenereology";
        case Department::psychiatry: return "Psychiatry";
        case Department::gynecology: return "Gynecology";
        case Department::ophthalmology: return "Ophthalmology";
        case Department::oral_maxillofacial_surgery: return "Oral and Maxillofacial Surgery";
        case Department::surgery: return "Surgery";
        case Department::andrology: return "Andrology";
        case Department::others: return "Others";
        case Department::unclassified: return "Unclassified";
    }
    return "Unclassified";
}

/// Tolerant label lookup used when mapping free-form classifier output (or a
/// corpus field) onto the closed enum. Matching ignores case and the
/// space/underscore distinction; a handful of common aliases are accepted.
/// Returns nullopt for labels outside the closed set.
inline std::optional<Department> department_from_label(std::string_view label) {
    std::string key;
    key.reserve(label.size());
    for (char c : label) {
        if (c == ' ' || c == '_' || c == '-') continue;
        key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    auto is = [&](std::string_view a) { return key == a; };
    if (is("internalmedicine")) return Department::internal_medicine;
    if (is("orthopedics") || is("orthopaedics")) return Department::orthopedics;
    if (is("otorhinolaryngology") || is("otorhinolaryngology(ent)") || is("ent") ||
        is("otolaryngology") || is("otolaryngology(ent)"))
        return Department::otorhinolaryngology;
    if (is("dermatovenereology") || is("dermatology")) return Department::dermatovenereology;
    if (is("psychiatry")) return Department::psychiatry;
    if (is("gynecology") || is("gynaecology")) return Department::gynecology;
    if (is("ophthalmology")) return Department::ophthalmology;
    if (is("oralandmaxillofacialsurgery") || is("oralmaxillofacialsurgery"))
        return Department::oral_maxillofacial_surgery;
    if (is("surgery") || is("generalsurgery")) return Department::surgery;
    if (is("andrology")) return Department::andrology;
    if (is("others") || is("other")) return Department::others;
    if (is("unclassified")) return Department::unclassified;
    return std::nullopt;
}

struct Turn {
    Role role = Role::patient;
    std::string text;
    std::size_t index = 0;

    friend bool operator==(const Turn&, const Turn&) = default;
};

enum class CityTier { tier1, tier2, tier3 };
enum class HospitalPrestige { ordinary, well_known, top_tier };
enum class Gender { male, female, unknown };
enum class DoctorTitle { junior, attending, associate, chief, unknown };

inline std::string to_string(CityTier t) {
    switch (t) {
        case CityTier::tier1: return "tier1";
        case CityTier::tier2: return "tier2";
        case CityTier::tier3: return "tier3";
    }
    return "tier1";
}

inline std::string to_string(HospitalPrestige p) {
    switch (p) {
        case HospitalPrestige::ordinary: return "ordinary";
        case HospitalPrestige::well_known: return "well_known";
        case HospitalPrestige::top_tier: return "top_tier";
    }
    return "ordinary";
}

inline std::string to_string(Gender g) {
    switch (g) {
        case Gender::male: return "male";
        case Gender::female: return "female";
        case Gender::unknown: return "unknown";
    }
    return "unknown";
}

inline std::string to_string(DoctorTitle t) {
    switch (t) {
        case DoctorTitle::junior: return "junior";
        case DoctorTitle::attending: return "attending";
        case DoctorTitle::associate: return "associate";
        case DoctorTitle::chief: return "chief";
        case DoctorTitle::unknown: return "unknown";
    }
    return "unknown";
}

struct DoctorMeta {
    int experience_years = 0;
    CityTier hospital_city_tier = CityTier::tier1;
    HospitalPrestige hospital_prestige = HospitalPrestige::ordinary;
    Gender gender = Gender::unknown;
    std::optional<int> age;  // nullopt when unknown
    int times_consulted = 0;
    DoctorTitle title = DoctorTitle::unknown;

    friend bool operator==(const DoctorMeta&, const DoctorMeta&) = default;
};

// Segment bands used by the heterogeneity tables.

inline std::string experience_band(int years) {
    if (years < 10) return "0-9";
    if (years < 20) return "10-19";
    return "20+";
}

inline std::string age_band(int age) {
    if (age < 30) return "<30";
    if (age < 40) return "30-40";
    if (age < 50) return "40-50";
    return "50+";
}

inline std::string consults_band(int consults) {
    if (consults < 1000) return "<1000";
    if (consults < 5000) return "1000-5000";
    if (consults < 10000) return "5000-10000";
    return "10000+";
}

/// Conversation-length band keyed on total turn count. The bands are stated
/// on even counts; the odd counts 7 and 11 fall into the nearest lower band.
inline std::string conversation_length_band(std::size_t turns) {
    if (turns <= 7) return "2-6";
    if (turns <= 11) return "8-10";
    return "12+";
}

/// Curation-rubric scores, each on the judge's 0-100 scale.
struct SoftSkillScores {
    double professionalism = 0;
    double explainability = 0;
    double emotional_support = 0;

    friend bool operator==(const SoftSkillScores&, const SoftSkillScores&) = default;
};

/// Evaluation-rubric scores, each on the judge's 0-100 scale.
struct EvalScores {
    double professionalism = 0;
    double accuracy = 0;
    double satisfaction = 0;
    double trustworthiness = 0;

    double medical_expertise() const { return (professionalism + accuracy) / 2.0; }
    double consumer_preference() const { return (satisfaction + trustworthiness) / 2.0; }
    double overall() const {
        return (professionalism + accuracy + satisfaction + trustworthiness) / 4.0;
    }

    friend bool operator==(const EvalScores&, const EvalScores&) = default;
};

struct ConsultationRecord {
    std::string id;
    Department department = Department::unclassified;
    std::vector<Turn> turns;
    std::optional<DoctorMeta> doctor_meta;
    Source source = Source::human;
    std::optional<SoftSkillScores> soft_skills;
    std::optional<EvalScores> eval_scores;

    friend bool operator==(const ConsultationRecord&, const ConsultationRecord&) = default;
};

/// Model conversations generated from a human seed record carry the seed's
/// id plus a "#stage" suffix; the part before '#' identifies the seed.
inline std::string_view seed_id(const ConsultationRecord& r) {
    const auto pos = std::string_view(r.id).find('#');
    return std::string_view(r.id).substr(0, pos);
}

enum class KnowledgeKind { disease, medicine };

inline std::string to_string(KnowledgeKind k) {
    return k == KnowledgeKind::disease ? "disease" : "medicine";
}

/// Aspect keys for structured knowledge. The first seven belong to disease
/// entries, the rest to medicine entries; enum order fixes the deterministic
/// aspect iteration order everywhere.
enum class Aspect {
    symptoms,
    causes,
    diagnosis,
    treatment,
    lifestyle,
    prevention,
    when_to_consult,
    indications,
    usage_dosage,
    contraindications,
    precautions,
    pharmacology,
    components,
};

inline constexpr Aspect kDiseaseAspects[] = {
    Aspect::symptoms, Aspect::causes,     Aspect::diagnosis,      Aspect::treatment,
    Aspect::lifestyle, Aspect::prevention, Aspect::when_to_consult,
};

inline constexpr Aspect kMedicineAspects[] = {
    Aspect::indications, Aspect::usage_dosage, Aspect::contraindications,
    Aspect::precautions, Aspect::pharmacology, Aspect::components,
};

inline std::string to_string(Aspect a) {
    switch (a) {
        case Aspect::symptoms: return "symptoms";
        case Aspect::causes: return "causes";
        case Aspect::diagnosis: return "diagnosis";
        case Aspect::treatment: return "treatment";
        case Aspect::lifestyle: return "lifestyle";
        case Aspect::prevention: return "prevention";
        case Aspect::when_to_consult: return "when_to_consult";
        case Aspect::indications: return "indications";
        case Aspect::usage_dosage: return "usage_dosage";
        case Aspect::contraindications: return "contraindications";
        case Aspect::precautions: return "precautions";
        case Aspect::pharmacology: return "pharmacology";
        case Aspect::components: return "components";
    }
    return "symptoms";
}

inline std::optional<Aspect> aspect_from_string(std::string_view s) {
    for (Aspect a : kDiseaseAspects)
        if (s == to_string(a)) return a;
    for (Aspect a : kMedicineAspects)
        if (s == to_string(a)) return a;
    return std::nullopt;
}

inline bool aspect_allowed(KnowledgeKind kind, Aspect a) {
    if (kind == KnowledgeKind::disease) {
        for (Aspect x : kDiseaseAspects)
            if (x == a) return true;
        return false;
    }
    for (Aspect x : kMedicineAspects)
        if (x == a) return true;
    return false;
}

struct KnowledgeEntry {
    KnowledgeKind kind = KnowledgeKind::disease;
    std::string name;
    std::map<Aspect, std::string> aspects;  // keyed map keeps the fixed aspect order

    friend bool operator==(const KnowledgeEntry&, const KnowledgeEntry&) = default;
};

struct QAPair {
    std::string question;
    std::string answer;
    KnowledgeKind kind = KnowledgeKind::disease;
    std::string source_name;
    Aspect aspect = Aspect::symptoms;

    friend bool operator==(const QAPair&, const QAPair&) = default;
};

// ---------------------------------------------------------------------------
// Normalization

namespace detail {

inline bool is_blank(std::string_view text) {
    return std::all_of(text.begin(), text.end(), [](unsigned char c) {
        return std::isspace(c) != 0;
    });
}

}  // namespace detail

/// Canonicalize raw turn structure: blank turns vanish, leading doctor turns
/// (platform greetings) are dropped, consecutive same-role turns merge with a
/// single newline separator, and indices are reassigned. The newline join
/// keeps sentence boundaries intact for downstream sentence statistics.
///
/// Throws EmptyAfterNormalization when no patient or no doctor turn survives.
inline ConsultationRecord normalize(const ConsultationRecord& record) {
    ConsultationRecord out = record;
    out.turns.clear();

    bool seen_patient = false;
    for (const Turn& t : record.turns) {
        if (detail::is_blank(t.text)) continue;
        if (!seen_patient) {
            if (t.role != Role::patient) continue;  // leading doctor turn
            seen_patient = true;
        }
        if (!out.turns.empty() && out.turns.back().role == t.role) {
            out.turns.back().text += '\n';
            out.turns.back().text += t.text;
        } else {
            out.turns.push_back(Turn{t.role, t.text, 0});
        }
    }
    for (std::size_t i = 0; i < out.turns.size(); ++i) out.turns[i].index = i;

    const bool has_doctor = std::any_of(out.turns.begin(), out.turns.end(),
                                        [](const Turn& t) { return t.role == Role::doctor; });
    if (!seen_patient || !has_doctor) throw EmptyAfterNormalization(record.id);
    return out;
}

// ---------------------------------------------------------------------------
// Validation

/// One invariant violation, addressed by a dotted field path.
struct Violation {
    std::string path;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

namespace detail {

inline void check_range(std::vector<Violation>& out, const std::string& path, double v) {
    if (!(v >= 0.0 && v <= 100.0))
        out.push_back({path, "score " + std::to_string(v) + " outside [0,100]"});
}

}  // namespace detail

/// Collect every invariant violation in the record. An empty result means the
/// record is valid. Violations are data, not errors: curation decides what to
/// do with them.
inline std::vector<Violation> validate(const ConsultationRecord& r) {
    std::vector<Violation> out;
    if (r.id.empty()) out.push_back({"id", "record id is empty"});
    if (r.turns.size() < 2)
        out.push_back({"turns", "record has " + std::to_string(r.turns.size()) +
                                    " turn(s); at least 2 required"});
    if (!r.turns.empty() && r.turns.front().role != Role::patient)
        out.push_back({"turns[0].role", "first turn must be the patient"});
    for (std::size_t i = 0; i < r.turns.size(); ++i) {
        const std::string base = "turns[" + std::to_string(i) + "]";
        if (detail::is_blank(r.turns[i].text))
            out.push_back({base + ".text", "turn text has no non-whitespace character"});
        if (r.turns[i].index != i)
            out.push_back({base + ".index", "index " + std::to_string(r.turns[i].index) +
                                                " does not match position " + std::to_string(i)});
        if (i > 0 && r.turns[i].role == r.turns[i - 1].role)
            out.push_back({base + ".role", "two consecutive turns share a role"});
    }
    if (r.doctor_meta) {
        const DoctorMeta& m = *r.doctor_meta;
        if (m.experience_years < 0)
            out.push_back({"doctor_meta.experience_years", "must be non-negative"});
        if (m.age && *m.age < 0) out.push_back({"doctor_meta.age", "must be non-negative"});
        if (m.times_consulted < 0)
            out.push_back({"doctor_meta.times_consulted", "must be non-negative"});
    }
    if (r.soft_skills) {
        detail::check_range(out, "soft_skills.professionalism", r.soft_skills->professionalism);
        detail::check_range(out, "soft_skills.explainability", r.soft_skills->explainability);
        detail::check_range(out, "soft_skills.emotional_support", r.soft_skills->emotional_support);
    }
    if (r.eval_scores) {
        detail::check_range(out, "eval_scores.professionalism", r.eval_scores->professionalism);
        detail::check_range(out, "eval_scores.accuracy", r.eval_scores->accuracy);
        detail::check_range(out, "eval_scores.satisfaction", r.eval_scores->satisfaction);
        detail::check_range(out, "eval_scores.trustworthiness", r.eval_scores->trustworthiness);
    }
    return out;
}

inline std::vector<Violation> validate(const KnowledgeEntry& e) {
    std::vector<Violation> out;
    if (e.name.empty()) out.push_back({"name", "entry name is empty"});
    if (e.aspects.empty()) out.push_back({"aspects", "entry has no aspects"});
    for (const auto& [aspect, text] : e.aspects) {
        if (!aspect_allowed(e.kind, aspect))
            out.push_back({"aspects." + to_string(aspect),
                           "aspect not allowed for kind " + to_string(e.kind)});
        if (text.empty())
            out.push_back({"aspects." + to_string(aspect), "aspect text is empty"});
    }
    return out;
}

}  // namespace consult
