#pragma once

// Seeded synthesizers for format-compatible fixture corpora: consultation
// records with doctor metadata, disease/medicine knowledge entries, recorded
// stage answers, and the mock doctor responders used by offline simulation.
// Everything is a pure function of its seed, so fixtures are regenerable
// bit-for-bit.

#include <cstdio>
#include <string>
#include <vector>

#include "consult/corpus.hpp"
#include "consult/detail/rng.hpp"
#include "consult/detail/sha256.hpp"
#include "consult/knowledge.hpp"

namespace consult::synth {

namespace detail {

using consult::detail::Rng;

inline const std::vector<std::string>& patient_openers() {
    static const std::vector<std::string> v = {
        "医生您好，我最近总是头疼，还有点发烧，该怎么办？",
        "你好，我咳嗽三天了，晚上睡不好。",
        "医生，我的孩子拉肚子两天了，很担心。",
        "您好，我眼睛发红发痒，看东西有点模糊。",
        "医生你好，我腰疼得厉害，弯腰都困难。",
        "你好医生，我嗓子疼，吞咽的时候特别明显。",
        "我最近心情很差，晚上经常失眠，白天没精神。",
        "医生您好，我皮肤上起了很多红疹，很痒。",
        "你好，我牙龈肿痛好几天了，刷牙出血。",
        "医生，我胃疼，吃完饭以后更严重。",
        "Hello doctor, I have had a sore throat and mild fever for two days.",
        "My knee hurts after running, is it serious?",
    };
    return v;
}

inline const std::vector<std::string>& patient_followups() {
    static const std::vector<std::string> v = {
        "大概有三天了。",
        "昨天吃过一次ibuprofen，好像没什么效果。",
        "没有过敏史，平时身体还可以。",
        "体温大概38度，早上量的。",
        "有一点痰，白色的。",
        "最近工作压力比较大，休息不好。",
        "没有做过检查，需要去医院吗？",
        "好的，谢谢医生，我会注意的。",
        "疼痛是阵发性的，晚上更明显。",
        "I took some ibuprofen yesterday but it did not help much.",
        "The pain started about a week ago.",
        "还需要吃什么药吗？",
    };
    return v;
}

inline const std::vector<std::string>& doctor_questions() {
    static const std::vector<std::string> v = {
        "这种情况持续多久了？",
        "有没有发烧或者其他不舒服？",
        "之前有类似的情况吗？",
        "最近饮食和睡眠怎么样？",
        "有没有药物过敏史？",
        "疼痛是持续性的还是阵发性的？",
        "How long have you had these symptoms?",
        "体温量过吗？多少度？",
    };
    return v;
}

inline const std::vector<std::string>& doctor_advice() {
    static const std::vector<std::string> v = {
        "建议多喝温水，注意休息。",
        "可以先口服布洛芬缓解症状。",
        "饮食要清淡，避免辛辣刺激。",
        "如果症状加重，请及时到医院就诊。",
        "保持规律作息，适当锻炼。",
        "考虑是上呼吸道感染，问题不大。",
        "注意保暖，避免着凉。",
        "Take plenty of rest and drink warm water.",
        "建议做一个血常规检查。",
        "可以用生理盐水漱口，每天三次。",
    };
    return v;
}

inline std::string pick(Rng& rng, const std::vector<std::string>& bank) {
    return bank[static_cast<std::size_t>(rng.below(bank.size()))];
}

}  // namespace detail

/// Synthesize `n` normalized human consultation records across all eleven
/// departments, with varied conversation lengths and doctor metadata
/// covering every segment band. Roughly one record in ten has no metadata
/// and some metadata fields are unknown, so segmentation edge cases stay
/// exercised.
inline std::vector<ConsultationRecord> synth_records(std::size_t n, std::uint64_t seed) {
    detail::Rng rng(seed);
    std::vector<ConsultationRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ConsultationRecord r;
        char id[16];
        std::snprintf(id, sizeof(id), "rec-%04zu", i);
        r.id = id;
        r.department = kAllDepartments[rng.below(std::size(kAllDepartments))];
        r.source = Source::human;

        const std::size_t patient_turns = 1 + rng.below(6);  // total turns 2..12
        r.turns.push_back({Role::patient, detail::pick(rng, detail::patient_openers()), 0});
        for (std::size_t k = 0; k < patient_turns; ++k) {
            const bool ask = rng.unit() < 0.55;
            std::string doctor = ask ? detail::pick(rng, detail::doctor_questions())
                                     : detail::pick(rng, detail::doctor_advice());
            if (rng.unit() < 0.35) doctor += detail::pick(rng, detail::doctor_advice());
            r.turns.push_back({Role::doctor, std::move(doctor), r.turns.size()});
            if (k + 1 < patient_turns)
                r.turns.push_back(
                    {Role::patient, detail::pick(rng, detail::patient_followups()),
                     r.turns.size()});
        }

        if (rng.unit() < 0.9) {
            DoctorMeta m;
            m.experience_years = static_cast<int>(rng.below(36));
            m.hospital_city_tier = static_cast<CityTier>(rng.below(3));
            m.hospital_prestige = static_cast<HospitalPrestige>(rng.below(3));
            m.gender = rng.unit() < 0.08 ? Gender::unknown
                                         : (rng.unit() < 0.5 ? Gender::male : Gender::female);
            if (rng.unit() < 0.85) m.age = static_cast<int>(22 + rng.below(44));
            m.times_consulted = static_cast<int>(rng.below(16000));
            m.title = rng.unit() < 0.06 ? DoctorTitle::unknown
                                        : static_cast<DoctorTitle>(rng.below(4));
            r.doctor_meta = m;
        }
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<KnowledgeEntry> synth_knowledge(KnowledgeKind kind, std::size_t n,
                                                   std::uint64_t seed) {
    static const std::vector<std::string> disease_names = {
        "慢性咽炎", "过敏性鼻炎", "腰椎间盘突出", "结膜炎",     "胃溃疡",
        "偏头痛",   "湿疹",       "中耳炎",       "颈椎病",     "口腔溃疡",
        "失眠症",   "腱鞘炎"};
    static const std::vector<std::string> medicine_names = {
        "布洛芬缓释胶囊", "阿莫西林胶囊", "蒙脱石散",   "氯雷他定片", "奥美拉唑肠溶片",
        "维生素C泡腾片",  "复方甘草片",   "红霉素软膏", "藿香正气水", "对乙酰氨基酚片",
        "左氧氟沙星滴眼液", "开塞露"};
    static const std::vector<std::string> snippets = {
        "常见于季节交替时，症状轻重因人而异。",
        "多数情况下一到两周可以缓解。",
        "建议在医生指导下规范使用。",
        "儿童和孕妇使用前应咨询医生。",
        "若症状持续加重应及时就医。",
        "保持良好作息有助于恢复。",
        "每日两次，饭后服用效果更佳。",
        "避免与酒精同时使用。",
    };

    detail::Rng rng(seed);
    const auto& names = kind == KnowledgeKind::disease ? disease_names : medicine_names;
    const auto& aspects =
        kind == KnowledgeKind::disease ? std::vector<Aspect>(std::begin(kDiseaseAspects),
                                                             std::end(kDiseaseAspects))
                                       : std::vector<Aspect>(std::begin(kMedicineAspects),
                                                             std::end(kMedicineAspects));
    std::vector<KnowledgeEntry> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        KnowledgeEntry e;
        e.kind = kind;
        e.name = names[i % names.size()];
        if (i >= names.size()) e.name += "·" + std::to_string(i / names.size() + 1);
        // every entry keeps the first aspect; the rest are present w.p. 0.75
        for (std::size_t a = 0; a < aspects.size(); ++a) {
            if (a > 0 && rng.unit() >= 0.75) continue;
            std::string text = to_string(aspects[a]) + ": " + detail::pick(rng, snippets);
            if (rng.unit() < 0.5) text += detail::pick(rng, snippets);
            e.aspects[aspects[a]] = std::move(text);
        }
        out.push_back(std::move(e));
    }
    return out;
}

/// Recorded-answer fixture for one stage: a seeded `accuracy` share of items
/// answer with the exact reference; the rest answer with a visibly altered
/// text. Coverage is total, so any subsample of `pairs` stays answerable.
inline std::vector<std::pair<std::string, std::string>> synth_stage_answers(
    const std::vector<QAPair>& pairs, double accuracy, std::uint64_t seed) {
    detail::Rng rng(seed);
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        if (rng.unit() < accuracy)
            out.emplace_back(p.question, p.answer);
        else
            out.emplace_back(p.question, "可能是这样：" + p.answer + "（仅供参考）");
    }
    return out;
}

/// Deterministic mock doctor for offline simulation. Stage profiles differ
/// in verbosity and questioning so the alignment analysis has real contrast:
/// profile 0 writes long, rarely-questioning replies; later profiles answer
/// tersely and probe like the human corpus does.
class MockStageResponder {
public:
    MockStageResponder(std::string stage, std::size_t profile, std::uint64_t seed)
        : stage_(std::move(stage)), profile_(profile), seed_(seed) {}

    std::string operator()(const std::vector<Turn>& conversation) const {
        std::string key = stage_ + "|" + std::to_string(seed_);
        for (const Turn& t : conversation) key += "\x1f" + t.text;
        detail::Rng rng(consult::detail::sha256_u64(key));

        const bool verbose = profile_ == 0;
        const double question_p = verbose ? 0.12 : 0.55;
        std::string reply;
        const std::size_t sentences = verbose ? 4 + rng.below(4) : 1 + rng.below(2);
        for (std::size_t s = 0; s < sentences; ++s) {
            if (rng.unit() < question_p)
                reply += detail::pick(rng, detail::doctor_questions());
            else
                reply += detail::pick(rng, detail::doctor_advice());
            if (verbose && rng.unit() < 0.6)
                reply += "另外，建议记录症状变化，必要时完善相关检查，以便进一步评估。";
        }
        return reply;
    }

private:
    std::string stage_;
    std::size_t profile_;
    std::uint64_t seed_;
};

}  // namespace consult::synth
