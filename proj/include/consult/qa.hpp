#pragma once

// Expansion of structured knowledge entries into question/answer pairs via
// aspect-keyed question templates. Templates are data, not code: the bundled
// defaults can be replaced by a JSON config file keyed "kind.aspect".

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "consult/corpus.hpp"
#include "consult/detail/io.hpp"
#include "consult/errors.hpp"

namespace consult {

/// One question template per allowed (kind, aspect) combination. Each
/// template must contain the `{name}` placeholder exactly once.
class TemplateSet {
public:
    using Key = std::pair<KnowledgeKind, Aspect>;

    static TemplateSet defaults() {
        TemplateSet t;
        t.set(KnowledgeKind::disease, Aspect::symptoms, "What are the symptoms of {name}?");
        t.set(KnowledgeKind::disease, Aspect::causes, "What causes {name}?");
        t.set(KnowledgeKind::disease, Aspect::diagnosis, "How is {name} diagnosed?");
        t.set(KnowledgeKind::disease, Aspect::treatment, "How is {name} treated?");
        t.set(KnowledgeKind::disease, Aspect::lifestyle,
              "What lifestyle advice helps with {name}?");
        t.set(KnowledgeKind::disease, Aspect::prevention, "How can {name} be prevented?");
        t.set(KnowledgeKind::disease, Aspect::when_to_consult,
              "When should someone with {name} see a doctor?");
        t.set(KnowledgeKind::medicine, Aspect::indications, "What diseases does {name} treat?");
        t.set(KnowledgeKind::medicine, Aspect::usage_dosage, "How is {name} used?");
        t.set(KnowledgeKind::medicine, Aspect::contraindications, "Who should not take {name}?");
        t.set(KnowledgeKind::medicine, Aspect::precautions,
              "What precautions apply when taking {name}?");
        t.set(KnowledgeKind::medicine, Aspect::pharmacology, "How does {name} work?");
        t.set(KnowledgeKind::medicine, Aspect::components, "What are the components of {name}?");
        return t;
    }

    void set(KnowledgeKind kind, Aspect aspect, std::string tpl) {
        templates_[{kind, aspect}] = std::move(tpl);
    }

    const std::string* find(KnowledgeKind kind, Aspect aspect) const {
        const auto it = templates_.find({kind, aspect});
        return it == templates_.end() ? nullptr : &it->second;
    }

    /// Every allowed combination covered, `{name}` exactly once each.
    std::vector<Violation> check_complete() const {
        std::vector<Violation> out;
        auto check = [&](KnowledgeKind kind, Aspect aspect) {
            const std::string key = to_string(kind) + "." + to_string(aspect);
            const std::string* tpl = find(kind, aspect);
            if (!tpl) {
                out.push_back({key, "no template"});
                return;
            }
            std::size_t count = 0;
            for (std::size_t pos = tpl->find("{name}"); pos != std::string::npos;
                 pos = tpl->find("{name}", pos + 1))
                ++count;
            if (count != 1)
                out.push_back({key, "template must contain {name} exactly once, found " +
                                        std::to_string(count)});
        };
        for (Aspect a : kDiseaseAspects) check(KnowledgeKind::disease, a);
        for (Aspect a : kMedicineAspects) check(KnowledgeKind::medicine, a);
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [key, tpl] : templates_)
            j[to_string(key.first) + "." + to_string(key.second)] = tpl;
        return j;
    }

    static TemplateSet from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw ConfigError("template config must be a JSON object");
        TemplateSet t;
        for (const auto& item : j.items()) {
            const std::string& key = item.key();
            const auto dot = key.find('.');
            if (dot == std::string::npos)
                throw ConfigError("template key \"" + key + "\" is not kind.aspect");
            const std::string kind_s = key.substr(0, dot);
            KnowledgeKind kind;
            if (kind_s == "disease")
                kind = KnowledgeKind::disease;
            else if (kind_s == "medicine")
                kind = KnowledgeKind::medicine;
            else
                throw ConfigError("unknown kind \"" + kind_s + "\" in template key");
            const auto aspect = aspect_from_string(key.substr(dot + 1));
            if (!aspect || !aspect_allowed(kind, *aspect))
                throw ConfigError("unknown aspect in template key \"" + key + "\"");
            if (!item.value().is_string())
                throw ConfigError("template \"" + key + "\" must be a string");
            t.set(kind, *aspect, item.value().get<std::string>());
        }
        const auto violations = t.check_complete();
        if (!violations.empty())
            throw ConfigError("template config incomplete: " + violations.front().path + ": " +
                              violations.front().message);
        return t;
    }

    static TemplateSet load(const std::filesystem::path& path) {
        return from_json(nlohmann::json::parse(detail::read_file(path)));
    }

    void save(const std::filesystem::path& path) const {
        detail::write_file_atomic(path, to_json().dump(2) + "\n");
    }

private:
    std::map<Key, std::string> templates_;
};

/// One pair per (entry, present aspect), in entry order then fixed aspect
/// order. Pure and deterministic: identical inputs give an identical
/// sequence.
inline std::vector<QAPair> generate_pairs(const std::vector<KnowledgeEntry>& entries,
                                          const TemplateSet& templates) {
    std::vector<QAPair> out;
    for (const KnowledgeEntry& e : entries) {
        for (const auto& [aspect, answer] : e.aspects) {
            const std::string* tpl = templates.find(e.kind, aspect);
            if (!tpl) throw MissingTemplate(to_string(e.kind), to_string(aspect));
            std::string question = *tpl;
            question.replace(question.find("{name}"), 6, e.name);
            out.push_back({std::move(question), answer, e.kind, e.name, aspect});
        }
    }
    return out;
}

struct PairStats {
    std::size_t total = 0;
    std::map<KnowledgeKind, std::size_t> by_kind;
    std::map<std::pair<KnowledgeKind, Aspect>, std::size_t> by_aspect;

    friend bool operator==(const PairStats&, const PairStats&) = default;
};

inline PairStats pair_stats(const std::vector<QAPair>& pairs) {
    PairStats s;
    s.total = pairs.size();
    for (const QAPair& p : pairs) {
        ++s.by_kind[p.kind];
        ++s.by_aspect[{p.kind, p.aspect}];
    }
    return s;
}

inline nlohmann::json pair_stats_to_json(const PairStats& s) {
    nlohmann::json by_kind = nlohmann::json::object();
    for (const auto& [kind, n] : s.by_kind) by_kind[to_string(kind)] = n;
    nlohmann::json by_aspect = nlohmann::json::object();
    for (const auto& [key, n] : s.by_aspect)
        by_aspect[to_string(key.first) + "." + to_string(key.second)] = n;
    return nlohmann::json{{"total", s.total},
                          {"by_kind", std::move(by_kind)},
                          {"by_aspect", std::move(by_aspect)}};
}

}  // namespace consult
