#include <doctest.h>

#include <filesystem>
#include <map>

#include "consult/qa.hpp"
#include "consult/synthetic.hpp"

using namespace consult;

namespace {

KnowledgeEntry medicine(const std::string& name,
                        const std::map<Aspect, std::string>& aspects) {
    KnowledgeEntry e;
    e.kind = KnowledgeKind::medicine;
    e.name = name;
    e.aspects = aspects;
    return e;
}

}  // namespace

TEST_CASE("the indications template produces the canonical question") {
    const auto entry = medicine("Ibuprofen", {{Aspect::indications, "treats fever and pain"}});
    const auto pairs = generate_pairs({entry}, TemplateSet::defaults());
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].question == "What diseases does Ibuprofen treat?");
    CHECK(pairs[0].answer == "treats fever and pain");
    CHECK(pairs[0].kind == KnowledgeKind::medicine);
    CHECK(pairs[0].source_name == "Ibuprofen");
    CHECK(pairs[0].aspect == Aspect::indications);
}

TEST_CASE("the usage template produces the canonical question") {
    const auto entry = medicine("Ibuprofen", {{Aspect::usage_dosage, "twice daily"}});
    const auto pairs = generate_pairs({entry}, TemplateSet::defaults());
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].question == "How is Ibuprofen used?");
}

TEST_CASE("an entry with a single aspect yields a single pair") {
    const auto pairs = generate_pairs({medicine("X", {{Aspect::components, "c"}})},
                                      TemplateSet::defaults());
    CHECK(pairs.size() == 1);
}

TEST_CASE("two diseases with seven aspects each yield fourteen pairs") {
    KnowledgeEntry d1, d2;
    d1.kind = d2.kind = KnowledgeKind::disease;
    d1.name = "A";
    d2.name = "B";
    for (Aspect a : kDiseaseAspects) {
        d1.aspects[a] = "a-" + to_string(a);
        d2.aspects[a] = "b-" + to_string(a);
    }
    const auto pairs = generate_pairs({d1, d2}, TemplateSet::defaults());
    CHECK(pairs.size() == 14);
    // entry order, then fixed aspect order
    CHECK(pairs[0].source_name == "A");
    CHECK(pairs[0].aspect == Aspect::symptoms);
    CHECK(pairs[7].source_name == "B");
}

TEST_CASE("pair count equals the sum of present aspects and content is verbatim") {
    const auto diseases = synth::synth_knowledge(KnowledgeKind::disease, 50, 21);
    const auto medicines = synth::synth_knowledge(KnowledgeKind::medicine, 50, 22);
    std::vector<KnowledgeEntry> entries = diseases;
    entries.insert(entries.end(), medicines.begin(), medicines.end());
    const auto pairs = generate_pairs(entries, TemplateSet::defaults());

    std::size_t aspect_sum = 0;
    for (const auto& e : entries) aspect_sum += e.aspects.size();
    CHECK(pairs.size() == aspect_sum);

    std::map<std::string, const KnowledgeEntry*> by_name;
    for (const auto& e : entries) by_name[e.name] = &e;
    for (const auto& p : pairs) {
        CHECK(p.question.find(p.source_name) != std::string::npos);
        CHECK(p.answer == by_name.at(p.source_name)->aspects.at(p.aspect));
    }

    // determinism: a second run yields the identical sequence
    CHECK(generate_pairs(entries, TemplateSet::defaults()) == pairs);
}

TEST_CASE("pair_stats matches a brute-force recount") {
    const auto entries = synth::synth_knowledge(KnowledgeKind::disease, 30, 5);
    const auto pairs = generate_pairs(entries, TemplateSet::defaults());
    const auto stats = pair_stats(pairs);

    std::size_t disease = 0;
    std::map<std::pair<KnowledgeKind, Aspect>, std::size_t> recount;
    for (const auto& p : pairs) {
        if (p.kind == KnowledgeKind::disease) ++disease;
        ++recount[{p.kind, p.aspect}];
    }
    CHECK(stats.total == pairs.size());
    CHECK(stats.by_kind.at(KnowledgeKind::disease) == disease);
    CHECK(stats.by_aspect == recount);

    std::size_t aspect_total = 0;
    for (const auto& [_, n] : stats.by_aspect) aspect_total += n;
    CHECK(aspect_total == stats.total);
}

TEST_CASE("pair_stats on empty input is all zeroes") {
    const auto stats = pair_stats({});
    CHECK(stats.total == 0);
    CHECK(stats.by_kind.empty());
}

TEST_CASE("a missing template is reported") {
    TemplateSet incomplete;
    incomplete.set(KnowledgeKind::medicine, Aspect::indications, "What does {name} treat?");
    const auto entry = medicine("X", {{Aspect::components, "c"}});
    CHECK_THROWS_AS(generate_pairs({entry}, incomplete), MissingTemplate);
    CHECK(!incomplete.check_complete().empty());
    CHECK(TemplateSet::defaults().check_complete().empty());
}

TEST_CASE("template config files round-trip and reject bad keys") {
    const auto dir = std::filesystem::temp_directory_path() / "consult_test_qa";
    std::filesystem::create_directories(dir);
    const auto defaults = TemplateSet::defaults();
    defaults.save(dir / "templates.json");
    const auto loaded = TemplateSet::load(dir / "templates.json");
    CHECK(loaded.to_json() == defaults.to_json());

    auto j = defaults.to_json();
    j["disease.bogus"] = "x {name}";
    CHECK_THROWS_AS(TemplateSet::from_json(j), ConfigError);

    auto j2 = defaults.to_json();
    j2["disease.symptoms"] = "no placeholder here";
    CHECK_THROWS_AS(TemplateSet::from_json(j2), ConfigError);
}
