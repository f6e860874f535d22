#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "consult/curation.hpp"
#include "consult/detail/rng.hpp"

using namespace consult;

namespace {

ConsultationRecord scored_record(double p, double e, double s, const std::string& id) {
    ConsultationRecord r;
    r.id = id;
    r.turns = {{Role::patient, "hi", 0}, {Role::doctor, "hello", 1}};
    r.soft_skills = SoftSkillScores{p, e, s};
    return r;
}

std::vector<ConsultationRecord> uniform_corpus(std::size_t n, std::uint64_t seed,
                                               bool correlated = false) {
    detail::Rng rng(seed);
    std::vector<ConsultationRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = rng.uniform(0, 100);
        if (correlated) {
            out.push_back(scored_record(v, v, v, "r" + std::to_string(i)));
        } else {
            out.push_back(scored_record(v, rng.uniform(0, 100), rng.uniform(0, 100),
                                        "r" + std::to_string(i)));
        }
    }
    return out;
}

}  // namespace

TEST_CASE("thresholds of a constant distribution are that constant") {
    const std::vector<SoftSkillScores> scores(5, SoftSkillScores{80, 80, 80});
    const auto t = thresholds(scores, 0.5);
    CHECK(t == SkillThresholds{80, 80, 80});
}

TEST_CASE("the nearest-rank rule picks ceil(q*n) ascending") {
    std::vector<SoftSkillScores> scores;
    for (double v : {90.0, 60.0, 80.0, 70.0}) scores.push_back({v, v, v});
    CHECK(thresholds(scores, 0.5).professionalism == 70);  // rank ceil(2)=2 of {60,70,80,90}
    CHECK(thresholds(scores, 1.0).professionalism == 90);  // maximum
    CHECK(thresholds(scores, 0.25).professionalism == 60);
    CHECK(thresholds(scores, 0.26).professionalism == 70);  // ceil(1.04) = 2
}

TEST_CASE("thresholds of an empty corpus throw") {
    CHECK_THROWS_AS(thresholds({}, 0.5), EmptyCorpus);
    const std::vector<SoftSkillScores> one{{1, 2, 3}};
    CHECK_THROWS_AS(thresholds(one, 0.0), PreconditionViolation);
    CHECK_THROWS_AS(thresholds(one, 1.5), PreconditionViolation);
}

TEST_CASE("identical scores keep everything at q=0.5 under all_dims") {
    std::vector<ConsultationRecord> records;
    for (int i = 0; i < 6; ++i)
        records.push_back(scored_record(75, 75, 75, "r" + std::to_string(i)));
    const auto sel = select(records, {0.5, CombineRule::all_dims});
    CHECK(sel.kept.size() == 6);
    CHECK(sel.dropped.empty());
}

TEST_CASE("the worked four-record example keeps the top three") {
    std::vector<ConsultationRecord> records = {
        scored_record(90, 90, 90, "a"), scored_record(80, 80, 80, "b"),
        scored_record(70, 70, 70, "c"), scored_record(60, 60, 60, "d")};
    const auto sel = select(records, {0.5, CombineRule::all_dims});
    REQUIRE(sel.kept.size() == 3);
    CHECK(sel.kept[0].id == "a");
    CHECK(sel.kept[1].id == "b");
    CHECK(sel.kept[2].id == "c");
    CHECK(sel.dropped[0].id == "d");
}

TEST_CASE("selection partitions the corpus preserving order") {
    const auto records = uniform_corpus(500, 42);
    const auto sel = select(records, {0.5, CombineRule::all_dims});
    CHECK(sel.kept.size() + sel.dropped.size() == records.size());
    auto sorted_ids = [](const std::vector<ConsultationRecord>& rs) {
        std::vector<std::string> ids;
        for (const auto& r : rs) ids.push_back(r.id);
        return ids;
    };
    auto kept_ids = sorted_ids(sel.kept);
    CHECK(std::is_sorted(kept_ids.begin(), kept_ids.end(),
                         [](const std::string& a, const std::string& b) {
                             return std::stoi(a.substr(1)) < std::stoi(b.substr(1));
                         }));
}

TEST_CASE("all_dims equals the brute-force intersection of per-dimension top sets") {
    const auto records = uniform_corpus(1000, 7);
    const auto sel = select(records, {0.5, CombineRule::all_dims});

    // brute force: sort each dimension, take the >= threshold set, intersect
    auto top_set = [&](double SoftSkillScores::*field) {
        std::vector<double> values;
        for (const auto& r : records) values.push_back((*r.soft_skills).*field);
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        const double threshold =
            sorted[static_cast<std::size_t>(std::ceil(0.5 * sorted.size())) - 1];
        std::set<std::string> ids;
        for (const auto& r : records)
            if ((*r.soft_skills).*field >= threshold) ids.insert(r.id);
        return ids;
    };
    const auto p = top_set(&SoftSkillScores::professionalism);
    const auto e = top_set(&SoftSkillScores::explainability);
    const auto s = top_set(&SoftSkillScores::emotional_support);
    std::set<std::string> expected;
    for (const auto& id : p)
        if (e.count(id) && s.count(id)) expected.insert(id);

    std::set<std::string> got;
    for (const auto& r : sel.kept) got.insert(r.id);
    CHECK(got == expected);
}

TEST_CASE("independent uniform scores keep about one eighth at q=0.5") {
    const auto records = uniform_corpus(10000, 2024);
    const auto sel = select(records, {0.5, CombineRule::all_dims});
    const double fraction =
        static_cast<double>(sel.kept.size()) / static_cast<double>(records.size());
    CHECK(fraction < 0.5);
    CHECK(fraction > 0.105);
    CHECK(fraction < 0.145);
}

TEST_CASE("strongly correlated scores keep about half at q=0.5") {
    const auto records = uniform_corpus(10000, 2025, /*correlated=*/true);
    const auto sel = select(records, {0.5, CombineRule::all_dims});
    const double fraction =
        static_cast<double>(sel.kept.size()) / static_cast<double>(records.size());
    CHECK(fraction > 0.4);
    CHECK(fraction <= 0.51);
}

TEST_CASE("raising the quantile never enlarges the kept set") {
    const auto records = uniform_corpus(800, 3);
    std::size_t previous = records.size() + 1;
    for (double q : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
        const auto sel = select(records, {q, CombineRule::all_dims});
        CHECK(sel.kept.size() <= previous);
        previous = sel.kept.size();
    }
}

TEST_CASE("mean_dim keeps records whose skill mean clears the mean threshold") {
    std::vector<ConsultationRecord> records = {
        scored_record(100, 0, 50, "a"),   // mean 50
        scored_record(80, 80, 80, "b"),   // mean 80
        scored_record(20, 20, 20, "c"),   // mean 20
        scored_record(60, 60, 60, "d"),   // mean 60
    };
    const auto sel = select(records, {0.5, CombineRule::mean_dim});
    // means {20,50,60,80}, threshold = rank 2 ascending = 50
    REQUIRE(sel.kept.size() == 3);
    CHECK(sel.mean_threshold == doctest::Approx(50));
    CHECK(sel.dropped[0].id == "c");
}

TEST_CASE("select requires scores on every record") {
    std::vector<ConsultationRecord> records = {scored_record(1, 2, 3, "a")};
    records.push_back(records[0]);
    records[1].id = "b";
    records[1].soft_skills.reset();
    CHECK_THROWS_AS(select(records, {0.5, CombineRule::all_dims}), PreconditionViolation);
    CHECK_THROWS_AS(select({}, {0.5, CombineRule::all_dims}), EmptyCorpus);
}

TEST_CASE("identical before/after distributions produce identical histograms") {
    std::vector<SoftSkillScores> scores;
    detail::Rng rng(5);
    for (int i = 0; i < 200; ++i)
        scores.push_back({rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(0, 100)});
    const auto rep = distribution_report(scores, scores);
    for (const auto& dim : rep.dimensions) {
        CHECK(dim.before == dim.after);
    }
}

TEST_CASE("selection raises the after-mean in every dimension") {
    const auto records = uniform_corpus(2000, 99);
    const auto sel = select(records, {0.5, CombineRule::all_dims});
    std::vector<SoftSkillScores> before, after;
    for (const auto& r : records) before.push_back(*r.soft_skills);
    for (const auto& r : sel.kept) after.push_back(*r.soft_skills);
    const auto rep = distribution_report(before, after);
    for (const auto& dim : rep.dimensions) CHECK(dim.after.mean >= dim.before.mean);
}

TEST_CASE("histogram counts match a brute-force binning") {
    detail::Rng rng(17);
    std::vector<double> values;
    for (int i = 0; i < 500; ++i) values.push_back(rng.uniform(0, 100));
    values.push_back(100.0);  // boundary value goes into the last bin
    const auto h = histogram(values);
    std::array<std::size_t, 20> expected{};
    for (double v : values) {
        auto bin = static_cast<std::size_t>(v / 5.0);
        if (bin >= 20) bin = 19;
        ++expected[bin];
    }
    CHECK(h.counts == expected);
    std::size_t total = 0;
    for (auto c : h.counts) total += c;
    CHECK(total == values.size());
}
