#include <doctest.h>

#include <filesystem>

#include "consult/config.hpp"
#include "consult/report.hpp"

using namespace consult;

TEST_CASE("config round-trips through serialization") {
    PipelineConfig c;
    c.seed = 7;
    c.paths.records = "a.jsonl";
    c.judge.mode = "http";
    c.judge.base_url = "http://localhost:1234";
    c.selection.quantile = 0.4;
    c.sft.mix_ratio = 0.25;
    c.simulate.stages[1].answers_file = "x.jsonl";
    c.knowledge.sample_n = 123;
    const auto parsed = config_from_json(config_to_json(c));
    CHECK(parsed == c);
}

TEST_CASE("unknown config keys are rejected") {
    auto j = config_to_json(PipelineConfig{});
    j["typo_key"] = 1;
    CHECK_THROWS_AS(config_from_json(j), Error);
    auto j2 = config_to_json(PipelineConfig{});
    j2["judge"]["tempreture"] = 0.5;
    CHECK_THROWS_AS(config_from_json(j2), Error);
}

TEST_CASE("config validation catches bad values") {
    auto j = config_to_json(PipelineConfig{});
    j["selection"]["quantile"] = 0.0;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    auto j2 = config_to_json(PipelineConfig{});
    j2["judge"]["mode"] = "telepathy";
    CHECK_THROWS_AS(config_from_json(j2), ConfigError);
}

TEST_CASE("config files save and load") {
    const auto dir = std::filesystem::temp_directory_path() / "consult_config";
    std::filesystem::create_directories(dir);
    PipelineConfig c;
    c.seed = 99;
    save_config(dir / "c.json", c);
    CHECK(load_config(dir / "c.json") == c);
}

TEST_CASE("gap markdown has the gap column and is deterministic") {
    std::vector<EvalScores> model(3, EvalScores{87.5, 82.7, 84.0, 85.8});
    std::vector<std::vector<EvalScores>> samples = {
        std::vector<EvalScores>(4, EvalScores{89.2, 85.7, 86.1, 88.2}),
        std::vector<EvalScores>(4, EvalScores{89.2, 85.8, 86.2, 88.3})};
    const auto report = gap_table(model, samples);
    const auto md = render_gap_markdown(report);
    CHECK(md.find("Gap (Δ%)") != std::string::npos);
    CHECK(md.find("| Professionalism | 87.5 | 89.2 | -1.91% |") != std::string::npos);
    CHECK(md.find("*Overall Medical Expertise*") != std::string::npos);
    CHECK(md == render_gap_markdown(report));
    const auto csv = render_gap_csv(report);
    CHECK(csv.find("Professionalism,87.5,89.2,-1.91") != std::string::npos);
}

TEST_CASE("segment markdown footnotes omitted segments") {
    SegmentTable t;
    t.segmentation = Segmentation::gender;
    SegmentTable::Row row;
    row.segment = "male";
    row.pairs = 2;
    for (EvalMetric m : kEvalMetrics) row.rates[m] = WinRate{1, 2};
    t.rows.push_back(row);
    t.empty_segments = {"female"};
    t.unsegmented_pairs = 3;
    const auto md = render_segment_markdown(t);
    CHECK(md.find("| male | 50.00% | 50.00% | 50.00% | 50.00% | 50.00% | 2 |") !=
          std::string::npos);
    CHECK(md.find("Omitted segments with no pairs: female;") != std::string::npos);
    CHECK(md.find("without the needed metadata: 3") != std::string::npos);
}

TEST_CASE("alignment markdown shows stars next to shortened deltas") {
    AlignmentTable t;
    t.stage_names = {"s1", "s2"};
    t.pair_count = 10;
    for (std::size_t i = 0; i < kStyleFeatures.size(); ++i) {
        auto& row = t.rows[i];
        row.feature = kStyleFeatures[i];
        row.distance = {5.72, 4.92};
        row.shortened.push_back({0.80, 3.0, 0.005, 10, "***"});
    }
    const auto md = render_alignment_markdown(t);
    CHECK(md.find("| #rounds | 5.72 | 4.92 | 0.80*** |") != std::string::npos);
    CHECK(md.find("question sequential pattern") != std::string::npos);
    const auto csv = render_alignment_csv(t);
    CHECK(csv.find("rounds,5.720000,4.920000,0.800000") != std::string::npos);
}

TEST_CASE("accuracy markdown shows counts, truncated percentages and deltas") {
    StageAccuracy s1, s2;
    s1.stage = "one";
    s2.stage = "two";
    s1.digest = s2.digest = "d";
    s1.disease_correct = 97;
    s1.disease_total = 100;
    s1.medicine_correct = 40;
    s1.medicine_total = 50;
    s2.disease_correct = 60;
    s2.disease_total = 100;
    s2.medicine_correct = 25;
    s2.medicine_total = 50;
    const auto table = stage_comparison({s1, s2});
    const auto md = render_accuracy_markdown(table);
    CHECK(md.find("| All questions (150) | 137 (91.3%) | 85 (56.6%) | -34.7 |") !=
          std::string::npos);
    CHECK(md.find("| Disease knowledge (100) | 97 (97.0%) | 60 (60.0%) | -37.0 |") !=
          std::string::npos);
    CHECK(md.find("| Medicine knowledge (50) | 40 (80.0%) | 25 (50.0%) | -30.0 |") !=
          std::string::npos);
}

TEST_CASE("the selection report serializes and the svg is well formed") {
    SelectionReport r;
    r.policy = {0.5, CombineRule::all_dims};
    r.thresholds = {70, 71, 72};
    r.kept = 10;
    r.dropped = 30;
    std::vector<SoftSkillScores> before(40, SoftSkillScores{50, 60, 70});
    std::vector<SoftSkillScores> after(10, SoftSkillScores{80, 85, 90});
    r.distributions = distribution_report(before, after);
    const auto j = selection_report_to_json(r);
    const auto back = selection_report_from_json(j);
    CHECK(back.kept == 10);
    CHECK(back.distributions.dimensions[0].before.counts ==
          r.distributions.dimensions[0].before.counts);

    const auto svg = render_distribution_svg(r.distributions);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("professionalism") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg == render_distribution_svg(r.distributions));
}
