#pragma once

// Stage orchestration behind the CLI: each stage reads its inputs (source
// corpora or earlier stage outputs under the run directory), does its work
// through the library modules, and writes its outputs atomically. Stage
// seeds derive from the global seed and the stage name, so every stage is
// independently reproducible.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "consult/config.hpp"
#include "consult/corpus.hpp"
#include "consult/curation.hpp"
#include "consult/detail/parallel.hpp"
#include "consult/detail/rng.hpp"
#include "consult/eval.hpp"
#include "consult/gateway.hpp"
#include "consult/ingest.hpp"
#include "consult/judge.hpp"
#include "consult/judge_http.hpp"
#include "consult/knowledge.hpp"
#include "consult/qa.hpp"
#include "consult/report.hpp"
#include "consult/sft.hpp"
#include "consult/style.hpp"
#include "consult/synthetic.hpp"

namespace consult {

namespace detail {

inline std::string safe_filename(const std::string& name) {
    std::string out;
    for (char c : name)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'
                          ? c
                          : '_');
    return out;
}

inline std::filesystem::path require_file(const std::filesystem::path& p) {
    if (!std::filesystem::exists(p))
        throw MissingResult("missing " + p.string() + "; run the producing stage first");
    return p;
}

}  // namespace detail

class Pipeline {
public:
    Pipeline(PipelineConfig config, bool mock_judge, ParseMode mode, std::string run_id)
        : config_(std::move(config)),
          mock_judge_(mock_judge || config_.judge.mode == "mock"),
          mode_(mode),
          run_id_(std::move(run_id)) {
        if (run_id_.empty()) run_id_ = "run-" + std::to_string(config_.seed);
        std::filesystem::create_directories(run_dir());

        auto prompts = PromptLibrary::defaults();
        if (!config_.paths.prompts_dir.empty()) prompts.load_overrides(config_.paths.prompts_dir);
        std::shared_ptr<Judge> judge;
        if (mock_judge_) {
            judge = std::make_shared<MockJudge>();
        } else {
            HttpJudgeOptions http;
            http.base_url = config_.judge.base_url;
            http.chat_path = config_.judge.chat_path;
            http.model_id = config_.judge.model_id;
            http.api_key_env = config_.judge.api_key_env;
            http.temperature = config_.judge.temperature;
            http.timeout_seconds = config_.judge.timeout_seconds;
            judge = std::make_shared<HttpJudge>(http, prompts);
        }
        GatewayOptions opts;
        opts.cache_dir = std::filesystem::path(config_.paths.cache_dir);
        opts.max_in_flight = config_.judge.concurrency;
        opts.retry.budget = config_.judge.retry_budget;
        opts.retry.base_delay = std::chrono::milliseconds(config_.judge.retry_base_delay_ms);
        opts.model_id = config_.judge.model_id;
        gateway_ = std::make_shared<JudgeGateway>(std::move(judge), std::move(opts));
    }

    const PipelineConfig& config() const { return config_; }
    JudgeGateway& gateway() { return *gateway_; }
    std::filesystem::path run_dir() const {
        return std::filesystem::path(config_.paths.out_dir) / run_id_;
    }

    // -- ingest: validate all three corpora, write the normalized record
    //    corpus and a manifest per corpus.
    nlohmann::json ingest() {
        const auto records = load_records(config_.paths.records, mode_);
        const auto rec_manifest =
            write_records(run_dir() / "records.normalized.jsonl", records.records);
        const auto diseases = load_knowledge(config_.paths.diseases, KnowledgeKind::disease, mode_);
        const auto medicines =
            load_knowledge(config_.paths.medicines, KnowledgeKind::medicine, mode_);

        auto source_manifest = [&](const std::string& path, CorpusKind kind, std::size_t count) {
            return CorpusManifest{path, kind, count,
                                  detail::sha256_hex(detail::read_file(path))};
        };
        const nlohmann::json manifests = {
            manifest_to_json(rec_manifest),
            manifest_to_json(
                source_manifest(config_.paths.diseases, CorpusKind::diseases,
                                diseases.entries.size())),
            manifest_to_json(
                source_manifest(config_.paths.medicines, CorpusKind::medicines,
                                medicines.entries.size())),
        };
        detail::write_file_atomic(run_dir() / "manifests.json", manifests.dump(2) + "\n");
        return {{"records", records.records.size()},
                {"records_skipped", records.skipped.size()},
                {"diseases", diseases.entries.size()},
                {"diseases_skipped", diseases.skipped.size()},
                {"medicines", medicines.entries.size()},
                {"medicines_skipped", medicines.skipped.size()},
                {"manifests", (run_dir() / "manifests.json").string()}};
    }

    // -- gen-qa: expand knowledge entries into the Q&A corpus.
    nlohmann::json gen_qa() {
        const auto templates = config_.paths.templates.empty()
                                   ? TemplateSet::defaults()
                                   : TemplateSet::load(config_.paths.templates);
        auto entries =
            load_knowledge(config_.paths.diseases, KnowledgeKind::disease, mode_).entries;
        auto medicines =
            load_knowledge(config_.paths.medicines, KnowledgeKind::medicine, mode_).entries;
        entries.insert(entries.end(), std::make_move_iterator(medicines.begin()),
                       std::make_move_iterator(medicines.end()));
        const auto pairs = generate_pairs(entries, templates);
        write_qa_pairs(run_dir() / "qa_pairs.jsonl", pairs);
        const auto stats = pair_stats(pairs);
        detail::write_file_atomic(run_dir() / "qa_stats.json",
                                  pair_stats_to_json(stats).dump(2) + "\n");
        return {{"pairs", stats.total}, {"file", (run_dir() / "qa_pairs.jsonl").string()}};
    }

    // -- score: soft-skill ratings for the whole record corpus.
    nlohmann::json score() {
        auto records = load_records(config_.paths.records, mode_).records;
        const std::size_t before = gateway_->upstream_calls();
        detail::parallel_for(records.size(), workers(), [&](std::size_t i) {
            records[i].soft_skills = gateway_->rate_soft_skills(records[i]);
        });
        write_records(run_dir() / "records.scored.jsonl", records);
        return {{"scored", records.size()},
                {"upstream_calls", gateway_->upstream_calls() - before},
                {"cache_hits", gateway_->cache_hits()},
                {"file", (run_dir() / "records.scored.jsonl").string()}};
    }

    // -- select: keep the role-model records, emit the distribution report.
    nlohmann::json select_records() {
        const auto scored =
            load_records(detail::require_file(run_dir() / "records.scored.jsonl"), mode_).records;
        SelectionPolicy policy{config_.selection.quantile, config_.selection.combine_rule()};
        const auto selection = select(scored, policy);

        write_records(run_dir() / "selection" / "kept.jsonl", selection.kept);
        write_records(run_dir() / "selection" / "dropped.jsonl", selection.dropped);

        std::vector<SoftSkillScores> before, after;
        for (const auto& r : scored) before.push_back(*r.soft_skills);
        for (const auto& r : selection.kept) after.push_back(*r.soft_skills);
        SelectionReport report;
        report.policy = policy;
        report.thresholds = selection.per_dimension;
        report.mean_threshold = selection.mean_threshold;
        report.kept = selection.kept.size();
        report.dropped = selection.dropped.size();
        report.distributions = distribution_report(before, after);
        detail::write_file_atomic(run_dir() / "selection" / "report.json",
                                  selection_report_to_json(report).dump(2) + "\n");
        detail::write_file_atomic(run_dir() / "selection" / "distributions.svg",
                                  render_distribution_svg(report.distributions));
        return {{"kept", selection.kept.size()},
                {"dropped", selection.dropped.size()},
                {"report", (run_dir() / "selection" / "report.json").string()}};
    }

    // -- export-sft: mixed chat dataset plus the training manifest.
    nlohmann::json export_sft() {
        const auto kept =
            load_records(detail::require_file(run_dir() / "selection" / "kept.jsonl"), mode_)
                .records;
        const auto qa =
            load_qa_pairs(detail::require_file(run_dir() / "qa_pairs.jsonl"), mode_).pairs;
        DatasetOptions opts;
        opts.system_prompt = config_.sft.system_prompt;
        opts.mix_ratio = config_.sft.mix_ratio;
        opts.split_fractions = {config_.sft.train_fraction, config_.sft.val_fraction};
        opts.split_names = {"train", "val"};
        const auto out = build_dataset(kept, qa, run_dir() / "sft",
                                       detail::derive_seed(config_.seed, "sft-split"), opts);
        return {{"train", out.split_paths[0].string()},
                {"val", out.split_paths[1].string()},
                {"conversation_examples", out.manifest.conversation_examples},
                {"knowledge_examples", out.manifest.knowledge_examples},
                {"manifest", out.manifest_path.string()}};
    }

    // -- simulate: one conversation per seed record per model stage.
    nlohmann::json simulate() {
        const auto humans = load_records(config_.paths.records, mode_).records;
        const auto seeds = pick_seed_records(humans);
        nlohmann::json files = nlohmann::json::object();
        for (std::size_t s = 0; s < config_.simulate.stages.size(); ++s) {
            const auto& stage = config_.simulate.stages[s];
            std::vector<ConsultationRecord> conversations(seeds.size());
            detail::parallel_for(seeds.size(), workers(), [&](std::size_t i) {
                conversations[i] =
                    simulate_conversation(*gateway_, seeds[i], stage.name,
                                          make_responder(stage, s), config_.simulate.max_rounds);
            });
            const auto path =
                run_dir() / "sim" / (detail::safe_filename(stage.name) + ".jsonl");
            write_records(path, conversations);
            files[stage.name] = path.string();
        }
        return {{"seeds", seeds.size()},
                {"stages", config_.simulate.stages.size()},
                {"files", files}};
    }

    // -- classify: assign departments to the final stage's conversations.
    nlohmann::json classify() {
        const auto& final_stage = config_.simulate.stages.back();
        auto records =
            load_records(detail::require_file(run_dir() / "sim" /
                                              (detail::safe_filename(final_stage.name) +
                                               ".jsonl")),
                         mode_)
                .records;
        detail::parallel_for(records.size(), workers(), [&](std::size_t i) {
            records[i].department = gateway_->classify_department(records[i]);
        });
        write_records(run_dir() / "classified" / "model.jsonl", records);
        nlohmann::json counts = nlohmann::json::object();
        for (const auto& r : records) {
            const std::string k = to_string(r.department);
            counts[k] = counts.value(k, 0) + 1;
        }
        return {{"classified", records.size()},
                {"departments", counts},
                {"file", (run_dir() / "classified" / "model.jsonl").string()}};
    }

    // -- bench: matched benchmark samples and the gap table.
    nlohmann::json bench() {
        auto model =
            load_records(detail::require_file(run_dir() / "classified" / "model.jsonl"), mode_)
                .records;
        const auto pool = load_records(config_.paths.records, mode_).records;
        auto samples = matched_sample(model, pool, config_.bench.repeats,
                                      detail::derive_seed(config_.seed, "bench"));

        const auto score_all = [&](std::vector<ConsultationRecord>& records) {
            std::vector<EvalScores> out(records.size());
            detail::parallel_for(records.size(), workers(), [&](std::size_t i) {
                out[i] = gateway_->rate_eval_metrics(records[i]);
                records[i].eval_scores = out[i];
            });
            return out;
        };
        const auto model_scores = score_all(model);
        write_records(run_dir() / "bench" / "model_scored.jsonl", model);
        std::vector<std::vector<EvalScores>> sample_scores;
        for (std::size_t k = 0; k < samples.size(); ++k) {
            sample_scores.push_back(score_all(samples[k]));
            write_records(
                run_dir() / "bench" / ("sample_" + std::to_string(k + 1) + ".jsonl"),
                samples[k]);
        }
        const auto report = gap_table(model_scores, sample_scores);
        detail::write_file_atomic(run_dir() / "bench" / "gap.md", render_gap_markdown(report));
        detail::write_file_atomic(run_dir() / "bench" / "gap.csv", render_gap_csv(report));
        return {{"model_records", model.size()},
                {"samples", samples.size()},
                {"gap_table", (run_dir() / "bench" / "gap.md").string()}};
    }

    // -- winrate: matched pairs, overall and per-segment win rates.
    nlohmann::json winrate() {
        const auto model =
            load_records(detail::require_file(run_dir() / "classified" / "model.jsonl"), mode_)
                .records;
        const auto pool = load_records(config_.paths.records, mode_).records;
        const auto pairs =
            match_pairs(model, pool, detail::derive_seed(config_.seed, "winrate"));

        std::map<std::string, const ConsultationRecord*> model_by_id, pool_by_id;
        for (const auto& r : model) model_by_id[r.id] = &r;
        for (const auto& r : pool) pool_by_id[r.id] = &r;

        std::vector<ScoredPair> scored(pairs.size());
        detail::parallel_for(pairs.size(), workers(), [&](std::size_t i) {
            const auto& pair = pairs[i];
            const auto* m = model_by_id.at(pair.model_record_id);
            const auto* h = pool_by_id.at(pair.human_record_id);
            scored[i] = {pair, gateway_->rate_eval_metrics(*m), gateway_->rate_eval_metrics(*h),
                         h->doctor_meta, h->turns.size()};
        });

        std::string overall_md =
            "| Metric | Win rate (model >= human) | Pairs |\n" + detail::md_rule(3);
        std::string overall_csv = "metric,win_rate_pct,wins,pairs\n";
        for (EvalMetric m : kEvalMetrics) {
            const auto r = win_rate(scored, m);
            overall_md += detail::strf("| %s | %.2f%% | %zu |\n", to_string(m).c_str(),
                                       r.percent(), r.total);
            overall_csv += detail::strf("%s,%.2f,%zu,%zu\n", to_string(m).c_str(), r.percent(),
                                        r.wins, r.total);
        }
        detail::write_file_atomic(run_dir() / "winrate" / "overall.md", overall_md);
        detail::write_file_atomic(run_dir() / "winrate" / "overall.csv", overall_csv);

        std::string segments_md;
        for (Segmentation s : kAllSegmentations) {
            const auto table = segment_win_rates(scored, s);
            segments_md += "## Win rates by " + to_string(s) + "\n\n" +
                           render_segment_markdown(table) + "\n";
            detail::write_file_atomic(
                run_dir() / "winrate" / ("segment_" + to_string(s) + ".csv"),
                render_segment_csv(table));
        }
        detail::write_file_atomic(run_dir() / "winrate" / "segments.md", segments_md);
        return {{"pairs", pairs.size()}, {"tables", (run_dir() / "winrate").string()}};
    }

    // -- style: alignment table over the simulated stages.
    nlohmann::json style() {
        const auto humans = load_records(config_.paths.records, mode_).records;
        const auto seeds = pick_seed_records(humans);
        std::vector<StageConversations> stages;
        for (const auto& stage : config_.simulate.stages) {
            const auto path = detail::require_file(
                run_dir() / "sim" / (detail::safe_filename(stage.name) + ".jsonl"));
            stages.push_back({stage.name, load_records(path, mode_).records});
        }
        const auto table = run_alignment(seeds, stages);
        detail::write_file_atomic(run_dir() / "style" / "alignment.md",
                                  render_alignment_markdown(table));
        detail::write_file_atomic(run_dir() / "style" / "alignment.csv",
                                  render_alignment_csv(table));
        return {{"pairs", table.pair_count}, {"table", (run_dir() / "style" / "alignment.md").string()}};
    }

    // -- knowledge: accuracy per stage over a stratified question sample.
    nlohmann::json knowledge() {
        const auto qa =
            load_qa_pairs(detail::require_file(run_dir() / "qa_pairs.jsonl"), mode_).pairs;
        const auto items = sample_items(qa, config_.knowledge.sample_n, config_.seed,
                                        config_.knowledge.disease_proportion);
        std::vector<StageAccuracy> rows;
        std::size_t missing = 0;
        for (const auto& stage : config_.simulate.stages) {
            auto source = make_answer_source(stage);
            rows.push_back(evaluate_stage(items, stage.name, *source, *gateway_, workers()));
            missing += rows.back().warnings.size();
        }
        const auto table = stage_comparison(std::move(rows));
        detail::write_file_atomic(run_dir() / "knowledge" / "accuracy.md",
                                  render_accuracy_markdown(table));
        detail::write_file_atomic(run_dir() / "knowledge" / "accuracy.csv",
                                  render_accuracy_csv(table));
        return {{"items", items.size()},
                {"stages", table.stages.size()},
                {"missing_answers", missing},
                {"table", (run_dir() / "knowledge" / "accuracy.md").string()}};
    }

    // -- report: consolidated Markdown + the distribution chart.
    nlohmann::json report() {
        struct Section {
            const char* title;
            std::filesystem::path path;
        };
        const std::vector<Section> sections = {
            {"Benchmark gap", run_dir() / "bench" / "gap.md"},
            {"Win rates", run_dir() / "winrate" / "overall.md"},
            {"Win-rate heterogeneity", run_dir() / "winrate" / "segments.md"},
            {"Style alignment", run_dir() / "style" / "alignment.md"},
            {"Knowledge accuracy", run_dir() / "knowledge" / "accuracy.md"},
        };
        const auto selection_json = detail::require_file(run_dir() / "selection" / "report.json");
        const auto selection =
            selection_report_from_json(nlohmann::json::parse(detail::read_file(selection_json)));

        std::string md = "# Pipeline report (" + run_id_ + ")\n\n";
        md += "## Role-model selection\n\n";
        md += detail::strf(
            "Policy: quantile %.2f, combine %s. Kept %zu of %zu records.\n\n",
            selection.policy.quantile, to_string(selection.policy.combine).c_str(),
            selection.kept, selection.kept + selection.dropped);
        md += "Skill distributions before/after selection: see "
              "[skill_distributions.svg](skill_distributions.svg).\n\n";
        for (const auto& section : sections) {
            md += std::string("## ") + section.title + "\n\n";
            md += detail::read_file(detail::require_file(section.path));
            md += "\n";
        }
        detail::write_file_atomic(run_dir() / "report" / "report.md", md);
        detail::write_file_atomic(run_dir() / "report" / "skill_distributions.svg",
                                  render_distribution_svg(selection.distributions));
        return {{"report", (run_dir() / "report" / "report.md").string()}};
    }

    nlohmann::json run_all() {
        nlohmann::json out;
        out["ingest"] = ingest();
        out["gen-qa"] = gen_qa();
        out["score"] = score();
        out["select"] = select_records();
        out["export-sft"] = export_sft();
        out["simulate"] = simulate();
        out["classify"] = classify();
        out["bench"] = bench();
        out["winrate"] = winrate();
        out["style"] = style();
        out["knowledge"] = knowledge();
        out["report"] = report();
        out["upstream_calls"] = gateway_->upstream_calls();
        out["cache_hits"] = gateway_->cache_hits();
        return out;
    }

private:
    std::size_t workers() const {
        return static_cast<std::size_t>(std::max(1, config_.judge.concurrency));
    }

    /// The seed subset used by simulate and style; both stages re-derive the
    /// same draw so their pairing always agrees.
    std::vector<ConsultationRecord> pick_seed_records(
        const std::vector<ConsultationRecord>& humans) const {
        if (humans.empty()) throw EmptyCorpus("record corpus is empty");
        const std::size_t n = std::min(config_.simulate.seeds, humans.size());
        detail::Rng rng(detail::derive_seed(config_.seed, "simulate-seeds"));
        auto idx = rng.sample_indices(humans.size(), n);
        std::sort(idx.begin(), idx.end());
        std::vector<ConsultationRecord> out;
        out.reserve(n);
        for (const auto i : idx) out.push_back(humans[i]);
        return out;
    }

    /// Candidate doctor for one stage: a live chat endpoint when configured,
    /// otherwise the deterministic mock profile for offline runs.
    std::function<std::string(const std::vector<Turn>&)> make_responder(
        const StageConfig& stage, std::size_t stage_index) const {
        if (!stage.base_url.empty()) {
            ChatEndpoint ep;
            ep.base_url = stage.base_url;
            ep.chat_path = config_.judge.chat_path;
            ep.model_id = stage.model_id.empty() ? stage.name : stage.model_id;
            ep.api_key_env = config_.judge.api_key_env;
            ep.timeout_seconds = config_.judge.timeout_seconds;
            const std::string system = config_.sft.system_prompt;
            return [ep, system](const std::vector<Turn>& turns) {
                return chat_complete(ep, system, transcript_text(turns));
            };
        }
        return synth::MockStageResponder(stage.name, stage_index, config_.seed);
    }

    std::unique_ptr<AnswerSource> make_answer_source(const StageConfig& stage) const {
        if (!stage.answers_file.empty())
            return std::make_unique<RecordedAnswers>(RecordedAnswers::load(stage.answers_file));
        if (!stage.base_url.empty()) {
            ChatEndpoint ep;
            ep.base_url = stage.base_url;
            ep.chat_path = config_.judge.chat_path;
            ep.model_id = stage.model_id.empty() ? stage.name : stage.model_id;
            ep.api_key_env = config_.judge.api_key_env;
            ep.timeout_seconds = config_.judge.timeout_seconds;
            return std::make_unique<EndpointAnswers>(ep);
        }
        throw ConfigError("stage \"" + stage.name +
                          "\" has neither answers_file nor base_url for knowledge evaluation");
    }

    PipelineConfig config_;
    bool mock_judge_ = false;
    ParseMode mode_ = ParseMode::strict;
    std::string run_id_;
    std::shared_ptr<JudgeGateway> gateway_;
};

}  // namespace consult
