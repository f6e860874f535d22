// Command-line entry point wiring all pipeline stages. Every subcommand
// reads one config file, honours the shared flags, and prints a JSON
// summary on success; failures exit non-zero with a machine-readable error
// on stderr.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "consult/consult.hpp"

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string run_id;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> cache_dir;
    std::optional<double> quantile;
    bool mock_judge = false;
    bool lenient = false;
};

const char* error_type(const std::exception& e) {
    using namespace consult;
    if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const MissingResult*>(&e)) return "MissingResult";
    if (dynamic_cast<const JudgeUnavailable*>(&e)) return "JudgeUnavailable";
    if (dynamic_cast<const InsufficientPool*>(&e)) return "InsufficientPool";
    if (dynamic_cast<const InsufficientPairs*>(&e)) return "InsufficientPairs";
    if (dynamic_cast<const DuplicateName*>(&e)) return "DuplicateName";
    if (dynamic_cast<const EmptyCorpus*>(&e)) return "EmptyCorpus";
    if (dynamic_cast<const IoError*>(&e)) return "IoError";
    if (dynamic_cast<const consult::Error*>(&e)) return "Error";
    return "Exception";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Consultation SFT curation and evaluation pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalArgs args;
    app.add_option("--config", args.config_path, "Pipeline config file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--run-id", args.run_id,
                   "Run directory name under out_dir (default: run-<seed>)");
    app.add_option("--seed", args.seed, "Override the global seed");
    app.add_option("--out-dir", args.out_dir, "Override paths.out_dir");
    app.add_option("--cache-dir", args.cache_dir, "Override paths.cache_dir");
    app.add_flag("--mock-judge", args.mock_judge,
                 "Use the deterministic mock judge instead of the HTTP endpoint");
    app.add_flag("--lenient", args.lenient,
                 "Skip malformed corpus lines instead of aborting (default: strict)");

    auto* ingest = app.add_subcommand("ingest", "Validate corpora and write manifests");
    auto* gen_qa = app.add_subcommand("gen-qa", "Generate the knowledge Q&A corpus");
    auto* score = app.add_subcommand("score", "Rate soft skills for every record");
    auto* select = app.add_subcommand("select", "Select role-model records");
    select->add_option("--quantile", args.quantile, "Override selection quantile (0,1]");
    auto* export_sft = app.add_subcommand("export-sft", "Export the chat SFT dataset");
    auto* classify = app.add_subcommand("classify", "Classify model conversations by department");
    auto* bench = app.add_subcommand("bench", "Matched benchmark samples and gap tables");
    auto* winrate = app.add_subcommand("winrate", "Win rates overall and per segment");
    auto* simulate = app.add_subcommand("simulate", "Simulate conversations per model stage");
    auto* style = app.add_subcommand("style", "Linguistic style alignment table");
    auto* knowledge = app.add_subcommand("knowledge", "Knowledge accuracy per stage");
    auto* report = app.add_subcommand("report", "Consolidated report with charts");
    auto* run_all = app.add_subcommand("run-all", "Run every stage in order");

    CLI11_PARSE(app, argc, argv);

    try {
        consult::PipelineConfig config = consult::load_config(args.config_path);
        if (args.seed) config.seed = *args.seed;
        if (args.out_dir) config.paths.out_dir = *args.out_dir;
        if (args.cache_dir) config.paths.cache_dir = *args.cache_dir;
        if (args.quantile) config.selection.quantile = *args.quantile;

        consult::Pipeline pipeline(config, args.mock_judge,
                                   args.lenient ? consult::ParseMode::lenient
                                                : consult::ParseMode::strict,
                                   args.run_id);

        nlohmann::json summary;
        if (ingest->parsed()) summary = pipeline.ingest();
        else if (gen_qa->parsed()) summary = pipeline.gen_qa();
        else if (score->parsed()) summary = pipeline.score();
        else if (select->parsed()) summary = pipeline.select_records();
        else if (export_sft->parsed()) summary = pipeline.export_sft();
        else if (classify->parsed()) summary = pipeline.classify();
        else if (bench->parsed()) summary = pipeline.bench();
        else if (winrate->parsed()) summary = pipeline.winrate();
        else if (simulate->parsed()) summary = pipeline.simulate();
        else if (style->parsed()) summary = pipeline.style();
        else if (knowledge->parsed()) summary = pipeline.knowledge();
        else if (report->parsed()) summary = pipeline.report();
        else if (run_all->parsed()) summary = pipeline.run_all();

        std::cout << summary.dump(2) << "\n";
        return 0;
    } catch (const std::exception& e) {
        const nlohmann::json err{{"error", {{"type", error_type(e)}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
