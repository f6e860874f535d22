// Regenerates the bundled synthetic fixtures under data/fixtures/: the
// record corpus, both knowledge corpora, per-stage recorded answers, and a
// ready-to-run pipeline config. Deterministic for a given seed.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "consult/config.hpp"
#include "consult/ingest.hpp"
#include "consult/knowledge.hpp"
#include "consult/qa.hpp"
#include "consult/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate the bundled synthetic fixture corpora"};
    std::string out_dir = "data/fixtures";
    std::uint64_t seed = 2024;
    std::size_t n_records = 200;
    std::size_t n_diseases = 50;
    std::size_t n_medicines = 50;
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Generator seed");
    app.add_option("--records", n_records, "Number of consultation records");
    app.add_option("--diseases", n_diseases, "Number of disease entries");
    app.add_option("--medicines", n_medicines, "Number of medicine entries");
    CLI11_PARSE(app, argc, argv);

    using namespace consult;
    namespace fs = std::filesystem;
    try {
        fs::create_directories(out_dir);
        const auto records = synth::synth_records(n_records, seed);
        const auto diseases =
            synth::synth_knowledge(KnowledgeKind::disease, n_diseases, seed + 1);
        const auto medicines =
            synth::synth_knowledge(KnowledgeKind::medicine, n_medicines, seed + 2);
        write_records(fs::path(out_dir) / "records.jsonl", records);
        write_knowledge(fs::path(out_dir) / "diseases.jsonl", diseases, KnowledgeKind::disease);
        write_knowledge(fs::path(out_dir) / "medicines.jsonl", medicines,
                        KnowledgeKind::medicine);

        // recorded answers per tuning stage, covering every Q&A pair
        auto entries = diseases;
        entries.insert(entries.end(), medicines.begin(), medicines.end());
        const auto pairs = generate_pairs(entries, TemplateSet::defaults());
        const struct {
            const char* file;
            double accuracy;
        } stages[] = {{"answers_base.jsonl", 0.95},
                      {"answers_conv.jsonl", 0.60},
                      {"answers_conv_knowledge.jsonl", 0.90}};
        for (std::size_t s = 0; s < std::size(stages); ++s)
            RecordedAnswers::write(
                fs::path(out_dir) / stages[s].file,
                synth::synth_stage_answers(pairs, stages[s].accuracy, seed + 10 + s));

        PipelineConfig config;
        config.seed = 42;
        config.paths.records = (fs::path(out_dir) / "records.jsonl").string();
        config.paths.diseases = (fs::path(out_dir) / "diseases.jsonl").string();
        config.paths.medicines = (fs::path(out_dir) / "medicines.jsonl").string();
        config.paths.cache_dir = "out/cache";
        config.paths.out_dir = "out";
        config.judge.mode = "mock";
        config.simulate.stages[0].answers_file =
            (fs::path(out_dir) / "answers_base.jsonl").string();
        config.simulate.stages[1].answers_file =
            (fs::path(out_dir) / "answers_conv.jsonl").string();
        config.simulate.stages[2].answers_file =
            (fs::path(out_dir) / "answers_conv_knowledge.jsonl").string();
        save_config(fs::path(out_dir) / "config.json", config);

        std::printf("wrote %zu records, %zu diseases, %zu medicines, %zu qa pairs to %s\n",
                    records.size(), diseases.size(), medicines.size(), pairs.size(),
                    out_dir.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
