#pragma once

// Pipeline configuration: one JSON file validated up front. Unknown keys are
// rejected so typos fail loudly before any stage runs; parse(serialize(c))
// round-trips exactly.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "consult/curation.hpp"
#include "consult/detail/io.hpp"
#include "consult/errors.hpp"
#include "consult/ingest.hpp"

namespace consult {

struct PathsConfig {
    std::string records;
    std::string diseases;
    std::string medicines;
    std::string cache_dir = "cache";
    std::string out_dir = "out";
    std::string templates;    // empty: built-in question templates
    std::string prompts_dir;  // empty: built-in judge prompts

    friend bool operator==(const PathsConfig&, const PathsConfig&) = default;
};

struct JudgeConfig {
    std::string mode = "mock";  // "mock" or "http"
    std::string base_url;
    std::string chat_path = "/v1/chat/completions";
    std::string model_id = "judge-1";
    std::string api_key_env = "CONSULT_JUDGE_API_KEY";
    double temperature = 0.0;
    int timeout_seconds = 60;
    int concurrency = 8;
    int retry_budget = 3;
    int retry_base_delay_ms = 50;

    friend bool operator==(const JudgeConfig&, const JudgeConfig&) = default;
};

struct SelectionConfig {
    double quantile = 0.5;
    std::string combine = "all_dims";  // or "mean_dim"

    CombineRule combine_rule() const {
        if (combine == "all_dims") return CombineRule::all_dims;
        if (combine == "mean_dim") return CombineRule::mean_dim;
        throw ConfigError("selection.combine must be all_dims or mean_dim");
    }

    friend bool operator==(const SelectionConfig&, const SelectionConfig&) = default;
};

struct ExportConfig {
    std::string system_prompt =
        "You are an experienced doctor consulting online. Ask for the details you need, then "
        "give clear, kind, practical advice.";
    std::optional<double> mix_ratio;  // target knowledge fraction; unset = use everything
    double train_fraction = 0.9;
    double val_fraction = 0.1;

    friend bool operator==(const ExportConfig&, const ExportConfig&) = default;
};

struct StageConfig {
    std::string name;
    std::string answers_file;  // recorded answers for knowledge evaluation
    std::string base_url;      // live candidate endpoint (optional)
    std::string model_id;

    friend bool operator==(const StageConfig&, const StageConfig&) = default;
};

struct SimulateConfig {
    std::size_t seeds = 24;      // number of human seed records
    std::size_t max_rounds = 4;  // patient-turn cap per conversation
    std::vector<StageConfig> stages = {
        {"base", "", "", ""},
        {"base+conversations", "", "", ""},
        {"base+conversations+knowledge", "", "", ""},
    };

    friend bool operator==(const SimulateConfig&, const SimulateConfig&) = default;
};

struct BenchConfig {
    std::size_t repeats = 3;

    friend bool operator==(const BenchConfig&, const BenchConfig&) = default;
};

struct KnowledgeConfig {
    std::size_t sample_n = 60;
    double disease_proportion = 0.65145;

    friend bool operator==(const KnowledgeConfig&, const KnowledgeConfig&) = default;
};

struct PipelineConfig {
    std::uint64_t seed = 42;
    PathsConfig paths;
    JudgeConfig judge;
    SelectionConfig selection;
    ExportConfig sft;
    SimulateConfig simulate;
    BenchConfig bench;
    KnowledgeConfig knowledge;

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

inline nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : c.simulate.stages)
        stages.push_back({{"name", s.name},
                          {"answers_file", s.answers_file},
                          {"base_url", s.base_url},
                          {"model_id", s.model_id}});
    nlohmann::json j{
        {"seed", c.seed},
        {"paths",
         {{"records", c.paths.records},
          {"diseases", c.paths.diseases},
          {"medicines", c.paths.medicines},
          {"cache_dir", c.paths.cache_dir},
          {"out_dir", c.paths.out_dir},
          {"templates", c.paths.templates},
          {"prompts_dir", c.paths.prompts_dir}}},
        {"judge",
         {{"mode", c.judge.mode},
          {"base_url", c.judge.base_url},
          {"chat_path", c.judge.chat_path},
          {"model_id", c.judge.model_id},
          {"api_key_env", c.judge.api_key_env},
          {"temperature", c.judge.temperature},
          {"timeout_seconds", c.judge.timeout_seconds},
          {"concurrency", c.judge.concurrency},
          {"retry_budget", c.judge.retry_budget},
          {"retry_base_delay_ms", c.judge.retry_base_delay_ms}}},
        {"selection", {{"quantile", c.selection.quantile}, {"combine", c.selection.combine}}},
        {"sft",
         {{"system_prompt", c.sft.system_prompt},
          {"train_fraction", c.sft.train_fraction},
          {"val_fraction", c.sft.val_fraction}}},
        {"simulate",
         {{"seeds", c.simulate.seeds},
          {"max_rounds", c.simulate.max_rounds},
          {"stages", std::move(stages)}}},
        {"bench", {{"repeats", c.bench.repeats}}},
        {"knowledge",
         {{"sample_n", c.knowledge.sample_n},
          {"disease_proportion", c.knowledge.disease_proportion}}},
    };
    if (c.sft.mix_ratio) j["sft"]["mix_ratio"] = *c.sft.mix_ratio;
    return j;
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        detail::expect_keys(
            j, {"seed", "paths", "judge", "selection", "sft", "simulate", "bench", "knowledge"},
            "config");
        PipelineConfig c;
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("paths")) {
            const auto& p = j.at("paths");
            detail::expect_keys(p,
                                {"records", "diseases", "medicines", "cache_dir", "out_dir",
                                 "templates", "prompts_dir"},
                                "config.paths");
            if (p.contains("records")) c.paths.records = p.at("records").get<std::string>();
            if (p.contains("diseases")) c.paths.diseases = p.at("diseases").get<std::string>();
            if (p.contains("medicines")) c.paths.medicines = p.at("medicines").get<std::string>();
            if (p.contains("cache_dir")) c.paths.cache_dir = p.at("cache_dir").get<std::string>();
            if (p.contains("out_dir")) c.paths.out_dir = p.at("out_dir").get<std::string>();
            if (p.contains("templates")) c.paths.templates = p.at("templates").get<std::string>();
            if (p.contains("prompts_dir"))
                c.paths.prompts_dir = p.at("prompts_dir").get<std::string>();
        }
        if (j.contains("judge")) {
            const auto& ju = j.at("judge");
            detail::expect_keys(ju,
                                {"mode", "base_url", "chat_path", "model_id", "api_key_env",
                                 "temperature", "timeout_seconds", "concurrency", "retry_budget",
                                 "retry_base_delay_ms"},
                                "config.judge");
            if (ju.contains("mode")) c.judge.mode = ju.at("mode").get<std::string>();
            if (c.judge.mode != "mock" && c.judge.mode != "http")
                throw ConfigError("judge.mode must be mock or http");
            if (ju.contains("base_url")) c.judge.base_url = ju.at("base_url").get<std::string>();
            if (ju.contains("chat_path")) c.judge.chat_path = ju.at("chat_path").get<std::string>();
            if (ju.contains("model_id")) c.judge.model_id = ju.at("model_id").get<std::string>();
            if (ju.contains("api_key_env"))
                c.judge.api_key_env = ju.at("api_key_env").get<std::string>();
            if (ju.contains("temperature"))
                c.judge.temperature = ju.at("temperature").get<double>();
            if (ju.contains("timeout_seconds"))
                c.judge.timeout_seconds = ju.at("timeout_seconds").get<int>();
            if (ju.contains("concurrency")) c.judge.concurrency = ju.at("concurrency").get<int>();
            if (ju.contains("retry_budget"))
                c.judge.retry_budget = ju.at("retry_budget").get<int>();
            if (ju.contains("retry_base_delay_ms"))
                c.judge.retry_base_delay_ms = ju.at("retry_base_delay_ms").get<int>();
        }
        if (j.contains("selection")) {
            const auto& s = j.at("selection");
            detail::expect_keys(s, {"quantile", "combine"}, "config.selection");
            if (s.contains("quantile")) c.selection.quantile = s.at("quantile").get<double>();
            if (s.contains("combine")) c.selection.combine = s.at("combine").get<std::string>();
            if (!(c.selection.quantile > 0.0 && c.selection.quantile <= 1.0))
                throw ConfigError("selection.quantile must be in (0,1]");
            c.selection.combine_rule();  // validates the name
        }
        if (j.contains("sft")) {
            const auto& e = j.at("sft");
            detail::expect_keys(
                e, {"system_prompt", "mix_ratio", "train_fraction", "val_fraction"}, "config.sft");
            if (e.contains("system_prompt"))
                c.sft.system_prompt = e.at("system_prompt").get<std::string>();
            if (e.contains("mix_ratio") && !e.at("mix_ratio").is_null())
                c.sft.mix_ratio = e.at("mix_ratio").get<double>();
            if (e.contains("train_fraction"))
                c.sft.train_fraction = e.at("train_fraction").get<double>();
            if (e.contains("val_fraction"))
                c.sft.val_fraction = e.at("val_fraction").get<double>();
        }
        if (j.contains("simulate")) {
            const auto& s = j.at("simulate");
            detail::expect_keys(s, {"seeds", "max_rounds", "stages"}, "config.simulate");
            if (s.contains("seeds")) c.simulate.seeds = s.at("seeds").get<std::size_t>();
            if (s.contains("max_rounds"))
                c.simulate.max_rounds = s.at("max_rounds").get<std::size_t>();
            if (s.contains("stages")) {
                c.simulate.stages.clear();
                for (const auto& st : s.at("stages")) {
                    detail::expect_keys(st, {"name", "answers_file", "base_url", "model_id"},
                                        "config.simulate.stages[]");
                    StageConfig sc;
                    sc.name = detail::require_string(st, "name", "stage");
                    if (st.contains("answers_file"))
                        sc.answers_file = st.at("answers_file").get<std::string>();
                    if (st.contains("base_url"))
                        sc.base_url = st.at("base_url").get<std::string>();
                    if (st.contains("model_id"))
                        sc.model_id = st.at("model_id").get<std::string>();
                    c.simulate.stages.push_back(std::move(sc));
                }
                if (c.simulate.stages.empty())
                    throw ConfigError("simulate.stages must not be empty");
            }
        }
        if (j.contains("bench")) {
            const auto& b = j.at("bench");
            detail::expect_keys(b, {"repeats"}, "config.bench");
            if (b.contains("repeats")) c.bench.repeats = b.at("repeats").get<std::size_t>();
        }
        if (j.contains("knowledge")) {
            const auto& k = j.at("knowledge");
            detail::expect_keys(k, {"sample_n", "disease_proportion"}, "config.knowledge");
            if (k.contains("sample_n")) c.knowledge.sample_n = k.at("sample_n").get<std::size_t>();
            if (k.contains("disease_proportion"))
                c.knowledge.disease_proportion = k.at("disease_proportion").get<double>();
            if (!(c.knowledge.disease_proportion >= 0.0 && c.knowledge.disease_proportion <= 1.0))
                throw ConfigError("knowledge.disease_proportion must be in [0,1]");
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    } catch (const Error&) {
        throw;
    }
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

inline void save_config(const std::filesystem::path& path, const PipelineConfig& c) {
    detail::write_file_atomic(path, config_to_json(c).dump(2) + "\n");
}

}  // namespace consult
