#pragma once

// Chat-format SFT export: records and Q&A pairs become role-tagged message
// sequences, mixed, deterministically shuffled and split, with a training-
// hyperparameter manifest describing the hand-off to the trainer. Token
// length is not enforced here; max_seq_len_tokens travels in the manifest
// because tokenization is model-specific.

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "consult/corpus.hpp"
#include "consult/detail/io.hpp"
#include "consult/detail/rng.hpp"
#include "consult/errors.hpp"
#include "consult/ingest.hpp"

namespace consult {

enum class MsgRole { system, user, assistant };

inline std::string to_string(MsgRole r) {
    switch (r) {
        case MsgRole::system: return "system";
        case MsgRole::user: return "user";
        case MsgRole::assistant: return "assistant";
    }
    return "user";
}

struct Message {
    MsgRole role = MsgRole::user;
    std::string content;

    friend bool operator==(const Message&, const Message&) = default;
};

struct SFTExample {
    std::vector<Message> messages;
    std::vector<std::string> tags;  // kept sorted and unique

    friend bool operator==(const SFTExample&, const SFTExample&) = default;
};

/// Optional system message first, then strict user/assistant alternation
/// starting with user, with at least one assistant message.
inline std::vector<Violation> validate_example(const SFTExample& e) {
    std::vector<Violation> out;
    std::size_t i = 0;
    if (i < e.messages.size() && e.messages[i].role == MsgRole::system) ++i;
    const std::size_t first = i;
    bool any_assistant = false;
    for (; i < e.messages.size(); ++i) {
        const MsgRole expected = ((i - first) % 2 == 0) ? MsgRole::user : MsgRole::assistant;
        if (e.messages[i].role != expected) {
            out.push_back({"messages[" + std::to_string(i) + "].role",
                           "expected " + to_string(expected) + ", found " +
                               to_string(e.messages[i].role)});
            break;
        }
        any_assistant = any_assistant || e.messages[i].role == MsgRole::assistant;
    }
    if (!any_assistant) out.push_back({"messages", "example has no assistant message"});
    return out;
}

inline void add_tag(SFTExample& e, std::string tag) {
    const auto it = std::lower_bound(e.tags.begin(), e.tags.end(), tag);
    if (it == e.tags.end() || *it != tag) e.tags.insert(it, std::move(tag));
}

/// Patient turns become user messages, doctor turns assistant messages, in
/// order; an optional system prompt is prepended.
inline SFTExample record_to_example(const ConsultationRecord& record,
                                    const std::string& system_prompt) {
    SFTExample e;
    if (!system_prompt.empty()) e.messages.push_back({MsgRole::system, system_prompt});
    for (const Turn& t : record.turns)
        e.messages.push_back(
            {t.role == Role::patient ? MsgRole::user : MsgRole::assistant, t.text});
    add_tag(e, "conversation");
    add_tag(e, "department:" + to_string(record.department));
    return e;
}

inline SFTExample qa_to_example(const QAPair& pair, const std::string& system_prompt) {
    SFTExample e;
    if (!system_prompt.empty()) e.messages.push_back({MsgRole::system, system_prompt});
    e.messages.push_back({MsgRole::user, pair.question});
    e.messages.push_back({MsgRole::assistant, pair.answer});
    add_tag(e, "knowledge");
    add_tag(e, "kind:" + to_string(pair.kind));
    return e;
}

/// Inverse of record_to_example modulo the system message: user messages
/// back to patient turns, assistant messages to doctor turns.
inline std::vector<Turn> example_to_turns(const SFTExample& e) {
    std::vector<Turn> turns;
    for (const Message& m : e.messages) {
        if (m.role == MsgRole::system) continue;
        turns.push_back({m.role == MsgRole::user ? Role::patient : Role::doctor, m.content,
                         turns.size()});
    }
    return turns;
}

inline nlohmann::json example_to_json(const SFTExample& e) {
    nlohmann::json messages = nlohmann::json::array();
    for (const Message& m : e.messages)
        messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    return nlohmann::json{{"messages", std::move(messages)}, {"tags", e.tags}};
}

inline SFTExample example_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error("example line must be a JSON object");
    detail::expect_keys(j, {"messages", "tags"}, "sft example");
    SFTExample e;
    const nlohmann::json& messages = detail::require(j, "messages", "sft example");
    if (!messages.is_array()) throw Error("field \"messages\" must be an array");
    for (const auto& mj : messages) {
        detail::expect_keys(mj, {"role", "content"}, "message");
        const std::string role = detail::require_string(mj, "role", "message");
        Message m;
        if (role == "system")
            m.role = MsgRole::system;
        else if (role == "user")
            m.role = MsgRole::user;
        else if (role == "assistant")
            m.role = MsgRole::assistant;
        else
            throw Error("unknown message role \"" + role + "\"");
        m.content = detail::require_string(mj, "content", "message");
        e.messages.push_back(std::move(m));
    }
    if (const auto it = j.find("tags"); it != j.end()) {
        if (!it->is_array()) throw Error("field \"tags\" must be an array");
        for (const auto& t : *it) add_tag(e, t.get<std::string>());
    }
    return e;
}

struct SFTLoadResult {
    std::vector<SFTExample> examples;
    std::vector<ParseError> skipped;
    std::size_t total_lines = 0;
};

inline SFTLoadResult load_examples(const std::filesystem::path& path,
                                   ParseMode mode = ParseMode::strict) {
    auto outcome = detail::load_jsonl<SFTExample>(
        path, mode, [](const nlohmann::json& j) { return example_from_json(j); });
    return {std::move(outcome.items), std::move(outcome.skipped), outcome.total_lines};
}

/// Training configuration shipped next to the dataset. Defaults match the
/// target fine-tuning recipe and every field is overridable.
struct TrainManifest {
    int global_batch_size = 16;
    double learning_rate = 2e-5;
    std::string optimizer = "AdamW";
    int max_seq_len_tokens = 1024;
    int epochs = 4;
    std::string adapter = "low-rank adaptation";
    std::size_t conversation_examples = 0;
    std::size_t knowledge_examples = 0;
    std::uint64_t split_seed = 0;

    friend bool operator==(const TrainManifest&, const TrainManifest&) = default;
};

inline nlohmann::json manifest_to_json(const TrainManifest& m) {
    return nlohmann::json{{"global_batch_size", m.global_batch_size},
                          {"learning_rate", m.learning_rate},
                          {"optimizer", m.optimizer},
                          {"max_seq_len_tokens", m.max_seq_len_tokens},
                          {"epochs", m.epochs},
                          {"adapter", m.adapter},
                          {"mix",
                           {{"conversation", m.conversation_examples},
                            {"knowledge", m.knowledge_examples}}},
                          {"split_seed", m.split_seed}};
}

struct DatasetOptions {
    std::string system_prompt;
    /// Target fraction of knowledge examples in the mix. When set, the
    /// over-represented side is down-sampled (never up-sampled) to approach
    /// the target; when unset everything is used as-is.
    std::optional<double> mix_ratio;
    std::vector<double> split_fractions = {0.9, 0.1};  // train, val[, ...]; must sum to 1
    std::vector<std::string> split_names = {"train", "val"};
    TrainManifest manifest;  // counts and seed filled by build_dataset
};

struct DatasetOutput {
    std::vector<std::filesystem::path> split_paths;
    std::filesystem::path manifest_path;
    TrainManifest manifest;
};

/// Build the mixed dataset: convert, mix, shuffle under `seed`, split by the
/// cumulative-rounding rule (each split size is within one example of its
/// exact share) and write one JSONL file per split plus the manifest.
/// Identical inputs and seed give byte-identical files.
inline DatasetOutput build_dataset(const std::vector<ConsultationRecord>& records,
                                   const std::vector<QAPair>& pairs,
                                   const std::filesystem::path& out_dir, std::uint64_t seed,
                                   const DatasetOptions& options) {
    if (records.empty() && pairs.empty()) throw EmptyInput("no records or pairs to export");
    if (options.split_fractions.empty() ||
        options.split_fractions.size() != options.split_names.size())
        throw PreconditionViolation("split fractions and names must align");
    double frac_sum = 0;
    for (double f : options.split_fractions) {
        if (f < 0) throw PreconditionViolation("split fractions must be non-negative");
        frac_sum += f;
    }
    if (std::abs(frac_sum - 1.0) > 1e-9)
        throw PreconditionViolation("split fractions must sum to 1");
    if (options.mix_ratio && !(*options.mix_ratio >= 0.0 && *options.mix_ratio <= 1.0))
        throw PreconditionViolation("mix_ratio must be in [0,1]");

    detail::Rng rng(seed);

    // resolve the mix
    std::size_t keep_conv = records.size();
    std::size_t keep_know = pairs.size();
    if (options.mix_ratio) {
        const double r = *options.mix_ratio;
        if (r <= 0.0) {
            keep_know = 0;
        } else if (r >= 1.0) {
            keep_conv = 0;
        } else {
            // never up-sample: shrink whichever side is over-represented
            const auto conv_cap = static_cast<std::size_t>(
                std::llround(static_cast<double>(pairs.size()) * (1.0 - r) / r));
            const auto know_cap = static_cast<std::size_t>(
                std::llround(static_cast<double>(records.size()) * r / (1.0 - r)));
            keep_conv = std::min(keep_conv, conv_cap);
            keep_know = std::min(keep_know, know_cap);
        }
    }
    auto conv_idx = rng.sample_indices(records.size(), keep_conv);
    auto know_idx = rng.sample_indices(pairs.size(), keep_know);
    std::sort(conv_idx.begin(), conv_idx.end());
    std::sort(know_idx.begin(), know_idx.end());

    std::vector<SFTExample> examples;
    examples.reserve(keep_conv + keep_know);
    for (const std::size_t i : conv_idx)
        examples.push_back(record_to_example(records[i], options.system_prompt));
    for (const std::size_t i : know_idx)
        examples.push_back(qa_to_example(pairs[i], options.system_prompt));
    if (examples.empty()) throw EmptyInput("mix ratio left no examples to export");
    rng.shuffle(examples);

    // cumulative rounding keeps every split within one example of its share
    const std::size_t n = examples.size();
    std::vector<std::size_t> boundaries;
    double cum = 0;
    for (double f : options.split_fractions) {
        cum += f;
        boundaries.push_back(
            static_cast<std::size_t>(std::llround(cum * static_cast<double>(n))));
    }
    boundaries.back() = n;

    DatasetOutput out;
    out.manifest = options.manifest;
    out.manifest.conversation_examples = keep_conv;
    out.manifest.knowledge_examples = keep_know;
    out.manifest.split_seed = seed;

    std::size_t begin = 0;
    for (std::size_t s = 0; s < boundaries.size(); ++s) {
        std::string buf;
        for (std::size_t i = begin; i < boundaries[s]; ++i) {
            buf += example_to_json(examples[i]).dump();
            buf += '\n';
        }
        const auto path = out_dir / (options.split_names[s] + ".jsonl");
        detail::write_file_atomic(path, buf);
        out.split_paths.push_back(path);
        begin = boundaries[s];
    }
    out.manifest_path = out_dir / "manifest.json";
    detail::write_file_atomic(out.manifest_path, manifest_to_json(out.manifest).dump(2) + "\n");
    return out;
}

/// Post-hoc structural check over a whole emitted file.
inline std::vector<Violation> validate_dataset_file(const std::filesystem::path& path) {
    std::vector<Violation> out;
    const auto loaded = load_examples(path);
    for (std::size_t i = 0; i < loaded.examples.size(); ++i)
        for (const auto& v : validate_example(loaded.examples[i]))
            out.push_back({"line " + std::to_string(i + 1) + ": " + v.path, v.message});
    return out;
}

}  // namespace consult
