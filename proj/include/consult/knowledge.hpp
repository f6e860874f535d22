#pragma once

// Knowledge-retention measurement across tuning stages: sample knowledge
// questions, collect each stage's answers (live endpoint or a recorded-
// answers file), grade them through the judge gateway, and tabulate
// accuracy per stage with deltas between adjacent stages.

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "consult/corpus.hpp"
#include "consult/detail/parallel.hpp"
#include "consult/detail/rng.hpp"
#include "consult/detail/sha256.hpp"
#include "consult/errors.hpp"
#include "consult/gateway.hpp"
#include "consult/ingest.hpp"

namespace consult {

struct KnowledgeItem {
    std::string question;
    std::string reference_answer;
    KnowledgeKind kind = KnowledgeKind::disease;

    friend bool operator==(const KnowledgeItem&, const KnowledgeItem&) = default;
};

/// Accuracy percentages are reported to one decimal, truncated (integer
/// tenths of a percent), which keeps them exact for byte-stable reports.
inline double accuracy_percent(std::size_t correct, std::size_t total) {
    if (total == 0) return 0.0;
    const auto tenths = (1000ull * correct) / total;
    return static_cast<double>(tenths) / 10.0;
}

/// Stratified without-replacement sample of knowledge questions. The
/// disease share of `n` is rounded to the nearest item (so each kind is
/// within one item of its exact share); item order follows the input pairs.
inline std::vector<KnowledgeItem> sample_items(const std::vector<QAPair>& pairs, std::size_t n,
                                               std::uint64_t seed, double disease_proportion) {
    if (!(disease_proportion >= 0.0 && disease_proportion <= 1.0))
        throw PreconditionViolation("kind proportions must be in [0,1] and sum to 1");
    if (n > pairs.size()) throw InsufficientPairs("total", n, pairs.size());

    std::vector<std::size_t> disease_idx, medicine_idx;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        (pairs[i].kind == KnowledgeKind::disease ? disease_idx : medicine_idx).push_back(i);

    const auto n_disease =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * disease_proportion));
    const std::size_t n_medicine = n - std::min(n, n_disease);
    if (n_disease > disease_idx.size())
        throw InsufficientPairs("disease", n_disease, disease_idx.size());
    if (n_medicine > medicine_idx.size())
        throw InsufficientPairs("medicine", n_medicine, medicine_idx.size());

    detail::Rng rng(detail::derive_seed(seed, "knowledge-sample"));
    auto d_picks = rng.sample_indices(disease_idx.size(), n_disease);
    auto m_picks = rng.sample_indices(medicine_idx.size(), n_medicine);
    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    for (const auto p : d_picks) chosen.push_back(disease_idx[p]);
    for (const auto p : m_picks) chosen.push_back(medicine_idx[p]);
    std::sort(chosen.begin(), chosen.end());

    std::vector<KnowledgeItem> items;
    items.reserve(chosen.size());
    for (const auto i : chosen)
        items.push_back({pairs[i].question, pairs[i].answer, pairs[i].kind});
    return items;
}

/// Order-sensitive digest of an item set; stage rows built over different
/// item sets refuse to be compared.
inline std::string items_digest(const std::vector<KnowledgeItem>& items) {
    detail::Sha256 h;
    for (const auto& it : items) {
        h.update(detail::sha256_hex(it.question));
        h.update(detail::sha256_hex(it.reference_answer));
    }
    return detail::to_hex(h.finish());
}

// ---------------------------------------------------------------------------
// Answer sources

/// Where a model stage's answers come from. Implementations must be safe
/// for concurrent answer() calls.
class AnswerSource {
public:
    virtual ~AnswerSource() = default;
    virtual std::optional<std::string> answer(const KnowledgeItem& item) = 0;
    virtual std::string name() const = 0;
};

/// Answers recorded offline, keyed by the sha256 hex of the question text.
/// File format: one {"question_digest","answer"} JSON object per line.
class RecordedAnswers : public AnswerSource {
public:
    static RecordedAnswers load(const std::filesystem::path& path) {
        RecordedAnswers src;
        src.name_ = path.string();
        auto outcome = detail::load_jsonl<std::pair<std::string, std::string>>(
            path, ParseMode::strict, [](const nlohmann::json& j) {
                detail::expect_keys(j, {"question_digest", "answer"}, "recorded answer");
                return std::pair{detail::require_string(j, "question_digest", "recorded answer"),
                                 detail::require_string(j, "answer", "recorded answer")};
            });
        for (auto& [digest, answer] : outcome.items) src.answers_[digest] = std::move(answer);
        return src;
    }

    static void write(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& question_answers) {
        std::string buf;
        for (const auto& [question, answer] : question_answers) {
            buf += nlohmann::json{{"question_digest", detail::sha256_hex(question)},
                                  {"answer", answer}}
                       .dump();
            buf += '\n';
        }
        detail::write_file_atomic(path, buf);
    }

    std::optional<std::string> answer(const KnowledgeItem& item) override {
        const auto it = answers_.find(detail::sha256_hex(item.question));
        if (it == answers_.end()) return std::nullopt;
        return it->second;
    }

    std::string name() const override { return "recorded:" + name_; }

private:
    std::map<std::string, std::string> answers_;
    std::string name_;
};

/// Echoes the reference answer; useful as a perfect-stage control.
class ReferenceAnswers : public AnswerSource {
public:
    std::optional<std::string> answer(const KnowledgeItem& item) override {
        return item.reference_answer;
    }
    std::string name() const override { return "reference"; }
};

// ---------------------------------------------------------------------------
// Stage evaluation

struct StageAccuracy {
    std::string stage;
    std::size_t disease_correct = 0;
    std::size_t disease_total = 0;
    std::size_t medicine_correct = 0;
    std::size_t medicine_total = 0;
    std::string digest;                  // item-set digest
    std::vector<std::string> warnings;   // questions with no recorded answer

    std::size_t correct() const { return disease_correct + medicine_correct; }
    std::size_t total() const { return disease_total + medicine_total; }
    double percent() const { return accuracy_percent(correct(), total()); }
    double disease_percent() const { return accuracy_percent(disease_correct, disease_total); }
    double medicine_percent() const { return accuracy_percent(medicine_correct, medicine_total); }
};

/// Grade one stage over the item set. Missing answers count as incorrect
/// (and are reported); excluding them would shrink the denominator and
/// inflate accuracy.
inline StageAccuracy evaluate_stage(const std::vector<KnowledgeItem>& items,
                                    const std::string& stage_name, AnswerSource& source,
                                    JudgeGateway& gateway, std::size_t workers = 1) {
    StageAccuracy row;
    row.stage = stage_name;
    row.digest = items_digest(items);
    std::vector<std::uint8_t> correct(items.size(), 0);
    std::vector<std::uint8_t> missing(items.size(), 0);
    detail::parallel_for(items.size(), workers, [&](std::size_t i) {
        const auto ans = source.answer(items[i]);
        if (!ans) {
            missing[i] = 1;
            return;
        }
        if (gateway.grade_answer(items[i].question, items[i].reference_answer, *ans) ==
            Verdict::correct)
            correct[i] = 1;
    });
    for (std::size_t i = 0; i < items.size(); ++i) {
        const bool is_disease = items[i].kind == KnowledgeKind::disease;
        (is_disease ? row.disease_total : row.medicine_total) += 1;
        if (correct[i]) (is_disease ? row.disease_correct : row.medicine_correct) += 1;
        if (missing[i])
            row.warnings.push_back("no answer for question: " + items[i].question);
    }
    return row;
}

struct AccuracyTable {
    struct Delta {
        double overall = 0;   // percentage points between adjacent stages
        double disease = 0;
        double medicine = 0;
    };
    std::vector<StageAccuracy> stages;
    std::vector<Delta> deltas;  // stages.size() - 1 entries
};

/// Side-by-side stage comparison in the given order. All rows must cover
/// the same item set.
inline AccuracyTable stage_comparison(std::vector<StageAccuracy> rows) {
    if (rows.size() < 2)
        throw PreconditionViolation("stage comparison needs at least 2 stage rows");
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].digest != rows.front().digest)
            throw ItemSetMismatch("stage " + rows[i].stage +
                                  " was graded on a different item set than " +
                                  rows.front().stage);
    AccuracyTable table;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        AccuracyTable::Delta d;
        d.overall = rows[i + 1].percent() - rows[i].percent();
        d.disease = rows[i + 1].disease_percent() - rows[i].disease_percent();
        d.medicine = rows[i + 1].medicine_percent() - rows[i].medicine_percent();
        table.deltas.push_back(d);
    }
    table.stages = std::move(rows);
    return table;
}

}  // namespace consult
