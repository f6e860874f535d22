#pragma once

// Matched-benchmark construction and the comparison statistics built on it:
// per-metric gap tables against repeated benchmark samples, win rates over
// matched pairs, and win-rate heterogeneity across departments and doctor
// dimensions.

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "consult/corpus.hpp"
#include "consult/detail/rng.hpp"
#include "consult/errors.hpp"

namespace consult {

enum class EvalMetric { professionalism, accuracy, satisfaction, trustworthiness, overall };

inline constexpr EvalMetric kEvalMetrics[] = {
    EvalMetric::professionalism, EvalMetric::accuracy, EvalMetric::satisfaction,
    EvalMetric::trustworthiness, EvalMetric::overall};

inline std::string to_string(EvalMetric m) {
    switch (m) {
        case EvalMetric::professionalism: return "professionalism";
        case EvalMetric::accuracy: return "accuracy";
        case EvalMetric::satisfaction: return "satisfaction";
        case EvalMetric::trustworthiness: return "trustworthiness";
        case EvalMetric::overall: return "overall";
    }
    return "overall";
}

inline double metric_value(const EvalScores& s, EvalMetric m) {
    switch (m) {
        case EvalMetric::professionalism: return s.professionalism;
        case EvalMetric::accuracy: return s.accuracy;
        case EvalMetric::satisfaction: return s.satisfaction;
        case EvalMetric::trustworthiness: return s.trustworthiness;
        case EvalMetric::overall: return s.overall();
    }
    return s.overall();
}

inline double round1(double v) { return std::round(v * 10.0) / 10.0; }
inline double round2(double v) { return std::round(v * 100.0) / 100.0; }

/// Relative gap in percent: 100 * (model - human) / human.
inline double gap_pct(double model, double human) {
    return 100.0 * (model - human) / human;
}

// ---------------------------------------------------------------------------
// Matched benchmark sampling

/// Draw `repeats` benchmark samples from the human pool so that each sample
/// reproduces the model corpus's department counts exactly. Sampling is
/// without replacement within a sample; each repeat runs under its own
/// derived seed. Throws InsufficientPool when any department cannot be
/// covered.
inline std::vector<std::vector<ConsultationRecord>> matched_sample(
    const std::vector<ConsultationRecord>& model_records,
    const std::vector<ConsultationRecord>& human_pool, std::size_t repeats,
    std::uint64_t seed) {
    if (model_records.empty()) throw EmptyCorpus("model corpus is empty");

    std::map<Department, std::size_t> need;
    for (const auto& r : model_records) ++need[r.department];
    std::map<Department, std::vector<std::size_t>> pool;
    for (std::size_t i = 0; i < human_pool.size(); ++i)
        pool[human_pool[i].department].push_back(i);
    for (const auto& [dept, n] : need) {
        const auto it = pool.find(dept);
        const std::size_t have = it == pool.end() ? 0 : it->second.size();
        if (have < n) throw InsufficientPool(to_string(dept), n, have);
    }

    std::vector<std::vector<ConsultationRecord>> samples;
    samples.reserve(repeats);
    for (std::size_t rep = 0; rep < repeats; ++rep) {
        detail::Rng rng(detail::derive_seed(seed, "benchmark-sample-" + std::to_string(rep)));
        std::vector<ConsultationRecord> sample;
        sample.reserve(model_records.size());
        for (const auto& [dept, n] : need) {
            const auto& candidates = pool[dept];
            auto picks = rng.sample_indices(candidates.size(), n);
            std::sort(picks.begin(), picks.end());
            for (const std::size_t p : picks) sample.push_back(human_pool[candidates[p]]);
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

// ---------------------------------------------------------------------------
// Gap report

struct GapReport {
    struct Row {
        std::string label;
        bool composite = false;
        double model_score = 0;            // rounded to 1 decimal
        std::vector<double> human_scores;  // per sample, rounded to 1 decimal
        std::vector<double> gaps;          // per sample, percent, rounded to 2 decimals
    };
    std::vector<Row> rows;
    std::size_t model_n = 0;
    std::vector<std::size_t> sample_n;
};

namespace detail {

inline double metric_mean(std::span<const EvalScores> scores, EvalMetric m) {
    double s = 0;
    for (const auto& x : scores) s += metric_value(x, m);
    return s / static_cast<double>(scores.size());
}

}  // namespace detail

/// Per-metric means plus the composite rows (medical expertise = mean of
/// professionalism and accuracy, consumer preference = mean of satisfaction
/// and trustworthiness, overall = mean of all four). Scores are reported to
/// one decimal and each gap is computed from the reported scores so a reader
/// recomputing (model - human)/human from the printed table reproduces the
/// printed gap.
inline GapReport gap_table(const std::vector<EvalScores>& model_scores,
                           const std::vector<std::vector<EvalScores>>& benchmark_samples) {
    if (model_scores.empty()) throw EmptyScores("model score list is empty");
    for (const auto& s : benchmark_samples)
        if (s.empty()) throw EmptyScores("benchmark sample score list is empty");

    struct Spec {
        std::string label;
        bool composite;
        std::vector<EvalMetric> parts;
    };
    const std::vector<Spec> layout = {
        {"Professionalism", false, {EvalMetric::professionalism}},
        {"Accuracy", false, {EvalMetric::accuracy}},
        {"Overall Medical Expertise", true,
         {EvalMetric::professionalism, EvalMetric::accuracy}},
        {"Satisfaction", false, {EvalMetric::satisfaction}},
        {"Trustworthiness", false, {EvalMetric::trustworthiness}},
        {"Overall Consumer Preference", true,
         {EvalMetric::satisfaction, EvalMetric::trustworthiness}},
        {"Overall Performance", true,
         {EvalMetric::professionalism, EvalMetric::accuracy, EvalMetric::satisfaction,
          EvalMetric::trustworthiness}},
    };

    auto row_score = [&](std::span<const EvalScores> scores, const Spec& spec) {
        double s = 0;
        for (EvalMetric m : spec.parts) s += detail::metric_mean(scores, m);
        return s / static_cast<double>(spec.parts.size());
    };

    GapReport report;
    report.model_n = model_scores.size();
    for (const auto& s : benchmark_samples) report.sample_n.push_back(s.size());
    for (const auto& spec : layout) {
        GapReport::Row row;
        row.label = spec.label;
        row.composite = spec.composite;
        row.model_score = round1(row_score(model_scores, spec));
        for (const auto& sample : benchmark_samples) {
            const double human = round1(row_score(sample, spec));
            row.human_scores.push_back(human);
            row.gaps.push_back(round2(gap_pct(row.model_score, human)));
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Matched pairs and win rates

struct MatchedPair {
    std::string model_record_id;
    std::string human_record_id;
    Department department = Department::unclassified;
    std::string length_band;

    friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

/// A matched pair with both sides scored, plus the human doctor's metadata
/// for segmentation.
struct ScoredPair {
    MatchedPair pair;
    EvalScores model;
    EvalScores human;
    std::optional<DoctorMeta> human_meta;
    std::size_t human_turns = 0;
};

/// Pair every model record with a distinct human record sharing department
/// and conversation-length band; the partner is a seeded uniform draw from
/// the eligible remainder of the pool.
inline std::vector<MatchedPair> match_pairs(const std::vector<ConsultationRecord>& model_records,
                                            const std::vector<ConsultationRecord>& human_pool,
                                            std::uint64_t seed) {
    if (model_records.empty()) throw EmptyCorpus("model corpus is empty");
    using Key = std::pair<Department, std::string>;
    std::map<Key, std::vector<std::size_t>> pool;
    for (std::size_t i = 0; i < human_pool.size(); ++i)
        pool[{human_pool[i].department, conversation_length_band(human_pool[i].turns.size())}]
            .push_back(i);
    std::map<Key, std::size_t> need;
    for (const auto& r : model_records)
        ++need[{r.department, conversation_length_band(r.turns.size())}];
    for (const auto& [key, n] : need) {
        const auto it = pool.find(key);
        const std::size_t have = it == pool.end() ? 0 : it->second.size();
        if (have < n)
            throw InsufficientPool(to_string(key.first) + " length " + key.second, n, have);
    }

    detail::Rng rng(detail::derive_seed(seed, "matched-pairs"));
    std::vector<MatchedPair> pairs;
    pairs.reserve(model_records.size());
    for (const auto& r : model_records) {
        auto& candidates =
            pool[{r.department, conversation_length_band(r.turns.size())}];
        const std::size_t pick = static_cast<std::size_t>(rng.below(candidates.size()));
        const std::size_t human_idx = candidates[pick];
        candidates[pick] = candidates.back();
        candidates.pop_back();
        pairs.push_back({r.id, human_pool[human_idx].id, r.department,
                         conversation_length_band(r.turns.size())});
    }
    return pairs;
}

struct WinRate {
    std::size_t wins = 0;
    std::size_t total = 0;

    double percent() const {
        return 100.0 * static_cast<double>(wins) / static_cast<double>(total);
    }

    friend bool operator==(const WinRate&, const WinRate&) = default;
};

/// Fraction of pairs where the model's score is equal to or higher than the
/// matched human's (ties count as wins).
inline WinRate win_rate(std::span<const ScoredPair> pairs, EvalMetric metric) {
    if (pairs.empty()) throw EmptyPairs("no matched pairs");
    WinRate r;
    r.total = pairs.size();
    for (const auto& p : pairs)
        if (metric_value(p.model, metric) >= metric_value(p.human, metric)) ++r.wins;
    return r;
}

/// Strict wins for the reversed comparison (human > model); together with
/// win_rate this partitions every pair exactly once.
inline WinRate strict_loss_rate(std::span<const ScoredPair> pairs, EvalMetric metric) {
    if (pairs.empty()) throw EmptyPairs("no matched pairs");
    WinRate r;
    r.total = pairs.size();
    for (const auto& p : pairs)
        if (metric_value(p.human, metric) > metric_value(p.model, metric)) ++r.wins;
    return r;
}

// ---------------------------------------------------------------------------
// Heterogeneity segmentation

enum class Segmentation {
    department,
    hospital_prestige,
    experience_band,
    conversation_length_band,
    city_tier,
    gender,
    consults_band,
    age_band,
    title,
};

inline constexpr Segmentation kAllSegmentations[] = {
    Segmentation::department,    Segmentation::hospital_prestige,
    Segmentation::experience_band, Segmentation::conversation_length_band,
    Segmentation::city_tier,     Segmentation::gender,
    Segmentation::consults_band, Segmentation::age_band,
    Segmentation::title,
};

inline std::string to_string(Segmentation s) {
    switch (s) {
        case Segmentation::department: return "department";
        case Segmentation::hospital_prestige: return "hospital_prestige";
        case Segmentation::experience_band: return "experience_band";
        case Segmentation::conversation_length_band: return "conversation_length_band";
        case Segmentation::city_tier: return "city_tier";
        case Segmentation::gender: return "gender";
        case Segmentation::consults_band: return "consults_band";
        case Segmentation::age_band: return "age_band";
        case Segmentation::title: return "title";
    }
    return "department";
}

/// Canonical segment order per dimension; empty segments are omitted from
/// the report with a note.
inline std::vector<std::string> segment_labels(Segmentation s) {
    switch (s) {
        case Segmentation::department: {
            std::vector<std::string> out;
            for (Department d : kAllDepartments) out.push_back(display_name(d));
            return out;
        }
        case Segmentation::hospital_prestige: return {"ordinary", "well_known", "top_tier"};
        case Segmentation::experience_band: return {"0-9", "10-19", "20+"};
        case Segmentation::conversation_length_band: return {"2-6", "8-10", "12+"};
        case Segmentation::city_tier: return {"tier1", "tier2", "tier3"};
        case Segmentation::gender: return {"male", "female"};
        case Segmentation::consults_band:
            return {"<1000", "1000-5000", "5000-10000", "10000+"};
        case Segmentation::age_band: return {"<30", "30-40", "40-50", "50+"};
        case Segmentation::title: return {"junior", "attending", "associate", "chief"};
    }
    return {};
}

/// The segment a pair belongs to, or nullopt when the needed metadata is
/// absent (such pairs are excluded and counted).
inline std::optional<std::string> segment_of(const ScoredPair& p, Segmentation s) {
    const auto& meta = p.human_meta;
    switch (s) {
        case Segmentation::department: return display_name(p.pair.department);
        case Segmentation::conversation_length_band:
            return conversation_length_band(p.human_turns);
        case Segmentation::hospital_prestige:
            if (!meta) return std::nullopt;
            return to_string(meta->hospital_prestige);
        case Segmentation::experience_band:
            if (!meta) return std::nullopt;
            return experience_band(meta->experience_years);
        case Segmentation::city_tier:
            if (!meta) return std::nullopt;
            return to_string(meta->hospital_city_tier);
        case Segmentation::gender:
            if (!meta || meta->gender == Gender::unknown) return std::nullopt;
            return to_string(meta->gender);
        case Segmentation::consults_band:
            if (!meta) return std::nullopt;
            return consults_band(meta->times_consulted);
        case Segmentation::age_band:
            if (!meta || !meta->age) return std::nullopt;
            return age_band(*meta->age);
        case Segmentation::title:
            if (!meta || meta->title == DoctorTitle::unknown) return std::nullopt;
            return to_string(meta->title);
    }
    return std::nullopt;
}

struct SegmentTable {
    struct Row {
        std::string segment;
        std::map<EvalMetric, WinRate> rates;  // includes EvalMetric::overall
        std::size_t pairs = 0;
    };
    Segmentation segmentation = Segmentation::department;
    std::vector<Row> rows;
    std::vector<std::string> empty_segments;  // omitted, noted in the report
    std::size_t unsegmented_pairs = 0;        // missing metadata
};

inline SegmentTable segment_win_rates(std::span<const ScoredPair> pairs, Segmentation s) {
    SegmentTable table;
    table.segmentation = s;
    std::map<std::string, std::vector<ScoredPair>> buckets;
    for (const auto& p : pairs) {
        const auto seg = segment_of(p, s);
        if (!seg) {
            ++table.unsegmented_pairs;
            continue;
        }
        buckets[*seg].push_back(p);
    }
    for (const auto& label : segment_labels(s)) {
        const auto it = buckets.find(label);
        if (it == buckets.end() || it->second.empty()) {
            table.empty_segments.push_back(label);
            continue;
        }
        SegmentTable::Row row;
        row.segment = label;
        row.pairs = it->second.size();
        for (EvalMetric m : kEvalMetrics) row.rates[m] = win_rate(it->second, m);
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace consult
