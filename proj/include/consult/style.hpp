#pragma once

// Linguistic-style features of one conversation, per-pair alignment
// distances against matched human records, and the per-feature paired
// t-tests of distance reduction across model stages.
//
// All features are computed on the doctor side only (rounds counts doctor
// turns); the patient side is judge-generated during simulation and would
// contaminate the comparison.

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "consult/corpus.hpp"
#include "consult/errors.hpp"
#include "consult/stats.hpp"
#include "consult/text.hpp"

namespace consult {

enum class StyleFeature {
    rounds,
    words_per_round,
    question_ratio,
    question_pattern,
    distinct_bigrams,
    distinct_trigrams,
    type_token_ratio,
};

inline constexpr std::array<StyleFeature, 7> kStyleFeatures = {
    StyleFeature::rounds,          StyleFeature::words_per_round,
    StyleFeature::question_ratio,  StyleFeature::question_pattern,
    StyleFeature::distinct_bigrams, StyleFeature::distinct_trigrams,
    StyleFeature::type_token_ratio,
};

inline std::string to_string(StyleFeature f) {
    switch (f) {
        case StyleFeature::rounds: return "rounds";
        case StyleFeature::words_per_round: return "words_per_round";
        case StyleFeature::question_ratio: return "question_ratio";
        case StyleFeature::question_pattern: return "question_pattern";
        case StyleFeature::distinct_bigrams: return "distinct_bigrams";
        case StyleFeature::distinct_trigrams: return "distinct_trigrams";
        case StyleFeature::type_token_ratio: return "type_token_ratio";
    }
    return "rounds";
}

inline std::string display_name(StyleFeature f) {
    switch (f) {
        case StyleFeature::rounds: return "#rounds";
        case StyleFeature::words_per_round: return "#word per round";
        case StyleFeature::question_ratio: return "question ratio";
        case StyleFeature::question_pattern: return "question sequential pattern";
        case StyleFeature::distinct_bigrams: return "distinct bigrams";
        case StyleFeature::distinct_trigrams: return "distinct trigrams";
        case StyleFeature::type_token_ratio: return "type-token ratio";
    }
    return "#rounds";
}

struct StyleFeatureVector {
    std::size_t rounds = 0;                  // number of doctor turns
    double words_per_round = 0;              // mean doctor tokens per doctor turn
    double question_ratio = 0;               // question sentences / all doctor sentences
    std::vector<std::uint8_t> question_pattern;  // per doctor turn: contains ?/？
    double distinct_bigrams = 0;   // distinct-gram count; per-1k-token rate when the option is set
    double distinct_trigrams = 0;  // turn boundaries break grams
    double type_token_ratio = 0;   // distinct / total doctor tokens

    friend bool operator==(const StyleFeatureVector&, const StyleFeatureVector&) = default;
};

struct StyleOptions {
    /// Report distinct n-grams per 1000 doctor tokens instead of raw counts.
    bool ngrams_per_1k_tokens = false;
};

/// Extract the seven features from a normalized record.
inline StyleFeatureVector extract_features(const ConsultationRecord& record,
                                           const StyleOptions& opts = {}) {
    StyleFeatureVector f;
    std::size_t total_tokens = 0;
    std::size_t question_sentences = 0;
    std::size_t total_sentences = 0;
    std::set<std::string> types;
    std::set<std::string> bigrams;
    std::set<std::string> trigrams;

    for (const Turn& t : record.turns) {
        if (t.role != Role::doctor) continue;
        ++f.rounds;
        const auto tokens = tokenize(t.text);
        total_tokens += tokens.size();
        for (const auto& tok : tokens) types.insert(tok);
        for (auto& g : ngram_set(tokens, 2)) bigrams.insert(g);
        for (auto& g : ngram_set(tokens, 3)) trigrams.insert(g);
        for (const Sentence& s : split_sentences(t.text)) {
            ++total_sentences;
            if (s.is_question) ++question_sentences;
        }
        f.question_pattern.push_back(contains_question_mark(t.text) ? 1 : 0);
    }

    if (f.rounds > 0)
        f.words_per_round = static_cast<double>(total_tokens) / static_cast<double>(f.rounds);
    if (total_sentences > 0)
        f.question_ratio =
            static_cast<double>(question_sentences) / static_cast<double>(total_sentences);
    f.distinct_bigrams = static_cast<double>(bigrams.size());
    f.distinct_trigrams = static_cast<double>(trigrams.size());
    if (total_tokens > 0)
        f.type_token_ratio = static_cast<double>(types.size()) / static_cast<double>(total_tokens);

    if (opts.ngrams_per_1k_tokens && total_tokens > 0) {
        const double scale = 1000.0 / static_cast<double>(total_tokens);
        f.distinct_bigrams *= scale;
        f.distinct_trigrams *= scale;
    }
    return f;
}

/// Per-feature absolute deviation between two feature vectors, indexable by
/// StyleFeature.
struct FeatureDeviation {
    std::array<double, 7> values{};

    double& operator[](StyleFeature f) { return values[static_cast<std::size_t>(f)]; }
    double operator[](StyleFeature f) const { return values[static_cast<std::size_t>(f)]; }

    friend bool operator==(const FeatureDeviation&, const FeatureDeviation&) = default;
};

/// Mismatch fraction over the shared prefix of two binary sequences.
inline double pattern_distance(const std::vector<std::uint8_t>& a,
                               const std::vector<std::uint8_t>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    if (n == 0) return 0.0;
    std::size_t mismatch = 0;
    for (std::size_t i = 0; i < n; ++i)
        if ((a[i] != 0) != (b[i] != 0)) ++mismatch;
    return static_cast<double>(mismatch) / static_cast<double>(n);
}

inline FeatureDeviation feature_distance(const StyleFeatureVector& a,
                                         const StyleFeatureVector& b) {
    FeatureDeviation d;
    auto absdiff = [](double x, double y) { return x >= y ? x - y : y - x; };
    d[StyleFeature::rounds] =
        absdiff(static_cast<double>(a.rounds), static_cast<double>(b.rounds));
    d[StyleFeature::words_per_round] = absdiff(a.words_per_round, b.words_per_round);
    d[StyleFeature::question_ratio] = absdiff(a.question_ratio, b.question_ratio);
    d[StyleFeature::question_pattern] = pattern_distance(a.question_pattern, b.question_pattern);
    d[StyleFeature::distinct_bigrams] = absdiff(a.distinct_bigrams, b.distinct_bigrams);
    d[StyleFeature::distinct_trigrams] = absdiff(a.distinct_trigrams, b.distinct_trigrams);
    d[StyleFeature::type_token_ratio] = absdiff(a.type_token_ratio, b.type_token_ratio);
    return d;
}

/// Deviation between a model conversation and the human record it was seeded
/// from. Both must share a seed id (the id prefix before '#').
inline FeatureDeviation pair_distance(const ConsultationRecord& model_record,
                                      const ConsultationRecord& human_record,
                                      const StyleOptions& opts = {}) {
    if (seed_id(model_record) != seed_id(human_record))
        throw SeedMismatch("records " + model_record.id + " and " + human_record.id +
                           " do not share a seed id");
    return feature_distance(extract_features(model_record, opts),
                            extract_features(human_record, opts));
}

/// Arithmetic mean of per-pair deviations, per feature.
inline FeatureDeviation alignment_distance(const std::vector<FeatureDeviation>& pairs) {
    if (pairs.size() < 2)
        throw TooFewPairs("alignment distance needs at least 2 pairs, have " +
                          std::to_string(pairs.size()));
    FeatureDeviation mean;
    for (const auto& d : pairs)
        for (std::size_t i = 0; i < mean.values.size(); ++i) mean.values[i] += d.values[i];
    for (auto& v : mean.values) v /= static_cast<double>(pairs.size());
    return mean;
}

/// One model stage's conversations, one per human seed record.
struct StageConversations {
    std::string name;
    std::vector<ConsultationRecord> records;
};

struct AlignmentTable {
    struct Delta {
        double mean = 0;  // distance shortened going to the next stage
        double t = 0;
        double p = 1;
        std::size_t n = 0;
        std::string stars;
    };
    struct Row {
        StyleFeature feature = StyleFeature::rounds;
        std::vector<double> distance;  // per stage
        std::vector<Delta> shortened;  // per adjacent stage transition
    };
    std::vector<std::string> stage_names;
    std::size_t pair_count = 0;
    std::array<Row, 7> rows;
};

/// Align every stage against the human records and test, per feature, how
/// much each stage transition shortens the distance. Every stage must carry
/// exactly one conversation per human seed id.
inline AlignmentTable run_alignment(const std::vector<ConsultationRecord>& human_records,
                                    const std::vector<StageConversations>& stages,
                                    const StyleOptions& opts = {}) {
    if (human_records.size() < 2)
        throw TooFewPairs("alignment needs at least 2 seed records");
    if (stages.empty()) throw StageMismatch("no model stages given");

    std::map<std::string, const ConsultationRecord*> by_seed;
    for (const auto& h : human_records) by_seed[std::string(seed_id(h))] = &h;
    if (by_seed.size() != human_records.size())
        throw StageMismatch("duplicate seed ids in human records");

    const std::size_t n = human_records.size();
    // deviations[stage][pair] over seed-id order
    std::vector<std::vector<FeatureDeviation>> deviations(stages.size());
    for (std::size_t s = 0; s < stages.size(); ++s) {
        if (stages[s].records.size() != n)
            throw StageMismatch("stage " + stages[s].name + " has " +
                                std::to_string(stages[s].records.size()) +
                                " conversations for " + std::to_string(n) + " seeds");
        std::map<std::string, const ConsultationRecord*> stage_by_seed;
        for (const auto& r : stages[s].records) stage_by_seed[std::string(seed_id(r))] = &r;
        for (const auto& [seed, human] : by_seed) {
            const auto it = stage_by_seed.find(seed);
            if (it == stage_by_seed.end())
                throw StageMismatch("stage " + stages[s].name + " is missing seed " + seed);
            deviations[s].push_back(pair_distance(*it->second, *human, opts));
        }
    }

    AlignmentTable table;
    table.pair_count = n;
    for (const auto& s : stages) table.stage_names.push_back(s.name);
    for (std::size_t fi = 0; fi < kStyleFeatures.size(); ++fi) {
        auto& row = table.rows[fi];
        row.feature = kStyleFeatures[fi];
        for (std::size_t s = 0; s < stages.size(); ++s) {
            std::vector<double> ds(n);
            for (std::size_t i = 0; i < n; ++i) ds[i] = deviations[s][i].values[fi];
            row.distance.push_back(stats::mean(ds));
        }
        for (std::size_t s = 0; s + 1 < stages.size(); ++s) {
            std::vector<double> before(n), after(n);
            for (std::size_t i = 0; i < n; ++i) {
                before[i] = deviations[s][i].values[fi];
                after[i] = deviations[s + 1][i].values[fi];
            }
            const auto tt = stats::paired_ttest(before, after);
            AlignmentTable::Delta d;
            d.mean = tt.delta_mean;
            d.t = tt.t;
            d.p = tt.p;
            d.n = tt.n;
            d.stars = stats::significance_stars(tt.p);
            row.shortened.push_back(std::move(d));
        }
    }
    return table;
}

}  // namespace consult
