#pragma once

// Role-model selection: per-dimension upper-quantile thresholds over the
// three soft skills, intersection (or mean-score) filtering, and the
// before/after distribution report behind the selection chart.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "consult/corpus.hpp"
#include "consult/errors.hpp"

namespace consult {

enum class CombineRule { all_dims, mean_dim };

inline std::string to_string(CombineRule c) {
    return c == CombineRule::all_dims ? "all_dims" : "mean_dim";
}

struct SelectionPolicy {
    double quantile = 0.5;  // in (0, 1]
    CombineRule combine = CombineRule::all_dims;
};

struct SkillThresholds {
    double professionalism = 0;
    double explainability = 0;
    double emotional_support = 0;

    friend bool operator==(const SkillThresholds&, const SkillThresholds&) = default;
};

namespace detail {

/// Nearest-rank lower quantile: the element at ascending 1-based rank
/// ceil(q*n). q=0.5 over {60,70,80,90} gives 70; q=1 gives the maximum.
inline double nearest_rank(std::vector<double> values, double quantile) {
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    std::size_t rank = static_cast<std::size_t>(std::ceil(quantile * n));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

}  // namespace detail

inline SkillThresholds thresholds(std::span<const SoftSkillScores> scores, double quantile) {
    if (scores.empty()) throw EmptyCorpus("cannot take thresholds of an empty corpus");
    if (!(quantile > 0.0 && quantile <= 1.0))
        throw PreconditionViolation("quantile must be in (0,1]");
    std::vector<double> p, e, s;
    p.reserve(scores.size());
    e.reserve(scores.size());
    s.reserve(scores.size());
    for (const auto& x : scores) {
        p.push_back(x.professionalism);
        e.push_back(x.explainability);
        s.push_back(x.emotional_support);
    }
    return {detail::nearest_rank(std::move(p), quantile),
            detail::nearest_rank(std::move(e), quantile),
            detail::nearest_rank(std::move(s), quantile)};
}

struct Selection {
    std::vector<ConsultationRecord> kept;
    std::vector<ConsultationRecord> dropped;
    SkillThresholds per_dimension{};
    double mean_threshold = 0;  // used by mean_dim
};

/// Partition a scored corpus. all_dims keeps a record iff each skill clears
/// its dimension threshold; mean_dim keeps iff the mean of the three skills
/// clears the quantile threshold of the mean distribution. Ties at a
/// threshold are kept (>=). Input order is preserved on both sides.
inline Selection select(const std::vector<ConsultationRecord>& records,
                        const SelectionPolicy& policy) {
    if (records.empty()) throw EmptyCorpus("cannot select from an empty corpus");
    std::vector<SoftSkillScores> scores;
    scores.reserve(records.size());
    for (const auto& r : records) {
        if (!r.soft_skills)
            throw PreconditionViolation("record " + r.id + " has no soft-skill scores");
        scores.push_back(*r.soft_skills);
    }

    Selection result;
    if (policy.combine == CombineRule::all_dims) {
        result.per_dimension = thresholds(scores, policy.quantile);
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& s = scores[i];
            const bool keep = s.professionalism >= result.per_dimension.professionalism &&
                              s.explainability >= result.per_dimension.explainability &&
                              s.emotional_support >= result.per_dimension.emotional_support;
            (keep ? result.kept : result.dropped).push_back(records[i]);
        }
    } else {
        std::vector<double> means;
        means.reserve(scores.size());
        for (const auto& s : scores)
            means.push_back((s.professionalism + s.explainability + s.emotional_support) / 3.0);
        result.mean_threshold = detail::nearest_rank(means, policy.quantile);
        for (std::size_t i = 0; i < records.size(); ++i)
            (means[i] >= result.mean_threshold ? result.kept : result.dropped)
                .push_back(records[i]);
    }
    return result;
}

/// Fixed-bin histogram over [0,100], bin width 5. Values of exactly 100 fall
/// into the last bin.
struct SkillHistogram {
    static constexpr std::size_t kBins = 20;
    std::array<std::size_t, kBins> counts{};
    double mean = 0;
    std::size_t n = 0;

    friend bool operator==(const SkillHistogram&, const SkillHistogram&) = default;
};

inline SkillHistogram histogram(std::span<const double> values) {
    SkillHistogram h;
    h.n = values.size();
    double sum = 0;
    for (double v : values) {
        sum += v;
        auto bin = static_cast<std::size_t>(v / 5.0);
        if (bin >= SkillHistogram::kBins) bin = SkillHistogram::kBins - 1;
        ++h.counts[bin];
    }
    if (h.n > 0) h.mean = sum / static_cast<double>(h.n);
    return h;
}

struct DistributionReport {
    struct Dimension {
        std::string name;
        SkillHistogram before;
        SkillHistogram after;

        friend bool operator==(const Dimension&, const Dimension&) = default;
    };
    std::array<Dimension, 3> dimensions;

    friend bool operator==(const DistributionReport&, const DistributionReport&) = default;
};

inline DistributionReport distribution_report(std::span<const SoftSkillScores> before,
                                              std::span<const SoftSkillScores> after) {
    auto pull = [](std::span<const SoftSkillScores> xs, double SoftSkillScores::*field) {
        std::vector<double> out;
        out.reserve(xs.size());
        for (const auto& x : xs) out.push_back(x.*field);
        return out;
    };
    DistributionReport r;
    r.dimensions[0] = {"professionalism", histogram(pull(before, &SoftSkillScores::professionalism)),
                       histogram(pull(after, &SoftSkillScores::professionalism))};
    r.dimensions[1] = {"explainability", histogram(pull(before, &SoftSkillScores::explainability)),
                       histogram(pull(after, &SoftSkillScores::explainability))};
    r.dimensions[2] = {"emotional_support",
                       histogram(pull(before, &SoftSkillScores::emotional_support)),
                       histogram(pull(after, &SoftSkillScores::emotional_support))};
    return r;
}

}  // namespace consult
