#pragma once

// Table and chart emitters. Every renderer is a pure function of its input
// struct with pinned number formatting, so reports are byte-stable across
// runs and platforms.

#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "consult/curation.hpp"
#include "consult/errors.hpp"
#include "consult/eval.hpp"
#include "consult/knowledge.hpp"
#include "consult/style.hpp"

namespace consult {

namespace detail {

inline std::string strf(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

inline std::string md_rule(std::size_t columns) {
    std::string out = "|";
    for (std::size_t i = 0; i < columns; ++i) out += "---|";
    return out + "\n";
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    return out + "\"";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gap report

inline std::string render_gap_markdown(const GapReport& r) {
    std::string out = "| Evaluation Metrics | Model Score |";
    for (std::size_t s = 0; s < r.sample_n.size(); ++s)
        out += detail::strf(" Sample %zu Score | Sample %zu Gap (Δ%%) |", s + 1, s + 1);
    out += "\n" + detail::md_rule(2 + 2 * r.sample_n.size());
    for (const auto& row : r.rows) {
        const std::string label = row.composite ? "*" + row.label + "*" : row.label;
        out += "| " + label + detail::strf(" | %.1f |", row.model_score);
        for (std::size_t s = 0; s < row.human_scores.size(); ++s)
            out += detail::strf(" %.1f | %.2f%% |", row.human_scores[s], row.gaps[s]);
        out += "\n";
    }
    out += detail::strf("| Number of entities | %zu |", r.model_n);
    for (const auto n : r.sample_n) out += detail::strf(" %zu | - |", n);
    out += "\n";
    return out;
}

inline std::string render_gap_csv(const GapReport& r) {
    std::string out = "metric,model_score";
    for (std::size_t s = 0; s < r.sample_n.size(); ++s)
        out += detail::strf(",sample_%zu_score,sample_%zu_gap_pct", s + 1, s + 1);
    out += "\n";
    for (const auto& row : r.rows) {
        out += detail::csv_escape(row.label) + detail::strf(",%.1f", row.model_score);
        for (std::size_t s = 0; s < row.human_scores.size(); ++s)
            out += detail::strf(",%.1f,%.2f", row.human_scores[s], row.gaps[s]);
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Win-rate tables

inline std::string render_segment_markdown(const SegmentTable& t) {
    std::string out = "| " + to_string(t.segmentation) +
                      " | Professionalism | Accuracy | Satisfaction | Trustworthiness | "
                      "Overall Score | Pairs |\n";
    out += detail::md_rule(7);
    for (const auto& row : t.rows) {
        out += "| " + row.segment + " |";
        for (EvalMetric m : kEvalMetrics)
            out += detail::strf(" %.2f%% |", row.rates.at(m).percent());
        out += detail::strf(" %zu |\n", row.pairs);
    }
    if (!t.empty_segments.empty()) {
        out += "\nOmitted segments with no pairs:";
        for (const auto& s : t.empty_segments) out += " " + s + ";";
        out += "\n";
    }
    if (t.unsegmented_pairs > 0)
        out += detail::strf("\nPairs without the needed metadata: %zu\n", t.unsegmented_pairs);
    return out;
}

inline std::string render_segment_csv(const SegmentTable& t) {
    std::string out =
        "segment,professionalism,accuracy,satisfaction,trustworthiness,overall,pairs\n";
    for (const auto& row : t.rows) {
        out += detail::csv_escape(row.segment);
        for (EvalMetric m : kEvalMetrics)
            out += detail::strf(",%.2f", row.rates.at(m).percent());
        out += detail::strf(",%zu\n", row.pairs);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Style alignment table

inline std::string render_alignment_markdown(const AlignmentTable& t) {
    std::string out = "| Linguistic style feature |";
    for (const auto& s : t.stage_names) out += " " + s + " |";
    for (std::size_t i = 1; i < t.stage_names.size(); ++i)
        out += " shortened by " + t.stage_names[i] + " |";
    out += "\n" + detail::md_rule(1 + t.stage_names.size() + (t.stage_names.size() - 1));
    for (const auto& row : t.rows) {
        out += "| " + display_name(row.feature) + " |";
        for (const double d : row.distance) out += detail::strf(" %.2f |", d);
        for (const auto& delta : row.shortened)
            out += detail::strf(" %.2f%s |", delta.mean, delta.stars.c_str());
        out += "\n";
    }
    out += detail::strf("\nPairs per stage: %zu. Significance: *** p<0.01, ** p<0.05, * p<0.1 "
                        "(paired t-test on per-pair distances).\n",
                        t.pair_count);
    return out;
}

inline std::string render_alignment_csv(const AlignmentTable& t) {
    std::string out = "feature";
    for (const auto& s : t.stage_names) out += ",distance_" + s;
    for (std::size_t i = 1; i < t.stage_names.size(); ++i) {
        const std::string s = t.stage_names[i];
        out += ",shortened_by_" + s + ",t_" + s + ",p_" + s + ",stars_" + s;
    }
    out += ",n\n";
    for (const auto& row : t.rows) {
        out += to_string(row.feature);
        for (const double d : row.distance) out += detail::strf(",%.6f", d);
        for (const auto& delta : row.shortened)
            out += detail::strf(",%.6f,%.6f,%.6g,%s", delta.mean, delta.t, delta.p,
                                delta.stars.c_str());
        out += detail::strf(",%zu\n", t.pair_count);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Knowledge accuracy table

inline std::string render_accuracy_markdown(const AccuracyTable& t) {
    std::string out = "| Question set |";
    for (const auto& s : t.stages) out += " " + s.stage + " |";
    for (std::size_t i = 1; i < t.stages.size(); ++i)
        out += " Δ " + t.stages[i].stage + " |";
    out += "\n" + detail::md_rule(1 + 2 * t.stages.size() - 1);

    const auto& first = t.stages.front();
    out += detail::strf("| All questions (%zu) |", first.total());
    for (const auto& s : t.stages)
        out += detail::strf(" %zu (%.1f%%) |", s.correct(), s.percent());
    for (const auto& d : t.deltas) out += detail::strf(" %+.1f |", d.overall);
    out += "\n";
    out += detail::strf("| Disease knowledge (%zu) |", first.disease_total);
    for (const auto& s : t.stages)
        out += detail::strf(" %zu (%.1f%%) |", s.disease_correct, s.disease_percent());
    for (const auto& d : t.deltas) out += detail::strf(" %+.1f |", d.disease);
    out += "\n";
    out += detail::strf("| Medicine knowledge (%zu) |", first.medicine_total);
    for (const auto& s : t.stages)
        out += detail::strf(" %zu (%.1f%%) |", s.medicine_correct, s.medicine_percent());
    for (const auto& d : t.deltas) out += detail::strf(" %+.1f |", d.medicine);
    out += "\n";
    return out;
}

inline std::string render_accuracy_csv(const AccuracyTable& t) {
    std::string out = "scope";
    for (const auto& s : t.stages)
        out += ",correct_" + s.stage + ",total_" + s.stage + ",percent_" + s.stage;
    out += "\n";
    auto row = [&](const char* scope, auto correct, auto total, auto pct) {
        out += scope;
        for (const auto& s : t.stages)
            out += detail::strf(",%zu,%zu,%.1f", correct(s), total(s), pct(s));
        out += "\n";
    };
    row(
        "all", [](const StageAccuracy& s) { return s.correct(); },
        [](const StageAccuracy& s) { return s.total(); },
        [](const StageAccuracy& s) { return s.percent(); });
    row(
        "disease", [](const StageAccuracy& s) { return s.disease_correct; },
        [](const StageAccuracy& s) { return s.disease_total; },
        [](const StageAccuracy& s) { return s.disease_percent(); });
    row(
        "medicine", [](const StageAccuracy& s) { return s.medicine_correct; },
        [](const StageAccuracy& s) { return s.medicine_total; },
        [](const StageAccuracy& s) { return s.medicine_percent(); });
    return out;
}

// ---------------------------------------------------------------------------
// Selection report (JSON + SVG histograms)

struct SelectionReport {
    SelectionPolicy policy;
    SkillThresholds thresholds;
    double mean_threshold = 0;
    std::size_t kept = 0;
    std::size_t dropped = 0;
    DistributionReport distributions;
};

inline nlohmann::json selection_report_to_json(const SelectionReport& r) {
    nlohmann::json dims = nlohmann::json::array();
    for (const auto& d : r.distributions.dimensions) {
        dims.push_back({{"name", d.name},
                        {"before", {{"counts", d.before.counts},
                                    {"mean", d.before.mean},
                                    {"n", d.before.n}}},
                        {"after", {{"counts", d.after.counts},
                                   {"mean", d.after.mean},
                                   {"n", d.after.n}}}});
    }
    return nlohmann::json{
        {"policy",
         {{"quantile", r.policy.quantile}, {"combine", to_string(r.policy.combine)}}},
        {"thresholds",
         {{"professionalism", r.thresholds.professionalism},
          {"explainability", r.thresholds.explainability},
          {"emotional_support", r.thresholds.emotional_support}}},
        {"mean_threshold", r.mean_threshold},
        {"kept", r.kept},
        {"dropped", r.dropped},
        {"distributions", std::move(dims)}};
}

inline SelectionReport selection_report_from_json(const nlohmann::json& j) {
    SelectionReport r;
    r.policy.quantile = j.at("policy").at("quantile").get<double>();
    r.policy.combine = j.at("policy").at("combine").get<std::string>() == "mean_dim"
                           ? CombineRule::mean_dim
                           : CombineRule::all_dims;
    r.thresholds.professionalism = j.at("thresholds").at("professionalism").get<double>();
    r.thresholds.explainability = j.at("thresholds").at("explainability").get<double>();
    r.thresholds.emotional_support = j.at("thresholds").at("emotional_support").get<double>();
    r.mean_threshold = j.at("mean_threshold").get<double>();
    r.kept = j.at("kept").get<std::size_t>();
    r.dropped = j.at("dropped").get<std::size_t>();
    const auto& dims = j.at("distributions");
    for (std::size_t i = 0; i < 3 && i < dims.size(); ++i) {
        auto& d = r.distributions.dimensions[i];
        d.name = dims[i].at("name").get<std::string>();
        auto fill = [](SkillHistogram& h, const nlohmann::json& hj) {
            const auto& counts = hj.at("counts");
            for (std::size_t b = 0; b < SkillHistogram::kBins && b < counts.size(); ++b)
                h.counts[b] = counts[b].get<std::size_t>();
            h.mean = hj.at("mean").get<double>();
            h.n = hj.at("n").get<std::size_t>();
        };
        fill(d.before, dims[i].at("before"));
        fill(d.after, dims[i].at("after"));
    }
    return r;
}

/// Three stacked panels (one per skill), before-selection bars in grey
/// behind after-selection bars in blue, bin width 5 over [0,100].
inline std::string render_distribution_svg(const DistributionReport& report) {
    constexpr int kPanelW = 920;
    constexpr int kPanelH = 230;
    constexpr int kMargin = 45;
    constexpr int kPlotH = 160;
    const int total_h = 3 * kPanelH + 20;

    std::string svg = detail::strf(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n",
        kPanelW, total_h);
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t panel = 0; panel < report.dimensions.size(); ++panel) {
        const auto& dim = report.dimensions[panel];
        const int top = static_cast<int>(panel) * kPanelH + 30;
        std::size_t max_count = 1;
        for (const auto c : dim.before.counts) max_count = std::max(max_count, c);
        for (const auto c : dim.after.counts) max_count = std::max(max_count, c);

        svg += detail::strf(
            "<text x=\"%d\" y=\"%d\" font-weight=\"bold\">%s (mean %.1f → %.1f)</text>\n",
            kMargin, top - 8, dim.name.c_str(), dim.before.mean, dim.after.mean);

        const double bin_w = static_cast<double>(kPanelW - 2 * kMargin) /
                             static_cast<double>(SkillHistogram::kBins);
        for (std::size_t b = 0; b < SkillHistogram::kBins; ++b) {
            const double x = kMargin + static_cast<double>(b) * bin_w;
            auto bar = [&](std::size_t count, const char* fill, double inset) {
                const double h = kPlotH * static_cast<double>(count) /
                                 static_cast<double>(max_count);
                svg += detail::strf(
                    "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                    "fill=\"%s\"/>\n",
                    x + inset, top + kPlotH - h, bin_w - 2 * inset, h, fill);
            };
            bar(dim.before.counts[b], "#c9c9c9", 1.0);
            bar(dim.after.counts[b], "#4878a8", 3.5);
        }
        svg += detail::strf(
            "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", kMargin,
            top + kPlotH, kPanelW - kMargin, top + kPlotH);
        for (int tick = 0; tick <= 100; tick += 25) {
            const double x = kMargin + (kPanelW - 2.0 * kMargin) * tick / 100.0;
            svg += detail::strf("<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\">%d</text>\n",
                                x, top + kPlotH + 16, tick);
        }
    }
    svg += "<text x=\"45\" y=\"14\">grey: before selection, blue: after selection "
           "(bin width 5)</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace consult
