#pragma once

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "eventsem/errors.hpp"
#include "eventsem/retrieval.hpp"

namespace eventsem {

// Binary relevance judgments per (event, video). Unjudged videos are left out
// of that event's evaluation.
class GroundTruth {
public:
    void add(const std::string& event_id, const std::string& video_id, bool positive) {
        auto [it, fresh] = labels_[event_id].emplace(video_id, positive);
        if (!fresh && it->second != positive)
            throw InputError("conflicting labels for event '" + event_id + "', video '" + video_id + "'");
    }

    std::optional<bool> label(const std::string& event_id, const std::string& video_id) const {
        auto ev = labels_.find(event_id);
        if (ev == labels_.end()) return std::nullopt;
        auto it = ev->second.find(video_id);
        if (it == ev->second.end()) return std::nullopt;
        return it->second;
    }

    bool has_event(const std::string& event_id) const { return labels_.count(event_id) != 0; }
    std::size_t event_count() const noexcept { return labels_.size(); }

private:
    std::map<std::string, std::map<std::string, bool>> labels_;
};

// CSV with columns event_id,video_id,label (label 1 or 0); a header row is optional.
inline GroundTruth load_truth_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open ground-truth file: " + path);
    GroundTruth truth;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        auto f = detail::split_char(line, ',');
        if (f.size() != 3) throw InputError(path + ":" + std::to_string(lineno) + ": expected event_id,video_id,label");
        const auto label = detail::trim(f[2]);
        if (label != "0" && label != "1") {
            if (lineno == 1) continue;  // header
            throw InputError(path + ":" + std::to_string(lineno) + ": label must be 0 or 1");
        }
        truth.add(std::string(detail::trim(f[0])), std::string(detail::trim(f[1])), label == "1");
    }
    return truth;
}

namespace detail {

struct Judged {
    double score;
    bool positive;
};

inline std::vector<Judged> judged_entries(const RankedList& ranked, const GroundTruth& truth) {
    std::vector<Judged> out;
    for (const auto& e : ranked.entries)
        if (auto l = truth.label(ranked.event_id, e.video_id)) out.push_back({e.score, *l});
    return out;
}

}  // namespace detail

/**
 * Non-interpolated average precision over the judged part of the ranked
 * list, in list order: the mean of precision@k over the ranks k that hold a
 * positive.
 */
inline double average_precision(const RankedList& ranked, const GroundTruth& truth) {
    const auto judged = detail::judged_entries(ranked, truth);
    std::size_t hits = 0;
    double sum = 0.0;
    for (std::size_t k = 0; k < judged.size(); ++k) {
        if (!judged[k].positive) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
    if (hits == 0) throw InputError("event '" + ranked.event_id + "' has no judged positive video");
    return sum / static_cast<double>(hits);
}

// Mann-Whitney AUC from the scores; tied scores share their average rank.
inline double roc_auc(const RankedList& ranked, const GroundTruth& truth) {
    auto judged = detail::judged_entries(ranked, truth);
    std::sort(judged.begin(), judged.end(), [](const auto& a, const auto& b) { return a.score < b.score; });
    double pos = 0.0, neg = 0.0, pos_rank_sum = 0.0;
    for (std::size_t i = 0; i < judged.size();) {
        std::size_t j = i;
        while (j < judged.size() && judged[j].score == judged[i].score) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) {
            if (judged[t].positive) {
                pos += 1.0;
                pos_rank_sum += avg_rank;
            } else {
                neg += 1.0;
            }
        }
        i = j;
    }
    if (pos == 0.0 || neg == 0.0)
        throw InputError("event '" + ranked.event_id + "' needs at least one positive and one negative for AUC");
    return (pos_rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

struct EventMetrics {
    std::string event_id;
    double ap = 0.0;
    double auc = 0.0;
    std::size_t evaluated = 0;
    std::size_t positives = 0;
};

struct EvaluationReport {
    std::vector<EventMetrics> events;
    double map = 0.0;
    double mean_auc = 0.0;
};

inline EvaluationReport evaluate(std::span<const RankedList> run, const GroundTruth& truth) {
    if (run.empty()) throw InputError("nothing to evaluate");
    EvaluationReport report;
    for (const auto& list : run) {
        if (!truth.has_event(list.event_id)) throw InputError("event '" + list.event_id + "' has no ground truth");
        EventMetrics m;
        m.event_id = list.event_id;
        for (const auto& j : detail::judged_entries(list, truth)) {
            ++m.evaluated;
            if (j.positive) ++m.positives;
        }
        m.ap = average_precision(list, truth);
        m.auc = roc_auc(list, truth);
        report.map += m.ap;
        report.mean_auc += m.auc;
        report.events.push_back(std::move(m));
    }
    report.map /= static_cast<double>(report.events.size());
    report.mean_auc /= static_cast<double>(report.events.size());
    return report;
}

inline void write_report_tsv(std::ostream& out, const EvaluationReport& report) {
    out << "event_id\tap\tauc\tevaluated\tpositives\n";
    for (const auto& m : report.events)
        out << m.event_id << '\t' << format_fixed(m.ap) << '\t' << format_fixed(m.auc) << '\t' << m.evaluated << '\t'
            << m.positives << '\n';
    out << "MEAN\t" << format_fixed(report.map) << '\t' << format_fixed(report.mean_auc) << "\t\t\n";
}

inline void print_report_table(std::ostream& out, const EvaluationReport& report) {
    std::size_t width = 5;
    for (const auto& m : report.events) width = std::max(width, m.event_id.size());
    auto row = [&](const std::string& id, const std::string& ap, const std::string& auc, const std::string& n,
                   const std::string& p) {
        out << std::left << std::setw(static_cast<int>(width)) << id << "  " << std::right << std::setw(8) << ap << "  "
            << std::setw(8) << auc << "  " << std::setw(8) << n << "  " << std::setw(8) << p << '\n';
    };
    row("event", "AP", "AUC", "judged", "pos");
    for (const auto& m : report.events)
        row(m.event_id, format_fixed(m.ap, 4), format_fixed(m.auc, 4), std::to_string(m.evaluated),
            std::to_string(m.positives));
    row("mean", format_fixed(report.map, 4), format_fixed(report.mean_auc, 4), "", "");
}

}  // namespace eventsem
