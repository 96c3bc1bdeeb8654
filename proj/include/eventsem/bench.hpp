#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ostream>
#include <vector>

#include "eventsem/retrieval.hpp"
#include "eventsem/synthetic.hpp"

namespace eventsem {

struct BenchParams {
    std::vector<std::size_t> sizes;  // corpus sizes (videos)
    std::size_t concepts = 600;
    std::size_t dim = 300;
    std::size_t events = 5;
    std::size_t repeat = 3;
    std::uint64_t seed = 42;
    RetrievalConfig retrieval;
};

struct BenchRow {
    std::size_t videos = 0;
    std::vector<double> seconds;
    double min = 0.0;
    double median = 0.0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    // min time of row i+1 over min time of row i
    std::vector<double> ratios;
};

/**
 * Times a full retrieval run (transcript preparation plus ranking every
 * event) on synthetic corpora of each size. Data generation and concept
 * repository construction are not timed.
 */
inline BenchResult run_bench(const BenchParams& p) {
    if (p.sizes.empty()) throw InputError("bench: no corpus sizes given");
    if (p.repeat == 0 || p.concepts == 0 || p.dim == 0 || p.events == 0)
        throw InputError("bench: repeat, concepts, dim and events must be positive");
    for (auto n : p.sizes)
        if (n == 0) throw InputError("bench: corpus sizes must be positive");

    const StopWordList stops = StopWordList::english();
    BenchResult result;
    for (auto n : p.sizes) {
        auto data = synthetic::make_bench_data(p.seed, n, p.concepts, p.dim, p.events);
        const ConceptRepository repo(data.concepts, data.space, stops);
        std::vector<EventQuery> queries;
        for (std::size_t e = 0; e < data.titles.size(); ++e)
            queries.push_back(make_event_query("B" + std::to_string(e), data.titles[e], stops));

        BenchRow row;
        row.videos = n;
        for (std::size_t r = 0; r < p.repeat; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto corpus = prepare_corpus(data.videos, data.space, stops, p.retrieval.threads);
            std::size_t checksum = 0;
            for (const auto& q : queries) {
                const auto ev = prepare_event(q, repo, data.space, p.retrieval);
                checksum += rank_event(ev, corpus, repo, stops, p.retrieval).entries.size();
            }
            const auto t1 = std::chrono::steady_clock::now();
            if (checksum != n * queries.size()) throw InvariantError("bench: ranked list size mismatch");
            row.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
        auto sorted = row.seconds;
        std::sort(sorted.begin(), sorted.end());
        row.min = sorted.front();
        row.median = sorted[(sorted.size() - 1) / 2];
        result.rows.push_back(std::move(row));
    }
    for (std::size_t i = 1; i < result.rows.size(); ++i)
        result.ratios.push_back(result.rows[i].min / result.rows[i - 1].min);
    return result;
}

inline void print_bench(std::ostream& out, const BenchParams& p, const BenchResult& r) {
    out << "# seed=" << p.seed << " concepts=" << p.concepts << " dim=" << p.dim << " events=" << p.events
        << " R=" << p.retrieval.top_r << " repeat=" << p.repeat << '\n';
    out << "videos\tmin_s\tmedian_s\tratio_to_prev\tsize_ratio\n";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = r.rows[i];
        out << row.videos << '\t' << format_fixed(row.min) << '\t' << format_fixed(row.median) << '\t';
        if (i == 0)
            out << "-\t-\n";
        else
            out << format_fixed(r.ratios[i - 1], 3) << '\t'
                << format_fixed(static_cast<double>(row.videos) / static_cast<double>(r.rows[i - 1].videos), 3)
                << '\n';
    }
}

}  // namespace eventsem
