#pragma once

// Brute-force reference computations used only by tests. Nothing here calls
// into the library's scoring code; inputs are plain vectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double cosine(const Vec& a, const Vec& b) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
}

inline Vec normalized(Vec v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (auto& x : v) x /= n;
    return v;
}

inline Vec sum(const std::vector<Vec>& xs) {
    Vec out(xs.front().size(), 0.0);
    for (const auto& x : xs)
        for (std::size_t i = 0; i < x.size(); ++i) out[i] += x[i];
    return out;
}

// Element at ascending index ceil(l/100 * n) - 1 after a full sort.
inline double lower_percentile(Vec v, double l) {
    std::sort(v.begin(), v.end());
    auto idx = static_cast<long>(std::ceil(l / 100.0 * static_cast<double>(v.size()))) - 1;
    idx = std::max(0L, idx);
    return v[static_cast<std::size_t>(idx)];
}

inline double hausdorff(const std::vector<Vec>& x, const std::vector<Vec>& y, double l) {
    Vec a, b;
    for (const auto& yj : y) {
        double best = -2.0;
        for (const auto& xi : x) best = std::max(best, cosine(xi, yj));
        a.push_back(best);
    }
    for (const auto& xi : x) {
        double best = -2.0;
        for (const auto& yj : y) best = std::max(best, cosine(xi, yj));
        b.push_back(best);
    }
    return std::min(lower_percentile(a, l), lower_percentile(b, l));
}

inline double crosssum(const std::vector<Vec>& x, const std::vector<Vec>& y) {
    double s = 0.0;
    for (const auto& xi : x)
        for (const auto& yj : y) s += dot(xi, yj);
    return s;
}

// labels in ranked order
inline double average_precision(const std::vector<bool>& labels) {
    double total = 0.0;
    std::size_t positives = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (!labels[k]) continue;
        ++positives;
        std::size_t hits = 0;
        for (std::size_t j = 0; j <= k; ++j) hits += labels[j] ? 1 : 0;
        total += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
    return total / static_cast<double>(positives);
}

inline double auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            pairs += 1.0;
            if (scores[i] > scores[j])
                wins += 1.0;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    return wins / pairs;
}

inline double fuse(double pc, double po, double pa, double w) {
    return std::pow(std::pow(pc, w) * std::sqrt(po * pa), 1.0 / (w + 1.0));
}

/**
 * Naive marginalization: pooled cosine between the query and every concept,
 * keep the R largest (ties by id), sum weight * score.
 */
inline double marginalize_top_r(const std::vector<Vec>& query, const std::vector<std::vector<Vec>>& concepts,
                                const std::vector<std::string>& ids, const Vec& scores, std::size_t r) {
    const Vec q = sum(query);
    std::vector<std::pair<double, std::size_t>> sims;
    for (std::size_t i = 0; i < concepts.size(); ++i) sims.emplace_back(cosine(q, sum(concepts[i])), i);
    std::sort(sims.begin(), sims.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return ids[a.second] < ids[b.second];
    });
    double total = 0.0;
    for (std::size_t k = 0; k < sims.size(); ++k) {
        const double weight = k < r ? sims[k].first : 0.0;
        total += weight * scores[sims[k].second];
    }
    return total;
}

// Exhaustive nearest words: full scan, full sort.
inline std::vector<std::string> nearest(const std::vector<std::string>& tokens, const std::vector<Vec>& vectors,
                                        const Vec& point, std::size_t k, const std::unordered_set<std::string>& exclude) {
    std::vector<std::pair<double, std::string>> all;
    for (std::size_t i = 0; i < tokens.size(); ++i)
        if (!exclude.count(tokens[i])) all.emplace_back(cosine(vectors[i], point), tokens[i]);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back(all[i].second);
    return out;
}

}  // namespace oracle

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 gen{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() / ("eventsem_test_" + std::to_string(gen()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }

    std::string write(const std::string& name, const std::string& content) const {
        const auto p = file(name);
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testutil
