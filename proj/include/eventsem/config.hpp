#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

#include "eventsem/embedding_space.hpp"
#include "eventsem/errors.hpp"
#include "eventsem/retrieval.hpp"
#include "eventsem/video_ingest.hpp"

namespace eventsem {

struct PipelineConfig {
    RetrievalConfig retrieval;
    PoolingMode pooling = PoolingMode::max;
    std::uint64_t seed = 42;
};

namespace detail {

template <class T>
T parse_setting(std::string_view key, std::string_view value) {
    T out{};
    if (!parse_number(value, out))
        throw InputError("config: invalid value '" + std::string(value) + "' for '" + std::string(key) + "'");
    return out;
}

}  // namespace detail

inline void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value) {
    auto& r = cfg.retrieval;
    if (key == "kernel")
        r.kernel = parse_kernel(value);
    else if (key == "mode" || key == "pooling")
        cfg.pooling = parse_pooling_mode(value);
    else if (key == "R" || key == "r" || key == "top_r")
        r.top_r = detail::parse_setting<std::size_t>(key, value);
    else if (key == "w" || key == "fusion_weight")
        r.fusion_weight = detail::parse_setting<double>(key, value);
    else if (key == "k" || key == "augmentation_k")
        r.augmentation_k = detail::parse_setting<std::size_t>(key, value);
    else if (key == "percentile")
        r.percentile = detail::parse_setting<double>(key, value);
    else if (key == "text_norm" || key == "text_normalization")
        r.text_normalization = parse_text_normalization(value);
    else if (key == "scorer")
        r.scorer = parse_scorer(value);
    else if (key == "threads")
        r.threads = detail::parse_setting<std::size_t>(key, value);
    else if (key == "seed")
        cfg.seed = detail::parse_setting<std::uint64_t>(key, value);
    else
        throw InputError("config: unknown key '" + std::string(key) + "'");

    if (r.top_r == 0) throw InputError("config: R must be positive");
    if (!(r.fusion_weight > 0.0)) throw InputError("config: w must be positive");
    if (!(r.percentile > 0.0 && r.percentile <= 100.0)) throw InputError("config: percentile must lie in (0, 100]");
}

// `key = value` per line; `#` starts a comment.
inline void apply_config_file(PipelineConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto body = detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw InputError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        apply_setting(cfg, detail::trim(body.substr(0, eq)), detail::trim(body.substr(eq + 1)));
    }
}

}  // namespace eventsem
