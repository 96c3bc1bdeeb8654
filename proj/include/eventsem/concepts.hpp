#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "eventsem/embedding_space.hpp"
#include "eventsem/errors.hpp"
#include "eventsem/similarity.hpp"

namespace eventsem {

enum class ConceptKind { object, scene, action };

inline std::string_view to_string(ConceptKind k) {
    switch (k) {
        case ConceptKind::object: return "object";
        case ConceptKind::scene: return "scene";
        case ConceptKind::action: return "action";
    }
    return "object";
}

inline ConceptKind parse_concept_kind(std::string_view s) {
    if (s == "object") return ConceptKind::object;
    if (s == "scene") return ConceptKind::scene;
    if (s == "action") return ConceptKind::action;
    throw InputError("unknown concept kind '" + std::string(s) + "' (expected object|scene|action)");
}

struct ConceptDefinition {
    std::string id;
    std::string name;
    std::vector<std::string> keywords;
    ConceptKind kind = ConceptKind::object;
};

struct WeightedConcept {
    std::string id;
    double weight = 0.0;
    std::size_t index = 0;  // position in the repository
};

/**
 * The concept vocabulary with cached embeddings.
 *
 * Each concept's name and keywords are tokenized together and embedded as one
 * set. Concepts whose tokens are all OOV (or whose pooled vector is zero)
 * stay in the repository, so N and index alignment with video score vectors
 * are preserved, but are not scoreable.
 */
class ConceptRepository {
public:
    // Ids and order only; no concept is scoreable. Enough for pooling scores.
    explicit ConceptRepository(std::vector<ConceptDefinition> defs) : defs_(std::move(defs)) { index_definitions(); }

    ConceptRepository(std::vector<ConceptDefinition> defs, const EmbeddingSpace& space, const StopWordList& stops)
        : defs_(std::move(defs)) {
        index_definitions();
        for (std::size_t i = 0; i < defs_.size(); ++i) {
            const auto& d = defs_[i];
            std::string text = d.name;
            for (const auto& kw : d.keywords) text += " " + kw;
            const auto tokens = tokenize(text, stops);
            try {
                auto set = embed_tokens(space, tokens);
                Vector pooled = sum_pool(set);
                const double n = l2_norm(pooled);
                if (!(n > 0.0)) {
                    excluded_.push_back(d.id);
                    continue;
                }
                for (auto& x : pooled) x /= n;
                oov_count_ += set.oov_tokens.size();
                embedded_[i] = std::move(set);
                unit_pooled_[i] = std::move(pooled);
            } catch (const AllTokensOov&) {
                oov_count_ += tokens.size();
                excluded_.push_back(d.id);
            }
        }
    }

    std::size_t size() const noexcept { return defs_.size(); }
    const ConceptDefinition& at(std::size_t i) const { return defs_.at(i); }
    const std::vector<ConceptDefinition>& definitions() const noexcept { return defs_; }

    std::optional<std::size_t> index_of(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool scoreable(std::size_t i) const { return embedded_.at(i).has_value(); }
    std::size_t scoreable_count() const noexcept {
        return static_cast<std::size_t>(std::count_if(embedded_.begin(), embedded_.end(),
                                                      [](const auto& e) { return e.has_value(); }));
    }

    // Throws if the concept is not scoreable.
    const EmbeddedSet& embedding(std::size_t i) const {
        if (!embedded_.at(i)) throw InputError("concept '" + defs_[i].id + "' has no embedding");
        return *embedded_[i];
    }

    // Sum-pooled embedding scaled to unit length.
    const Vector& unit_pooled(std::size_t i) const {
        if (!embedded_.at(i)) throw InputError("concept '" + defs_[i].id + "' has no embedding");
        return unit_pooled_[i];
    }

    const std::vector<std::string>& excluded_ids() const noexcept { return excluded_; }
    std::size_t oov_token_count() const noexcept { return oov_count_; }

private:
    void index_definitions() {
        embedded_.resize(defs_.size());
        unit_pooled_.resize(defs_.size());
        for (std::size_t i = 0; i < defs_.size(); ++i) {
            const auto& d = defs_[i];
            if (d.id.empty()) throw InputError("concept with empty id at position " + std::to_string(i));
            if (d.name.empty()) throw InputError("concept '" + d.id + "' has an empty name");
            if (!index_.emplace(d.id, i).second) throw InputError("duplicate concept id '" + d.id + "'");
        }
    }

    std::vector<ConceptDefinition> defs_;
    std::vector<std::optional<EmbeddedSet>> embedded_;
    std::vector<Vector> unit_pooled_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> excluded_;
    std::size_t oov_count_ = 0;
};

// JSON array of {"id", "name", "keywords"?, "kind"}.
inline std::vector<ConceptDefinition> parse_concepts_json(const nlohmann::json& doc, const std::string& origin) {
    if (!doc.is_array()) throw InputError(origin + ": concept file must be a JSON array");
    std::vector<ConceptDefinition> defs;
    defs.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& obj = doc[i];
        auto where = origin + ": concept #" + std::to_string(i);
        if (!obj.is_object()) throw InputError(where + " is not an object");
        ConceptDefinition d;
        try {
            d.id = obj.at("id").get<std::string>();
            d.name = obj.at("name").get<std::string>();
            if (obj.contains("keywords")) d.keywords = obj.at("keywords").get<std::vector<std::string>>();
            d.kind = parse_concept_kind(obj.at("kind").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw InputError(where + ": " + e.what());
        }
        defs.push_back(std::move(d));
    }
    return defs;
}

inline std::vector<ConceptDefinition> load_concept_definitions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open concept file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
    return parse_concepts_json(doc, path);
}

inline ConceptRepository load_concepts(const std::string& path, const EmbeddingSpace& space, const StopWordList& stops) {
    return ConceptRepository(load_concept_definitions(path), space, stops);
}

inline bool weight_order(const WeightedConcept& a, const WeightedConcept& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.id < b.id;
}

/**
 * Relevance of every scoreable concept to the query, sorted by weight
 * descending, then id ascending. Weights are raw similarities.
 */
inline std::vector<WeightedConcept> rank_concepts(const ConceptRepository& repo, const EmbeddedSet& query, Kernel kernel,
                                                  double percentile = 50.0) {
    if (query.empty()) throw InputError("rank_concepts: empty query");
    if (repo.scoreable_count() == 0) throw InputError("rank_concepts: repository has no scoreable concepts");

    std::vector<WeightedConcept> out;
    out.reserve(repo.scoreable_count());
    if (kernel == Kernel::pooled) {
        const Vector q = sum_pool(query);
        const double qn = l2_norm(q);
        if (!(qn > 0.0)) throw UnscorableError("query pooled vector has zero norm");
        for (std::size_t i = 0; i < repo.size(); ++i) {
            if (!repo.scoreable(i)) continue;
            out.push_back({repo.at(i).id, pooled_cosine(q, sum_pool(repo.embedding(i))), i});
        }
    } else {
        for (std::size_t i = 0; i < repo.size(); ++i) {
            if (!repo.scoreable(i)) continue;
            out.push_back({repo.at(i).id, sim_hausdorff(query, repo.embedding(i), percentile), i});
        }
    }
    std::sort(out.begin(), out.end(), weight_order);
    return out;
}

inline std::vector<WeightedConcept> top_r(std::span<const WeightedConcept> ranked, std::size_t r) {
    const auto n = std::min(r, ranked.size());
    return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace eventsem
