#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "eventsem/concepts.hpp"
#include "eventsem/embedding_space.hpp"
#include "eventsem/errors.hpp"
#include "eventsem/similarity.hpp"
#include "eventsem/video_ingest.hpp"

namespace eventsem {

// How the text channel reduces the pairwise dot products.
enum class TextNormalization {
    mean,     // mean pairwise cosine, mapped (x + 1) / 2
    raw_sum,  // unnormalized cross-sum, mapped through a logistic
};

// Which score orders the videos.
enum class Scorer { fused, concepts, ocr, asr, matching_ocr, matching_asr };

inline TextNormalization parse_text_normalization(std::string_view s) {
    if (s == "mean") return TextNormalization::mean;
    if (s == "raw" || s == "raw_sum") return TextNormalization::raw_sum;
    throw InputError("unknown text normalization '" + std::string(s) + "' (expected mean|raw)");
}

inline Scorer parse_scorer(std::string_view s) {
    if (s == "fused") return Scorer::fused;
    if (s == "concept") return Scorer::concepts;
    if (s == "ocr") return Scorer::ocr;
    if (s == "asr") return Scorer::asr;
    if (s == "matching-ocr" || s == "matching_ocr") return Scorer::matching_ocr;
    if (s == "matching-asr" || s == "matching_asr") return Scorer::matching_asr;
    throw InputError("unknown scorer '" + std::string(s) + "'");
}

struct RetrievalConfig {
    Kernel kernel = Kernel::pooled;
    double percentile = 50.0;  // for the Hausdorff kernel
    std::size_t top_r = 5;
    double fusion_weight = 6.0;
    std::size_t augmentation_k = 5;
    TextNormalization text_normalization = TextNormalization::mean;
    Scorer scorer = Scorer::fused;
    std::size_t threads = 1;
};

struct EventQuery {
    std::string event_id;
    std::vector<std::string> title_terms;
    std::vector<std::string> ocr_terms;  // extra terms for the OCR channel only
    std::vector<std::string> asr_terms;  // extra terms for the ASR channel only
    std::optional<std::size_t> augmentation_k;  // overrides RetrievalConfig::augmentation_k
};

inline EventQuery make_event_query(std::string event_id, std::string_view title, const StopWordList& stops,
                                   std::span<const std::string> ocr_terms = {},
                                   std::span<const std::string> asr_terms = {}) {
    EventQuery q;
    q.event_id = std::move(event_id);
    q.title_terms = tokenize(title, stops);
    if (q.title_terms.empty())
        throw InputError("event '" + q.event_id + "': title has no terms after stop-word removal");
    for (const auto& t : ocr_terms)
        for (auto& tok : tokenize(t, stops)) q.ocr_terms.push_back(std::move(tok));
    for (const auto& t : asr_terms)
        for (auto& tok : tokenize(t, stops)) q.asr_terms.push_back(std::move(tok));
    return q;
}

// Per-channel evidence, each in [0,1]; nullopt marks an unavailable channel.
struct ChannelScores {
    std::optional<double> concepts;
    std::optional<double> ocr;
    std::optional<double> asr;
};

struct RankedEntry {
    std::string video_id;
    double score = 0.0;
};

struct RankedList {
    std::string event_id;
    std::vector<RankedEntry> entries;      // descending score, ties by id
    std::vector<std::string> diagnostics;  // videos that failed to score
};

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// --- concept channel --------------------------------------------------------

// Weighted marginalization over the selected concepts: sum of weight * v_c.
inline double concept_score_raw(std::span<const WeightedConcept> selected, const VideoRecord& video) {
    double acc = 0.0;
    for (const auto& c : selected) acc += c.weight * video.concept_scores.at(c.index);
    return acc;
}

// |raw| <= R since |weight| <= 1 and v_c <= 1.
inline double map_concept_score(double raw, std::size_t r) {
    return clamp01((raw / static_cast<double>(r) + 1.0) / 2.0);
}

struct ConceptChannelValue {
    double raw = 0.0;
    double score = 0.0;  // raw mapped to [0,1]
};

inline ConceptChannelValue score_concept_channel(const EventQuery& query, const ConceptRepository& repo,
                                                 const VideoRecord& video, const EmbeddingSpace& space,
                                                 Kernel kernel, std::size_t r, double percentile = 50.0) {
    if (r == 0) throw InputError("R must be positive");
    const auto title = embed_tokens(space, query.title_terms);
    const auto selected = top_r(rank_concepts(repo, title, kernel, percentile), r);
    const double raw = concept_score_raw(selected, video);
    return {raw, map_concept_score(raw, r)};
}

/**
 * Collapsed video embedding for the pooled kernel: the sum over selected
 * concepts of the unit pooled concept vector scaled by v_c. Its dot product
 * with the unit pooled query equals the weighted marginalization.
 */
inline Vector embed_video_fastpath(const ConceptRepository& repo, const VideoRecord& video,
                                   std::span<const std::size_t> selected) {
    if (video.concept_scores.size() != repo.size())
        throw InvariantError("video '" + video.id + "' score vector does not match repository size");
    if (selected.empty()) throw InputError("embed_video_fastpath: no selected concepts");
    Vector psi(repo.unit_pooled(selected.front()).size(), 0.0);
    for (auto i : selected) {
        const double v = video.concept_scores[i];
        if (v != 0.0) add_into(psi, repo.unit_pooled(i), v);
    }
    return psi;
}

inline std::vector<std::size_t> concept_indices(std::span<const WeightedConcept> selected) {
    std::vector<std::size_t> out;
    out.reserve(selected.size());
    for (const auto& c : selected) out.push_back(c.index);
    return out;
}

inline Vector unit_vector(Vector v) {
    const double n = l2_norm(v);
    if (!(n > 0.0)) throw UnscorableError("cannot normalize a zero vector");
    for (auto& x : v) x /= n;
    return v;
}

// --- text channels ----------------------------------------------------------

/**
 * Adds the k vocabulary words nearest to `anchor` to an embedded query,
 * skipping words the query already contains.
 */
inline EmbeddedSet augment_query(const EmbeddingSpace& space, EmbeddedSet query, std::span<const std::string> raw_terms,
                                 std::span<const double> anchor, std::size_t k) {
    if (k == 0) return query;
    std::unordered_set<std::string> exclude(raw_terms.begin(), raw_terms.end());
    exclude.insert(query.source_tokens.begin(), query.source_tokens.end());
    for (auto& n : nearest_words(space, anchor, k, exclude)) {
        query.vectors.push_back(space.unit(*space.find(n.token)));
        query.source_tokens.push_back(std::move(n.token));
    }
    return query;
}

inline double map_text_score(double raw, TextNormalization norm) {
    if (norm == TextNormalization::mean) return clamp01((raw + 1.0) / 2.0);
    return 1.0 / (1.0 + std::exp(-raw));
}

// Embeds a transcript; nullopt when it is empty or entirely OOV.
inline std::optional<EmbeddedSet> embed_transcript(const EmbeddingSpace& space, std::string_view text,
                                                   const StopWordList& stops) {
    const auto tokens = tokenize(text, stops);
    if (tokens.empty()) return std::nullopt;
    try {
        return embed_tokens(space, tokens);
    } catch (const AllTokensOov&) {
        return std::nullopt;
    }
}

/**
 * Semantic OCR/ASR evidence. The query is augmented with the k words nearest
 * to its pooled vector, then compared to the transcript by the cross-sum of
 * dot products (divided by both set sizes under TextNormalization::mean).
 * Returns nullopt when the transcript carries no embeddable token.
 */
inline std::optional<double> score_text_channel(std::span<const std::string> query_terms, std::string_view transcript,
                                                const EmbeddingSpace& space, const StopWordList& stops,
                                                std::size_t augmentation_k,
                                                TextNormalization norm = TextNormalization::mean) {
    auto query = embed_tokens(space, query_terms);
    const Vector anchor = sum_pool(query);
    query = augment_query(space, std::move(query), query_terms, anchor, augmentation_k);
    const auto doc = embed_transcript(space, transcript, stops);
    if (!doc) return std::nullopt;
    double raw = sim_crosssum(query, *doc);
    if (norm == TextNormalization::mean) raw /= static_cast<double>(query.size() * doc->size());
    return map_text_score(raw, norm);
}

// Number of transcript tokens equal to some query token.
inline double score_matching_baseline(std::span<const std::string> query_terms, std::string_view transcript,
                                      const StopWordList& stops) {
    const std::unordered_set<std::string> terms(query_terms.begin(), query_terms.end());
    double count = 0.0;
    for (const auto& tok : tokenize(transcript, stops))
        if (terms.count(tok)) count += 1.0;
    return count;
}

// --- fusion -----------------------------------------------------------------

inline constexpr double kNeutralChannelScore = 0.5;

/**
 * Weighted geometric mean (p_c^w * sqrt(p_o * p_a))^(1/(w+1)). A missing
 * channel contributes the neutral value 0.5.
 */
inline double fuse(const ChannelScores& ch, double w) {
    if (!(w > 0.0)) throw InputError("fusion weight must be positive");
    const double pc = clamp01(ch.concepts.value_or(kNeutralChannelScore));
    const double po = clamp01(ch.ocr.value_or(kNeutralChannelScore));
    const double pa = clamp01(ch.asr.value_or(kNeutralChannelScore));
    if (pc == 0.0 || po == 0.0 || pa == 0.0) return 0.0;
    const double log_mean = (w * std::log(pc) + 0.5 * (std::log(po) + std::log(pa))) / (w + 1.0);
    return clamp01(std::exp(log_mean));
}

// --- batch ranking ----------------------------------------------------------

// Per-video transcript state that does not depend on the event.
struct PreparedVideo {
    std::optional<Vector> ocr_sum, asr_sum;
    std::size_t ocr_count = 0, asr_count = 0;
};

inline PreparedVideo prepare_video(const VideoRecord& video, const EmbeddingSpace& space, const StopWordList& stops) {
    PreparedVideo p;
    if (auto s = embed_transcript(space, video.ocr_text, stops)) {
        p.ocr_sum = sum_pool(*s);
        p.ocr_count = s->size();
    }
    if (auto s = embed_transcript(space, video.asr_text, stops)) {
        p.asr_sum = sum_pool(*s);
        p.asr_count = s->size();
    }
    return p;
}

struct TextQuery {
    EmbeddedSet terms;  // after augmentation
    Vector sum;
    std::vector<std::string> match_terms;  // un-augmented, for the matching baseline
};

// Event-level state shared by every video: selected concepts and text queries.
struct PreparedEvent {
    std::string event_id;
    std::vector<WeightedConcept> selected;
    std::vector<std::size_t> selected_indices;
    Vector query_unit;  // unit pooled title vector
    TextQuery ocr, asr;
};

inline PreparedEvent prepare_event(const EventQuery& query, const ConceptRepository& repo,
                                   const EmbeddingSpace& space, const RetrievalConfig& cfg) {
    if (cfg.top_r == 0) throw InputError("R must be positive");
    PreparedEvent ev;
    ev.event_id = query.event_id;
    const auto title = embed_tokens(space, query.title_terms);
    const Vector title_sum = sum_pool(title);
    ev.query_unit = unit_vector(title_sum);
    ev.selected = top_r(rank_concepts(repo, title, cfg.kernel, cfg.percentile), cfg.top_r);
    ev.selected_indices = concept_indices(ev.selected);

    const std::size_t k = query.augmentation_k.value_or(cfg.augmentation_k);
    auto build = [&](const std::vector<std::string>& extra) {
        TextQuery tq;
        tq.match_terms = query.title_terms;
        tq.match_terms.insert(tq.match_terms.end(), extra.begin(), extra.end());
        tq.terms = augment_query(space, embed_tokens(space, tq.match_terms), tq.match_terms, title_sum, k);
        tq.sum = sum_pool(tq.terms);
        return tq;
    };
    ev.ocr = build(query.ocr_terms);
    ev.asr = build(query.asr_terms);
    return ev;
}

namespace detail {

inline std::optional<double> text_score(const TextQuery& q, const std::optional<Vector>& doc_sum, std::size_t doc_count,
                                        TextNormalization norm) {
    if (!doc_sum) return std::nullopt;
    // Cross-sum of dot products via the pooled identity.
    double raw = dot(q.sum, *doc_sum);
    if (norm == TextNormalization::mean) raw /= static_cast<double>(q.terms.size() * doc_count);
    return map_text_score(raw, norm);
}

}  // namespace detail

inline ChannelScores score_channels(const PreparedEvent& ev, const VideoRecord& video, const PreparedVideo& prepared,
                                    const ConceptRepository& repo, const RetrievalConfig& cfg) {
    if (video.concept_scores.size() != repo.size())
        throw InvariantError("video '" + video.id + "' has " + std::to_string(video.concept_scores.size()) +
                             " concept scores, repository has " + std::to_string(repo.size()));
    ChannelScores ch;
    double raw;
    if (cfg.kernel == Kernel::pooled)
        raw = dot(ev.query_unit, embed_video_fastpath(repo, video, ev.selected_indices));
    else
        raw = concept_score_raw(ev.selected, video);
    ch.concepts = map_concept_score(raw, cfg.top_r);
    ch.ocr = detail::text_score(ev.ocr, prepared.ocr_sum, prepared.ocr_count, cfg.text_normalization);
    ch.asr = detail::text_score(ev.asr, prepared.asr_sum, prepared.asr_count, cfg.text_normalization);
    return ch;
}

// The ranking score of one video. Depends only on the event, the repository,
// the configuration and this video's record.
inline double score_video(const PreparedEvent& ev, const VideoRecord& video, const PreparedVideo& prepared,
                          const ConceptRepository& repo, const StopWordList& stops, const RetrievalConfig& cfg) {
    switch (cfg.scorer) {
        case Scorer::matching_ocr: return score_matching_baseline(ev.ocr.match_terms, video.ocr_text, stops);
        case Scorer::matching_asr: return score_matching_baseline(ev.asr.match_terms, video.asr_text, stops);
        default: break;
    }
    const auto ch = score_channels(ev, video, prepared, repo, cfg);
    switch (cfg.scorer) {
        case Scorer::concepts: return *ch.concepts;
        case Scorer::ocr: return ch.ocr.value_or(kNeutralChannelScore);
        case Scorer::asr: return ch.asr.value_or(kNeutralChannelScore);
        default: return fuse(ch, cfg.fusion_weight);
    }
}

struct PreparedCorpus {
    std::span<const VideoRecord> records;
    std::vector<PreparedVideo> videos;
};

namespace detail {

template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& body) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
}

}  // namespace detail

inline PreparedCorpus prepare_corpus(std::span<const VideoRecord> records, const EmbeddingSpace& space,
                                     const StopWordList& stops, std::size_t threads = 1) {
    PreparedCorpus pc{records, std::vector<PreparedVideo>(records.size())};
    detail::parallel_for(records.size(), threads,
                         [&](std::size_t i) { pc.videos[i] = prepare_video(records[i], space, stops); });
    return pc;
}

inline bool entry_order(const RankedEntry& a, const RankedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.video_id < b.video_id;
}

/**
 * Scores every video independently and sorts. A video that fails to score is
 * placed after all scored videos (score 0, id order) with a diagnostic; the
 * run itself is not aborted.
 */
inline RankedList rank_event(const PreparedEvent& ev, const PreparedCorpus& corpus, const ConceptRepository& repo,
                             const StopWordList& stops, const RetrievalConfig& cfg) {
    const auto n = corpus.records.size();
    std::vector<double> scores(n, 0.0);
    std::vector<std::string> errors(n);
    detail::parallel_for(n, cfg.threads, [&](std::size_t i) {
        try {
            scores[i] = score_video(ev, corpus.records[i], corpus.videos[i], repo, stops, cfg);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    RankedList out;
    out.event_id = ev.event_id;
    std::vector<RankedEntry> failed;
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i].empty()) {
            out.entries.push_back({corpus.records[i].id, scores[i]});
        } else {
            failed.push_back({corpus.records[i].id, 0.0});
            out.diagnostics.push_back("event '" + ev.event_id + "', video '" + corpus.records[i].id + "': " + errors[i]);
        }
    }
    std::sort(out.entries.begin(), out.entries.end(), entry_order);
    std::sort(failed.begin(), failed.end(), entry_order);
    out.entries.insert(out.entries.end(), failed.begin(), failed.end());
    return out;
}

inline RankedList rank_event(const EventQuery& query, const ConceptRepository& repo,
                             std::span<const VideoRecord> corpus, const EmbeddingSpace& space,
                             const StopWordList& stops, const RetrievalConfig& cfg) {
    if (corpus.empty()) throw InputError("rank_event: empty corpus");
    const auto ev = prepare_event(query, repo, space, cfg);
    return rank_event(ev, prepare_corpus(corpus, space, stops, cfg.threads), repo, stops, cfg);
}

// --- files ------------------------------------------------------------------

// JSON array of {"event", "title", "ocr_terms"?, "asr_terms"?, "augmentation_k"?}.
inline std::vector<EventQuery> parse_queries_json(const nlohmann::json& doc, const StopWordList& stops,
                                                  const std::string& origin) {
    if (!doc.is_array()) throw InputError(origin + ": query file must be a JSON array");
    std::vector<EventQuery> out;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& obj = doc[i];
        const auto where = origin + ": query #" + std::to_string(i);
        try {
            if (!obj.is_object()) throw InputError(where + " is not an object");
            auto id = obj.at("event").get<std::string>();
            if (!seen.insert(id).second) throw InputError(where + ": duplicate event id '" + id + "'");
            std::vector<std::string> ocr, asr;
            if (obj.contains("ocr_terms")) ocr = obj.at("ocr_terms").get<std::vector<std::string>>();
            if (obj.contains("asr_terms")) asr = obj.at("asr_terms").get<std::vector<std::string>>();
            auto q = make_event_query(std::move(id), obj.at("title").get<std::string>(), stops, ocr, asr);
            if (obj.contains("augmentation_k")) q.augmentation_k = obj.at("augmentation_k").get<std::size_t>();
            out.push_back(std::move(q));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(where + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<EventQuery> load_queries(const std::string& path, const StopWordList& stops) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open query file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
    return parse_queries_json(doc, stops, path);
}

inline std::string format_fixed(double v, int precision = 6) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

inline void write_ranked_tsv(std::ostream& out, std::span<const RankedList> lists) {
    out << "event_id\trank\tvideo_id\tscore\n";
    for (const auto& list : lists) {
        std::size_t rank = 0;
        for (const auto& e : list.entries)
            out << list.event_id << '\t' << ++rank << '\t' << e.video_id << '\t' << format_fixed(e.score) << '\n';
    }
}

// Reads what write_ranked_tsv produces. Events keep their first-seen order;
// entries are ordered by the rank column.
inline std::vector<RankedList> read_ranked_tsv(std::istream& in, const std::string& origin) {
    std::vector<RankedList> lists;
    std::vector<std::vector<std::pair<std::size_t, RankedEntry>>> rows;
    std::unordered_map<std::string, std::size_t> index;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = detail::split_char(line, '\t');
        if (lineno == 1 && !f.empty() && f[0] == "event_id") continue;
        const auto where = origin + ":" + std::to_string(lineno);
        std::size_t rank = 0;
        double score = 0.0;
        if (f.size() != 4 || !detail::parse_number(f[1], rank) || !detail::parse_number(f[3], score))
            throw InputError(where + ": expected event_id<TAB>rank<TAB>video_id<TAB>score");
        std::string ev(f[0]);
        auto [it, fresh] = index.emplace(ev, lists.size());
        if (fresh) {
            lists.push_back({ev, {}, {}});
            rows.emplace_back();
        }
        rows[it->second].push_back({rank, {std::string(f[2]), score}});
    }
    for (std::size_t i = 0; i < lists.size(); ++i) {
        std::stable_sort(rows[i].begin(), rows[i].end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [_, e] : rows[i]) lists[i].entries.push_back(std::move(e));
    }
    return lists;
}

}  // namespace eventsem
