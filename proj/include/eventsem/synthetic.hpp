#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "eventsem/concepts.hpp"
#include "eventsem/embedding_space.hpp"
#include "eventsem/evaluation.hpp"
#include "eventsem/retrieval.hpp"
#include "eventsem/video_ingest.hpp"

// Seeded generators for toy spaces and corpora. Distributions are derived
// from the raw mt19937_64 stream here (the std:: distributions are
// implementation-defined) so that a seed means the same data everywhere.
namespace eventsem::synthetic {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller, one value per call.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
    bool chance(double p) { return uniform() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

inline std::vector<float> gaussian_floats(Rng& rng, std::size_t dim) {
    std::vector<float> v(dim);
    for (auto& x : v) x = static_cast<float>(rng.normal());
    return v;
}

inline Vector gaussian_vector(Rng& rng, std::size_t dim) {
    Vector v(dim);
    for (auto& x : v) x = rng.normal();
    return v;
}

inline Vector random_unit(Rng& rng, std::size_t dim) {
    Vector v = gaussian_vector(rng, dim);
    const double n = l2_norm(v);
    for (auto& x : v) x /= n;
    return v;
}

// direction + noise * (isotropic gaussian with expected norm ~1)
inline std::vector<float> perturbed(Rng& rng, const Vector& direction, double noise) {
    const double scale = noise / std::sqrt(static_cast<double>(direction.size()));
    std::vector<float> v(direction.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(direction[i] + scale * rng.normal());
    return v;
}

// Vocabulary "<prefix>0".."<prefix>{n-1}" of gaussian vectors.
inline EmbeddingSpace random_space(Rng& rng, std::size_t words, std::size_t dim, const std::string& prefix = "w") {
    EmbeddingSpace space(dim);
    for (std::size_t i = 0; i < words; ++i) space.add(prefix + std::to_string(i), gaussian_floats(rng, dim));
    return space;
}

// Non-normalized gaussian point set.
inline EmbeddedSet random_set(Rng& rng, std::size_t n, std::size_t dim) {
    EmbeddedSet s;
    for (std::size_t i = 0; i < n; ++i) {
        s.vectors.push_back(gaussian_vector(rng, dim));
        s.source_tokens.push_back("p" + std::to_string(i));
    }
    return s;
}

inline std::string video_name(std::size_t i) {
    std::string digits = std::to_string(i);
    return "vid" + std::string(digits.size() < 5 ? 5 - digits.size() : 0, '0') + digits;
}

struct ScenarioParams {
    std::size_t events = 5;
    std::size_t videos = 300;
    std::size_t positives_per_event = 30;
    std::size_t dim = 32;
    std::size_t concepts_per_event = 4;
    std::size_t distractor_concepts = 40;
    std::size_t synonyms_per_event = 6;
    std::size_t filler_words = 200;
    double word_noise = 0.5;            // spread of event-related words around the topic
    double background_max = 0.5;        // detector noise floor on every concept
    double positive_min = 0.45;         // elevated scores on the event's concepts
    double detector_miss = 0.3;         // chance an event concept stays at background in a positive
    double spurious_detection = 0.3;    // chance of one random concept firing in any video
    double title_leak = 0.05;           // chance a transcript contains an exact title word
};

/**
 * A labeled retrieval problem. Each event has a random topic direction; its
 * title words, concept words and transcript synonyms are noisy copies of that
 * direction. Positive videos score high on their event's concepts and speak
 * its synonyms (never the title words themselves, apart from rare leaks which
 * also hit negatives).
 */
struct Scenario {
    EmbeddingSpace space{1};
    std::vector<ConceptDefinition> concepts;
    std::vector<VideoRecord> videos;
    std::vector<std::pair<std::string, std::string>> queries;  // event id, title
    GroundTruth truth;
};

inline Scenario make_scenario(std::uint64_t seed, const ScenarioParams& p = {}) {
    Rng rng(seed);
    Scenario sc;
    sc.space = EmbeddingSpace(p.dim);

    std::vector<Vector> topics;
    std::vector<std::vector<std::string>> event_concepts(p.events), synonyms(p.events), title_words(p.events);
    for (std::size_t e = 0; e < p.events; ++e) {
        topics.push_back(random_unit(rng, p.dim));
        const auto tag = "e" + std::to_string(e);
        for (const char* suffix : {"alpha", "beta"}) {
            const auto w = tag + suffix;
            sc.space.add(w, perturbed(rng, topics[e], 0.3));
            title_words[e].push_back(w);
        }
        sc.queries.emplace_back("E" + std::to_string(e), title_words[e][0] + " " + title_words[e][1]);
        for (std::size_t j = 0; j < p.concepts_per_event; ++j) {
            const auto a = tag + "obj" + std::to_string(j), b = tag + "act" + std::to_string(j);
            sc.space.add(a, perturbed(rng, topics[e], p.word_noise));
            sc.space.add(b, perturbed(rng, topics[e], p.word_noise));
            const auto id = tag + "_concept" + std::to_string(j);
            sc.concepts.push_back({id, a + " " + b, {}, j % 2 == 0 ? ConceptKind::object : ConceptKind::action});
            event_concepts[e].push_back(id);
        }
        for (std::size_t j = 0; j < p.synonyms_per_event; ++j) {
            const auto w = tag + "syn" + std::to_string(j);
            sc.space.add(w, perturbed(rng, topics[e], p.word_noise));
            synonyms[e].push_back(w);
        }
    }
    std::vector<std::string> filler;
    for (std::size_t j = 0; j < p.filler_words; ++j) {
        filler.push_back("filler" + std::to_string(j));
        sc.space.add(filler.back(), gaussian_floats(rng, p.dim));
    }
    for (std::size_t j = 0; j < p.distractor_concepts; ++j) {
        const auto a = "dobj" + std::to_string(j), b = "dscene" + std::to_string(j);
        sc.space.add(a, gaussian_floats(rng, p.dim));
        sc.space.add(b, gaussian_floats(rng, p.dim));
        sc.concepts.push_back({"distractor" + std::to_string(j), a + " " + b, {}, ConceptKind::scene});
    }

    // Concept index lookup without building a repository.
    auto concept_index = [&](const std::string& id) {
        for (std::size_t i = 0; i < sc.concepts.size(); ++i)
            if (sc.concepts[i].id == id) return i;
        return sc.concepts.size();
    };

    std::vector<std::size_t> order(p.videos);
    for (std::size_t i = 0; i < p.videos; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<long> owner(p.videos, -1);  // event a video is positive for
    for (std::size_t e = 0, k = 0; e < p.events; ++e)
        for (std::size_t j = 0; j < p.positives_per_event && k < p.videos; ++j, ++k)
            owner[order[k]] = static_cast<long>(e);

    auto words = [&](const std::vector<std::string>& pool, std::size_t n, std::string& out) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!out.empty()) out += ' ';
            out += pool[rng.below(pool.size())];
        }
    };

    for (std::size_t v = 0; v < p.videos; ++v) {
        VideoRecord rec;
        rec.id = video_name(v);
        rec.concept_scores.resize(sc.concepts.size());
        for (auto& s : rec.concept_scores) s = rng.uniform(0.0, p.background_max);
        if (rng.chance(p.spurious_detection)) rec.concept_scores[rng.below(sc.concepts.size())] = rng.uniform(0.5, 0.9);
        const long e = owner[v];
        if (e >= 0)
            for (const auto& id : event_concepts[static_cast<std::size_t>(e)])
                if (!rng.chance(p.detector_miss)) rec.concept_scores[concept_index(id)] = rng.uniform(p.positive_min, 1.0);
        rec.covered_concepts = sc.concepts.size();

        if (!rng.chance(0.1)) {
            words(filler, 8, rec.asr_text);
            if (e >= 0) words(synonyms[static_cast<std::size_t>(e)], 3, rec.asr_text);
            if (rng.chance(0.6)) {
                words(filler, 3, rec.ocr_text);
                if (e >= 0) words(synonyms[static_cast<std::size_t>(e)], 1, rec.ocr_text);
            }
            if (rng.chance(p.title_leak)) words(title_words[rng.below(p.events)], 1, rec.asr_text);
            rec.has_transcript = true;
        }
        sc.videos.push_back(std::move(rec));

        for (std::size_t ev = 0; ev < p.events; ++ev)
            sc.truth.add(sc.queries[ev].first, sc.videos.back().id, e == static_cast<long>(ev));
    }
    return sc;
}

/**
 * Unlabeled corpus for timing: `concepts` concepts of two random words each,
 * videos with dense random concept scores and short transcripts, and
 * `events` two-word queries.
 */
struct BenchData {
    EmbeddingSpace space{1};
    std::vector<ConceptDefinition> concepts;
    std::vector<VideoRecord> videos;
    std::vector<std::string> titles;
};

inline BenchData make_bench_data(std::uint64_t seed, std::size_t videos, std::size_t concepts, std::size_t dim,
                                 std::size_t events, std::size_t transcript_words = 12) {
    Rng rng(seed);
    BenchData d;
    const std::size_t vocab = 2 * concepts + 1000;
    d.space = random_space(rng, vocab, dim);
    auto word = [&] { return "w" + std::to_string(rng.below(vocab)); };
    for (std::size_t i = 0; i < concepts; ++i)
        d.concepts.push_back({"c" + std::to_string(i), word() + " " + word(), {}, ConceptKind::object});
    for (std::size_t e = 0; e < events; ++e) d.titles.push_back(word() + " " + word());
    for (std::size_t v = 0; v < videos; ++v) {
        VideoRecord rec;
        rec.id = video_name(v);
        rec.concept_scores.resize(concepts);
        for (auto& s : rec.concept_scores) s = rng.uniform();
        rec.covered_concepts = concepts;
        for (std::size_t t = 0; t < transcript_words; ++t) {
            if (t) rec.asr_text += ' ';
            rec.asr_text += word();
        }
        for (std::size_t t = 0; t < transcript_words / 3; ++t) {
            if (t) rec.ocr_text += ' ';
            rec.ocr_text += word();
        }
        rec.has_transcript = true;
        d.videos.push_back(std::move(rec));
    }
    return d;
}

}  // namespace eventsem::synthetic
