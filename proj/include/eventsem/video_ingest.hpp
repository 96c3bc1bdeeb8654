#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eventsem/concepts.hpp"
#include "eventsem/errors.hpp"
#include "eventsem/vector_ops.hpp"

namespace eventsem {

enum class PoolingMode { max, avg };

inline std::string_view to_string(PoolingMode m) { return m == PoolingMode::max ? "max" : "avg"; }

inline PoolingMode parse_pooling_mode(std::string_view s) {
    if (s == "max") return PoolingMode::max;
    if (s == "avg") return PoolingMode::avg;
    throw InputError("unknown pooling mode '" + std::string(s) + "' (expected max|avg)");
}

// Detector outputs of one concept over the sampled frames (or chunks) of one video.
struct ScoreTrack {
    std::string video_id;
    std::string concept_id;
    std::vector<double> samples;
};

struct VideoRecord {
    std::string id;
    Vector concept_scores;  // aligned with ConceptRepository order
    std::string ocr_text;
    std::string asr_text;
    std::size_t covered_concepts = 0;  // concepts that had a track
    bool has_transcript = false;
};

inline bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

inline double pool(std::span<const double> samples, PoolingMode mode) {
    if (samples.empty()) throw InputError("cannot pool an empty score track");
    for (double s : samples)
        if (!in_unit_interval(s)) throw InputError("score " + std::to_string(s) + " outside [0,1]");
    if (mode == PoolingMode::max) return *std::max_element(samples.begin(), samples.end());
    double sum = 0.0;
    for (double s : samples) sum += s;
    return std::min(1.0, sum / static_cast<double>(samples.size()));
}

inline double pool(const ScoreTrack& track, PoolingMode mode) { return pool(track.samples, mode); }

/**
 * Assembles one video's concept score vector. Concepts without a track score
 * 0. Several tracks for the same concept are pooled as one.
 */
inline VideoRecord build_video_record(const std::string& video_id, std::span<const ScoreTrack> tracks,
                                      const ConceptRepository& repo, PoolingMode mode, std::string ocr_text = {},
                                      std::string asr_text = {}) {
    std::vector<std::vector<double>> samples(repo.size());
    for (const auto& t : tracks) {
        if (t.video_id != video_id)
            throw InputError("track for video '" + t.video_id + "' mixed into video '" + video_id + "'");
        auto idx = repo.index_of(t.concept_id);
        if (!idx) throw InputError("unknown concept id '" + t.concept_id + "' in track of video '" + video_id + "'");
        auto& dst = samples[*idx];
        dst.insert(dst.end(), t.samples.begin(), t.samples.end());
    }
    VideoRecord rec;
    rec.id = video_id;
    rec.concept_scores.assign(repo.size(), 0.0);
    for (std::size_t i = 0; i < repo.size(); ++i) {
        if (samples[i].empty()) continue;
        rec.concept_scores[i] = pool(samples[i], mode);
        ++rec.covered_concepts;
    }
    rec.has_transcript = !ocr_text.empty() || !asr_text.empty();
    rec.ocr_text = std::move(ocr_text);
    rec.asr_text = std::move(asr_text);
    return rec;
}

struct CorpusReport {
    std::size_t videos = 0;
    std::size_t videos_with_scores = 0;
    std::size_t videos_with_transcripts = 0;
    std::vector<std::string> malformed;  // "path:line: reason"
};

struct Corpus {
    std::vector<VideoRecord> records;  // sorted by video id
    CorpusReport report;

    const VideoRecord* find(std::string_view id) const {
        auto it = std::lower_bound(records.begin(), records.end(), id,
                                   [](const VideoRecord& r, std::string_view v) { return r.id < v; });
        return it != records.end() && it->id == id ? &*it : nullptr;
    }
};

namespace detail {

struct Transcript {
    std::string ocr, asr;
};

inline void append_text(std::string& dst, const std::string& more) {
    if (more.empty()) return;
    if (!dst.empty()) dst += ' ';
    dst += more;
}

inline std::map<std::string, Transcript> read_transcripts(const std::string& path, CorpusReport& report) {
    std::map<std::string, Transcript> out;
    if (path.empty()) return out;
    std::ifstream in(path);
    if (!in) throw InputError("cannot open transcript file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto where = path + ":" + std::to_string(lineno);
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
            if (!obj.is_object() || !obj.contains("video")) {
                report.malformed.push_back(where + ": expected an object with a \"video\" field");
                continue;
            }
            auto& t = out[obj.at("video").get<std::string>()];
            if (obj.contains("ocr")) append_text(t.ocr, obj.at("ocr").get<std::string>());
            if (obj.contains("asr")) append_text(t.asr, obj.at("asr").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            report.malformed.push_back(where + ": " + e.what());
        }
    }
    return out;
}

inline Corpus assemble(std::map<std::string, Vector> scores, std::map<std::string, std::size_t> coverage,
                       std::map<std::string, Transcript> transcripts, const ConceptRepository& repo,
                       CorpusReport report) {
    Corpus corpus;
    std::vector<std::string> ids;
    for (const auto& [id, _] : scores) ids.push_back(id);
    for (const auto& [id, _] : transcripts)
        if (!scores.count(id)) ids.push_back(id);
    std::sort(ids.begin(), ids.end());

    for (const auto& id : ids) {
        VideoRecord rec;
        rec.id = id;
        if (auto it = scores.find(id); it != scores.end()) {
            rec.concept_scores = std::move(it->second);
            rec.covered_concepts = coverage[id];
            ++report.videos_with_scores;
        } else {
            rec.concept_scores.assign(repo.size(), 0.0);
        }
        if (auto it = transcripts.find(id); it != transcripts.end()) {
            rec.ocr_text = std::move(it->second.ocr);
            rec.asr_text = std::move(it->second.asr);
            rec.has_transcript = true;
            ++report.videos_with_transcripts;
        }
        corpus.records.push_back(std::move(rec));
    }
    report.videos = corpus.records.size();
    corpus.report = std::move(report);
    return corpus;
}

inline std::vector<std::string_view> split_char(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace detail

/**
 * Score tracks (JSON Lines {"video","concept","scores"}) plus optional
 * transcripts (JSON Lines {"video","ocr","asr"}). Malformed lines are
 * reported and skipped; a score outside [0,1] or an unknown concept id is a
 * hard error.
 */
inline Corpus load_corpus_jsonl(const std::string& score_path, const std::string& transcript_path,
                                const ConceptRepository& repo, PoolingMode mode) {
    CorpusReport report;
    std::map<std::string, std::vector<ScoreTrack>> tracks;
    std::ifstream in(score_path);
    if (!in) throw InputError("cannot open score file: " + score_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto where = score_path + ":" + std::to_string(lineno);
        ScoreTrack t;
        try {
            auto obj = nlohmann::json::parse(line);
            if (!obj.is_object() || !obj.contains("video") || !obj.contains("concept") || !obj.contains("scores")) {
                report.malformed.push_back(where + ": expected {\"video\", \"concept\", \"scores\"}");
                continue;
            }
            t.video_id = obj.at("video").get<std::string>();
            t.concept_id = obj.at("concept").get<std::string>();
            t.samples = obj.at("scores").get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
            report.malformed.push_back(where + ": " + e.what());
            continue;
        }
        if (t.samples.empty()) {
            report.malformed.push_back(where + ": empty score list");
            continue;
        }
        for (double s : t.samples)
            if (!in_unit_interval(s))
                throw InputError(where + ": score " + std::to_string(s) + " outside [0,1]");
        if (!repo.index_of(t.concept_id)) throw InputError(where + ": unknown concept id '" + t.concept_id + "'");
        tracks[t.video_id].push_back(std::move(t));
    }

    auto transcripts = detail::read_transcripts(transcript_path, report);
    std::map<std::string, Vector> scores;
    std::map<std::string, std::size_t> coverage;
    for (const auto& [id, list] : tracks) {
        auto rec = build_video_record(id, list, repo, mode);
        coverage[id] = rec.covered_concepts;
        scores[id] = std::move(rec.concept_scores);
    }
    return detail::assemble(std::move(scores), std::move(coverage), std::move(transcripts), repo, std::move(report));
}

/**
 * Pre-pooled matrix: a header of concept ids (optionally preceded by a label
 * for the id column), then one row per video: id followed by one score per
 * header concept. Concepts missing from the header score 0.
 */
inline Corpus load_pooled_csv(const std::string& csv_path, const std::string& transcript_path,
                              const ConceptRepository& repo) {
    std::ifstream in(csv_path);
    if (!in) throw InputError("cannot open pooled score file: " + csv_path);
    CorpusReport report;
    std::string header_line, line;
    std::map<std::string, Vector> scores;
    std::map<std::string, std::size_t> coverage;

    std::size_t lineno = 0;
    while (std::getline(in, header_line)) {
        ++lineno;
        if (!detail::trim(header_line).empty()) break;
    }
    if (detail::trim(header_line).empty()) {
        auto transcripts = detail::read_transcripts(transcript_path, report);
        return detail::assemble({}, {}, std::move(transcripts), repo, std::move(report));
    }
    auto header = detail::split_char(header_line, ',');
    std::optional<bool> has_label;
    std::vector<std::size_t> columns;  // repo index per score column

    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto where = csv_path + ":" + std::to_string(lineno);
        auto fields = detail::split_char(line, ',');
        if (!has_label) {
            if (fields.size() == header.size())
                has_label = true;
            else if (fields.size() == header.size() + 1)
                has_label = false;
            else
                throw InputError(where + ": row has " + std::to_string(fields.size()) + " fields, header has " +
                                 std::to_string(header.size()));
            for (std::size_t c = *has_label ? 1 : 0; c < header.size(); ++c) {
                auto id = detail::trim(header[c]);
                auto idx = repo.index_of(id);
                if (!idx) throw InputError(csv_path + ": unknown concept id '" + std::string(id) + "' in header");
                columns.push_back(*idx);
            }
        }
        if (fields.size() != columns.size() + 1) {
            report.malformed.push_back(where + ": expected " + std::to_string(columns.size() + 1) + " fields");
            continue;
        }
        Vector row(repo.size(), 0.0);
        bool ok = true;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            double v = 0.0;
            if (!detail::parse_number(detail::trim(fields[c + 1]), v)) {
                report.malformed.push_back(where + ": unparsable number '" + std::string(fields[c + 1]) + "'");
                ok = false;
                break;
            }
            if (!in_unit_interval(v)) throw InputError(where + ": score " + std::to_string(v) + " outside [0,1]");
            row[columns[c]] = v;
        }
        if (!ok) continue;
        std::string id(detail::trim(fields[0]));
        if (scores.count(id)) throw InputError(where + ": duplicate video id '" + id + "'");
        coverage[id] = columns.size();
        scores.emplace(std::move(id), std::move(row));
    }
    auto transcripts = detail::read_transcripts(transcript_path, report);
    return detail::assemble(std::move(scores), std::move(coverage), std::move(transcripts), repo, std::move(report));
}

inline bool is_csv_path(std::string_view path) {
    return path.size() >= 4 && ascii_lower(path.substr(path.size() - 4)) == ".csv";
}

// Dispatches on the score file extension: ".csv" is pre-pooled, anything else
// JSON Lines. An empty score path loads transcripts only.
inline Corpus load_corpus(const std::string& score_path, const std::string& transcript_path,
                          const ConceptRepository& repo, PoolingMode mode) {
    if (score_path.empty()) {
        CorpusReport report;
        auto transcripts = detail::read_transcripts(transcript_path, report);
        return detail::assemble({}, {}, std::move(transcripts), repo, std::move(report));
    }
    if (is_csv_path(score_path)) return load_pooled_csv(score_path, transcript_path, repo);
    return load_corpus_jsonl(score_path, transcript_path, repo, mode);
}

inline std::string format_shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Writes the pooled matrix in the format load_pooled_csv reads. Values use
// the shortest round-trip representation.
inline void write_pooled_csv(std::ostream& out, std::span<const VideoRecord> records, const ConceptRepository& repo) {
    out << "video_id";
    for (const auto& d : repo.definitions()) out << ',' << d.id;
    out << '\n';
    for (const auto& r : records) {
        if (r.concept_scores.size() != repo.size())
            throw InvariantError("video '" + r.id + "' score vector does not match repository size");
        out << r.id;
        for (double v : r.concept_scores) out << ',' << format_shortest(v);
        out << '\n';
    }
}

}  // namespace eventsem
