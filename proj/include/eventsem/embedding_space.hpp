#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "eventsem/errors.hpp"
#include "eventsem/stopwords.hpp"
#include "eventsem/vector_ops.hpp"

namespace eventsem {

enum class EmbeddingFormat { text, binary };

/**
 * Word vectors of a set of tokens, in token order.
 *
 * When produced by embed_tokens, `source_tokens[i]` is the vocabulary entry
 * behind `vectors[i]` (possibly an underscore-joined phrase), and the OOV
 * report lists the tokens that were skipped.
 */
struct EmbeddedSet {
    std::vector<Vector> vectors;
    std::vector<std::string> source_tokens;
    std::vector<std::string> oov_tokens;
    std::size_t phrase_merges = 0;

    std::size_t size() const noexcept { return vectors.size(); }
    bool empty() const noexcept { return vectors.empty(); }
    std::size_t dimension() const noexcept { return vectors.empty() ? 0 : vectors.front().size(); }
};

struct Neighbor {
    std::string token;
    double cosine = 0.0;
};

/**
 * Immutable (after loading) table of unit-length word vectors.
 *
 * Vectors are stored as float, row-major, and L2-normalized on insertion.
 */
class EmbeddingSpace {
public:
    explicit EmbeddingSpace(std::size_t dimension) : dim_(dimension) {
        if (dimension == 0) throw InputError("embedding dimension must be positive");
    }

    // Inserts and normalizes a vector. Returns false (and counts a duplicate)
    // if the token is already present; the first occurrence wins.
    bool add(std::string token, std::span<const float> values) {
        if (values.size() != dim_)
            throw InputError("vector for '" + token + "' has " + std::to_string(values.size()) +
                             " components, expected " + std::to_string(dim_));
        if (index_.count(token) != 0) {
            ++duplicates_;
            return false;
        }
        const double norm = l2_norm(values);
        if (!(norm > 0.0) || !std::isfinite(norm)) throw InputError("zero-norm or non-finite vector for token '" + token + "'");

        const std::size_t offset = data_.size();
        data_.resize(offset + dim_);
        // Already-unit rows (e.g. re-loaded from our own output) are kept
        // bit-exact; renormalizing would perturb the last float bit.
        const bool unit = std::abs(norm - 1.0) <= 0x1p-22;
        for (std::size_t i = 0; i < dim_; ++i)
            data_[offset + i] = unit ? values[i] : static_cast<float>(values[i] / norm);
        norms_.push_back(l2_norm(std::span<const float>(data_.data() + offset, dim_)));
        index_.emplace(token, tokens_.size());
        tokens_.push_back(std::move(token));
        return true;
    }

    std::size_t dimension() const noexcept { return dim_; }
    std::size_t size() const noexcept { return tokens_.size(); }
    std::size_t duplicate_count() const noexcept { return duplicates_; }

    bool contains(std::string_view token) const { return find(token).has_value(); }

    std::optional<std::size_t> find(std::string_view token) const {
        auto it = index_.find(std::string(token));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // Out-of-vocabulary tokens yield nullopt, never a zero vector.
    std::optional<std::span<const float>> lookup(std::string_view token) const {
        if (auto i = find(token)) return vector(*i);
        return std::nullopt;
    }

    const std::string& token(std::size_t i) const { return tokens_.at(i); }
    std::span<const float> vector(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    double norm(std::size_t i) const { return norms_.at(i); }

    // Row i in double precision, divided by its stored norm so that dot
    // products between rows are cosines to double rounding.
    Vector unit(std::size_t i) const {
        const auto v = vector(i);
        const double n = norm(i);
        Vector out(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) out[k] = static_cast<double>(v[k]) / n;
        return out;
    }

private:
    std::size_t dim_;
    std::vector<std::string> tokens_;
    std::vector<float> data_;
    std::vector<double> norms_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t duplicates_ = 0;
};

namespace detail {

inline bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_blank(line[i])) ++i;
        std::size_t j = i;
        while (j < line.size() && !is_blank(line[j])) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <class T>
inline bool parse_number(std::string_view s, T& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline std::pair<std::size_t, std::size_t> parse_header(std::string_view line, const std::string& path) {
    auto fields = split_ws(line);
    std::size_t words = 0, dim = 0;
    if (fields.size() != 2 || !parse_number(fields[0], words) || !parse_number(fields[1], dim) || dim == 0)
        throw InputError(path + ": malformed header, expected \"<vocabulary size> <dimension>\"");
    return {words, dim};
}

inline float load_le_float(const char* p) {
    std::uint32_t bits;
    std::memcpy(&bits, p, sizeof bits);
    if constexpr (std::endian::native == std::endian::big)
        bits = ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) | ((bits >> 8) & 0xff00u) | (bits >> 24);
    return std::bit_cast<float>(bits);
}

inline void store_le_float(float f, char* p) {
    auto bits = std::bit_cast<std::uint32_t>(f);
    if constexpr (std::endian::native == std::endian::big)
        bits = ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) | ((bits >> 8) & 0xff00u) | (bits >> 24);
    std::memcpy(p, &bits, sizeof bits);
}

inline EmbeddingSpace load_text(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty embedding file");
    const auto [words, dim] = parse_header(line, path);
    EmbeddingSpace space(dim);
    std::vector<float> values(dim);
    std::size_t row = 0;
    while (std::getline(in, line)) {
        auto fields = split_ws(line);
        if (fields.empty()) continue;
        ++row;
        if (row > words) throw InputError(path + ": more rows than the header's vocabulary size " + std::to_string(words));
        if (fields.size() != dim + 1)
            throw InputError(path + ": dimension mismatch on row " + std::to_string(row) + " ('" +
                             std::string(fields[0]) + "'): " + std::to_string(fields.size() - 1) +
                             " values, expected " + std::to_string(dim));
        for (std::size_t i = 0; i < dim; ++i)
            if (!parse_number(fields[i + 1], values[i]))
                throw InputError(path + ": unparsable number on row " + std::to_string(row) + ": '" +
                                 std::string(fields[i + 1]) + "'");
        space.add(std::string(fields[0]), values);
    }
    if (row != words)
        throw InputError(path + ": header announces " + std::to_string(words) + " rows, found " + std::to_string(row));
    return space;
}

inline EmbeddingSpace load_binary(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty embedding file");
    const auto [words, dim] = parse_header(line, path);
    EmbeddingSpace space(dim);
    std::vector<char> raw(dim * sizeof(float));
    std::vector<float> values(dim);
    for (std::size_t row = 1; row <= words; ++row) {
        int c;
        while ((c = in.get()) != EOF && is_blank(static_cast<char>(c))) {
        }
        if (c == EOF) throw InputError(path + ": truncated at row " + std::to_string(row));
        std::string token(1, static_cast<char>(c));
        while ((c = in.get()) != EOF && c != ' ') token.push_back(static_cast<char>(c));
        if (c == EOF || !in.read(raw.data(), static_cast<std::streamsize>(raw.size())))
            throw InputError(path + ": truncated vector on row " + std::to_string(row) + " ('" + token + "')");
        for (std::size_t i = 0; i < dim; ++i) values[i] = load_le_float(raw.data() + i * sizeof(float));
        space.add(std::move(token), values);
    }
    return space;
}

}  // namespace detail

inline EmbeddingSpace load_embeddings(const std::string& path, EmbeddingFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open embedding file: " + path);
    return format == EmbeddingFormat::text ? detail::load_text(in, path) : detail::load_binary(in, path);
}

// Text rows carry 9 significant digits, enough to round-trip any float.
inline void save_embeddings(const EmbeddingSpace& space, const std::string& path, EmbeddingFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write embedding file: " + path);
    out << space.size() << ' ' << space.dimension() << '\n';
    char buf[64];
    for (std::size_t w = 0; w < space.size(); ++w) {
        out << space.token(w);
        const auto v = space.vector(w);
        if (format == EmbeddingFormat::text) {
            for (float f : v) {
                auto res = std::to_chars(buf, buf + sizeof buf, f, std::chars_format::general, 9);
                out << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
            }
        } else {
            out << ' ';
            for (float f : v) {
                detail::store_le_float(f, buf);
                out.write(buf, sizeof(float));
            }
        }
        out << '\n';
    }
    if (!out) throw InputError("write failed: " + path);
}

// Lowercases, splits on runs of non-alphanumeric ASCII, drops stop words.
inline std::vector<std::string> tokenize(std::string_view text, const StopWordList& stops) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty() && !stops.contains(current)) tokens.push_back(current);
        current.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (c < 128 && std::isalnum(c))
            current.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    return tokens;
}

/**
 * Looks up tokens in the space, left to right. At each position the
 * underscore-joined bigram ("birthday_party") is tried first; if it is not in
 * the vocabulary the single token is used. Unresolved tokens go to the OOV
 * report. Throws AllTokensOov if nothing resolves.
 */
inline EmbeddedSet embed_tokens(const EmbeddingSpace& space, std::span<const std::string> tokens) {
    EmbeddedSet set;
    auto push = [&](std::size_t idx) {
        set.vectors.push_back(space.unit(idx));
        set.source_tokens.push_back(space.token(idx));
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i + 1 < tokens.size()) {
            if (auto idx = space.find(tokens[i] + "_" + tokens[i + 1])) {
                push(*idx);
                ++set.phrase_merges;
                ++i;
                continue;
            }
        }
        if (auto idx = space.find(tokens[i]))
            push(*idx);
        else
            set.oov_tokens.push_back(tokens[i]);
    }
    if (set.empty()) throw AllTokensOov(std::move(set.oov_tokens));
    return set;
}

inline Vector sum_pool(const EmbeddedSet& set) {
    if (set.empty()) throw InputError("sum_pool of an empty set");
    Vector acc(set.dimension(), 0.0);
    for (const auto& v : set.vectors) add_into(acc, v);
    return acc;
}

/**
 * Exhaustive top-k scan by cosine to `point`. Ties are broken by token,
 * lexicographically. Tokens in `exclude` are never returned.
 */
inline std::vector<Neighbor> nearest_words(const EmbeddingSpace& space, std::span<const double> point, std::size_t k,
                                           const std::unordered_set<std::string>& exclude = {}) {
    if (point.size() != space.dimension())
        throw InputError("query point has dimension " + std::to_string(point.size()) + ", space has " +
                         std::to_string(space.dimension()));
    if (k == 0) throw InputError("nearest_words requires k >= 1");
    const double pnorm = l2_norm(point);
    if (!(pnorm > 0.0)) throw UnscorableError("nearest_words: zero-norm query point");

    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(space.size());
    for (std::size_t w = 0; w < space.size(); ++w) {
        if (!exclude.empty() && exclude.count(space.token(w))) continue;
        scored.emplace_back(dot(space.vector(w), point) / (space.norm(w) * pnorm), w);
    }
    auto better = [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return space.token(a.second) < space.token(b.second);
    };
    const std::size_t take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), better);

    std::vector<Neighbor> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back({space.token(scored[i].second), scored[i].first});
    return out;
}

}  // namespace eventsem
