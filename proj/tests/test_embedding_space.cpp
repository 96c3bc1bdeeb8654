#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <unordered_set>

#include "eventsem/embedding_space.hpp"
#include "eventsem/synthetic.hpp"
#include "oracles.hpp"

using namespace eventsem;

namespace {

EmbeddingSpace two_word_space(const testutil::TempDir& dir) {
    return load_embeddings(dir.write("two.txt", "2 3\na 1 0 0\nb 0 2 0\n"), EmbeddingFormat::text);
}

std::vector<double> as_doubles(std::span<const float> v) { return {v.begin(), v.end()}; }

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(LoadEmbeddings, NormalizesRows) {
    testutil::TempDir dir;
    auto space = two_word_space(dir);
    ASSERT_EQ(space.size(), 2u);
    ASSERT_EQ(space.dimension(), 3u);
    EXPECT_EQ(as_doubles(*space.lookup("a")), (std::vector<double>{1, 0, 0}));
    EXPECT_EQ(as_doubles(*space.lookup("b")), (std::vector<double>{0, 1, 0}));
}

TEST(LoadEmbeddings, DimensionMismatchNamesRow) {
    testutil::TempDir dir;
    const auto path = dir.write("bad.txt", "2 3\na 1 0\nb 0 2 0\n");
    const auto msg = error_of([&] { load_embeddings(path, EmbeddingFormat::text); });
    EXPECT_NE(msg.find("dimension mismatch"), std::string::npos) << msg;
    EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
}

TEST(LoadEmbeddings, RejectsMalformedHeaderAndZeroVectors) {
    testutil::TempDir dir;
    EXPECT_THROW(load_embeddings(dir.write("h.txt", "two 3\na 1 0 0\n"), EmbeddingFormat::text), InputError);
    EXPECT_THROW(load_embeddings(dir.write("h2.txt", "2\n"), EmbeddingFormat::text), InputError);
    const auto msg = error_of([&] { load_embeddings(dir.write("z.txt", "1 2\nnull 0 0\n"), EmbeddingFormat::text); });
    EXPECT_NE(msg.find("'null'"), std::string::npos) << msg;
    EXPECT_THROW(load_embeddings(dir.write("short.txt", "3 2\na 1 0\n"), EmbeddingFormat::text), InputError);
    EXPECT_THROW(load_embeddings(dir.file("missing.txt"), EmbeddingFormat::text), InputError);
}

TEST(LoadEmbeddings, DuplicatesKeepFirstOccurrence) {
    testutil::TempDir dir;
    auto space = load_embeddings(dir.write("d.txt", "3 2\na 1 0\na 0 1\nb 0 1\n"), EmbeddingFormat::text);
    EXPECT_EQ(space.size(), 2u);
    EXPECT_EQ(space.duplicate_count(), 1u);
    EXPECT_EQ(as_doubles(*space.lookup("a")), (std::vector<double>{1, 0}));
}

TEST(LoadEmbeddings, RoundTripIsBitExact) {
    testutil::TempDir dir;
    synthetic::Rng rng(7);
    const auto space = synthetic::random_space(rng, 10, 6);
    for (auto format : {EmbeddingFormat::text, EmbeddingFormat::binary}) {
        const auto path = dir.file(format == EmbeddingFormat::text ? "rt.txt" : "rt.bin");
        save_embeddings(space, path, format);
        const auto again = load_embeddings(path, format);
        ASSERT_EQ(again.size(), space.size());
        for (std::size_t w = 0; w < space.size(); ++w) {
            ASSERT_EQ(again.token(w), space.token(w));
            const auto a = space.vector(w), b = again.vector(w);
            EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size_bytes()), 0) << space.token(w);
        }
    }
}

TEST(LoadEmbeddings, BinaryAcceptsWord2vecLayoutWithoutNewlines) {
    testutil::TempDir dir;
    std::string blob = "2 2\n";
    auto put = [&](const std::string& tok, float x, float y) {
        blob += tok + " ";
        for (float f : {x, y}) {
            char b[4];
            detail::store_le_float(f, b);
            blob.append(b, 4);
        }
    };
    put("x", 3.0f, 4.0f);
    put("y", 0.0f, -2.0f);
    const auto space = load_embeddings(dir.write("w.bin", blob), EmbeddingFormat::binary);
    ASSERT_EQ(space.size(), 2u);
    EXPECT_NEAR((*space.lookup("x"))[0], 0.6, 1e-7);
    EXPECT_NEAR((*space.lookup("y"))[1], -1.0, 1e-7);
}

TEST(EmbeddingSpace, UnitNormsAndSelfCosine) {
    synthetic::Rng rng(11);
    const auto space = synthetic::random_space(rng, 200, 17);
    for (std::size_t w = 0; w < space.size(); ++w) {
        const auto v = as_doubles(space.vector(w));
        EXPECT_NEAR(l2_norm(v), 1.0, 1e-6);
        EXPECT_NEAR(oracle::cosine(v, v), 1.0, 1e-9);
    }
    EXPECT_FALSE(space.lookup("not-a-word").has_value());
}

TEST(Tokenize, Examples) {
    const StopWordList stops{"an"};
    EXPECT_EQ(tokenize("Grooming an Animal", stops), (std::vector<std::string>{"grooming", "animal"}));
    EXPECT_EQ(tokenize("birthday-party!!", stops), (std::vector<std::string>{"birthday", "party"}));
    EXPECT_TRUE(tokenize("", stops).empty());
    EXPECT_TRUE(tokenize("  --  ", stops).empty());
}

TEST(Tokenize, BuiltinStopWords) {
    const auto stops = StopWordList::english();
    EXPECT_GE(stops.size(), 140u);
    EXPECT_EQ(tokenize("The Making of a Sandwich", stops), (std::vector<std::string>{"making", "sandwich"}));
    EXPECT_TRUE(stops.contains("THE"));
}

TEST(Tokenize, StopWordFile) {
    testutil::TempDir dir;
    const auto stops = StopWordList::from_file(dir.write("stops.txt", "Foo\n\n  bar  \n"));
    EXPECT_EQ(stops.size(), 2u);
    EXPECT_EQ(tokenize("foo baz BAR", stops), (std::vector<std::string>{"baz"}));
}

TEST(EmbedTokens, DirectLookupAndOovReport) {
    testutil::TempDir dir;
    const auto space = two_word_space(dir);
    const std::vector<std::string> ab{"a", "b"};
    auto set = embed_tokens(space, ab);
    ASSERT_EQ(set.size(), 2u);
    EXPECT_EQ(set.vectors[0], (Vector{1, 0, 0}));
    EXPECT_EQ(set.vectors[1], (Vector{0, 1, 0}));

    const std::vector<std::string> with_oov{"a", "zzz"};
    set = embed_tokens(space, with_oov);
    ASSERT_EQ(set.size(), 1u);
    EXPECT_EQ(set.oov_tokens, (std::vector<std::string>{"zzz"}));

    const std::vector<std::string> only_oov{"zzz"};
    EXPECT_THROW(embed_tokens(space, only_oov), AllTokensOov);
}

TEST(EmbedTokens, BigramPhrasesAndTokenConservation) {
    EmbeddingSpace space(2);
    const std::vector<float> x{1, 0}, y{0, 1};
    space.add("birthday_party", x);
    space.add("birthday", y);
    space.add("cake", y);
    const std::vector<std::string> tokens{"birthday", "party", "cake", "candle", "birthday"};
    const auto set = embed_tokens(space, tokens);
    EXPECT_EQ(set.source_tokens, (std::vector<std::string>{"birthday_party", "cake", "birthday"}));
    EXPECT_EQ(set.oov_tokens, (std::vector<std::string>{"candle"}));
    EXPECT_EQ(set.phrase_merges, 1u);
    EXPECT_EQ(set.size() + set.oov_tokens.size() + set.phrase_merges, tokens.size());
}

TEST(EmbedTokens, ConservationOnRandomTokenStreams) {
    synthetic::Rng rng(3);
    EmbeddingSpace space(4);
    for (int i = 0; i < 20; ++i) space.add("t" + std::to_string(i), synthetic::gaussian_floats(rng, 4));
    for (int i = 0; i < 20; i += 3) space.add("t" + std::to_string(i) + "_t" + std::to_string(i + 1), synthetic::gaussian_floats(rng, 4));
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> tokens;
        const auto n = 1 + rng.below(12);
        for (std::size_t i = 0; i < n; ++i) tokens.push_back("t" + std::to_string(rng.below(30)));
        try {
            const auto set = embed_tokens(space, tokens);
            EXPECT_EQ(set.size() + set.oov_tokens.size() + set.phrase_merges, tokens.size());
        } catch (const AllTokensOov& e) {
            EXPECT_EQ(e.tokens().size(), tokens.size());
        }
    }
}

TEST(SumPool, Examples) {
    EmbeddedSet s;
    s.vectors = {{1, 0, 0}, {0, 1, 0}};
    EXPECT_EQ(sum_pool(s), (Vector{1, 1, 0}));
    s.vectors = {{0, 1, 0}};
    EXPECT_EQ(sum_pool(s), (Vector{0, 1, 0}));
    EXPECT_THROW(sum_pool(EmbeddedSet{}), InputError);
}

TEST(SumPool, MatchesAccumulationOracleAndIsPermutationInvariant) {
    synthetic::Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        auto s = synthetic::random_set(rng, 5, 3);
        const auto pooled = sum_pool(s);
        const auto expected = oracle::sum(s.vectors);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(pooled[i], expected[i], 1e-12);
        rng.shuffle(s.vectors);
        const auto shuffled = sum_pool(s);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(shuffled[i], pooled[i], 1e-12);
    }
}

TEST(NearestWords, SelfAndSaturation) {
    testutil::TempDir dir;
    const auto space = two_word_space(dir);
    const Vector a{1, 0, 0};
    auto nn = nearest_words(space, a, 1);
    ASSERT_EQ(nn.size(), 1u);
    EXPECT_EQ(nn[0].token, "a");
    EXPECT_NEAR(nn[0].cosine, 1.0, 1e-12);

    nn = nearest_words(space, a, 10);
    ASSERT_EQ(nn.size(), 2u);
    EXPECT_EQ(nn[1].token, "b");

    nn = nearest_words(space, a, 10, {"a"});
    ASSERT_EQ(nn.size(), 1u);
    EXPECT_EQ(nn[0].token, "b");

    EXPECT_THROW(nearest_words(space, Vector{0, 0, 0}, 1), UnscorableError);
    EXPECT_THROW(nearest_words(space, Vector{1, 0}, 1), InputError);
}

TEST(NearestWords, TiesAreLexicographic) {
    EmbeddingSpace space(2);
    const std::vector<float> v{1, 1};
    for (auto t : {"delta", "alpha", "charlie", "bravo"}) space.add(t, v);
    const auto nn = nearest_words(space, Vector{1, 1}, 3);
    ASSERT_EQ(nn.size(), 3u);
    EXPECT_EQ(nn[0].token, "alpha");
    EXPECT_EQ(nn[1].token, "bravo");
    EXPECT_EQ(nn[2].token, "charlie");
}

TEST(NearestWords, MatchesExhaustiveScanOracle) {
    synthetic::Rng rng(21);
    const auto space = synthetic::random_space(rng, 50, 8);
    std::vector<std::string> tokens;
    std::vector<oracle::Vec> vectors;
    for (std::size_t w = 0; w < space.size(); ++w) {
        tokens.push_back(space.token(w));
        vectors.push_back(as_doubles(space.vector(w)));
    }
    for (int trial = 0; trial < 100; ++trial) {
        const auto point = synthetic::gaussian_vector(rng, 8);
        std::unordered_set<std::string> exclude;
        if (trial % 2) exclude = {tokens[rng.below(50)], tokens[rng.below(50)]};
        std::vector<std::string> got;
        for (const auto& n : nearest_words(space, point, 5, exclude)) got.push_back(n.token);
        EXPECT_EQ(got, oracle::nearest(tokens, vectors, point, 5, exclude));

        // k = |V| is a permutation of the vocabulary minus exclusions
        auto all = nearest_words(space, point, space.size(), exclude);
        EXPECT_EQ(all.size(), space.size() - exclude.size());
        std::unordered_set<std::string> seen;
        for (const auto& n : all) {
            EXPECT_FALSE(exclude.count(n.token));
            seen.insert(n.token);
        }
        EXPECT_EQ(seen.size(), all.size());
        EXPECT_TRUE(std::is_sorted(all.begin(), all.end(),
                                   [](const Neighbor& a, const Neighbor& b) { return a.cosine > b.cosine; }));
    }
}
