#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sctree/errors.hpp"
#include "sctree/gateway.hpp"
#include "sctree/scoring.hpp"

using namespace sctree;

namespace {

struct BleuCase {
  const char* hypothesis;
  const char* reference;
  double expected;
};

// Frozen from an independent script implementation.
const BleuCase kBleuCases[] = {
    {"a b c d", "a b c d e", 0.77880078307140488},
    {"the cat sat on the mat", "the cat sat on the mat", 1.0},
    {"", "a b", 0.0},
    {"a b", "", 0.0},
    {"a", "a", 1.0},
    {"a", "b", 0.10000000000000002},
    {"a b", "b a", 0.316227766016838},
    {"a b", "a b c d", 0.36787944117144233},
    {"the the the the", "the cat", 0.080342841894465181},
    {"a b c", "a b d", 0.32182979486854324},
    {"x y z w", "a b c d", 0.045180100180492254},
    {"a b c d e", "a b c d", 0.66874030497642201},
    {"a a a", "a a", 0.32182979486854324},
    {"b c", "a b c d", 0.36787944117144233},
    {"a b c d", "a b c d e f g h", 0.36787944117144233},
    {"ž é ü", "ž é ü", 1.0},
    {"a  b\tc\n", "a b c", 1.0},
    {"A b", "a b", 0.22360679774997899},
    {"a b a b", "a b", 0.16990442448471224},
    {"the cat is on the mat", "there is a cat on the mat", 0.19433094436376075},
    {"the quick brown fox jumps over the lazy dog", "the quick brown fox jumped over the lazy dog",
     0.59694917920196455},
    {"it is a guide to action which ensures that the military always obeys the commands of the party",
     "it is a guide to action that ensures that the military will forever heed party commands", 0.4208598069524091},
    {"def main ( n ) : return n * 2", "def main ( n ) : return 2 * n", 0.69853420565800961},
    {"42\n43\n<error>", "42\n44\n<error>", 0.14938015821857215},
    {"one two three four five six", "six five four three two one", 0.063894310424627246},
};

}  // namespace

TEST(Bleu, FrozenPairs) {
  ASSERT_EQ(std::size(kBleuCases), 25u);
  for (const auto& c : kBleuCases) {
    EXPECT_NEAR(bleu(c.hypothesis, c.reference), c.expected, 1e-9) << c.hypothesis << " | " << c.reference;
  }
}

TEST(Bleu, ShorterHypothesisIsExpMinusQuarter) {
  EXPECT_NEAR(bleu("a b c d", "a b c d e"), std::exp(-0.25), 1e-9);
}

TEST(Bleu, FrozenPairsMatchBruteForceOracle) {
  for (const auto& c : kBleuCases) {
    EXPECT_NEAR(bleu(c.hypothesis, c.reference), static_cast<double>(oracle::bleu(c.hypothesis, c.reference)), 1e-12)
        << c.hypothesis;
  }
}

TEST(Bleu, RandomisedAgainstOracle) {
  std::mt19937_64 rng(1234);
  const char* vocab[] = {"a", "b", "c", "d", "e", "the", "cat", "x"};
  const auto sentence = [&] {
    std::string s;
    const auto len = rng() % 12;
    for (std::size_t i = 0; i < len; ++i) {
      if (i) s += rng() % 5 == 0 ? "  " : " ";
      s += vocab[rng() % std::size(vocab)];
    }
    return s;
  };
  for (int i = 0; i < 500; ++i) {
    const auto h = sentence();
    const auto r = sentence();
    const double got = bleu(h, r);
    EXPECT_NEAR(got, static_cast<double>(oracle::bleu(h, r)), 1e-12) << h << " | " << r;
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);
  }
}

TEST(Bleu, TokenSpanOverload) {
  const std::vector<std::string_view> h = {"a", "b", "c", "d"};
  const std::vector<std::string_view> r = {"a", "b", "c", "d", "e"};
  EXPECT_DOUBLE_EQ(bleu(h, r), bleu("a b c d", "a b c d e"));
}

TEST(Levenshtein, Distances) {
  EXPECT_EQ(levenshtein("", ""), 0u);
  EXPECT_EQ(levenshtein("abc", ""), 3u);
  EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
  EXPECT_EQ(levenshtein("flaw", "lawn"), 2u);
  EXPECT_EQ(levenshtein("žluť", "zlut"), 2u);
  EXPECT_EQ(levenshtein("日本語", "日本"), 1u);
}

TEST(Levenshtein, Ratio) {
  EXPECT_DOUBLE_EQ(levenshtein_ratio("", ""), 1.0);
  EXPECT_DOUBLE_EQ(levenshtein_ratio("abc", "abc"), 1.0);
  EXPECT_DOUBLE_EQ(levenshtein_ratio("abc", ""), 0.0);
  EXPECT_DOUBLE_EQ(levenshtein_ratio("kitten", "sitting"), 1.0 - 3.0 / 7.0);
  EXPECT_DOUBLE_EQ(levenshtein_ratio("日本語", "日本"), 1.0 - 1.0 / 3.0);
}

TEST(Cosine, Basics) {
  const EmbeddingVector a{{1.0, 0.0}};
  const EmbeddingVector b{{0.0, 2.0}};
  const EmbeddingVector c{{-1.0, 0.0}};
  const EmbeddingVector d{{3.0, 4.0}};
  EXPECT_DOUBLE_EQ(cosine_similarity(a, a), 1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, b), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, c), 0.0);
  EXPECT_NEAR(cosine_similarity(a, d), 0.6, 1e-15);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, EmbeddingVector::zero(2)), 0.0);
  EXPECT_THROW(cosine_similarity(a, EmbeddingVector{{1.0, 2.0, 3.0}}), ConfigError);
}

TEST(HashedEmbedder, DeterministicAndNormalised) {
  HashedEmbedder e;
  const auto v = e.embed("the cat sat on the mat");
  EXPECT_EQ(v.dim(), HashedEmbedder::kDim);
  double norm = 0.0;
  for (double x : v.values) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  EXPECT_EQ(v, e.embed("the cat sat on the mat"));
  EXPECT_TRUE(e.embed("").is_zero());
  EXPECT_EQ(e.embed("").dim(), HashedEmbedder::kDim);
  EXPECT_NEAR(cosine_similarity(v, e.embed("the  cat sat\non the mat")), 1.0, 1e-12);
  EXPECT_LT(cosine_similarity(v, e.embed("completely different words here")), 0.5);
}

TEST(CachingEmbedder, EmbedsEachStringOnce) {
  struct Counting final : EmbeddingClient {
    int calls = 0;
    HashedEmbedder inner;
    EmbeddingVector embed(std::string_view t) override {
      ++calls;
      return inner.embed(t);
    }
  } counting;
  CachingEmbedder cache(counting);
  const auto a = cache.embed("x y");
  EXPECT_EQ(cache.embed("x y"), a);
  cache.embed("z");
  EXPECT_EQ(counting.calls, 2);
  EXPECT_EQ(cache.cache_size(), 2u);
}

TEST(SimilarityMetric, ParseAndName) {
  EXPECT_EQ(SimilarityMetric::parse("embedding").kind, SimilarityMetric::Kind::embedding_cosine);
  EXPECT_EQ(SimilarityMetric::parse("bleu").kind, SimilarityMetric::Kind::bleu);
  EXPECT_FALSE(SimilarityMetric::parse("bleu").symmetric_bleu);
  EXPECT_TRUE(SimilarityMetric::parse("bleu-symmetric").symmetric_bleu);
  EXPECT_EQ(SimilarityMetric::parse("levenshtein").kind, SimilarityMetric::Kind::levenshtein_ratio);
  for (const char* name : {"embedding", "bleu", "bleu-symmetric", "levenshtein"}) {
    EXPECT_EQ(SimilarityMetric::parse(name).name(), name);
  }
  EXPECT_THROW(SimilarityMetric::parse("rouge"), ConfigError);
}
