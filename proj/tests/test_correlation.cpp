#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "sctree/correlation.hpp"
#include "sctree/errors.hpp"

using namespace sctree;

namespace {

MetricTable fixture(const char* name) { return MetricTable::load_csv(std::string(SCTREE_FIXTURE_DIR) + "/" + name); }

std::vector<double> negated(std::vector<double> v) {
  for (double& x : v) x = -x;
  return v;
}

std::vector<std::string> top_models(const MetricTable& t, const std::string& column) {
  const auto& col = t.column(column);
  const double best = *std::max_element(col.begin(), col.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (col[i] == best) out.push_back(t.models[i]);
  }
  return out;
}

}  // namespace

TEST(Pearson, MatchesOracleOnRandomSeries) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 20;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = noise(rng) * 10.0 + 50.0;
      ys[i] = 0.3 * xs[i] + noise(rng);
    }
    EXPECT_NEAR(pearson(xs, ys), static_cast<double>(oracle::pearson(xs, ys)), 1e-12);
  }
}

TEST(Pearson, Errors) {
  const std::vector<double> a = {1, 2, 3};
  EXPECT_THROW(pearson(a, std::vector<double>{1, 2}), CorrelationError);
  EXPECT_THROW(pearson(std::vector<double>{1, 2}, std::vector<double>{2, 1}), CorrelationError);
  EXPECT_THROW(pearson(a, std::vector<double>{5, 5, 5}), CorrelationError);
}

TEST(Pearson, PerfectAndSelf) {
  const std::vector<double> a = {0.1, 0.7, 0.3, 0.9};
  const std::vector<double> b = {2.0, 14.0, 6.0, 18.0};
  EXPECT_NEAR(pearson(a, b), 1.0, 1e-15);
  EXPECT_NEAR(pearson(a, negated(b)), -1.0, 1e-15);
  EXPECT_EQ(pearson(a, a), 1.0);
}

TEST(Spearman, RanksWithTies) {
  EXPECT_EQ(fractional_ranks(std::vector<double>{10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
  EXPECT_EQ(fractional_ranks(std::vector<double>{1, 1, 1}), (std::vector<double>{2, 2, 2}));
  EXPECT_NEAR(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 4, 9, 16}), 1.0, 1e-15);
}

TEST(MetricTable, ParseCsv) {
  const auto t = MetricTable::parse_csv("model,a,b\n\"Model, X\",1,2.5\nY,3,-4e-1\n");
  EXPECT_EQ(t.models, (std::vector<std::string>{"Model, X", "Y"}));
  EXPECT_EQ(t.column_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(t.column("b"), (std::vector<double>{2.5, -0.4}));
  EXPECT_TRUE(t.has_column("a"));
  EXPECT_FALSE(t.has_column("c"));
  EXPECT_THROW(t.column("c"), ConfigError);
}

TEST(MetricTable, ParseErrors) {
  const auto field_of = [](const char* text) -> std::string {
    try {
      MetricTable::parse_csv(text);
    } catch (const ParseError& e) {
      return e.field();
    }
    return "<no error>";
  };
  EXPECT_EQ(field_of(""), "header");
  EXPECT_EQ(field_of("name,a\nx,1\n"), "header");
  EXPECT_EQ(field_of("model,a,a\nx,1,2\n"), "header");
  EXPECT_NE(field_of("model,a\nx,1,2\n"), "<no error>");
  EXPECT_NE(field_of("model,a\nx,abc\n"), "<no error>");
  EXPECT_NE(field_of("model,a\n\"x,1\n"), "<no error>");
}

TEST(MetricTable, SetRow) {
  auto t = MetricTable::parse_csv("model,a,b\nX,1,2\n");
  t.set_row("X", {{"a", 9}});
  EXPECT_EQ(t.column("a"), (std::vector<double>{9}));
  t.set_row("Y", {{"a", 3}, {"b", 4}});
  EXPECT_EQ(t.models.back(), "Y");
  EXPECT_THROW(t.set_row("Z", {{"a", 1}}), ConfigError);
  EXPECT_THROW(t.set_row("X", {{"nope", 1}}), ConfigError);
}

TEST(Fixtures, CzechUkrainianEmbeddingC3TracksCometKiwi) {
  const auto t = fixture("cs_uk.csv");
  ASSERT_EQ(t.models.size(), 6u);
  const double r = pearson(t.column("c3_emb"), t.column("cometkiwi"));
  EXPECT_GT(r, 0.7);
  EXPECT_NEAR(r, 0.9982111469570905, 1e-12);
  EXPECT_NEAR(r, static_cast<double>(oracle::pearson(t.column("c3_emb"), t.column("cometkiwi"))), 1e-12);
}

TEST(Fixtures, EnglishChineseEmbeddingC3TracksCometKiwi) {
  const auto t = fixture("en_zh.csv");
  const double r = pearson(t.column("c3_emb"), t.column("cometkiwi"));
  EXPECT_GT(r, 0.7);
  EXPECT_NEAR(r, 0.9218392722354907, 1e-12);
}

TEST(Fixtures, PinnedCorrelationReport) {
  struct Pin {
    const char* file;
    const char* internal;
    const char* external;
    double pearson;
    double spearman;
  };
  const Pin pins[] = {
      {"cs_uk.csv", "c3_emb", "autorank", 0.9970879406415336, 0.8986451052612949},
      {"cs_uk.csv", "c3_emb", "metricx", 0.9914456053171183, 0.9428571428571428},
      {"cs_uk.csv", "c3_bleu", "cometkiwi", 0.9752701558240513, 0.5428571428571429},
      {"cs_uk.csv", "c1_emb", "metricx", 0.9966335883000623, 1.0},
      {"en_zh.csv", "c3_emb", "autorank", 0.9243518784634579, 0.9705882352941175},
      {"en_zh.csv", "c3_bleu", "cometkiwi", 0.7607160593563285, 0.8116794499134278},
      {"en_zh.csv", "c1_emb", "metricx", 0.8603931151907703, 0.9276336570439174},
  };
  for (const auto& p : pins) {
    const auto report = correlate(fixture(p.file));
    const auto& e = report.find(p.internal, p.external);
    ASSERT_TRUE(e.pearson.has_value());
    EXPECT_NEAR(*e.pearson, p.pearson, 1e-12) << p.file << " " << p.internal << " " << p.external;
    EXPECT_NEAR(*e.spearman, p.spearman, 1e-12) << p.file << " " << p.internal << " " << p.external;
    EXPECT_EQ(e.sign_adjusted, std::string(p.external) != "cometkiwi");
  }
}

TEST(Fixtures, ReportCoversAllPairs) {
  const auto report = correlate(fixture("cs_uk.csv"));
  EXPECT_EQ(report.entries.size(), 18u);
  EXPECT_EQ(report.models.size(), 6u);
  for (const auto& e : report.entries) EXPECT_TRUE(e.note.empty()) << e.note;
  const auto j = report.to_json();
  EXPECT_EQ(j["entries"].size(), 18u);
  EXPECT_NE(report.render_table().find("negated"), std::string::npos);
}

TEST(Fixtures, RankingAgreement) {
  const auto cs = fixture("cs_uk.csv");
  const auto& emb = cs.column("c3_emb");
  const auto& kiwi = cs.column("cometkiwi");
  const auto worst_emb = std::min_element(emb.begin(), emb.end()) - emb.begin();
  const auto worst_kiwi = std::min_element(kiwi.begin(), kiwi.end()) - kiwi.begin();
  EXPECT_EQ(worst_emb, worst_kiwi);
  EXPECT_EQ(cs.models[static_cast<std::size_t>(worst_emb)], "Phi-3-Medium");

  // en-zh: the top embedding C3 score is shared; the external leader must be among them
  const auto zh = fixture("en_zh.csv");
  const auto top = top_models(zh, "c3_emb");
  EXPECT_EQ(top.size(), 2u);
  EXPECT_NE(std::find(top.begin(), top.end(), top_models(zh, "cometkiwi").front()), top.end());
}

TEST(Correlate, ConstantColumnGetsNote) {
  const auto t = MetricTable::parse_csv("model,c3_emb,cometkiwi,autorank\nA,100,0.5,1\nB,100,0.6,2\nC,100,0.7,3\n");
  const auto report = correlate(t);
  const auto& e = report.find("c3_emb", "cometkiwi");
  EXPECT_FALSE(e.pearson.has_value());
  EXPECT_FALSE(e.note.empty());
  EXPECT_THROW(report.find("c1_emb", "cometkiwi"), ConfigError);
}

TEST(CorrelationMatrix, DiagonalAndConstantColumns) {
  const auto t = fixture("en_zh.csv");
  const auto m = correlation_matrix(t);
  ASSERT_EQ(m.names.size(), 9u);
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    ASSERT_TRUE(m.pearson[i][i].has_value());
    EXPECT_EQ(*m.pearson[i][i], 1.0) << m.names[i];
    for (std::size_t j = 0; j < m.names.size(); ++j) EXPECT_EQ(m.pearson[i][j], m.pearson[j][i]);
  }
  EXPECT_TRUE(m.constant_columns.empty());

  const auto c = correlation_matrix(MetricTable::parse_csv("model,a,b\nX,1,5\nY,1,6\nZ,1,8\n"));
  EXPECT_EQ(c.constant_columns, (std::vector<std::string>{"a"}));
  EXPECT_FALSE(c.pearson[0][0].has_value());
  EXPECT_FALSE(c.pearson[0][1].has_value());
  EXPECT_EQ(*c.pearson[1][1], 1.0);
  EXPECT_NE(c.render_table().find("constant column: a"), std::string::npos);
  EXPECT_TRUE(c.to_json()["pearson"][0][1].is_null());
}
