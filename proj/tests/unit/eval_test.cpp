#include "ncd/eval.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ncd/errors.hpp"
#include "support/oracles.hpp"

namespace ncd {
namespace {

LabeledCorpus corpus_of(const std::vector<std::string>& texts) {
  LabeledCorpus c;
  c.label_names = {"only"};
  for (std::size_t i = 0; i < texts.size(); ++i) c.docs.push_back(Document{i, texts[i], LabelId{0}});
  return c;
}

TEST(Accuracy, Examples) {
  std::vector<int> half = {1, 1, 0, 0};
  EXPECT_DOUBLE_EQ(accuracy(half), 0.5);
  std::vector<int> all(17, 1);
  EXPECT_DOUBLE_EQ(accuracy(all), 1.0);
  EXPECT_THROW(accuracy(std::vector<int>{}), DomainError);
}

TEST(TrialCi, Examples) {
  std::vector<double> flat(5, 0.6);
  auto ci = trial_ci(flat);
  EXPECT_DOUBLE_EQ(ci.mean, 0.6);
  EXPECT_EQ(ci.half_width, 0.0);
  EXPECT_EQ(ci.n_trials, 5u);
  EXPECT_DOUBLE_EQ(ci.level, 0.95);

  std::vector<double> v = {1, 1, 1, 1, 0};
  auto t = trial_ci(v, CiMethod::StudentT);
  EXPECT_DOUBLE_EQ(t.mean, 0.8);
  EXPECT_NEAR(t.half_width, 0.5552, 1e-4);  // 2.776 x 0.4472 / sqrt(5), rounded inputs
  // Hand computation: t(0.975, 4) = 2.776445, s = sqrt(0.2).
  EXPECT_NEAR(t.half_width, 2.7764451051977987 * std::sqrt(0.2) / std::sqrt(5.0), 1e-12);

  auto n = trial_ci(v, CiMethod::Normal);
  EXPECT_NEAR(n.half_width, 0.392, 5e-4);
  EXPECT_DOUBLE_EQ(n.half_width, 1.96 * std::sqrt(0.2) / std::sqrt(5.0));
  EXPECT_EQ(n.method, CiMethod::Normal);

  EXPECT_THROW(trial_ci(std::vector<double>{0.5}), DomainError);
}

TEST(TrialCi, ShiftAndScaleEquivariance) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(2 + rng() % 8);
    for (auto& x : v) x = u(rng);
    const double shift = u(rng) * 10 - 5;
    const double scale = 0.1 + u(rng) * 5;
    std::vector<double> shifted, scaled;
    for (double x : v) {
      shifted.push_back(x + shift);
      scaled.push_back(x * scale);
    }
    for (auto method : {CiMethod::StudentT, CiMethod::Normal}) {
      auto base = trial_ci(v, method);
      auto s = trial_ci(shifted, method);
      auto c = trial_ci(scaled, method);
      EXPECT_NEAR(s.mean, base.mean + shift, 1e-9);
      EXPECT_NEAR(s.half_width, base.half_width, 1e-9);
      EXPECT_NEAR(c.mean, base.mean * scale, 1e-9);
      EXPECT_NEAR(c.half_width, base.half_width * scale, 1e-9);
    }
  }
}

TEST(Correlation, Examples) {
  std::vector<double> xs = {1, 2, 3, 4, 5};
  std::vector<double> up = {2, 4, 8, 16, 32};
  std::vector<double> down = {9, 7, 5, 3, 1};
  EXPECT_DOUBLE_EQ(spearman(xs, up), 1.0);
  EXPECT_DOUBLE_EQ(spearman(xs, down), -1.0);

  std::vector<double> lin, neg;
  for (double x : xs) {
    lin.push_back(2 * x + 3);
    neg.push_back(-x);
  }
  EXPECT_NEAR(pearson(xs, lin), 1.0, 1e-12);
  EXPECT_NEAR(pearson(xs, neg), -1.0, 1e-12);
}

TEST(Correlation, Errors) {
  std::vector<double> three = {1, 2, 3};
  std::vector<double> two = {1, 2};
  std::vector<double> flat = {4, 4, 4};
  EXPECT_THROW(spearman(three, std::vector<double>{1, 2, 3, 4}), ArgumentError);
  EXPECT_THROW(spearman(two, two), ArgumentError);
  EXPECT_THROW(spearman(three, flat), DomainError);
  EXPECT_THROW(pearson(flat, three), DomainError);
}

TEST(Correlation, AverageRanks) {
  std::vector<double> v = {0.231, 0.846, 1.0, 0.538, 0.384, 0.231, 0.231, 0.077};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{3, 7, 8, 6, 5, 3, 3, 1}));
}

TEST(Correlation, SpearmanOnFixtureCoordinates) {
  // (dataset order: AGNews, DBpedia, YahooAnswers, 20News, Ohsumed, R8, R52, SogouNews)
  std::vector<double> bpc = {3.03, 2.84, 3.31, 3.31, 2.60, 2.38, 2.43, 2.13};
  std::vector<double> vocab = {128349, 1031601, 1554607, 227330, 55142, 23584, 26283, 610908};
  std::vector<double> rank = {0.231, 0.846, 1.0, 0.538, 0.384, 0.231, 0.231, 0.077};
  // Average-rank reference values computed independently with scipy.stats.spearmanr.
  EXPECT_NEAR(spearman(bpc, rank), 0.7854091099, 1e-9);
  EXPECT_NEAR(spearman(vocab, rank), 0.5611425419, 1e-9);
}

TEST(Correlation, SpearmanMonotoneInvariance) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 3 + rng() % 10;
    std::vector<double> xs(n), ys(n);
    for (auto& x : xs) x = std::round(u(rng));
    for (auto& y : ys) y = u(rng);
    if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs[0]; })) continue;
    std::vector<double> tx, ty;
    for (double x : xs) tx.push_back(std::exp(x) + 3.0);
    for (double y : ys) ty.push_back(1.0 / y);
    EXPECT_NEAR(spearman(tx, ys), spearman(xs, ys), 1e-12);
    EXPECT_NEAR(spearman(xs, ty), -spearman(xs, ys), 1e-12);
  }
}

TEST(NormalizedRank, Examples) {
  std::vector<double> accs;
  for (int i = 0; i < 13; ++i) accs.push_back(0.5 + 0.01 * i);
  EXPECT_NEAR(normalized_rank_percentage(accs.back(), accs), 0.077, 5e-4);
  EXPECT_DOUBLE_EQ(normalized_rank_percentage(accs.back(), accs), 1.0 / 13.0);
  EXPECT_NEAR(normalized_rank_percentage(accs[10], accs), 0.231, 5e-4);
  EXPECT_DOUBLE_EQ(normalized_rank_percentage(accs.front(), accs), 1.0);
  EXPECT_THROW(normalized_rank_percentage(0.01, accs), ArgumentError);
}

TEST(NormalizedRank, TiesTakeBestRankAndMonotoneInvariance) {
  std::vector<double> accs = {0.9, 0.8, 0.9, 0.7};
  EXPECT_DOUBLE_EQ(normalized_rank_percentage(0.9, accs), 0.25);
  EXPECT_DOUBLE_EQ(normalized_rank_percentage(0.8, accs), 0.75);
  std::vector<double> squared;
  for (double a : accs) squared.push_back(a * a * a);
  for (double a : accs) EXPECT_DOUBLE_EQ(normalized_rank_percentage(a * a * a, squared), normalized_rank_percentage(a, accs));
}

TEST(Bpc, IdentityIsEightForAscii) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::string> texts;
    for (std::size_t i = 0, n = 1 + rng() % 20; i < n; ++i) texts.push_back(testing::random_text(rng, 1 + rng() % 80, "abc xyz"));
    EXPECT_EQ(bpc(CompressorBackend::from_name("identity"), corpus_of(texts), 5, rng()), 8.0);
  }
}

TEST(Bpc, IdentityIsEightTimesBytesPerChar) {
  auto c = corpus_of({"\xC3\xA9\xC3\xA9", "ab"});
  EXPECT_DOUBLE_EQ(bpc(CompressorBackend::from_name("identity"), c, 10, 0), 8.0 * 6.0 / 4.0);
}

TEST(Bpc, GzipRepetitiveBelowOne) {
  auto c = corpus_of({std::string(1000, 'a')});
  const double v = bpc(CompressorBackend::from_name("gzip"), c, 1000, 0);
  EXPECT_LT(v, 1.0);
  EXPECT_DOUBLE_EQ(v, 8.0 * 29.0 / 1000.0);
  EXPECT_THROW(bpc(CompressorBackend::from_name("gzip"), LabeledCorpus{}, 10, 0), DataError);
}

TEST(Bpc, DeterministicPerSeedAndSplitPooling) {
  std::mt19937_64 rng(21);
  std::vector<std::string> a, b;
  for (int i = 0; i < 40; ++i) a.push_back(testing::random_text(rng, 30 + rng() % 50, "etaoin shrdlu"));
  for (int i = 0; i < 40; ++i) b.push_back(testing::random_text(rng, 30 + rng() % 50, "etaoin shrdlu"));
  auto gzip = CompressorBackend::from_name("gzip");
  auto train = corpus_of(a), test = corpus_of(b);
  EXPECT_EQ(bpc(gzip, train, 10, 3), bpc(gzip, train, 10, 3));
  auto split = bpc_split(gzip, train, &test, 1000, 0);
  EXPECT_DOUBLE_EQ(split.train, bpc(gzip, train, 1000, 0));
  EXPECT_DOUBLE_EQ(split.test, bpc(gzip, test, 1000, 0));
  EXPECT_GT(split.pooled, std::min(split.train, split.test) - 1e-12);
  EXPECT_LT(split.pooled, std::max(split.train, split.test) + 1e-12);
  EXPECT_GT(split.compression_ratio, 0.0);

  auto id = bpc_split(CompressorBackend::from_name("identity"), train, &test, 10, 4);
  EXPECT_EQ(id.pooled, 8.0);
  EXPECT_EQ(id.compression_ratio, 1.0);
}

}  // namespace
}  // namespace ncd
