#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sensor_rank/classifier.hpp"
#include "sensor_rank/error.hpp"
#include "sensor_rank/evaluation.hpp"
#include "sensor_rank/resampling.hpp"
#include "sensor_rank/synthlab.hpp"
#include "support/generators.hpp"

using namespace sensor_rank;

namespace {

FeatureVector fv(std::vector<FeatureEntry> e) { return FeatureVector::from_pairs(std::move(e)); }

// {a a}/Relevant, {b}/News, {a b}/Noise twice.
LabeledDataset toy() {
  LabeledDataset d;
  d.n_features = 2;
  d.push_back(fv({{0, 2}}), Label::Relevant);
  d.push_back(fv({{1, 1}}), Label::News);
  d.push_back(fv({{0, 1}, {1, 1}}), Label::Noise);
  d.push_back(fv({{0, 1}, {1, 1}}), Label::Noise);
  return d;
}

LabeledDataset with_counts(std::size_t relevant, std::size_t news, std::size_t noise) {
  LabeledDataset d;
  d.n_features = 1;
  const std::array<std::size_t, 3> counts{relevant, news, noise};
  for (auto l : kAllLabels) {
    for (std::size_t i = 0; i < counts[index_of(l)]; ++i) {
      d.push_back(fv({{0, static_cast<double>(i + 1)}}), l);
    }
  }
  return d;
}

// Brute-force k nearest neighbours of points[i], ties by index.
std::vector<std::size_t> brute_knn(std::span<const FeatureVector> points, std::size_t i,
                                   std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (j == i) continue;
    double s = 0.0;
    for (TermId t = 0; t < 64; ++t) {
      const double diff = points[i].value(t) - points[j].value(t);
      s += diff * diff;
    }
    d.emplace_back(s, j);
  }
  std::sort(d.begin(), d.end());
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < k; ++n) out.push_back(d[n].second);
  return out;
}

double entropy_bits(const std::array<double, 3>& c) {
  const double n = c[0] + c[1] + c[2];
  double h = 0.0;
  for (double x : c) {
    if (x > 0) h -= x / n * std::log2(x / n);
  }
  return h;
}

}  // namespace

TEST(Mnnb, ToyPosteriorByHand) {
  const auto model = train_mnnb(toy(), 1.0);
  const auto p = predict(model, fv({{0, 1}}));
  EXPECT_NEAR(p.probabilities[0], 0.36, 1e-12);
  EXPECT_NEAR(p.probabilities[1], 0.16, 1e-12);
  EXPECT_NEAR(p.probabilities[2], 0.48, 1e-12);
  EXPECT_EQ(p.label, Label::Noise);
}

TEST(Mnnb, MatchesRationalOracle) {
  const auto data = toy();
  Rng rng(5);
  for (double alpha : {1.0, 0.5, 2.0}) {
    const auto model = train_mnnb(data, alpha);
    for (int trial = 0; trial < 50; ++trial) {
      const auto q = fv({{0, static_cast<double>(rng.between(0, 4))},
                         {1, static_cast<double>(rng.between(0, 4))}});
      const auto got = predict(model, q).probabilities;
      const auto want = oracle_nb_posterior(data, alpha, q);
      for (std::size_t c = 0; c < kNumLabels; ++c) EXPECT_NEAR(got[c], want[c], 1e-12);
    }
  }
}

TEST(Mnnb, MatchesRationalOracleOnRandomData) {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto data = gen::random_dataset(rng, 30, 12, 4, 0.7);
    if (std::ranges::any_of(data.class_counts(), [](auto c) { return c == 0; })) continue;
    const auto model = train_mnnb(data, 1.0);
    for (std::size_t i = 0; i < data.size(); i += 7) {
      const auto got = predict(model, data.vectors[i]).probabilities;
      const auto want = oracle_nb_posterior(data, 1.0, data.vectors[i]);
      for (std::size_t c = 0; c < kNumLabels; ++c) EXPECT_NEAR(got[c], want[c], 1e-12);
    }
  }
}

TEST(Mnnb, IgnoresUnknownTermsAndValidates) {
  const auto model = train_mnnb(toy(), 1.0);
  EXPECT_EQ(predict(model, fv({{0, 1}, {99, 5}})).probabilities,
            predict(model, fv({{0, 1}})).probabilities);
  EXPECT_THROW(train_mnnb(toy(), 0.0), Error);
  EXPECT_THROW(train_mnnb(LabeledDataset{}, 1.0), Error);
  auto missing = toy();
  missing.labels[1] = Label::Relevant;
  EXPECT_THROW(train_mnnb(missing, 1.0), Error);
}

TEST(Argmax, TiesGoToEarliestLabel) {
  EXPECT_EQ(argmax_label({1.0 / 3, 1.0 / 3, 1.0 / 3}), Label::Relevant);
  EXPECT_EQ(argmax_label({0.2, 0.4, 0.4}), Label::News);
  EXPECT_EQ(argmax_label({0.1, 0.2, 0.7}), Label::Noise);
}

TEST(RandomForest, ParallelMatchesSerial) {
  Rng rng(21);
  const auto data = gen::random_dataset(rng, 300, 90, 8);
  const auto par = train_rf(data, 12, 77);
  const auto ser = train_rf_serial(data, 12, 77);
  ASSERT_EQ(par.trees.size(), ser.trees.size());
  for (std::size_t t = 0; t < par.trees.size(); ++t) EXPECT_TRUE(par.trees[t] == ser.trees[t]);
  EXPECT_EQ(par.feature_subsample, default_feature_subsample(90));
}

TEST(RandomForest, SeedControlsTheEnsemble) {
  Rng rng(22);
  const auto data = gen::random_dataset(rng, 200, 60, 6);
  const auto a = train_rf(data, 5, 1);
  const auto b = train_rf(data, 5, 1);
  const auto c = train_rf(data, 5, 2);
  for (std::size_t t = 0; t < 5; ++t) EXPECT_TRUE(a.trees[t] == b.trees[t]);
  bool differs = false;
  for (std::size_t t = 0; t < 5; ++t) differs |= !(a.trees[t] == c.trees[t]);
  EXPECT_TRUE(differs);
}

TEST(RandomForest, FitsSeparableDataAndEmitsDistributions) {
  Rng rng(23);
  const auto data = gen::random_dataset(rng, 400, 90, 8, 0.9);
  const Model model = train_rf(data, 20, 4);
  const auto preds = predict_batch(model, data.vectors);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& p = preds[i].probabilities;
    EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-12);
    for (double x : p) EXPECT_GE(x, 0.0);
    correct += preds[i].label == data.labels[i];
  }
  EXPECT_GT(static_cast<double>(correct) / preds.size(), 0.95);
}

TEST(RandomForest, RejectsBadInput) {
  EXPECT_THROW(train_rf(toy(), 0, 1), Error);
  EXPECT_THROW(train_rf(LabeledDataset{}, 3, 1), Error);
  EXPECT_EQ(default_feature_subsample(0), 1u);
  EXPECT_EQ(default_feature_subsample(10), 4u);
  EXPECT_EQ(default_feature_subsample(16), 4u);
}

TEST(Smote, CountContract) {
  Rng rng(31);
  const auto data = gen::random_dataset(rng, 200, 30, 5);
  for (int percent : {0, 100, 200, 300}) {
    EXPECT_EQ(smote(data.vectors, percent, 5, 1).size(),
              data.size() * static_cast<std::size_t>(percent) / 100);
  }
  EXPECT_THROW(smote(data.vectors, 150, 5, 1), Error);
  EXPECT_THROW(smote(data.vectors, -100, 5, 1), Error);
  EXPECT_THROW(smote(std::span(data.vectors).first(5), 100, 5, 1), Error);
  EXPECT_THROW(smote(data.vectors, 100, 0, 1), Error);
}

TEST(Smote, SyntheticsLieOnSegmentsToTrueNeighbours) {
  Rng rng(32);
  const auto data = gen::random_dataset(rng, 120, 64, 6);
  const auto samples = smote_samples(data.vectors, 200, 5, 8);
  ASSERT_EQ(samples.size(), 240u);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& x = samples[s];
    EXPECT_EQ(x.source, s / 2);
    EXPECT_GE(x.lambda, 0.0);
    EXPECT_LT(x.lambda, 1.0);
    const auto knn = brute_knn(data.vectors, x.source, 5);
    EXPECT_NE(std::find(knn.begin(), knn.end(), x.neighbor), knn.end());
    const auto& a = data.vectors[x.source];
    const auto& b = data.vectors[x.neighbor];
    for (TermId t = 0; t < 64; ++t) {
      const double lo = std::min(a.value(t), b.value(t));
      const double hi = std::max(a.value(t), b.value(t));
      const double v = x.vector.value(t);
      EXPECT_NEAR(v, a.value(t) + x.lambda * (b.value(t) - a.value(t)), 1e-12);
      EXPECT_GE(v, lo);
      EXPECT_LE(v, hi);
    }
  }
}

TEST(NearestNeighbors, ParallelMatchesSerialAndBruteForce) {
  Rng rng(33);
  const auto data = gen::random_dataset(rng, 150, 64, 5);
  const auto par = nearest_neighbors(data.vectors, 5);
  EXPECT_EQ(par, nearest_neighbors_serial(data.vectors, 5));
  for (std::size_t i = 0; i < data.size(); ++i) EXPECT_EQ(par[i], brute_knn(data.vectors, i, 5));
}

TEST(Spread, CapsMajorityClasses) {
  const auto a = subsample_spread(with_counts(10, 100, 50), 1.0, 3);
  EXPECT_EQ(a.class_counts(), (ClassCounts{10, 10, 10}));
  const auto b = subsample_spread(with_counts(121, 506, 373), 2.0, 3);
  EXPECT_EQ(b.class_counts(), (ClassCounts{121, 242, 242}));
}

TEST(Spread, SurvivorsKeepOrder) {
  const auto data = with_counts(20, 200, 90);
  const auto out = subsample_spread(data, 1.5, 9);
  ClassCounts last{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto v = out.vectors[i].value(0);
    auto& prev = last[index_of(out.labels[i])];
    EXPECT_GT(v, static_cast<double>(prev));
    prev = static_cast<std::size_t>(v);
  }
  EXPECT_EQ(out.class_counts(), (ClassCounts{20, 30, 30}));
}

TEST(InfoGain, SeparatingTermGetsFullEntropy) {
  LabeledDataset d;
  d.n_features = 3;
  for (int i = 0; i < 50; ++i) {
    d.push_back(fv({{0, 1}, {1, 1}}), Label::Relevant);
    d.push_back(fv({{1, 1}}), Label::News);
  }
  const auto ranked = info_gain_rank(d);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].first, 0u);
  EXPECT_NEAR(ranked[0].second, 1.0, 1e-12);
  EXPECT_NEAR(ranked[1].second, 0.0, 1e-12);
  EXPECT_EQ(ranked[1].first, 1u);
  EXPECT_EQ(ranked[2].first, 2u);
}

TEST(InfoGain, MatchesDirectEnumeration) {
  Rng rng(34);
  const auto data = gen::random_dataset(rng, 200, 30, 4, 0.6);
  std::array<double, 3> all{};
  for (auto l : data.labels) all[index_of(l)] += 1;
  for (const auto& [id, gain] : info_gain_rank(data)) {
    std::array<double, 3> with{}, without{};
    for (std::size_t i = 0; i < data.size(); ++i) {
      (data.vectors[i].value(id) > 0 ? with : without)[index_of(data.labels[i])] += 1;
    }
    const double nw = with[0] + with[1] + with[2];
    const double no = without[0] + without[1] + without[2];
    const double n = nw + no;
    double cond = 0.0;
    if (nw > 0) cond += nw / n * entropy_bits(with);
    if (no > 0) cond += no / n * entropy_bits(without);
    EXPECT_NEAR(gain, entropy_bits(all) - cond, 1e-12) << "term " << id;
  }
}

TEST(Evaluate, UniformProbabilities) {
  std::vector<Prediction> preds(6, Prediction{Label::Relevant, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
  const std::vector<Label> truth = {Label::Relevant, Label::Relevant, Label::News,
                                    Label::News,     Label::Noise,    Label::Noise};
  const auto r = evaluate(preds, truth);
  EXPECT_NEAR(r.rmse, std::sqrt(6.0 / 27.0), 1e-12);
  EXPECT_NEAR(r.accuracy, 1.0 / 3.0, 1e-12);
  EXPECT_EQ(r.confusion[1][0], 2u);
  EXPECT_NEAR(r.per_class[0].precision, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.per_class[0].recall, 1.0, 1e-12);
  EXPECT_NEAR(r.per_class[0].f_measure, 0.5, 1e-12);
  EXPECT_NEAR(r.weighted_f, 0.5 / 3.0, 1e-12);
}

TEST(CrossValidation, HeldOutPredictionsAndStratification) {
  Rng rng(35);
  const auto data = gen::random_dataset(rng, 300, 90, 8, 0.85);
  TrainingConfig cfg;
  cfg.kind = ClassifierKind::Mnnb;
  cfg.smote_percent = 100;
  const auto preds = cross_validate_predictions(data, 10, cfg, 4);
  ASSERT_EQ(preds.size(), data.size());
  EXPECT_EQ(preds, cross_validate_predictions(data, 10, cfg, 4));
  EXPECT_GT(cross_validate(data, 10, cfg, 4).accuracy, 0.85);

  auto tiny = with_counts(3, 20, 20);
  EXPECT_THROW(cross_validate(tiny, 10, cfg, 1), Error);
  EXPECT_THROW(cross_validate(data, 1, cfg, 1), Error);
}

TEST(Rebalance, SmoteThenSpread) {
  const auto data = with_counts(20, 90, 60);
  TrainingConfig cfg;
  cfg.smote_percent = 100;
  cfg.smote_k = 3;
  cfg.spread_ratio = 2.0;
  const auto out = rebalance(data, cfg, 5);
  EXPECT_EQ(out.class_counts(), (ClassCounts{40, 80, 60}));
}
