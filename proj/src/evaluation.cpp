#include "sensor_rank/evaluation.hpp"

#include <cmath>

#include <fmt/core.h>

#include "sensor_rank/error.hpp"
#include "sensor_rank/random.hpp"
#include "sensor_rank/resampling.hpp"

namespace sensor_rank {

EvalReport evaluate(std::span<const Prediction> predictions,
                    std::span<const Label> truth) {
  if (predictions.size() != truth.size()) {
    throw Error(fmt::format("evaluate: {} predictions for {} labels",
                            predictions.size(), truth.size()));
  }
  if (truth.empty()) throw Error("evaluate: no predictions");

  EvalReport r;
  r.n = truth.size();
  double sq = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto t = index_of(truth[i]);
    ++r.confusion[t][index_of(predictions[i].label)];
    for (std::size_t c = 0; c < kNumLabels; ++c) {
      const double diff = predictions[i].probabilities[c] - (c == t ? 1.0 : 0.0);
      sq += diff * diff;
    }
  }
  const double n = static_cast<double>(r.n);
  r.rmse = std::sqrt(sq / (n * static_cast<double>(kNumLabels)));

  std::size_t correct = 0;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    correct += r.confusion[c][c];
    std::size_t support = 0, predicted = 0;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      support += r.confusion[c][k];
      predicted += r.confusion[k][c];
    }
    auto& m = r.per_class[c];
    m.support = support;
    const double tp = static_cast<double>(r.confusion[c][c]);
    m.precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
    m.recall = support ? tp / static_cast<double>(support) : 0.0;
    m.f_measure = (m.precision + m.recall) > 0.0
                      ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                      : 0.0;
    r.weighted_f += static_cast<double>(support) / n * m.f_measure;
  }
  r.accuracy = static_cast<double>(correct) / n;
  return r;
}

std::string_view to_string(ClassifierKind k) {
  return k == ClassifierKind::Mnnb ? "mnnb" : "rf";
}

ClassifierKind parse_classifier_kind(std::string_view s) {
  if (s == "mnnb") return ClassifierKind::Mnnb;
  if (s == "rf") return ClassifierKind::Rf;
  throw Error(fmt::format("unknown classifier '{}' (expected mnnb or rf)", s));
}

LabeledDataset rebalance(const LabeledDataset& data, const TrainingConfig& config,
                         std::uint64_t seed) {
  LabeledDataset out = data;
  if (config.smote_percent > 0) {
    std::vector<FeatureVector> relevant;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.labels[i] == Label::Relevant) relevant.push_back(data.vectors[i]);
    }
    for (auto& v : smote(relevant, config.smote_percent, config.smote_k,
                         Rng::splitmix64(seed ^ 0x51))) {
      out.push_back(std::move(v), Label::Relevant);
    }
  }
  if (config.spread_ratio > 0.0) {
    out = subsample_spread(out, config.spread_ratio, Rng::splitmix64(seed ^ 0x52));
  }
  return out;
}

Model train_model(const LabeledDataset& data, const TrainingConfig& config,
                  std::uint64_t seed) {
  const auto balanced = rebalance(data, config, seed);
  if (config.kind == ClassifierKind::Mnnb) return train_mnnb(balanced, config.alpha);
  return train_rf(balanced, config.n_trees, Rng::splitmix64(seed ^ 0x53));
}

std::vector<Prediction> cross_validate_predictions(const LabeledDataset& data,
                                                   int folds,
                                                   const TrainingConfig& config,
                                                   std::uint64_t seed) {
  if (folds < 2) throw Error("cross_validate: folds must be at least 2");
  const auto counts = data.class_counts();
  for (auto l : kAllLabels) {
    if (counts[index_of(l)] < static_cast<std::size_t>(folds)) {
      throw Error(fmt::format(
          "cross_validate: class '{}' has {} instances, fewer than {} folds",
          to_string(l), counts[index_of(l)], folds));
    }
  }

  std::vector<int> fold_of(data.size());
  Rng rng(seed);
  for (auto l : kAllLabels) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.labels[i] == l) members.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t r = 0; r < members.size(); ++r) {
      fold_of[members[r]] = static_cast<int>(r % static_cast<std::size_t>(folds));
    }
  }

  std::vector<Prediction> out(data.size());
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (fold_of[i] == f ? test_idx : train_idx).push_back(i);
    }
    const auto model = train_model(data.subset(train_idx), config,
                                   Rng::derive(seed, static_cast<std::uint64_t>(f)).next());
    std::vector<FeatureVector> test;
    test.reserve(test_idx.size());
    for (auto i : test_idx) test.push_back(data.vectors[i]);
    const auto preds = predict_batch(model, test);
    for (std::size_t r = 0; r < test_idx.size(); ++r) out[test_idx[r]] = preds[r];
  }
  return out;
}

EvalReport cross_validate(const LabeledDataset& data, int folds,
                          const TrainingConfig& config, std::uint64_t seed) {
  const auto preds = cross_validate_predictions(data, folds, config, seed);
  return evaluate(preds, data.labels);
}

}  // namespace sensor_rank
