#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sensor_rank/classifier.hpp"

namespace sensor_rank {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  double accuracy = 0.0;
  std::array<ClassMetrics, kNumLabels> per_class{};
  double weighted_f = 0.0;
  // Over per-class probability vectors against one-hot truth, divisor N*3.
  double rmse = 0.0;
  // confusion[truth][predicted]
  std::array<std::array<std::size_t, kNumLabels>, kNumLabels> confusion{};
  std::size_t n = 0;
};

EvalReport evaluate(std::span<const Prediction> predictions,
                    std::span<const Label> truth);

enum class ClassifierKind { Mnnb, Rf };

std::string_view to_string(ClassifierKind k);
ClassifierKind parse_classifier_kind(std::string_view s);

struct TrainingConfig {
  ClassifierKind kind = ClassifierKind::Rf;
  double alpha = 1.0;
  int n_trees = 100;
  int smote_percent = 100;  // applied to the Relevant class; 0 disables
  int smote_k = 5;
  double spread_ratio = 0.0;  // 0 disables spread sub-sampling
};

// SMOTE on Relevant, then spread sub-sampling, per config.
LabeledDataset rebalance(const LabeledDataset& data, const TrainingConfig& config,
                         std::uint64_t seed);

// rebalance + fit.
Model train_model(const LabeledDataset& data, const TrainingConfig& config,
                  std::uint64_t seed);

// Stratified k-fold. Rebalancing is applied to training folds only. Returns
// one held-out prediction per instance, in dataset order.
std::vector<Prediction> cross_validate_predictions(const LabeledDataset& data,
                                                   int folds,
                                                   const TrainingConfig& config,
                                                   std::uint64_t seed);
EvalReport cross_validate(const LabeledDataset& data, int folds,
                          const TrainingConfig& config, std::uint64_t seed);

}  // namespace sensor_rank
