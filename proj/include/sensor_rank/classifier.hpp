#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "sensor_rank/features.hpp"
#include "sensor_rank/labels.hpp"

namespace sensor_rank {

using ClassCounts = std::array<std::size_t, kNumLabels>;
using ClassProbs = std::array<double, kNumLabels>;

struct LabeledDataset {
  std::vector<FeatureVector> vectors;
  std::vector<Label> labels;
  std::size_t n_features = 0;

  std::size_t size() const { return vectors.size(); }
  ClassCounts class_counts() const;
  void push_back(FeatureVector v, Label l);
  LabeledDataset subset(std::span<const std::size_t> indices) const;
  // Concatenation; n_features becomes the max of both.
  void append(const LabeledDataset& other);
};

struct Prediction {
  Label label = Label::Relevant;
  ClassProbs probabilities{};

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

// Index of the largest probability; ties go to the earliest label.
Label argmax_label(const ClassProbs& p);

// Multinomial naive Bayes with Lidstone smoothing.
struct MnnbModel {
  ClassProbs class_log_prior{};
  // Row-major [label][term], vocab_size columns.
  std::vector<double> term_log_prob;
  double alpha = 1.0;
  std::size_t vocab_size = 0;

  double log_prob(Label l, TermId t) const {
    return term_log_prob[index_of(l) * vocab_size + t];
  }
};

MnnbModel train_mnnb(const LabeledDataset& data, double alpha = 1.0);
Prediction predict(const MnnbModel& model, const FeatureVector& v);

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double threshold = 0.0;  // value <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  ClassProbs distribution{};  // leaves only

  bool is_leaf() const { return feature == kLeaf; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const ClassProbs& leaf_for(const FeatureVector& v) const;
  std::size_t depth() const;
  friend bool operator==(const DecisionTree& a, const DecisionTree& b);
};

struct RfModel {
  std::vector<DecisionTree> trees;
  std::size_t n_features = 0;
  std::size_t feature_subsample = 1;
  std::uint64_t seed = 0;
};

// Bootstrap-bagged Gini trees grown to purity. Trees are trained in parallel;
// tree t draws only from Rng::derive(seed, t), so the result does not depend
// on the thread count.
RfModel train_rf(const LabeledDataset& data, int n_trees, std::uint64_t seed);
// Same ensemble, one tree after another. Reference for the parallel path.
RfModel train_rf_serial(const LabeledDataset& data, int n_trees, std::uint64_t seed);
// Candidate features per node: ceil(sqrt(n_features)), at least 1.
std::size_t default_feature_subsample(std::size_t n_features);

Prediction predict(const RfModel& model, const FeatureVector& v);

using Model = std::variant<MnnbModel, RfModel>;

Prediction predict(const Model& model, const FeatureVector& v);
std::vector<Prediction> predict_batch(const Model& model,
                                      std::span<const FeatureVector> vectors);

}  // namespace sensor_rank
