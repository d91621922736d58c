#include "sensor_rank/classifier.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "sensor_rank/error.hpp"

namespace sensor_rank {

ClassCounts LabeledDataset::class_counts() const {
  ClassCounts counts{};
  for (auto l : labels) ++counts[index_of(l)];
  return counts;
}

void LabeledDataset::push_back(FeatureVector v, Label l) {
  vectors.push_back(std::move(v));
  labels.push_back(l);
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.n_features = n_features;
  out.vectors.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (auto i : indices) out.push_back(vectors.at(i), labels.at(i));
  return out;
}

void LabeledDataset::append(const LabeledDataset& other) {
  vectors.insert(vectors.end(), other.vectors.begin(), other.vectors.end());
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
  n_features = std::max(n_features, other.n_features);
}

Label argmax_label(const ClassProbs& p) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumLabels; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return kAllLabels[best];
}

MnnbModel train_mnnb(const LabeledDataset& data, double alpha) {
  if (data.size() == 0) throw Error("train_mnnb: empty dataset");
  if (data.labels.size() != data.vectors.size()) {
    throw Error("train_mnnb: vectors and labels differ in length");
  }
  if (!(alpha > 0.0)) throw Error("train_mnnb: alpha must be positive");
  const auto counts = data.class_counts();
  for (auto l : kAllLabels) {
    if (counts[index_of(l)] == 0) {
      throw Error(fmt::format("train_mnnb: class '{}' has no instances", to_string(l)));
    }
  }

  MnnbModel m;
  m.alpha = alpha;
  m.vocab_size = data.n_features;
  const auto V = m.vocab_size;
  std::vector<double> term_count(kNumLabels * V, 0.0);
  ClassProbs total{};
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto c = index_of(data.labels[i]);
    for (const auto& e : data.vectors[i].entries()) {
      if (e.id >= V) throw Error("train_mnnb: feature id outside the vocabulary");
      term_count[c * V + e.id] += e.value;
      total[c] += e.value;
    }
  }

  const double n = static_cast<double>(data.size());
  m.term_log_prob.resize(kNumLabels * V);
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    m.class_log_prior[c] = std::log(static_cast<double>(counts[c]) / n);
    const double denom = total[c] + alpha * static_cast<double>(V);
    for (std::size_t t = 0; t < V; ++t) {
      m.term_log_prob[c * V + t] = std::log((term_count[c * V + t] + alpha) / denom);
    }
  }
  return m;
}

Prediction predict(const MnnbModel& model, const FeatureVector& v) {
  ClassProbs score = model.class_log_prior;
  for (const auto& e : v.entries()) {
    if (e.id >= model.vocab_size) continue;
    for (auto l : kAllLabels) score[index_of(l)] += e.value * model.log_prob(l, e.id);
  }
  const double top = *std::max_element(score.begin(), score.end());
  Prediction p;
  double z = 0.0;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    p.probabilities[c] = std::exp(score[c] - top);
    z += p.probabilities[c];
  }
  for (auto& x : p.probabilities) x /= z;
  // Decide on log scores so that ties follow label order exactly.
  p.label = argmax_label(score);
  return p;
}

const ClassProbs& DecisionTree::leaf_for(const FeatureVector& v) const {
  std::int32_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = v.value(static_cast<TermId>(n.feature)) <= n.threshold ? n.left : n.right;
  }
  return nodes[i].distribution;
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 1}};
  std::size_t best = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (!nodes[i].is_leaf()) {
      stack.emplace_back(nodes[i].left, d + 1);
      stack.emplace_back(nodes[i].right, d + 1);
    }
  }
  return best;
}

bool operator==(const DecisionTree& a, const DecisionTree& b) {
  return std::equal(a.nodes.begin(), a.nodes.end(), b.nodes.begin(), b.nodes.end(),
                    [](const TreeNode& x, const TreeNode& y) {
                      return x.feature == y.feature && x.threshold == y.threshold &&
                             x.left == y.left && x.right == y.right &&
                             x.distribution == y.distribution;
                    });
}

Prediction predict(const RfModel& model, const FeatureVector& v) {
  // Trees on sparse text run hundreds of levels deep; a dense scatter makes
  // each node test a single load. The buffer is all zeros between calls.
  thread_local std::vector<double> dense;
  if (dense.size() < model.n_features) dense.assign(model.n_features, 0.0);
  for (const auto& e : v.entries()) {
    if (e.id < model.n_features) dense[e.id] = e.value;
  }
  Prediction p;
  for (const auto& tree : model.trees) {
    std::int32_t i = 0;
    while (!tree.nodes[i].is_leaf()) {
      const auto& n = tree.nodes[i];
      i = dense[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    const auto& dist = tree.nodes[i].distribution;
    for (std::size_t c = 0; c < kNumLabels; ++c) p.probabilities[c] += dist[c];
  }
  for (const auto& e : v.entries()) {
    if (e.id < model.n_features) dense[e.id] = 0.0;
  }
  const double n = static_cast<double>(model.trees.size());
  for (auto& x : p.probabilities) x /= n;
  p.label = argmax_label(p.probabilities);
  return p;
}

Prediction predict(const Model& model, const FeatureVector& v) {
  return std::visit([&](const auto& m) { return predict(m, v); }, model);
}

std::vector<Prediction> predict_batch(const Model& model,
                                      std::span<const FeatureVector> vectors) {
  std::vector<Prediction> out(vectors.size());
  const auto n = static_cast<std::int64_t>(vectors.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = predict(model, vectors[i]);
  return out;
}

}  // namespace sensor_rank
