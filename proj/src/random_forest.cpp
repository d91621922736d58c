#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "sensor_rank/classifier.hpp"
#include "sensor_rank/error.hpp"
#include "sensor_rank/random.hpp"

namespace sensor_rank {
namespace {

// Column-major copy of the dataset: for each feature, the (doc, value) pairs
// with a nonzero value, docs ascending.
struct ColumnIndex {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> docs;
  std::vector<double> values;

  explicit ColumnIndex(const LabeledDataset& data) {
    offsets.assign(data.n_features + 1, 0);
    for (const auto& v : data.vectors) {
      for (const auto& e : v.entries()) ++offsets[e.id + 1];
    }
    for (std::size_t f = 0; f < data.n_features; ++f) offsets[f + 1] += offsets[f];
    docs.resize(offsets.back());
    values.resize(offsets.back());
    auto cursor = offsets;
    for (std::uint32_t d = 0; d < data.vectors.size(); ++d) {
      for (const auto& e : data.vectors[d].entries()) {
        const auto at = cursor[e.id]++;
        docs[at] = d;
        values[at] = e.value;
      }
    }
  }
};

double gini(const ClassProbs& w, double total) {
  if (total <= 0.0) return 0.0;
  double s = 1.0;
  for (double x : w) s -= (x / total) * (x / total);
  return s;
}

double sum(const ClassProbs& w) { return w[0] + w[1] + w[2]; }

struct Split {
  std::int32_t feature = TreeNode::kLeaf;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const LabeledDataset& data, const ColumnIndex& columns,
              std::size_t mtry, Rng rng)
      : data_(data),
        columns_(columns),
        mtry_(mtry),
        rng_(rng),
        weight_(data.size(), 0.0),
        doc_stamp_(data.size(), 0),
        feature_stamp_(data.n_features, 0) {}

  DecisionTree build() {
    const auto n = data_.size();
    for (std::size_t i = 0; i < n; ++i) weight_[rng_.below(n)] += 1.0;
    std::vector<std::uint32_t> root;
    for (std::uint32_t d = 0; d < n; ++d) {
      if (weight_[d] > 0.0) root.push_back(d);
    }

    DecisionTree tree;
    tree.nodes.emplace_back();
    struct Task {
      std::int32_t node;
      std::vector<std::uint32_t> docs;
    };
    std::vector<Task> stack;
    stack.push_back({0, std::move(root)});
    while (!stack.empty()) {
      auto task = std::move(stack.back());
      stack.pop_back();

      ClassProbs w{};
      for (auto d : task.docs) w[index_of(data_.labels[d])] += weight_[d];
      const double total = sum(w);
      const auto nonzero_classes = std::count_if(w.begin(), w.end(),
                                                 [](double x) { return x > 0.0; });
      Split split;
      if (nonzero_classes > 1 && total >= 2.0) split = find_split(task.docs, w);
      if (split.feature == TreeNode::kLeaf) {
        auto& leaf = tree.nodes[task.node];
        for (std::size_t c = 0; c < kNumLabels; ++c) leaf.distribution[c] = w[c] / total;
        continue;
      }

      std::vector<std::uint32_t> left, right;
      for (auto d : task.docs) {
        const double v = data_.vectors[d].value(static_cast<TermId>(split.feature));
        (v <= split.threshold ? left : right).push_back(d);
      }
      const auto li = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[task.node];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.left = li;
      node.right = li + 1;
      stack.push_back({li + 1, std::move(right)});
      stack.push_back({li, std::move(left)});
    }
    return tree;
  }

 private:
  // Examines the node's present features in random order until at least mtry
  // have been tried and one of them reduces impurity. Features absent from
  // every document in the node cannot split it and are never drawn.
  Split find_split(const std::vector<std::uint32_t>& docs, const ClassProbs& w) {
    ++stamp_;
    node_docs_ = &docs;
    present_.clear();
    for (auto d : docs) {
      doc_stamp_[d] = stamp_;
      for (const auto& e : data_.vectors[d].entries()) {
        if (feature_stamp_[e.id] != stamp_) {
          feature_stamp_[e.id] = stamp_;
          present_.push_back(e.id);
        }
      }
    }
    rng_.shuffle(std::span<TermId>(present_));

    const double total = sum(w);
    const double parent = gini(w, total);
    Split best;
    std::size_t examined = 0;
    for (auto f : present_) {
      ++examined;
      evaluate_feature(f, w, total, parent, best);
      if (examined >= mtry_ && best.feature != TreeNode::kLeaf) break;
    }
    return best;
  }

  void evaluate_feature(TermId f, const ClassProbs& w, double total, double parent,
                        Split& best) {
    values_.clear();
    ClassProbs nonzero{};
    const auto begin = columns_.offsets[f];
    const auto end = columns_.offsets[f + 1];
    // Small nodes deep in the tree read their own rows instead of scanning a
    // long column. Weights are integral, so both paths sum exactly.
    if (node_docs_->size() * 8 < end - begin) {
      for (auto d : *node_docs_) {
        const double v = data_.vectors[d].value(f);
        if (v == 0.0) continue;
        const auto c = index_of(data_.labels[d]);
        values_.push_back({v, c, weight_[d]});
        nonzero[c] += weight_[d];
      }
    } else {
      for (auto at = begin; at < end; ++at) {
        const auto d = columns_.docs[at];
        if (doc_stamp_[d] != stamp_) continue;
        const auto c = index_of(data_.labels[d]);
        values_.push_back({columns_.values[at], c, weight_[d]});
        nonzero[c] += weight_[d];
      }
    }
    std::sort(values_.begin(), values_.end(),
              [](const Item& a, const Item& b) { return a.value < b.value; });

    ClassProbs left{};
    for (std::size_t c = 0; c < kNumLabels; ++c) left[c] = w[c] - nonzero[c];
    const auto consider = [&](double threshold) {
      const double wl = sum(left);
      const double wr = total - wl;
      if (wl <= 0.0 || wr <= 0.0) return;
      ClassProbs right{};
      for (std::size_t c = 0; c < kNumLabels; ++c) right[c] = w[c] - left[c];
      const double gain =
          parent - (wl / total) * gini(left, wl) - (wr / total) * gini(right, wr);
      if (gain > 1e-12 && gain > best.gain) {
        best = {static_cast<std::int32_t>(f), threshold, gain};
      }
    };

    if (!values_.empty()) consider(values_.front().value / 2.0);
    for (std::size_t i = 0; i < values_.size();) {
      const double v = values_[i].value;
      while (i < values_.size() && values_[i].value == v) {
        left[values_[i].label] += values_[i].weight;
        ++i;
      }
      if (i == values_.size()) break;
      const double next = values_[i].value;
      double mid = v + (next - v) / 2.0;
      if (!(mid < next)) mid = v;
      consider(mid);
    }
  }

  struct Item {
    double value;
    std::size_t label;
    double weight;
  };

  const LabeledDataset& data_;
  const ColumnIndex& columns_;
  std::size_t mtry_;
  Rng rng_;
  std::vector<double> weight_;
  std::vector<std::uint32_t> doc_stamp_;
  std::vector<std::uint32_t> feature_stamp_;
  std::uint32_t stamp_ = 0;
  std::vector<TermId> present_;
  std::vector<Item> values_;
  const std::vector<std::uint32_t>* node_docs_ = nullptr;
};

void check_rf_inputs(const LabeledDataset& data, int n_trees) {
  if (n_trees < 1) throw Error("train_rf: n_trees must be at least 1");
  if (data.size() == 0) throw Error("train_rf: empty dataset");
  if (data.labels.size() != data.vectors.size()) {
    throw Error("train_rf: vectors and labels differ in length");
  }
  for (const auto& v : data.vectors) {
    if (!v.empty() && v.entries().back().id >= data.n_features) {
      throw Error("train_rf: feature id outside the vocabulary");
    }
    for (const auto& e : v.entries()) {
      if (e.value < 0.0) throw Error("train_rf: negative feature value");
    }
  }
}

RfModel make_model(const LabeledDataset& data, int n_trees, std::uint64_t seed) {
  RfModel m;
  m.n_features = data.n_features;
  m.feature_subsample = default_feature_subsample(data.n_features);
  m.seed = seed;
  m.trees.resize(static_cast<std::size_t>(n_trees));
  return m;
}

}  // namespace

std::size_t default_feature_subsample(std::size_t n_features) {
  const auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_features))));
  return std::max<std::size_t>(1, root);
}

RfModel train_rf(const LabeledDataset& data, int n_trees, std::uint64_t seed) {
  check_rf_inputs(data, n_trees);
  const ColumnIndex columns(data);
  auto model = make_model(data, n_trees, seed);
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < n_trees; ++t) {
    TreeBuilder builder(data, columns, model.feature_subsample,
                        Rng::derive(seed, static_cast<std::uint64_t>(t)));
    model.trees[static_cast<std::size_t>(t)] = builder.build();
  }
  return model;
}

RfModel train_rf_serial(const LabeledDataset& data, int n_trees, std::uint64_t seed) {
  check_rf_inputs(data, n_trees);
  const ColumnIndex columns(data);
  auto model = make_model(data, n_trees, seed);
  for (int t = 0; t < n_trees; ++t) {
    TreeBuilder builder(data, columns, model.feature_subsample,
                        Rng::derive(seed, static_cast<std::uint64_t>(t)));
    model.trees[static_cast<std::size_t>(t)] = builder.build();
  }
  return model;
}

}  // namespace sensor_rank
