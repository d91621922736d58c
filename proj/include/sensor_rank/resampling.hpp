#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sensor_rank/classifier.hpp"

namespace sensor_rank {

struct SmoteSample {
  FeatureVector vector;
  std::size_t source;    // index into the minority set
  std::size_t neighbor;  // index of the interpolation partner
  double lambda;
};

// k nearest neighbours (Euclidean over sparse counts, self excluded) of every
// vector, nearest first, ties by index. Rows are computed in parallel.
std::vector<std::vector<std::size_t>> nearest_neighbors(
    std::span<const FeatureVector> points, std::size_t k);
std::vector<std::vector<std::size_t>> nearest_neighbors_serial(
    std::span<const FeatureVector> points, std::size_t k);

// SMOTE: percent/100 synthetics per minority vector, each interpolated towards
// a random one of its k nearest neighbours. Output order: source-major.
std::vector<SmoteSample> smote_samples(std::span<const FeatureVector> minority,
                                       int percent, int k, std::uint64_t seed);
std::vector<FeatureVector> smote(std::span<const FeatureVector> minority,
                                 int percent, int k, std::uint64_t seed);

// Random majority-class removal until max count <= max_ratio * min count.
// Surviving records keep their relative order.
LabeledDataset subsample_spread(const LabeledDataset& data, double max_ratio,
                                std::uint64_t seed);

// gain(t) = H(label) - H(label | t present), in bits. Every feature id in
// [0, n_features) is ranked; descending gain, ties by id.
std::vector<std::pair<TermId, double>> info_gain_rank(const LabeledDataset& data);

}  // namespace sensor_rank
