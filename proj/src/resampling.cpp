#include "sensor_rank/resampling.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "sensor_rank/error.hpp"
#include "sensor_rank/random.hpp"

namespace sensor_rank {
namespace {

std::vector<std::size_t> neighbors_of(std::span<const FeatureVector> points,
                                      std::size_t i, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(points.size() - 1);
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (j != i) dist.emplace_back(squared_distance(points[i], points[j]), j);
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                    dist.end());
  std::vector<std::size_t> out(k);
  for (std::size_t r = 0; r < k; ++r) out[r] = dist[r].second;
  return out;
}

void check_knn(std::span<const FeatureVector> points, std::size_t k) {
  if (k < 1) throw Error("nearest_neighbors: k must be at least 1");
  if (points.size() <= k) {
    throw Error(fmt::format("need more than k={} points, got {}", k, points.size()));
  }
}

double entropy_bits(const ClassProbs& counts) {
  const double n = counts[0] + counts[1] + counts[2];
  if (n <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / n) * std::log2(c / n);
  }
  return h;
}

}  // namespace

std::vector<std::vector<std::size_t>> nearest_neighbors(
    std::span<const FeatureVector> points, std::size_t k) {
  check_knn(points, k);
  std::vector<std::vector<std::size_t>> out(points.size());
  const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = neighbors_of(points, static_cast<std::size_t>(i), k);
  }
  return out;
}

std::vector<std::vector<std::size_t>> nearest_neighbors_serial(
    std::span<const FeatureVector> points, std::size_t k) {
  check_knn(points, k);
  std::vector<std::vector<std::size_t>> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = neighbors_of(points, i, k);
  return out;
}

std::vector<SmoteSample> smote_samples(std::span<const FeatureVector> minority,
                                       int percent, int k, std::uint64_t seed) {
  if (percent < 0 || percent % 100 != 0) {
    throw Error(fmt::format("smote: percent {} is not a multiple of 100", percent));
  }
  if (k < 1) throw Error("smote: k must be at least 1");
  if (minority.size() <= static_cast<std::size_t>(k)) {
    throw Error(fmt::format("smote: minority set of {} is not larger than k={}",
                            minority.size(), k));
  }
  std::vector<SmoteSample> out;
  if (percent == 0) return out;

  const auto rounds = static_cast<std::size_t>(percent / 100);
  const auto nn = nearest_neighbors(minority, static_cast<std::size_t>(k));
  Rng rng(seed);
  out.reserve(rounds * minority.size());
  for (std::size_t i = 0; i < minority.size(); ++i) {
    for (std::size_t r = 0; r < rounds; ++r) {
      const auto j = nn[i][rng.below(static_cast<std::uint64_t>(k))];
      const double lambda = rng.uniform();
      const auto a = minority[i].entries();
      const auto b = minority[j].entries();
      std::vector<FeatureEntry> pairs;
      pairs.reserve(a.size() + b.size());
      std::size_t p = 0, q = 0;
      while (p < a.size() || q < b.size()) {
        TermId id;
        double x = 0.0, y = 0.0;
        if (q == b.size() || (p < a.size() && a[p].id < b[q].id)) {
          id = a[p].id;
          x = a[p++].value;
        } else if (p == a.size() || b[q].id < a[p].id) {
          id = b[q].id;
          y = b[q++].value;
        } else {
          id = a[p].id;
          x = a[p++].value;
          y = b[q++].value;
        }
        const double v = std::clamp(x + lambda * (y - x), std::min(x, y), std::max(x, y));
        if (v != 0.0) pairs.push_back({id, v});
      }
      out.push_back({FeatureVector::from_pairs(std::move(pairs)), i, j, lambda});
    }
  }
  return out;
}

std::vector<FeatureVector> smote(std::span<const FeatureVector> minority, int percent,
                                 int k, std::uint64_t seed) {
  auto samples = smote_samples(minority, percent, k, seed);
  std::vector<FeatureVector> out;
  out.reserve(samples.size());
  for (auto& s : samples) out.push_back(std::move(s.vector));
  return out;
}

LabeledDataset subsample_spread(const LabeledDataset& data, double max_ratio,
                                std::uint64_t seed) {
  if (!(max_ratio >= 1.0)) {
    throw Error(fmt::format("subsample_spread: max_ratio {} is below 1", max_ratio));
  }
  const auto counts = data.class_counts();
  std::size_t min_count = 0;
  for (auto c : counts) {
    if (c > 0 && (min_count == 0 || c < min_count)) min_count = c;
  }
  const auto cap = static_cast<std::size_t>(
      std::floor(max_ratio * static_cast<double>(min_count)));

  Rng rng(seed);
  std::vector<bool> keep(data.size(), true);
  for (auto l : kAllLabels) {
    if (counts[index_of(l)] <= cap) continue;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.labels[i] == l) members.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t r = cap; r < members.size(); ++r) keep[members[r]] = false;
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (keep[i]) kept.push_back(i);
  }
  return data.subset(kept);
}

std::vector<std::pair<TermId, double>> info_gain_rank(const LabeledDataset& data) {
  if (data.size() == 0) throw Error("info_gain_rank: empty dataset");
  ClassProbs totals{};
  for (auto l : data.labels) totals[index_of(l)] += 1.0;
  const double n = static_cast<double>(data.size());
  const double h = entropy_bits(totals);

  std::vector<ClassProbs> present(data.n_features, ClassProbs{});
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto c = index_of(data.labels[i]);
    for (const auto& e : data.vectors[i].entries()) {
      if (e.value > 0.0 && e.id < data.n_features) present[e.id][c] += 1.0;
    }
  }

  std::vector<std::pair<TermId, double>> out;
  out.reserve(data.n_features);
  for (TermId t = 0; t < data.n_features; ++t) {
    const auto& with = present[t];
    ClassProbs without{};
    for (std::size_t c = 0; c < kNumLabels; ++c) without[c] = totals[c] - with[c];
    const double n_with = with[0] + with[1] + with[2];
    const double cond =
        (n_with / n) * entropy_bits(with) + ((n - n_with) / n) * entropy_bits(without);
    out.emplace_back(t, std::clamp(h - cond, 0.0, h));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

}  // namespace sensor_rank
