#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace sensor_rank {

using TermId = std::uint32_t;

struct FeatureEntry {
  TermId id;
  double value;

  friend bool operator==(const FeatureEntry&, const FeatureEntry&) = default;
};

// Sparse term-count vector. Entries are sorted by id, ids are unique and no
// zero value is stored. Values are integral for real documents and may be
// fractional for SMOTE synthetics.
class FeatureVector {
 public:
  FeatureVector() = default;

  // Takes unsorted (id, value) pairs; duplicates are summed, zeros dropped.
  static FeatureVector from_pairs(std::vector<FeatureEntry> pairs);

  std::span<const FeatureEntry> entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  double value(TermId id) const;
  double total() const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::vector<FeatureEntry> entries_;
};

double squared_distance(const FeatureVector& a, const FeatureVector& b);

}  // namespace sensor_rank
