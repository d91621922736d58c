#include <algorithm>
#include <numeric>

#include "sensor_rank/ranker.hpp"

namespace sensor_rank {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

}  // namespace

ComponentSummary connected_components(const FollowerGraph& graph,
                                      const std::set<std::string>& candidates) {
  const std::vector<std::string> users(candidates.begin(), candidates.end());
  const auto idx = [&](const std::string& u) {
    return static_cast<std::size_t>(
        std::lower_bound(users.begin(), users.end(), u) - users.begin());
  };

  ComponentSummary out;
  DisjointSets sets(users.size());
  for (const auto& [a, b] : graph.edges) {
    if (!candidates.contains(a) || !candidates.contains(b)) continue;
    sets.unite(idx(a), idx(b));
    if (a < b && graph.edges.contains({b, a})) out.friend_pairs.emplace_back(a, b);
  }

  std::map<std::size_t, std::vector<std::string>> groups;
  for (std::size_t i = 0; i < users.size(); ++i) groups[sets.find(i)].push_back(users[i]);
  for (auto& [root, members] : groups) out.components.push_back(std::move(members));
  std::sort(out.components.begin(), out.components.end(),
            [](const auto& x, const auto& y) {
              if (x.size() != y.size()) return x.size() > y.size();
              return x.front() < y.front();
            });
  return out;
}

}  // namespace sensor_rank
