#include "sensor_rank/ranker.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "sensor_rank/error.hpp"

namespace sensor_rank {

UserStatsMap compute_user_stats(std::span<const ClassifiedTweet> classified) {
  UserStatsMap stats;
  std::map<std::string, std::uint64_t> supplied_total;
  for (const auto& [rec, label] : classified) {
    auto& s = stats[rec.author];
    s.user_id = rec.author;
    ++s.harvest_count;
    if (label == Label::Relevant) ++s.relevant_count;
    if (rec.user_total_tweets) {
      auto& t = supplied_total[rec.author];
      t = std::max(t, *rec.user_total_tweets);
    }
  }
  for (auto& [id, s] : stats) {
    const auto it = supplied_total.find(id);
    if (it == supplied_total.end()) {
      s.total_count = s.harvest_count;
      s.total_count_defaulted = true;
      continue;
    }
    if (it->second < s.harvest_count) {
      throw Error(fmt::format(
          "user '{}': user_total_tweets {} is below the {} harvested tweets", id,
          it->second, s.harvest_count));
    }
    s.total_count = it->second;
  }
  return stats;
}

UserStatsMap compute_user_stats(const Corpus& labeled) {
  std::vector<ClassifiedTweet> classified;
  classified.reserve(labeled.size());
  for (const auto& r : labeled.records) {
    if (!r.label) throw Error(fmt::format("record '{}' has no label", r.id));
    classified.push_back({r, *r.label});
  }
  return compute_user_stats(classified);
}

std::array<std::size_t, 7> relevant_histogram(const UserStatsMap& stats) {
  std::array<std::size_t, 7> h{};
  for (const auto& [id, s] : stats) {
    const auto r = s.relevant_count;
    if (r == 0) continue;
    const std::size_t bucket = r <= 4 ? r - 1 : r <= 9 ? 4 : r <= 19 ? 5 : 6;
    ++h[bucket];
  }
  return h;
}

std::vector<UserStats> candidate_filter(const UserStatsMap& stats,
                                        const RankConfig& config,
                                        const std::set<std::string>& excluded) {
  std::vector<UserStats> out;
  std::uint64_t total = 0;
  for (const auto& [id, s] : stats) {
    if (s.relevant_count < config.min_relevant || excluded.contains(id)) continue;
    out.push_back(s);
    total += s.relevant_count;
  }
  if (out.empty()) throw Error("no candidates");
  if (total == 0) throw Error("no candidates with relevant tweets");
  for (auto& s : out) {
    s.v = static_cast<double>(s.relevant_count) / static_cast<double>(total);
  }
  return out;
}

double TransitionMatrix::at(std::uint32_t i, std::uint32_t j) const {
  const auto b = row_friend.begin() + static_cast<std::ptrdiff_t>(row_offsets[i]);
  const auto e = row_friend.begin() + static_cast<std::ptrdiff_t>(row_offsets[i + 1]);
  const auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return 0.0;
  return row_prob[static_cast<std::size_t>(it - row_friend.begin())];
}

double TransitionMatrix::row_sum(std::uint32_t i) const {
  double s = 0.0;
  for (auto k = row_offsets[i]; k < row_offsets[i + 1]; ++k) s += row_prob[k];
  return s;
}

TransitionMatrix make_transition(
    std::vector<std::string> users,
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> entries) {
  TransitionMatrix P;
  const auto n = users.size();
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!P.index.emplace(users[i], i).second) {
      throw Error(fmt::format("duplicate user '{}' in transition matrix", users[i]));
    }
  }
  P.users = std::move(users);
  std::sort(entries.begin(), entries.end());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto [i, j, p] = entries[k];
    if (i >= n || j >= n || i == j) throw Error("transition entry out of range");
    if (!(p >= 0.0 && p <= 1.0)) throw Error("transition probability outside [0,1]");
    if (k > 0 && std::get<0>(entries[k - 1]) == i && std::get<1>(entries[k - 1]) == j) {
      throw Error("duplicate transition entry");
    }
  }

  P.row_offsets.assign(n + 1, 0);
  P.col_offsets.assign(n + 1, 0);
  for (const auto& [i, j, p] : entries) {
    ++P.row_offsets[i + 1];
    ++P.col_offsets[j + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    P.row_offsets[i + 1] += P.row_offsets[i];
    P.col_offsets[i + 1] += P.col_offsets[i];
  }
  P.row_friend.resize(entries.size());
  P.row_prob.resize(entries.size());
  P.col_follower.resize(entries.size());
  P.col_prob.resize(entries.size());
  auto col_cursor = P.col_offsets;
  // entries are sorted by (i, j), so both layouts come out ordered.
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto [i, j, p] = entries[k];
    P.row_friend[k] = j;
    P.row_prob[k] = p;
    const auto c = col_cursor[j]++;
    P.col_follower[c] = i;
    P.col_prob[c] = p;
  }
  return P;
}

TransitionMatrix build_transition(std::span<const UserStats> candidates,
                                  const FollowerGraph& graph) {
  std::vector<std::string> users;
  std::unordered_map<std::string, std::uint32_t> index;
  for (const auto& c : candidates) {
    index.emplace(c.user_id, static_cast<std::uint32_t>(users.size()));
    users.push_back(c.user_id);
  }

  std::vector<std::vector<std::uint32_t>> friends(users.size());
  for (const auto& [follower, friend_id] : graph.edges) {
    const auto fi = index.find(follower);
    const auto fj = index.find(friend_id);
    if (fi == index.end() || fj == index.end()) continue;
    friends[fi->second].push_back(fj->second);
  }

  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> entries;
  for (std::uint32_t i = 0; i < users.size(); ++i) {
    double denom = 0.0;
    for (auto j : friends[i]) denom += static_cast<double>(candidates[j].relevant_count);
    if (denom <= 0.0) continue;
    for (auto j : friends[i]) {
      const double share = static_cast<double>(candidates[j].relevant_count) / denom;
      const double sim = 1.0 - std::abs(candidates[i].v - candidates[j].v);
      entries.emplace_back(i, j, share * sim);
    }
  }
  return make_transition(std::move(users), std::move(entries));
}

double topic_focus(const UserStats& u) {
  if (u.harvest_count == 0) {
    throw Error(fmt::format("topic_focus: user '{}' has no harvested tweets", u.user_id));
  }
  return 100.0 * static_cast<double>(u.relevant_count) /
         static_cast<double>(u.harvest_count);
}

double overall_focus(const UserStats& u) {
  if (u.total_count == 0) {
    throw Error(fmt::format("overall_focus: user '{}' has no tweets", u.user_id));
  }
  return 100.0 * static_cast<double>(u.relevant_count) /
         static_cast<double>(u.total_count);
}

}  // namespace sensor_rank
