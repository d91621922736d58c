#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <tuple>
#include <utility>
#include <vector>

#include "sensor_rank/corpus_io.hpp"
#include "sensor_rank/labels.hpp"

namespace sensor_rank {

struct UserStats {
  std::string user_id;
  std::uint64_t relevant_count = 0;  // R_K(u)
  std::uint64_t harvest_count = 0;   // T_K(u)
  std::uint64_t total_count = 0;     // T(u)
  double v = 0.0;                    // share of candidate relevant tweets
  bool total_count_defaulted = false;

  friend bool operator==(const UserStats&, const UserStats&) = default;
};

using UserStatsMap = std::map<std::string, UserStats>;

struct RankConfig {
  double gamma = 0.85;
  double tol = 1e-9;
  int max_iter = 1000;
  std::uint64_t min_relevant = 3;
  int k = 10;
};

struct ClassifiedTweet {
  TweetRecord record;
  Label label;
};

// T(u) is the largest user_total_tweets seen for u; when absent it defaults
// to T_K(u) and the row is flagged. A supplied T(u) below T_K(u) throws.
UserStatsMap compute_user_stats(std::span<const ClassifiedTweet> classified);
// Same, using each record's own label; every record must carry one.
UserStatsMap compute_user_stats(const Corpus& labeled);

// Users per relevant-count bucket: 1, 2, 3, 4, 5-9, 10-19, >=20.
inline constexpr std::array<std::string_view, 7> kHistogramBuckets = {
    "1", "2", "3", "4", "5-9", "10-19", ">=20"};
std::array<std::size_t, 7> relevant_histogram(const UserStatsMap& stats);

// Users with at least min_relevant Relevant tweets, minus the excluded set,
// sorted by id, with v = R(u) / sum of R over the result.
std::vector<UserStats> candidate_filter(const UserStatsMap& stats,
                                        const RankConfig& config,
                                        const std::set<std::string>& excluded);

// Candidate-restricted transition probabilities. Row i holds the friends of
// follower i; the transposed copy is kept for the gather-style update.
struct TransitionMatrix {
  std::vector<std::string> users;
  std::unordered_map<std::string, std::uint32_t> index;

  // Rows: follower -> (friend, probability), friends ascending.
  std::vector<std::size_t> row_offsets;
  std::vector<std::uint32_t> row_friend;
  std::vector<double> row_prob;

  // Columns: friend <- (follower, probability), followers ascending.
  std::vector<std::size_t> col_offsets;
  std::vector<std::uint32_t> col_follower;
  std::vector<double> col_prob;

  std::size_t size() const { return users.size(); }
  std::size_t nnz() const { return row_friend.size(); }
  double at(std::uint32_t i, std::uint32_t j) const;
  double row_sum(std::uint32_t i) const;
};

// P(i,j) = R(j) / sum_{a in friends(i)} R(a) * (1 - |v(i) - v(j)|) for each
// candidate edge i follows j.
TransitionMatrix build_transition(std::span<const UserStats> candidates,
                                  const FollowerGraph& graph);

// Assembles a matrix from explicit (follower, friend, probability) triples.
TransitionMatrix make_transition(std::vector<std::string> users,
                                 std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> entries);

struct RankVector {
  std::vector<std::string> users;
  std::vector<double> scores;
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  std::vector<double> residuals;  // L1 change per iteration

  double score(const std::string& user) const;
};

// TR <- gamma * P^T TR + (1 - gamma) E with E(u) = v(u), TR_0 = E, until the
// L1 change is <= tol or max_iter updates. Throws when E is not a probability
// vector. Each node's sum runs over followers in index order, so results are
// identical for any thread count and equal to twitterrank_serial.
RankVector twitterrank(const TransitionMatrix& P, std::span<const UserStats> stats,
                       const RankConfig& config);
RankVector twitterrank_serial(const TransitionMatrix& P,
                              std::span<const UserStats> stats,
                              const RankConfig& config);

// Lower-level entry points taking the teleportation vector and start vector.
RankVector power_iterate(const TransitionMatrix& P, std::span<const double> teleport,
                         std::span<const double> start, const RankConfig& config);
RankVector power_iterate_serial(const TransitionMatrix& P,
                                std::span<const double> teleport,
                                std::span<const double> start,
                                const RankConfig& config);

// Percentages: 100 * R / T_K and 100 * R / T.
double topic_focus(const UserStats& u);
double overall_focus(const UserStats& u);

struct ComponentSummary {
  // Weakly connected components of the candidate-restricted graph, each
  // sorted; ordered by size desc, then first member.
  std::vector<std::vector<std::string>> components;
  // Mutual follows, (a, b) with a < b.
  std::vector<std::pair<std::string, std::string>> friend_pairs;
};

ComponentSummary connected_components(const FollowerGraph& graph,
                                      const std::set<std::string>& candidates);

enum class RankMetric { TwitterRank, TopicFocus, OverallFocus };

std::string_view to_string(RankMetric m);
RankMetric parse_rank_metric(std::string_view s);

struct ReportRow {
  std::string user_id;
  std::uint64_t relevant_count = 0;
  std::uint64_t harvest_count = 0;
  std::uint64_t total_count = 0;
  double tr_score = 0.0;  // unscaled
  std::size_t tr_rank = 0;
  double topic_focus = 0.0;
  std::size_t tf_rank = 0;
  double overall_focus = 0.0;
  std::size_t of_rank = 0;
  bool total_count_defaulted = false;
};

struct RankingReport {
  RankMetric metric = RankMetric::TwitterRank;
  std::vector<ReportRow> rows;
};

// All candidates with their 1-based rank under every metric (score desc,
// user id asc), ordered by the requested metric.
std::vector<ReportRow> ranked_rows(std::span<const UserStats> candidates,
                                   const RankVector& ranks, RankMetric metric);

// Top config.k rows of ranked_rows.
RankingReport ranking_report(std::span<const UserStats> candidates,
                             const RankVector& ranks, const RankConfig& config,
                             RankMetric metric);

// TSV with a header row; reals with 4 decimals, TR scaled by 100.
void write_report_tsv(const RankingReport& report, std::ostream& out);
// JSON array of row objects, same scaling and rounding.
std::string report_json(const RankingReport& report);

}  // namespace sensor_rank
