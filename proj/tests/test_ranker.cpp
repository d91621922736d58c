#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include "sensor_rank/error.hpp"
#include "sensor_rank/ranker.hpp"
#include "sensor_rank/synthlab.hpp"
#include "support/generators.hpp"

using namespace sensor_rank;

namespace {

UserStats user(std::string id, std::uint64_t r, std::uint64_t tk, std::uint64_t t, double v = 0) {
  return {std::move(id), r, tk, t, v, false};
}

std::vector<UserStats> with_shares(std::vector<UserStats> users) {
  double sum = 0;
  for (const auto& u : users) sum += static_cast<double>(u.relevant_count);
  for (auto& u : users) u.v = static_cast<double>(u.relevant_count) / sum;
  return users;
}

ClassifiedTweet tweet(std::string id, std::string author, Label l,
                      std::optional<std::uint64_t> total = {}) {
  TweetRecord r{std::move(id), std::move(author), "x", "2016-10-01T00:00:00Z", {}, total};
  return {r, l};
}

RankConfig tight() {
  RankConfig c;
  c.tol = 1e-14;
  c.max_iter = 5000;
  return c;
}

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Undirected BFS over the candidate-induced graph.
std::vector<std::vector<std::string>> bfs_components(const FollowerGraph& g,
                                                     const std::set<std::string>& cands) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& c : cands) adj[c];
  for (const auto& [a, b] : g.edges) {
    if (cands.contains(a) && cands.contains(b)) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  }
  std::set<std::string> seen;
  std::vector<std::vector<std::string>> out;
  for (const auto& [start, _] : adj) {
    if (seen.contains(start)) continue;
    std::vector<std::string> comp;
    std::queue<std::string> q;
    q.push(start);
    seen.insert(start);
    while (!q.empty()) {
      auto u = q.front();
      q.pop();
      comp.push_back(u);
      for (const auto& w : adj[u]) {
        if (seen.insert(w).second) q.push(w);
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(comp);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(UserStats, CountsRelevantHarvestAndTotal) {
  const std::vector<ClassifiedTweet> t = {
      tweet("1", "a", Label::Relevant, 50), tweet("2", "a", Label::News, 60),
      tweet("3", "a", Label::Relevant),     tweet("4", "b", Label::Noise),
      tweet("5", "b", Label::Relevant)};
  const auto s = compute_user_stats(t);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.at("a"), user("a", 2, 3, 60));
  EXPECT_EQ(s.at("b").relevant_count, 1u);
  EXPECT_EQ(s.at("b").total_count, 2u);
  EXPECT_TRUE(s.at("b").total_count_defaulted);

  const std::vector<ClassifiedTweet> bad = {tweet("1", "a", Label::Relevant, 1),
                                            tweet("2", "a", Label::Relevant, 1)};
  EXPECT_THROW(compute_user_stats(bad), Error);
}

TEST(UserStats, HistogramBuckets) {
  UserStatsMap m;
  const std::vector<std::uint64_t> r = {0, 1, 1, 2, 3, 4, 5, 9, 10, 19, 20, 400};
  for (std::size_t i = 0; i < r.size(); ++i) {
    m[gen::user_name(i)] = user(gen::user_name(i), r[i], r[i] + 1, r[i] + 1);
  }
  EXPECT_EQ(relevant_histogram(m), (std::array<std::size_t, 7>{2, 1, 1, 1, 2, 2, 2}));
}

TEST(CandidateFilter, ThresholdExclusionsAndShares) {
  UserStatsMap m;
  m["a"] = user("a", 2, 5, 5);
  m["b"] = user("b", 3, 5, 5);
  m["c"] = user("c", 9, 9, 9);
  m["d"] = user("d", 6, 6, 6);
  RankConfig cfg;
  const auto c = candidate_filter(m, cfg, {"d"});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].user_id, "b");
  EXPECT_DOUBLE_EQ(c[0].v, 0.25);
  EXPECT_DOUBLE_EQ(c[1].v, 0.75);
  EXPECT_THROW(candidate_filter(m, cfg, {"b", "c", "d"}), Error);
}

TEST(Transition, WeightsByActivityAndSimilarity) {
  const auto users = with_shares({user("A", 2, 2, 2), user("B", 6, 6, 6), user("C", 2, 2, 2)});
  FollowerGraph g;
  g.add_edge("A", "B");
  g.add_edge("A", "C");
  g.add_edge("A", "X");
  g.add_edge("B", "A");
  g.add_edge("X", "C");
  const auto P = build_transition(users, g);
  ASSERT_EQ(P.size(), 3u);
  EXPECT_EQ(P.nnz(), 3u);
  EXPECT_NEAR(P.at(0, 1), 6.0 / 8.0 * 0.6, 1e-15);
  EXPECT_NEAR(P.at(0, 2), 2.0 / 8.0 * 1.0, 1e-15);
  EXPECT_NEAR(P.at(1, 0), 1.0 * 0.6, 1e-15);
  EXPECT_EQ(P.at(2, 0), 0.0);
  EXPECT_EQ(P.row_sum(2), 0.0);
}

TEST(Transition, RowsAreSubStochastic) {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto users = gen::random_candidates(rng, 30);
    const auto P = build_transition(users, gen::random_graph(rng, users, 0.15, 5));
    for (std::uint32_t i = 0; i < P.size(); ++i) {
      EXPECT_LE(P.row_sum(i), 1.0 + 1e-12);
      EXPECT_GE(P.row_sum(i), 0.0);
    }
  }
}

TEST(TwitterRank, AgreesWithDenseSolve) {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const auto users = gen::random_candidates(rng, 1 + rng.below(12));
    const auto P = build_transition(users, gen::random_graph(rng, users, 0.3));
    const auto tr = twitterrank(P, users, tight());
    std::vector<double> e;
    for (const auto& u : users) e.push_back(u.v);
    EXPECT_TRUE(tr.converged);
    EXPECT_LE(linf(tr.scores, oracle_linear_solve(P, e, 0.85)), 1e-12);
  }
}

TEST(TwitterRank, ContractionAndFloor) {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const auto users = gen::random_candidates(rng, 2 + rng.below(40));
    const auto P = build_transition(users, gen::random_graph(rng, users, 0.2));
    const auto tr = twitterrank(P, users, {});
    for (std::size_t n = 1; n < tr.residuals.size(); ++n) {
      EXPECT_LE(tr.residuals[n], 0.85 * tr.residuals[n - 1] + 1e-12);
    }
    for (std::size_t i = 0; i < users.size(); ++i) {
      EXPECT_GE(tr.scores[i], 0.15 * users[i].v - 1e-12);
    }
  }
}

TEST(TwitterRank, IsolatedSoleCandidate) {
  const std::vector<UserStats> one = {user("solo", 5, 5, 5, 1.0)};
  const auto P = build_transition(one, FollowerGraph{});
  const auto tr = twitterrank(P, one, {});
  EXPECT_NEAR(tr.scores[0], 0.15, 1e-12);
  EXPECT_NEAR(tr.score("solo"), 0.15, 1e-12);
}

TEST(TwitterRank, FixedPointIndependentOfStart) {
  Rng rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const auto users = gen::random_candidates(rng, 20);
    const auto P = build_transition(users, gen::random_graph(rng, users, 0.2));
    std::vector<double> e, start;
    for (const auto& u : users) {
      e.push_back(u.v);
      start.push_back(rng.uniform() * 3);
    }
    const auto a = power_iterate(P, e, e, tight());
    const auto b = power_iterate(P, e, start, tight());
    EXPECT_LE(linf(a.scores, b.scores), 1e-12);
  }
}

TEST(TwitterRank, ParallelIsBitwiseSerial) {
  Rng rng(45);
  const auto users = gen::random_candidates(rng, 800);
  const auto P = build_transition(users, gen::random_graph(rng, users, 0.01, 40));
  const auto par = twitterrank(P, users, {});
  const auto ser = twitterrank_serial(P, users, {});
  EXPECT_EQ(par.scores, ser.scores);
  EXPECT_EQ(par.residuals, ser.residuals);
  EXPECT_EQ(par.iterations, ser.iterations);
}

TEST(TwitterRank, ReportsNonConvergence) {
  Rng rng(46);
  const auto users = gen::random_candidates(rng, 30);
  const auto P = build_transition(users, gen::random_graph(rng, users, 0.3));
  RankConfig cfg;
  cfg.max_iter = 2;
  const auto tr = twitterrank(P, users, cfg);
  EXPECT_FALSE(tr.converged);
  EXPECT_EQ(tr.iterations, 2);
}

TEST(TwitterRank, ValidatesInputs) {
  const std::vector<UserStats> one = {user("solo", 5, 5, 5, 1.0)};
  const auto P = build_transition(one, FollowerGraph{});
  RankConfig cfg;
  cfg.gamma = 1.0;
  EXPECT_THROW(twitterrank(P, one, cfg), Error);
  cfg = {};
  cfg.tol = 0;
  EXPECT_THROW(twitterrank(P, one, cfg), Error);
  const std::vector<double> bad = {0.5};
  EXPECT_THROW(power_iterate(P, bad, bad, {}), Error);
}

TEST(Focus, TableFixtures) {
  EXPECT_NEAR(topic_focus(user("f", 20, 28, 140)), 71.43, 0.01);
  EXPECT_NEAR(overall_focus(user("f", 20, 28, 140)), 14.29, 0.01);
  EXPECT_EQ(topic_focus(user("g", 7, 7, 30)), 100.0);
  EXPECT_NEAR(overall_focus(user("h", 4, 4, 19)), 21.05, 0.01);
}

TEST(Components, MatchBreadthFirstSearch) {
  Rng rng(47);
  for (int trial = 0; trial < 40; ++trial) {
    const auto users = gen::random_candidates(rng, 5 + rng.below(40));
    const auto g = gen::random_graph(rng, users, 0.04, 10);
    std::set<std::string> ids;
    for (const auto& u : users) ids.insert(u.user_id);
    const auto got = connected_components(g, ids);
    auto sorted = got.components;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, bfs_components(g, ids));
    for (std::size_t i = 1; i < got.components.size(); ++i) {
      EXPECT_GE(got.components[i - 1].size(), got.components[i].size());
    }
    for (const auto& [a, b] : got.friend_pairs) {
      EXPECT_LT(a, b);
      EXPECT_TRUE(g.edges.contains({a, b}) && g.edges.contains({b, a}));
    }
    std::size_t mutual = 0;
    for (const auto& [a, b] : g.edges) {
      mutual += a < b && ids.contains(a) && ids.contains(b) && g.edges.contains({b, a});
    }
    EXPECT_EQ(got.friend_pairs.size(), mutual);
  }
}

TEST(Report, PositionsMatchFullSort) {
  Rng rng(48);
  const auto users = gen::random_candidates(rng, 60);
  const auto P = build_transition(users, gen::random_graph(rng, users, 0.05));
  const auto tr = twitterrank(P, users, {});
  for (auto metric : {RankMetric::TwitterRank, RankMetric::TopicFocus, RankMetric::OverallFocus}) {
    const auto rows = ranked_rows(users, tr, metric);
    ASSERT_EQ(rows.size(), users.size());
    const auto value = [&](const ReportRow& r) {
      switch (metric) {
        case RankMetric::TwitterRank: return r.tr_score;
        case RankMetric::TopicFocus: return r.topic_focus;
        default: return r.overall_focus;
      }
    };
    auto oracle = rows;
    std::sort(oracle.begin(), oracle.end(), [&](const auto& a, const auto& b) {
      return value(a) != value(b) ? value(a) > value(b) : a.user_id < b.user_id;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].user_id, oracle[i].user_id);
  }
  RankConfig cfg;
  cfg.k = 7;
  const auto top = ranking_report(users, tr, cfg, RankMetric::TopicFocus);
  ASSERT_EQ(top.rows.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(top.rows[i].tf_rank, i + 1);
  cfg.k = 0;
  EXPECT_THROW(ranking_report(users, tr, cfg, RankMetric::TopicFocus), Error);
}

TEST(Report, TsvLayout) {
  const std::vector<UserStats> one = {user("solo", 5, 10, 20, 1.0)};
  const auto tr = twitterrank(build_transition(one, FollowerGraph{}), one, {});
  std::ostringstream out;
  write_report_tsv(ranking_report(one, tr, {}, RankMetric::TwitterRank), out);
  EXPECT_EQ(out.str(),
            "user_id\trelevant_count\tharvest_count\ttotal_count\ttr_score\ttr_rank\t"
            "topic_focus\ttf_rank\toverall_focus\tof_rank\ttotal_defaulted\n"
            "solo\t5\t10\t20\t15.0000\t1\t50.0000\t1\t25.0000\t1\t0\n");
}

TEST(Report, ScaleInvariantOrder) {
  Rng rng(49);
  for (int trial = 0; trial < 20; ++trial) {
    auto users = gen::random_candidates(rng, 25);
    const auto g = gen::random_graph(rng, users, 0.1);
    auto scaled = users;
    for (auto& u : scaled) u.relevant_count *= 7;
    scaled = with_shares(scaled);
    const auto a = ranked_rows(users, twitterrank(build_transition(users, g), users, {}),
                               RankMetric::TwitterRank);
    const auto b = ranked_rows(scaled, twitterrank(build_transition(scaled, g), scaled, {}),
                               RankMetric::TwitterRank);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].user_id, b[i].user_id);
      EXPECT_EQ(a[i].tf_rank, b[i].tf_rank);
      EXPECT_EQ(a[i].of_rank, b[i].of_rank);
    }
  }
}
