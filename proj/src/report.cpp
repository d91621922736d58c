#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/core.h>
#include <json.hpp>

#include "sensor_rank/error.hpp"
#include "sensor_rank/ranker.hpp"

namespace sensor_rank {
namespace {

// 1-based positions after sorting by score desc, id asc.
std::vector<std::size_t> positions(const std::vector<double>& score,
                                   std::span<const UserStats> users) {
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return users[a].user_id < users[b].user_id;
  });
  std::vector<std::size_t> pos(score.size());
  for (std::size_t p = 0; p < order.size(); ++p) pos[order[p]] = p + 1;
  return pos;
}

double round4(double x) { return std::round(x * 1e4) / 1e4; }

}  // namespace

std::string_view to_string(RankMetric m) {
  switch (m) {
    case RankMetric::TwitterRank: return "tr";
    case RankMetric::TopicFocus: return "tf";
    case RankMetric::OverallFocus: return "of";
  }
  return "tr";
}

RankMetric parse_rank_metric(std::string_view s) {
  if (s == "tr") return RankMetric::TwitterRank;
  if (s == "tf") return RankMetric::TopicFocus;
  if (s == "of") return RankMetric::OverallFocus;
  throw Error(fmt::format("unknown ranking metric '{}' (expected tr, tf or of)", s));
}

std::vector<ReportRow> ranked_rows(std::span<const UserStats> candidates,
                                   const RankVector& ranks, RankMetric metric) {
  const auto n = candidates.size();
  if (ranks.scores.size() != n) throw Error("rank vector does not match candidates");
  std::vector<double> tr(n), tf(n), of(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (ranks.users[i] != candidates[i].user_id) {
      throw Error(fmt::format("rank vector order mismatch at '{}'", candidates[i].user_id));
    }
    tr[i] = ranks.scores[i];
    tf[i] = topic_focus(candidates[i]);
    of[i] = overall_focus(candidates[i]);
  }
  const auto tr_pos = positions(tr, candidates);
  const auto tf_pos = positions(tf, candidates);
  const auto of_pos = positions(of, candidates);

  std::vector<ReportRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = candidates[i];
    rows[i] = {c.user_id, c.relevant_count, c.harvest_count, c.total_count,
               tr[i],     tr_pos[i],        tf[i],           tf_pos[i],
               of[i],     of_pos[i],        c.total_count_defaulted};
  }
  const auto key = [metric](const ReportRow& r) {
    switch (metric) {
      case RankMetric::TwitterRank: return r.tr_rank;
      case RankMetric::TopicFocus: return r.tf_rank;
      case RankMetric::OverallFocus: return r.of_rank;
    }
    return r.tr_rank;
  };
  std::sort(rows.begin(), rows.end(),
            [&](const ReportRow& a, const ReportRow& b) { return key(a) < key(b); });
  return rows;
}

RankingReport ranking_report(std::span<const UserStats> candidates,
                             const RankVector& ranks, const RankConfig& config,
                             RankMetric metric) {
  if (config.k < 1) throw Error("report size k must be at least 1");
  RankingReport report;
  report.metric = metric;
  report.rows = ranked_rows(candidates, ranks, metric);
  if (report.rows.size() > static_cast<std::size_t>(config.k)) {
    report.rows.resize(static_cast<std::size_t>(config.k));
  }
  return report;
}

void write_report_tsv(const RankingReport& report, std::ostream& out) {
  out << "user_id\trelevant_count\tharvest_count\ttotal_count\ttr_score\ttr_rank"
         "\ttopic_focus\ttf_rank\toverall_focus\tof_rank\ttotal_defaulted\n";
  for (const auto& r : report.rows) {
    out << fmt::format("{}\t{}\t{}\t{}\t{:.4f}\t{}\t{:.4f}\t{}\t{:.4f}\t{}\t{}\n",
                       r.user_id, r.relevant_count, r.harvest_count, r.total_count,
                       100.0 * r.tr_score, r.tr_rank, r.topic_focus, r.tf_rank,
                       r.overall_focus, r.of_rank, r.total_count_defaulted ? 1 : 0);
  }
}

std::string report_json(const RankingReport& report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json j;
    j["user_id"] = r.user_id;
    j["relevant_count"] = r.relevant_count;
    j["harvest_count"] = r.harvest_count;
    j["total_count"] = r.total_count;
    j["tr_score"] = round4(100.0 * r.tr_score);
    j["tr_rank"] = r.tr_rank;
    j["topic_focus"] = round4(r.topic_focus);
    j["tf_rank"] = r.tf_rank;
    j["overall_focus"] = round4(r.overall_focus);
    j["of_rank"] = r.of_rank;
    j["total_defaulted"] = r.total_count_defaulted;
    rows.push_back(std::move(j));
  }
  return rows.dump(2) + "\n";
}

}  // namespace sensor_rank
