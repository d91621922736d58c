#include <cmath>

#include <fmt/core.h>

#include "sensor_rank/error.hpp"
#include "sensor_rank/ranker.hpp"

namespace sensor_rank {
namespace {

void check_inputs(const TransitionMatrix& P, std::span<const double> teleport,
                  std::span<const double> start, const RankConfig& config) {
  if (!(config.gamma > 0.0 && config.gamma < 1.0)) {
    throw Error(fmt::format("gamma {} outside (0,1)", config.gamma));
  }
  if (!(config.tol > 0.0)) throw Error("tol must be positive");
  if (config.max_iter < 1) throw Error("max_iter must be at least 1");
  if (teleport.size() != P.size() || start.size() != P.size()) {
    throw Error("teleportation/start vector size does not match the matrix");
  }
  double sum = 0.0;
  for (double e : teleport) {
    if (!(e >= 0.0)) throw Error("teleportation vector has a negative entry");
    sum += e;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(fmt::format("teleportation vector sums to {}, not 1", sum));
  }
}

std::vector<double> teleport_from(const TransitionMatrix& P,
                                  std::span<const UserStats> stats) {
  if (stats.size() != P.size()) {
    throw Error("candidate list does not match the transition matrix");
  }
  std::vector<double> e(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (stats[i].user_id != P.users[i]) {
      throw Error(fmt::format("candidate order mismatch at '{}'", stats[i].user_id));
    }
    e[i] = stats[i].v;
  }
  return e;
}

template <class Step>
RankVector iterate(const TransitionMatrix& P, std::span<const double> teleport,
                   std::span<const double> start, const RankConfig& config,
                   Step&& step) {
  check_inputs(P, teleport, start, config);
  RankVector out;
  out.users = P.users;
  std::vector<double> cur(start.begin(), start.end());
  std::vector<double> next(cur.size());
  for (int it = 1; it <= config.max_iter; ++it) {
    step(cur, next);
    double r = 0.0;
    for (std::size_t j = 0; j < cur.size(); ++j) r += std::abs(next[j] - cur[j]);
    cur.swap(next);
    out.iterations = it;
    out.final_residual = r;
    out.residuals.push_back(r);
    if (r <= config.tol) {
      out.converged = true;
      break;
    }
  }
  out.scores = std::move(cur);
  return out;
}

}  // namespace

RankVector power_iterate(const TransitionMatrix& P, std::span<const double> teleport,
                         std::span<const double> start, const RankConfig& config) {
  const double gamma = config.gamma;
  return iterate(P, teleport, start, config,
                 [&](const std::vector<double>& cur, std::vector<double>& next) {
                   const auto n = static_cast<std::int64_t>(cur.size());
#pragma omp parallel for schedule(static)
                   for (std::int64_t j = 0; j < n; ++j) {
                     double acc = 0.0;
                     for (auto k = P.col_offsets[j]; k < P.col_offsets[j + 1]; ++k) {
                       acc += P.col_prob[k] * cur[P.col_follower[k]];
                     }
                     next[j] = gamma * acc + (1.0 - gamma) * teleport[j];
                   }
                 });
}

RankVector power_iterate_serial(const TransitionMatrix& P,
                                std::span<const double> teleport,
                                std::span<const double> start,
                                const RankConfig& config) {
  const double gamma = config.gamma;
  std::vector<double> contrib(P.size());
  return iterate(P, teleport, start, config,
                 [&](const std::vector<double>& cur, std::vector<double>& next) {
                   std::fill(contrib.begin(), contrib.end(), 0.0);
                   for (std::size_t i = 0; i < cur.size(); ++i) {
                     for (auto k = P.row_offsets[i]; k < P.row_offsets[i + 1]; ++k) {
                       contrib[P.row_friend[k]] += P.row_prob[k] * cur[i];
                     }
                   }
                   for (std::size_t j = 0; j < cur.size(); ++j) {
                     next[j] = gamma * contrib[j] + (1.0 - gamma) * teleport[j];
                   }
                 });
}

RankVector twitterrank(const TransitionMatrix& P, std::span<const UserStats> stats,
                       const RankConfig& config) {
  const auto e = teleport_from(P, stats);
  return power_iterate(P, e, e, config);
}

RankVector twitterrank_serial(const TransitionMatrix& P,
                              std::span<const UserStats> stats,
                              const RankConfig& config) {
  const auto e = teleport_from(P, stats);
  return power_iterate_serial(P, e, e, config);
}

double RankVector::score(const std::string& user) const {
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (users[i] == user) return scores[i];
  }
  throw Error(fmt::format("no TwitterRank score for '{}'", user));
}

}  // namespace sensor_rank
