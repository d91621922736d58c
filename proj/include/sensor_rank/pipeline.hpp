#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sensor_rank/evaluation.hpp"
#include "sensor_rank/ranker.hpp"
#include "sensor_rank/text.hpp"

namespace sensor_rank {

// Everything a command can be configured with. Loaded from a JSON config
// file, then overridden by command-line flags.
struct PipelineConfig {
  std::filesystem::path corpus;
  std::filesystem::path graph;
  std::filesystem::path replacements;
  std::filesystem::path stopwords;
  std::filesystem::path exclusions;
  std::filesystem::path model;
  std::filesystem::path out_dir = "out";
  std::filesystem::path seeds;          // seed keyword list
  std::filesystem::path exclude_terms;  // expansion terms rejected by hand
  std::filesystem::path synth_config;

  int n_max = 3;
  TrainingConfig training;
  int folds = 10;
  std::optional<std::uint64_t> seed;

  RankConfig rank;
  RankMetric metric = RankMetric::TwitterRank;
  int top_n = 10;  // keyword expansions to keep

  // Unknown keys are rejected.
  static PipelineConfig from_json_text(const std::string& text);
  static PipelineConfig load(const std::filesystem::path& path);

  std::uint64_t require_seed(std::string_view command) const;
};

struct KeywordReport {
  std::vector<std::string> seeds;
  std::vector<TermScore> candidates;  // ranked expansion candidates
  std::vector<std::string> added;
  std::vector<std::string> merged;
};

KeywordReport cmd_keywords(const PipelineConfig& config);
void cmd_train(const PipelineConfig& config);
EvalReport cmd_eval(const PipelineConfig& config);
void cmd_classify(const PipelineConfig& config);

struct RankOutcome {
  std::vector<UserStats> candidates;
  RankVector ranks;
  std::array<std::size_t, 7> histogram{};
  std::size_t users_over_threshold = 0;  // before exclusions
  ComponentSummary components;
};

RankOutcome cmd_rank(const PipelineConfig& config);
// Prints the top-k table for config.metric from a previous rank run.
std::string cmd_report(const PipelineConfig& config);
void cmd_synth(const PipelineConfig& config);

}  // namespace sensor_rank
