#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/core.h>
#include <json.hpp>

#include "sensor_rank/error.hpp"
#include "sensor_rank/model_io.hpp"
#include "sensor_rank/pipeline.hpp"
#include "sensor_rank/synthlab.hpp"

using namespace sensor_rank;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("sr_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI; stderr goes to err_file.
int run_cli(const std::string& args, const fs::path& err_file) {
  const auto cmd = fmt::format("\"{}\" {} > /dev/null 2> \"{}\"", SENSOR_RANK_CLI, args,
                               err_file.string());
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

constexpr const char* kSmallSynth = R"({
  "n_users": 600, "tail_histogram": [300, 60, 25, 10, 6, 1, 2],
  "n_private": 12, "n_training": 600, "edge_density": 0.01})";

}  // namespace

TEST(PipelineConfig, ParsesKnownKeysAndRejectsOthers) {
  const auto c = PipelineConfig::from_json_text(
      R"({"corpus": "c.jsonl", "gamma": 0.8, "classifier": "mnnb", "ngrams": 2,
          "seed": 9, "metric": "of", "k": 5})");
  EXPECT_EQ(c.corpus, "c.jsonl");
  EXPECT_DOUBLE_EQ(c.rank.gamma, 0.8);
  EXPECT_EQ(c.training.kind, ClassifierKind::Mnnb);
  EXPECT_EQ(c.n_max, 2);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.metric, RankMetric::OverallFocus);
  EXPECT_EQ(c.rank.k, 5);
  EXPECT_THROW(PipelineConfig::from_json_text(R"({"gama": 0.8})"), Error);
  EXPECT_THROW(PipelineConfig::from_json_text(R"({"classifier": "svm"})"), Error);
  EXPECT_THROW(PipelineConfig::from_json_text("[1]"), Error);
  EXPECT_THROW(PipelineConfig{}.require_seed("train"), Error);
}

TEST(Keywords, RecoversPlantedExpansions) {
  const auto dir = fresh_dir("keywords");
  const auto& seeds = default_seed_keywords();
  const auto& planted = default_expansion_keywords();
  const std::vector<std::string> stop = {"de", "que", "para"};
  const std::vector<std::string> distractors = {"rt", "via"};
  write_corpus(generate_keyword_corpus(3, seeds, planted, stop, distractors, 4000),
               dir / "harvest.jsonl");
  write(dir / "stop.txt", "de\nque\npara\n");
  write(dir / "reject.txt", "rt\nvia\n");

  PipelineConfig c;
  c.corpus = dir / "harvest.jsonl";
  c.stopwords = dir / "stop.txt";
  c.exclude_terms = dir / "reject.txt";
  c.out_dir = dir / "out";
  const auto report = cmd_keywords(c);
  auto added = report.added;
  std::sort(added.begin(), added.end());
  auto want = planted;
  std::sort(want.begin(), want.end());
  EXPECT_EQ(added, want);
  EXPECT_EQ(report.merged.size(), seeds.size() + planted.size());
  EXPECT_TRUE(fs::exists(dir / "out" / "keywords.txt"));

  // Without the manual rejections the distractors crowd in.
  c.exclude_terms.clear();
  const auto raw = cmd_keywords(c);
  EXPECT_NE(std::find(raw.added.begin(), raw.added.end(), "rt"), raw.added.end());

  write(dir / "empty.jsonl", "");
  c.corpus = dir / "empty.jsonl";
  EXPECT_THROW(cmd_keywords(c), Error);
}

TEST(Pipeline, EndToEndThroughLibrary) {
  const auto dir = fresh_dir("library");
  write(dir / "synth.json", kSmallSynth);
  write(dir / "lingo.csv", "vc,voce\n");
  PipelineConfig c;
  c.seed = 4;
  c.synth_config = dir / "synth.json";
  c.out_dir = dir / "data";
  cmd_synth(c);
  for (const char* f : {"harvest.jsonl", "train.jsonl", "followers.csv", "exclusions.txt",
                        "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir / "data" / f)) << f;
  }

  c.corpus = dir / "data" / "train.jsonl";
  c.replacements = dir / "lingo.csv";
  c.training.kind = ClassifierKind::Mnnb;
  c.n_max = 1;
  c.folds = 5;
  c.out_dir = dir / "eval";
  EXPECT_GT(cmd_eval(c).accuracy, 0.9);
  EXPECT_TRUE(fs::exists(dir / "eval" / "eval.json"));

  c.out_dir = dir / "model";
  cmd_train(c);
  const auto model_file = dir / "model" / "model.json";
  const auto model = load_model(model_file);
  EXPECT_EQ(serialize_model(model), read(model_file));
  EXPECT_EQ(serialize_model(parse_model(serialize_model(model))), serialize_model(model));

  c.corpus = dir / "data" / "harvest.jsonl";
  c.model = model_file;
  c.out_dir = dir / "classified";
  cmd_classify(c);
  const auto classified = load_corpus(dir / "classified" / "classified.jsonl");
  const auto gold = load_corpus(dir / "data" / "harvest.jsonl");
  ASSERT_EQ(classified.size(), gold.size());
  std::size_t agree = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    agree += classified.records[i].label == gold.records[i].label;
  }
  EXPECT_GT(static_cast<double>(agree) / gold.size(), 0.9);

  PipelineConfig other = c;
  other.replacements.clear();
  EXPECT_THROW(cmd_classify(other), Error);

  c.corpus = dir / "data" / "harvest.jsonl";
  c.graph = dir / "data" / "followers.csv";
  c.exclusions = dir / "data" / "exclusions.txt";
  c.out_dir = dir / "rank";
  const auto ranked = cmd_rank(c);
  EXPECT_EQ(ranked.users_over_threshold, 44u);
  EXPECT_EQ(ranked.candidates.size(), 32u);
  EXPECT_TRUE(ranked.ranks.converged);
  for (const char* f : {"ranking_tr.tsv", "ranking_tf.json", "ranking_of.tsv", "scores.json",
                        "components.json"}) {
    EXPECT_TRUE(fs::exists(dir / "rank" / f)) << f;
  }
  c.metric = RankMetric::TwitterRank;
  EXPECT_EQ(cmd_report(c), read(dir / "rank" / "ranking_tr.tsv"));
  c.metric = RankMetric::OverallFocus;
  EXPECT_EQ(cmd_report(c), read(dir / "rank" / "ranking_of.tsv"));
}

TEST(Model, RejectsForeignFiles) {
  EXPECT_THROW(parse_model("{}"), Error);
  EXPECT_THROW(parse_model(R"({"format": "sensor-rank-model", "version": 99})"), Error);
  EXPECT_THROW(parse_model("not json"), Error);
}

TEST(Cli, ErrorsAreJsonOnStderr) {
  const auto dir = fresh_dir("cli");
  const auto err = dir / "err.txt";
  EXPECT_NE(run_cli(fmt::format("train --corpus {}", (dir / "none.jsonl").string()), err), 0);
  const auto j = nlohmann::json::parse(read(err));
  EXPECT_EQ(j.at("command"), "train");
  EXPECT_NE(j.at("error").get<std::string>().find("--seed"), std::string::npos);

  write(dir / "bad.jsonl",
        R"({"id":"1","user":"a","text":"x","created_at":"2016-10-01T00:00:00Z"})"
        "\n{broken\n");
  EXPECT_NE(run_cli(fmt::format("classify --corpus {} --model {}", (dir / "bad.jsonl").string(),
                                (dir / "bad.jsonl").string()),
                    err),
            0);
  EXPECT_NE(read(err).find("line 2"), std::string::npos) << read(err);

  EXPECT_NE(run_cli("rank --gamma 0.85", err), 0);
  EXPECT_NE(run_cli("nonsense", err), 0);
}

TEST(Cli, FlagsOverrideConfig) {
  const auto dir = fresh_dir("override");
  const auto err = dir / "err.txt";
  write(dir / "synth.json", kSmallSynth);
  write(dir / "config.json",
        fmt::format(R"({{"seed": 1, "out": "{}", "synth_config": "{}"}})",
                    (dir / "from_config").string(), (dir / "synth.json").string()));
  ASSERT_EQ(run_cli(fmt::format("synth --config {} --out {}", (dir / "config.json").string(),
                                (dir / "from_flag").string()),
                    err),
            0)
      << read(err);
  EXPECT_TRUE(fs::exists(dir / "from_flag" / "manifest.json"));
  EXPECT_FALSE(fs::exists(dir / "from_config"));
}
