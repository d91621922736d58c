// sensor-rank: find topic-specific influential users from labeled tweets
// and a follower graph.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "sensor_rank/error.hpp"
#include "sensor_rank/pipeline.hpp"

namespace {

using sensor_rank::PipelineConfig;

// Flag values that were given explicitly; applied over the config file.
struct Overrides {
  std::string config, corpus, graph, model, out, exclusions, replacements, stopwords,
      seeds, exclude_terms, synth_config, classifier, metric;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma, tol, alpha, spread_ratio;
  std::optional<int> max_iter, k, ngrams, trees, smote_percent, smote_k, folds, top_n;
  std::optional<std::uint64_t> min_relevant;
};

template <class T>
void set_if(std::optional<T>& src, T& dst) {
  if (src) dst = *src;
}

void set_path(const std::string& src, std::filesystem::path& dst) {
  if (!src.empty()) dst = src;
}

PipelineConfig resolve(const Overrides& o) {
  PipelineConfig c = o.config.empty() ? PipelineConfig{} : PipelineConfig::load(o.config);
  set_path(o.corpus, c.corpus);
  set_path(o.graph, c.graph);
  set_path(o.model, c.model);
  set_path(o.out, c.out_dir);
  set_path(o.exclusions, c.exclusions);
  set_path(o.replacements, c.replacements);
  set_path(o.stopwords, c.stopwords);
  set_path(o.seeds, c.seeds);
  set_path(o.exclude_terms, c.exclude_terms);
  set_path(o.synth_config, c.synth_config);
  if (!o.classifier.empty()) c.training.kind = sensor_rank::parse_classifier_kind(o.classifier);
  if (!o.metric.empty()) c.metric = sensor_rank::parse_rank_metric(o.metric);
  auto ov = o;
  if (ov.seed) c.seed = ov.seed;
  set_if(ov.gamma, c.rank.gamma);
  set_if(ov.tol, c.rank.tol);
  set_if(ov.max_iter, c.rank.max_iter);
  set_if(ov.min_relevant, c.rank.min_relevant);
  set_if(ov.k, c.rank.k);
  set_if(ov.ngrams, c.n_max);
  set_if(ov.trees, c.training.n_trees);
  set_if(ov.alpha, c.training.alpha);
  set_if(ov.smote_percent, c.training.smote_percent);
  set_if(ov.smote_k, c.training.smote_k);
  set_if(ov.spread_ratio, c.training.spread_ratio);
  set_if(ov.folds, c.folds);
  set_if(ov.top_n, c.top_n);
  return c;
}

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON config file; flags override it");
  sub->add_option("--out", o.out, "Output directory");
}

void add_text(CLI::App* sub, Overrides& o) {
  sub->add_option("--replacements", o.replacements, "CSV token replacement table");
}

void add_training(CLI::App* sub, Overrides& o) {
  sub->add_option("--corpus", o.corpus, "Labeled JSONL corpus");
  sub->add_option("--seed", o.seed, "Random seed");
  sub->add_option("--ngrams", o.ngrams, "Largest n-gram length (1-3)");
  sub->add_option("--classifier", o.classifier, "mnnb or rf");
  sub->add_option("--trees", o.trees, "Random forest size");
  sub->add_option("--alpha", o.alpha, "Naive Bayes smoothing");
  sub->add_option("--smote-percent", o.smote_percent, "SMOTE oversampling percentage");
  sub->add_option("--smote-k", o.smote_k, "SMOTE neighbours");
  sub->add_option("--spread-ratio", o.spread_ratio, "Spread sub-sample ratio, 0 disables");
  add_text(sub, o);
}

void add_rank(CLI::App* sub, Overrides& o) {
  sub->add_option("--corpus", o.corpus, "Classified JSONL corpus");
  sub->add_option("--graph", o.graph, "Follower CSV");
  sub->add_option("--exclusions", o.exclusions, "User ids to drop (one per line)");
  sub->add_option("--gamma", o.gamma, "Damping factor");
  sub->add_option("--tol", o.tol, "L1 convergence tolerance");
  sub->add_option("--max-iter", o.max_iter, "Iteration cap");
  sub->add_option("--min-relevant", o.min_relevant, "Relevant tweets needed to be a candidate");
  sub->add_option("--k", o.k, "Rows per report");
}

void print_error(const std::string& command, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = message;
  j["command"] = command;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* lvl = std::getenv("SENSOR_RANK_LOG")) {
    spdlog::set_level(spdlog::level::from_str(lvl));
  } else {
    spdlog::set_level(spdlog::level::warn);
  }
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Rank topic-specific influential users in a tweet corpus"};
  app.require_subcommand(1);
  Overrides o;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus and follower graph");
  add_common(synth, o);
  synth->add_option("--seed", o.seed, "Random seed");
  synth->add_option("--synth-config", o.synth_config, "Generator parameters (JSON)");

  auto* keywords = app.add_subcommand("keywords", "Expand seed keywords by TF-IDF");
  add_common(keywords, o);
  add_text(keywords, o);
  keywords->add_option("--corpus", o.corpus, "Tweets harvested with the seed keywords");
  keywords->add_option("--seeds", o.seeds, "Seed keywords (one per line)");
  keywords->add_option("--stopwords", o.stopwords, "Stopword list");
  keywords->add_option("--exclude-terms", o.exclude_terms, "Expansion terms to reject");
  keywords->add_option("--top-n", o.top_n, "Expansions to keep");

  auto* train = app.add_subcommand("train", "Train a relevance classifier");
  add_common(train, o);
  add_training(train, o);
  train->add_option("--model", o.model, "Where to write the model");

  auto* eval = app.add_subcommand("eval", "Cross-validate a relevance classifier");
  add_common(eval, o);
  add_training(eval, o);
  eval->add_option("--folds", o.folds, "Cross-validation folds");

  auto* classify = app.add_subcommand("classify", "Label tweets with a trained model");
  add_common(classify, o);
  add_text(classify, o);
  classify->add_option("--corpus", o.corpus, "JSONL corpus to label");
  classify->add_option("--model", o.model, "Trained model");

  auto* rank = app.add_subcommand("rank", "Score candidate users");
  add_common(rank, o);
  add_rank(rank, o);

  auto* report = app.add_subcommand("report", "Print the top-k table from a rank run");
  add_common(report, o);
  report->add_option("--metric", o.metric, "tr, tf or of");
  report->add_option("--k", o.k, "Rows to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const auto config = resolve(o);
    if (name == "synth") {
      sensor_rank::cmd_synth(config);
    } else if (name == "keywords") {
      const auto r = sensor_rank::cmd_keywords(config);
      for (const auto& k : r.added) std::cout << k << "\n";
    } else if (name == "train") {
      sensor_rank::cmd_train(config);
    } else if (name == "eval") {
      const auto r = sensor_rank::cmd_eval(config);
      std::cout << fmt::format("accuracy\t{:.4f}\nweighted_f\t{:.4f}\nrmse\t{:.4f}\n",
                               r.accuracy, r.weighted_f, r.rmse);
    } else if (name == "classify") {
      sensor_rank::cmd_classify(config);
    } else if (name == "rank") {
      const auto r = sensor_rank::cmd_rank(config);
      std::cout << fmt::format("candidates\t{}\niterations\t{}\nresidual\t{:.3e}\n",
                               r.candidates.size(), r.ranks.iterations,
                               r.ranks.final_residual);
    } else if (name == "report") {
      std::cout << sensor_rank::cmd_report(config);
    }
  } catch (const std::exception& e) {
    print_error(name, e.what());
    return 1;
  }
  return 0;
}
