#include "sensor_rank/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "sensor_rank/error.hpp"
#include "sensor_rank/model_io.hpp"
#include "sensor_rank/synthlab.hpp"
#include "sensor_rank/text.hpp"

namespace sensor_rank {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw Error(fmt::format("write failure on '{}'", path.string()));
}

const std::filesystem::path& require_path(const std::filesystem::path& p,
                                          std::string_view what) {
  if (p.empty()) throw Error(fmt::format("missing required --{}", what));
  if (!std::filesystem::exists(p)) {
    throw Error(fmt::format("--{} '{}' does not exist", what, p.string()));
  }
  return p;
}

ReplacementTable replacement_table(const PipelineConfig& c) {
  return c.replacements.empty() ? ReplacementTable{}
                                : ReplacementTable::load(require_path(c.replacements, "replacements"));
}

std::filesystem::path model_path(const PipelineConfig& c) {
  return c.model.empty() ? c.out_dir / "model.json" : c.model;
}

LabeledDataset to_dataset(const Corpus& corpus, const ReplacementTable& table,
                          int n_max, Vocabulary& vocab) {
  std::vector<TokenSequence> docs;
  docs.reserve(corpus.size());
  for (const auto& r : corpus.records) {
    if (!r.label) throw Error(fmt::format("training record '{}' has no label", r.id));
    docs.push_back(normalize(r.text, table));
  }
  vocab = build_vocabulary(docs, n_max);
  LabeledDataset data;
  data.n_features = vocab.size();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    data.push_back(vectorize(docs[i], vocab), *corpus.records[i].label);
  }
  return data;
}

ordered_json eval_to_json(const EvalReport& r) {
  ordered_json j;
  j["instances"] = r.n;
  j["accuracy"] = r.accuracy;
  j["weighted_f"] = r.weighted_f;
  j["rmse"] = r.rmse;
  ordered_json per = ordered_json::object();
  for (auto l : kAllLabels) {
    const auto& m = r.per_class[index_of(l)];
    per[std::string(to_string(l))] = {{"precision", m.precision},
                                      {"recall", m.recall},
                                      {"f_measure", m.f_measure},
                                      {"support", m.support}};
  }
  j["per_class"] = std::move(per);
  j["confusion"] = r.confusion;
  return j;
}

ordered_json row_to_json(const ReportRow& r) {
  ordered_json j;
  j["user_id"] = r.user_id;
  j["relevant_count"] = r.relevant_count;
  j["harvest_count"] = r.harvest_count;
  j["total_count"] = r.total_count;
  j["tr_score"] = r.tr_score;
  j["tr_rank"] = r.tr_rank;
  j["topic_focus"] = r.topic_focus;
  j["tf_rank"] = r.tf_rank;
  j["overall_focus"] = r.overall_focus;
  j["of_rank"] = r.of_rank;
  j["total_defaulted"] = r.total_count_defaulted;
  return j;
}

ReportRow row_from_json(const json& j) {
  ReportRow r;
  r.user_id = j.at("user_id").get<std::string>();
  r.relevant_count = j.at("relevant_count").get<std::uint64_t>();
  r.harvest_count = j.at("harvest_count").get<std::uint64_t>();
  r.total_count = j.at("total_count").get<std::uint64_t>();
  r.tr_score = j.at("tr_score").get<double>();
  r.tr_rank = j.at("tr_rank").get<std::size_t>();
  r.topic_focus = j.at("topic_focus").get<double>();
  r.tf_rank = j.at("tf_rank").get<std::size_t>();
  r.overall_focus = j.at("overall_focus").get<double>();
  r.of_rank = j.at("of_rank").get<std::size_t>();
  r.total_count_defaulted = j.at("total_defaulted").get<bool>();
  return r;
}

std::size_t rank_under(const ReportRow& r, RankMetric m) {
  switch (m) {
    case RankMetric::TwitterRank: return r.tr_rank;
    case RankMetric::TopicFocus: return r.tf_rank;
    case RankMetric::OverallFocus: return r.of_rank;
  }
  return r.tr_rank;
}

}  // namespace

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(fmt::format("config: {}", e.what()));
  }
  if (!j.is_object()) throw Error("config: top level must be an object");
  PipelineConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "corpus") c.corpus = v.get<std::string>();
      else if (key == "graph") c.graph = v.get<std::string>();
      else if (key == "replacements") c.replacements = v.get<std::string>();
      else if (key == "stopwords") c.stopwords = v.get<std::string>();
      else if (key == "exclusions") c.exclusions = v.get<std::string>();
      else if (key == "model") c.model = v.get<std::string>();
      else if (key == "out") c.out_dir = v.get<std::string>();
      else if (key == "seeds") c.seeds = v.get<std::string>();
      else if (key == "exclude_terms") c.exclude_terms = v.get<std::string>();
      else if (key == "synth_config") c.synth_config = v.get<std::string>();
      else if (key == "ngrams") c.n_max = v.get<int>();
      else if (key == "classifier") c.training.kind = parse_classifier_kind(v.get<std::string>());
      else if (key == "alpha") c.training.alpha = v.get<double>();
      else if (key == "trees") c.training.n_trees = v.get<int>();
      else if (key == "smote_percent") c.training.smote_percent = v.get<int>();
      else if (key == "smote_k") c.training.smote_k = v.get<int>();
      else if (key == "spread_ratio") c.training.spread_ratio = v.get<double>();
      else if (key == "folds") c.folds = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "gamma") c.rank.gamma = v.get<double>();
      else if (key == "tol") c.rank.tol = v.get<double>();
      else if (key == "max_iter") c.rank.max_iter = v.get<int>();
      else if (key == "min_relevant") c.rank.min_relevant = v.get<std::uint64_t>();
      else if (key == "k") c.rank.k = v.get<int>();
      else if (key == "metric") c.metric = parse_rank_metric(v.get<std::string>());
      else if (key == "top_n") c.top_n = v.get<int>();
      else throw Error(fmt::format("config: unknown field '{}'", key));
    }
  } catch (const json::exception& e) {
    throw Error(fmt::format("config: {}", e.what()));
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  return from_json_text(read_file(path));
}

std::uint64_t PipelineConfig::require_seed(std::string_view command) const {
  if (!seed) throw Error(fmt::format("{} is stochastic and requires --seed", command));
  return *seed;
}

KeywordReport cmd_keywords(const PipelineConfig& config) {
  const auto corpus = load_corpus(require_path(config.corpus, "corpus"));
  if (corpus.records.empty()) throw Error("keywords: expansion corpus is empty");
  if (config.top_n < 0) throw Error("keywords: top-n must be nonnegative");
  const auto table = replacement_table(config);

  KeywordReport report;
  const auto seeds = config.seeds.empty()
                         ? KeywordSet(default_seed_keywords())
                         : KeywordSet::load(require_path(config.seeds, "seeds"));
  // Keep the file's order for display; KeywordSet is for membership.
  if (config.seeds.empty()) {
    report.seeds = default_seed_keywords();
  } else {
    std::ifstream in(config.seeds);
    std::string line;
    while (std::getline(in, line)) {
      auto t = fold_text(line);
      std::erase_if(t, [](char ch) { return ch == ' ' || ch == '\r' || ch == '\t'; });
      if (!t.empty() && t.front() != '#' &&
          std::find(report.seeds.begin(), report.seeds.end(), t) == report.seeds.end()) {
        report.seeds.push_back(t);
      }
    }
  }
  const StopwordSet stopwords =
      config.stopwords.empty() ? StopwordSet{} : load_stopwords(require_path(config.stopwords, "stopwords"));
  const KeywordSet rejected = config.exclude_terms.empty()
                                  ? KeywordSet{}
                                  : KeywordSet::load(require_path(config.exclude_terms, "exclude-terms"));

  const auto vocab = build_vocabulary(corpus, table, 1);
  for (auto& ts : tfidf_rank(vocab, stopwords)) {
    if (seeds.contains(ts.term) || rejected.contains(ts.term)) continue;
    report.candidates.push_back(std::move(ts));
  }
  for (std::size_t i = 0;
       i < report.candidates.size() && i < static_cast<std::size_t>(config.top_n); ++i) {
    report.added.push_back(report.candidates[i].term);
  }
  report.merged = report.seeds;
  report.merged.insert(report.merged.end(), report.added.begin(), report.added.end());

  std::filesystem::create_directories(config.out_dir);
  std::string merged;
  for (const auto& k : report.merged) merged += k + "\n";
  write_file(config.out_dir / "keywords.txt", merged);
  ordered_json j;
  j["seeds"] = report.seeds;
  j["added"] = report.added;
  j["merged"] = report.merged;
  ordered_json ranked = ordered_json::array();
  for (std::size_t i = 0; i < report.candidates.size() && i < 50; ++i) {
    ranked.push_back({{"term", report.candidates[i].term},
                      {"score", report.candidates[i].score}});
  }
  j["ranked_candidates"] = std::move(ranked);
  write_file(config.out_dir / "keywords.json", j.dump(2) + "\n");
  spdlog::info("keywords: {} seeds + {} expansions", report.seeds.size(), report.added.size());
  return report;
}

void cmd_train(const PipelineConfig& config) {
  const auto seed = config.require_seed("train");
  const auto corpus = load_corpus(require_path(config.corpus, "corpus"));
  const auto table = replacement_table(config);
  RelevanceModel model;
  const auto data = to_dataset(corpus, table, config.n_max, model.vocab);
  spdlog::info("train: {} documents, {} features, classifier {}", data.size(),
               data.n_features, to_string(config.training.kind));
  model.model = train_model(data, config.training, seed);
  model.replacement_table_hash = table.hash();
  const auto path = model_path(config);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  save_model(model, path);
  spdlog::info("train: model written to {}", path.string());
}

EvalReport cmd_eval(const PipelineConfig& config) {
  const auto seed = config.require_seed("eval");
  const auto corpus = load_corpus(require_path(config.corpus, "corpus"));
  const auto table = replacement_table(config);
  Vocabulary vocab;
  const auto data = to_dataset(corpus, table, config.n_max, vocab);
  const auto report = cross_validate(data, config.folds, config.training, seed);

  std::filesystem::create_directories(config.out_dir);
  auto j = eval_to_json(report);
  j["classifier"] = to_string(config.training.kind);
  j["ngrams"] = config.n_max;
  j["folds"] = config.folds;
  write_file(config.out_dir / "eval.json", j.dump(2) + "\n");
  spdlog::info("eval: accuracy {:.4f}, weighted F {:.4f}, RMSE {:.4f}", report.accuracy,
               report.weighted_f, report.rmse);
  return report;
}

void cmd_classify(const PipelineConfig& config) {
  const auto corpus = load_corpus(require_path(config.corpus, "corpus"));
  const auto model = load_model(require_path(model_path(config), "model"));
  const auto table = replacement_table(config);
  if (table.hash() != model.replacement_table_hash) {
    throw Error("classify: replacement table differs from the one the model was trained with");
  }
  std::vector<FeatureVector> vectors;
  vectors.reserve(corpus.size());
  for (const auto& r : corpus.records) {
    vectors.push_back(vectorize(normalize(r.text, table), model.vocab));
  }
  const auto predictions = predict_batch(model.model, vectors);
  Corpus out = corpus;
  ClassCounts counts{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.records[i].label = predictions[i].label;
    ++counts[index_of(predictions[i].label)];
  }
  std::filesystem::create_directories(config.out_dir);
  write_corpus(out, config.out_dir / "classified.jsonl");
  spdlog::info("classify: {} relevant, {} news, {} noise", counts[0], counts[1], counts[2]);
}

RankOutcome cmd_rank(const PipelineConfig& config) {
  const auto corpus = load_corpus(require_path(config.corpus, "corpus"));
  const auto graph = load_follower_graph(require_path(config.graph, "graph"));
  const auto excluded = config.exclusions.empty()
                            ? std::set<std::string>{}
                            : load_id_list(require_path(config.exclusions, "exclusions"));

  RankOutcome out;
  const auto stats = compute_user_stats(corpus);
  out.histogram = relevant_histogram(stats);
  out.users_over_threshold = static_cast<std::size_t>(
      std::count_if(stats.begin(), stats.end(), [&](const auto& kv) {
        return kv.second.relevant_count >= config.rank.min_relevant;
      }));
  out.candidates = candidate_filter(stats, config.rank, excluded);
  const auto P = build_transition(out.candidates, graph);
  out.ranks = twitterrank(P, out.candidates, config.rank);
  if (!out.ranks.converged) {
    spdlog::warn("rank: TwitterRank stopped after {} iterations, residual {:.3e}",
                 out.ranks.iterations, out.ranks.final_residual);
  }
  std::set<std::string> ids;
  for (const auto& c : out.candidates) ids.insert(c.user_id);
  out.components = connected_components(graph, ids);

  std::filesystem::create_directories(config.out_dir);
  for (auto metric : {RankMetric::TwitterRank, RankMetric::TopicFocus, RankMetric::OverallFocus}) {
    const auto report = ranking_report(out.candidates, out.ranks, config.rank, metric);
    std::ostringstream tsv;
    write_report_tsv(report, tsv);
    const auto stem = fmt::format("ranking_{}", to_string(metric));
    write_file(config.out_dir / (stem + ".tsv"), tsv.str());
    write_file(config.out_dir / (stem + ".json"), report_json(report));
  }

  ordered_json scores;
  scores["candidates"] = out.candidates.size();
  scores["users_over_threshold"] = out.users_over_threshold;
  scores["excluded"] = excluded.size();
  ordered_json hist = ordered_json::object();
  for (std::size_t b = 0; b < kHistogramBuckets.size(); ++b) {
    hist[std::string(kHistogramBuckets[b])] = out.histogram[b];
  }
  scores["relevant_histogram"] = std::move(hist);
  scores["gamma"] = config.rank.gamma;
  scores["iterations"] = out.ranks.iterations;
  scores["final_residual"] = out.ranks.final_residual;
  scores["converged"] = out.ranks.converged;
  ordered_json rows = ordered_json::array();
  for (const auto& r : ranked_rows(out.candidates, out.ranks, RankMetric::TwitterRank)) {
    rows.push_back(row_to_json(r));
  }
  scores["rows"] = std::move(rows);
  write_file(config.out_dir / "scores.json", scores.dump(2) + "\n");

  ordered_json comps;
  comps["components"] = out.components.components;
  ordered_json pairs = ordered_json::array();
  for (const auto& [a, b] : out.components.friend_pairs) pairs.push_back({a, b});
  comps["friend_pairs"] = std::move(pairs);
  write_file(config.out_dir / "components.json", comps.dump(2) + "\n");

  spdlog::info("rank: {} users with >= {} relevant tweets, {} candidates after exclusions",
               out.users_over_threshold, config.rank.min_relevant, out.candidates.size());
  return out;
}

std::string cmd_report(const PipelineConfig& config) {
  if (config.rank.k < 1) throw Error("report size k must be at least 1");
  const auto path = config.out_dir / "scores.json";
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
  RankingReport report;
  report.metric = config.metric;
  for (const auto& r : j.at("rows")) report.rows.push_back(row_from_json(r));
  std::sort(report.rows.begin(), report.rows.end(), [&](const auto& a, const auto& b) {
    return rank_under(a, config.metric) < rank_under(b, config.metric);
  });
  if (report.rows.size() > static_cast<std::size_t>(config.rank.k)) {
    report.rows.resize(static_cast<std::size_t>(config.rank.k));
  }
  std::ostringstream out;
  write_report_tsv(report, out);
  return out.str();
}

void cmd_synth(const PipelineConfig& config) {
  auto synth = config.synth_config.empty()
                   ? SynthConfig{}
                   : SynthConfig::load(require_path(config.synth_config, "synth-config"));
  synth.seed = config.require_seed("synth");
  const auto out = generate(synth);
  write_synth(out, synth, config.out_dir);
  spdlog::info("synth: {} harvest tweets, {} training tweets, {} follow edges",
               out.harvest.size(), out.training.size(), out.graph.edges.size());
}

}  // namespace sensor_rank
