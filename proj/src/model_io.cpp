#include "sensor_rank/model_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "sensor_rank/error.hpp"

namespace sensor_rank {
namespace {

using nlohmann::ordered_json;

ordered_json vocab_to_json(const Vocabulary& v) {
  ordered_json j;
  j["doc_count"] = v.doc_count();
  j["terms"] = std::vector<std::string>(v.terms().begin(), v.terms().end());
  j["doc_freq"] = std::vector<std::uint32_t>(v.doc_freqs().begin(), v.doc_freqs().end());
  j["term_total"] =
      std::vector<std::uint64_t>(v.term_totals().begin(), v.term_totals().end());
  return j;
}

ordered_json mnnb_to_json(const MnnbModel& m) {
  ordered_json j;
  j["alpha"] = m.alpha;
  j["vocab_size"] = m.vocab_size;
  j["class_log_prior"] = m.class_log_prior;
  ordered_json rows = ordered_json::array();
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    const auto begin = m.term_log_prob.begin() + static_cast<std::ptrdiff_t>(c * m.vocab_size);
    rows.push_back(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(m.vocab_size)));
  }
  j["term_log_prob"] = std::move(rows);
  return j;
}

ordered_json rf_to_json(const RfModel& m) {
  ordered_json j;
  j["n_features"] = m.n_features;
  j["feature_subsample"] = m.feature_subsample;
  j["seed"] = m.seed;
  ordered_json trees = ordered_json::array();
  for (const auto& t : m.trees) {
    std::vector<std::int32_t> feature, left, right;
    std::vector<double> threshold;
    ordered_json dist = ordered_json::array();
    for (const auto& n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      dist.push_back(n.is_leaf() ? ordered_json(n.distribution) : ordered_json(nullptr));
    }
    ordered_json tj;
    tj["feature"] = feature;
    tj["threshold"] = threshold;
    tj["left"] = left;
    tj["right"] = right;
    tj["distribution"] = std::move(dist);
    trees.push_back(std::move(tj));
  }
  j["trees"] = std::move(trees);
  return j;
}

MnnbModel mnnb_from_json(const ordered_json& j) {
  MnnbModel m;
  m.alpha = j.at("alpha").get<double>();
  m.vocab_size = j.at("vocab_size").get<std::size_t>();
  m.class_log_prior = j.at("class_log_prior").get<ClassProbs>();
  const auto& rows = j.at("term_log_prob");
  if (rows.size() != kNumLabels) throw Error("model: term_log_prob needs 3 rows");
  for (const auto& row : rows) {
    auto r = row.get<std::vector<double>>();
    if (r.size() != m.vocab_size) throw Error("model: term_log_prob row length mismatch");
    m.term_log_prob.insert(m.term_log_prob.end(), r.begin(), r.end());
  }
  return m;
}

RfModel rf_from_json(const ordered_json& j) {
  RfModel m;
  m.n_features = j.at("n_features").get<std::size_t>();
  m.feature_subsample = j.at("feature_subsample").get<std::size_t>();
  m.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& tj : j.at("trees")) {
    const auto feature = tj.at("feature").get<std::vector<std::int32_t>>();
    const auto threshold = tj.at("threshold").get<std::vector<double>>();
    const auto left = tj.at("left").get<std::vector<std::int32_t>>();
    const auto right = tj.at("right").get<std::vector<std::int32_t>>();
    const auto& dist = tj.at("distribution");
    const auto n = feature.size();
    if (threshold.size() != n || left.size() != n || right.size() != n ||
        dist.size() != n || n == 0) {
      throw Error("model: malformed tree");
    }
    DecisionTree tree;
    tree.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& node = tree.nodes[i];
      node.feature = feature[i];
      node.threshold = threshold[i];
      node.left = left[i];
      node.right = right[i];
      if (node.is_leaf()) {
        node.distribution = dist[i].get<ClassProbs>();
      } else if (left[i] <= static_cast<std::int32_t>(i) || right[i] <= static_cast<std::int32_t>(i) ||
                 left[i] >= static_cast<std::int32_t>(n) || right[i] >= static_cast<std::int32_t>(n)) {
        throw Error("model: tree child index out of range");
      } else if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= m.n_features) {
        throw Error("model: split feature out of range");
      }
    }
    m.trees.push_back(std::move(tree));
  }
  if (m.trees.empty()) throw Error("model: forest has no trees");
  return m;
}

}  // namespace

std::string serialize_model(const RelevanceModel& model) {
  ordered_json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  const bool is_mnnb = std::holds_alternative<MnnbModel>(model.model);
  j["kind"] = is_mnnb ? "mnnb" : "rf";
  j["n_max"] = model.vocab.n_max();
  j["replacement_table_hash"] = fmt::format("{:016x}", model.replacement_table_hash);
  j["vocabulary"] = vocab_to_json(model.vocab);
  j["parameters"] = is_mnnb ? mnnb_to_json(std::get<MnnbModel>(model.model))
                            : rf_to_json(std::get<RfModel>(model.model));
  return j.dump() + "\n";
}

void save_model(const RelevanceModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << serialize_model(model);
  if (!out) throw Error(fmt::format("write failure on '{}'", path.string()));
}

RelevanceModel parse_model(const std::string& text) {
  try {
    const auto j = ordered_json::parse(text);
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw Error("model: unexpected format tag");
    }
    if (j.at("version").get<int>() != kModelVersion) {
      throw Error("model: unsupported version");
    }
    RelevanceModel m;
    const auto& vj = j.at("vocabulary");
    m.vocab = Vocabulary::from_parts(vj.at("terms").get<std::vector<std::string>>(),
                                     vj.at("doc_freq").get<std::vector<std::uint32_t>>(),
                                     vj.at("term_total").get<std::vector<std::uint64_t>>(),
                                     vj.at("doc_count").get<std::uint32_t>(),
                                     j.at("n_max").get<int>());
    m.replacement_table_hash =
        std::stoull(j.at("replacement_table_hash").get<std::string>(), nullptr, 16);
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "mnnb") {
      m.model = mnnb_from_json(j.at("parameters"));
    } else if (kind == "rf") {
      m.model = rf_from_json(j.at("parameters"));
    } else {
      throw Error(fmt::format("model: unknown kind '{}'", kind));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("model: {}", e.what()));
  }
}

RelevanceModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model(ss.str());
  } catch (const Error& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace sensor_rank
