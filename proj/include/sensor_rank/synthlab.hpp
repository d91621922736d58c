#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sensor_rank/classifier.hpp"
#include "sensor_rank/corpus_io.hpp"
#include "sensor_rank/ranker.hpp"

namespace sensor_rank {

struct PlantedInfluencer {
  std::string user_id;
  std::uint64_t relevant_count = 0;
  std::uint64_t fan_in = 0;  // candidate followers wired to this user
};

// Harvest keywords: eight seeds followed by the ten TF-IDF expansions.
const std::vector<std::string>& default_seed_keywords();
const std::vector<std::string>& default_expansion_keywords();

struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t n_users = 14000;
  // Relevant, News, Noise. Empty vocabularies are filled with generated
  // pseudo-words (vocabulary_size each).
  std::array<std::vector<std::string>, kNumLabels> class_vocabularies;
  std::size_t vocabulary_size = 300;
  ClassProbs class_mix = {0.121, 0.506, 0.373};
  // Users per relevant-count bucket (see kHistogramBuckets).
  std::array<std::size_t, 7> tail_histogram = {11860, 1058, 209, 57, 41, 1, 2};
  std::vector<PlantedInfluencer> planted_influencers = {{"zk_planted_sensor", 40, 30}};
  // Expected out-degree of a user is edge_density * (n_users - 1).
  double edge_density = 0.0005;
  // Probability that a content token comes from another class's vocabulary.
  double cross_class_noise = 0.05;
  // Probability that a content token is a shared filler word.
  double filler_rate = 0.3;
  std::size_t min_tokens = 6;
  std::size_t max_tokens = 12;
  // Candidates (>= min_relevant relevant tweets) reported as private.
  std::size_t n_private = 139;
  std::uint64_t min_relevant = 3;
  std::size_t n_training = 10000;

  static SynthConfig load(const std::filesystem::path& path);
  static SynthConfig from_json_text(const std::string& text);
  void validate() const;
};

struct SynthOutput {
  Corpus harvest;    // keyword-filtered stream with gold labels
  Corpus training;   // annotated training sample
  FollowerGraph graph;
  std::set<std::string> excluded;
  std::vector<std::string> influencers;
};

SynthOutput generate(const SynthConfig& config);

// harvest.jsonl, train.jsonl, followers.csv, exclusions.txt, manifest.json.
void write_synth(const SynthOutput& out, const SynthConfig& config,
                 const std::filesystem::path& dir);

// A corpus for keyword expansion: every document holds a seed keyword, the
// planted terms are frequent in a subset of documents, filler words are
// rare, and the stopwords and distractors appear as well.
Corpus generate_keyword_corpus(std::uint64_t seed, std::span<const std::string> seeds,
                               std::span<const std::string> planted,
                               std::span<const std::string> stopwords,
                               std::span<const std::string> distractors,
                               std::size_t n_docs);

// Dense oracle for the TwitterRank fixed point: solves
// (I - gamma P^T) x = (1 - gamma) E by Gaussian elimination with partial
// pivoting. At most 64 nodes.
std::vector<double> oracle_linear_solve(const TransitionMatrix& P,
                                        std::span<const double> teleport,
                                        double gamma);

// Exact MNNB posterior by rational arithmetic over integer counts.
ClassProbs oracle_nb_posterior(const LabeledDataset& data, double alpha,
                               const FeatureVector& query);

}  // namespace sensor_rank
