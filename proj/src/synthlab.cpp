#include "sensor_rank/synthlab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <fmt/core.h>
#include <json.hpp>

#include "sensor_rank/error.hpp"
#include "sensor_rank/random.hpp"

namespace sensor_rank {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 66> kFillerWords = {
    "de",     "que",    "nao",    "para",  "com",   "uma",   "os",     "no",
    "se",     "na",     "por",    "mais",  "as",    "dos",   "como",   "mas",
    "foi",    "ao",     "ele",    "das",   "tem",   "seu",   "sua",    "ou",
    "ser",    "quando", "muito",  "nos",   "ja",    "esta",  "eu",     "tambem",
    "so",     "pelo",   "pela",   "ate",   "isso",  "ela",   "entre",  "era",
    "depois", "sem",    "mesmo",  "aos",   "ter",   "seus",  "quem",   "nas",
    "me",     "esse",   "eles",   "estao", "voce",  "tinha", "foram",  "essa",
    "num",    "nem",    "suas",   "meu",   "minha", "hoje",  "agora",  "gente",
    "vai",    "aqui"};

constexpr std::string_view kConsonants = "bcdfglmnprstvz";
constexpr std::string_view kVowels = "aeiou";

std::string pseudo_word(Rng& rng) {
  const auto syllables = rng.between(2, 4);
  std::string w;
  for (std::int64_t s = 0; s < syllables; ++s) {
    w.push_back(kConsonants[rng.below(kConsonants.size())]);
    w.push_back(kVowels[rng.below(kVowels.size())]);
  }
  return w;
}

// Fills empty class vocabularies with fresh pseudo-words that collide with
// nothing already in use.
std::array<std::vector<std::string>, kNumLabels> resolve_vocabularies(
    const SynthConfig& config) {
  std::unordered_set<std::string> used;
  for (auto w : kFillerWords) used.emplace(w);
  for (const auto& k : default_seed_keywords()) used.insert(k);
  for (const auto& k : default_expansion_keywords()) used.insert(k);
  for (auto t : {"url", "image", "number", "funny"}) used.insert(t);
  for (const auto& v : config.class_vocabularies) used.insert(v.begin(), v.end());

  auto vocabs = config.class_vocabularies;
  Rng rng = Rng::derive(config.seed, 1);
  for (auto& v : vocabs) {
    if (!v.empty()) continue;
    while (v.size() < config.vocabulary_size) {
      auto w = pseudo_word(rng);
      if (used.insert(w).second) v.push_back(std::move(w));
    }
  }
  return vocabs;
}

// Days since 1970-01-01 to y-m-d (proleptic Gregorian).
std::string iso_timestamp(std::int64_t unix_seconds) {
  std::int64_t days = unix_seconds / 86400;
  const std::int64_t secs = unix_seconds % 86400;
  days += 719468;
  const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const std::int64_t doe = days - era * 146097;
  const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::int64_t mp = (5 * doy + 2) / 153;
  const std::int64_t d = doy - (153 * mp + 2) / 5 + 1;
  const std::int64_t m = mp < 10 ? mp + 3 : mp - 9;
  const std::int64_t y = yoe + era * 400 + (m <= 2 ? 1 : 0);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", y, m, d, secs / 3600,
                     (secs / 60) % 60, secs % 60);
}

constexpr std::int64_t kHarvestStart = 1472688000;  // 2016-09-01T00:00:00Z
constexpr std::int64_t kHarvestEnd = 1483228800;    // 2017-01-01T00:00:00Z

class TextGenerator {
 public:
  TextGenerator(const SynthConfig& config,
                std::array<std::vector<std::string>, kNumLabels> vocabs)
      : config_(config), vocabs_(std::move(vocabs)) {
    keywords_ = default_seed_keywords();
    keywords_.insert(keywords_.end(), default_expansion_keywords().begin(),
                     default_expansion_keywords().end());
  }

  std::string tweet(Label label, Rng& rng) const {
    const auto c = index_of(label);
    const auto n = static_cast<std::size_t>(rng.between(
        static_cast<std::int64_t>(config_.min_tokens),
        static_cast<std::int64_t>(config_.max_tokens)));
    std::vector<std::string> words;
    words.reserve(n + 3);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform();
      if (u < config_.filler_rate) {
        words.emplace_back(kFillerWords[rng.below(kFillerWords.size())]);
      } else if (u < config_.filler_rate + config_.cross_class_noise) {
        const auto other = (c + 1 + rng.below(kNumLabels - 1)) % kNumLabels;
        words.push_back(pick(vocabs_[other], rng));
      } else {
        words.push_back(pick(vocabs_[c], rng));
      }
    }
    auto keyword = pick(keywords_, rng);
    if (rng.bernoulli(0.3)) keyword = "#" + keyword;
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size() + 1)),
                 std::move(keyword));
    if (rng.bernoulli(0.5)) words.front()[0] = static_cast<char>(std::toupper(words.front()[0]));

    switch (label) {
      case Label::News:
        if (rng.bernoulli(0.5)) words.push_back("https://t.co/" + token(rng, 8));
        break;
      case Label::Noise:
        if (rng.bernoulli(0.3)) words.insert(words.begin(), rng.bernoulli(0.5) ? "kkkkk" : "hahaha");
        break;
      case Label::Relevant:
        if (rng.bernoulli(0.2)) words.push_back("pic.twitter.com/" + token(rng, 6));
        break;
    }
    if (rng.bernoulli(0.1)) words.emplace_back(":)");

    std::string text;
    for (const auto& w : words) {
      if (!text.empty()) text.push_back(' ');
      text += w;
    }
    return text;
  }

 private:
  static const std::string& pick(const std::vector<std::string>& v, Rng& rng) {
    return v[rng.below(v.size())];
  }

  static std::string token(Rng& rng, std::size_t len) {
    static constexpr std::string_view alnum =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(alnum[rng.below(alnum.size())]);
    return s;
  }

  const SynthConfig& config_;
  std::array<std::vector<std::string>, kNumLabels> vocabs_;
  std::vector<std::string> keywords_;
};

struct Bucket {
  std::uint64_t lo, hi;
};

Bucket bucket_range(std::size_t b) {
  static constexpr std::array<Bucket, 7> ranges = {
      {{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 9}, {10, 19}, {20, 30}}};
  return ranges[b];
}

std::size_t bucket_of(std::uint64_t r) {
  return r <= 4 ? r - 1 : r <= 9 ? 4 : r <= 19 ? 5 : 6;
}

}  // namespace

const std::vector<std::string>& default_seed_keywords() {
  static const std::vector<std::string> seeds = {
      "dengue", "combateadengue", "focodengue",  "todoscontradengue",
      "aedeseagypti", "zika",     "chikungunya", "virus"};
  return seeds;
}

const std::vector<std::string>& default_expansion_keywords() {
  static const std::vector<std::string> terms = {
      "microcefalia", "transmitido", "epidemia",  "transmissao", "doenca",
      "eagypti",      "doencas",     "gestantes", "infeccao",    "mosquitos"};
  return terms;
}

void SynthConfig::validate() const {
  double mix = 0.0;
  for (double p : class_mix) {
    if (p < 0.0) throw Error("synth: negative class_mix entry");
    mix += p;
  }
  if (std::abs(mix - 1.0) > 1e-9) throw Error("synth: class_mix must sum to 1");
  if (class_mix[0] <= 0.0) throw Error("synth: class_mix for Relevant must be positive");
  std::unordered_set<std::string> seen;
  for (const auto& v : class_vocabularies) {
    for (const auto& w : v) {
      if (!seen.insert(w).second) {
        throw Error(fmt::format("synth: word '{}' appears in two class vocabularies", w));
      }
    }
  }
  if (vocabulary_size == 0) throw Error("synth: vocabulary_size must be positive");
  if (min_tokens < 1 || min_tokens > max_tokens) throw Error("synth: bad token range");
  if (cross_class_noise < 0.0 || filler_rate < 0.0 || cross_class_noise + filler_rate > 1.0) {
    throw Error("synth: noise and filler rates must be probabilities summing to <= 1");
  }
  if (edge_density < 0.0 || edge_density > 1.0) throw Error("synth: bad edge_density");
  std::size_t demanded = planted_influencers.size();
  for (auto c : tail_histogram) demanded += c;
  for (const auto& p : planted_influencers) {
    if (p.relevant_count == 0) throw Error("synth: planted influencer needs relevant tweets");
    const auto b = bucket_of(p.relevant_count);
    if (tail_histogram[b] == 0) {
      throw Error(fmt::format("synth: no histogram slot for influencer '{}'", p.user_id));
    }
    --demanded;
  }
  if (demanded > n_users) {
    throw Error(fmt::format("synth: infeasible histogram, {} users demanded but n_users={}",
                            demanded, n_users));
  }
}

SynthConfig SynthConfig::from_json_text(const std::string& text) {
  SynthConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(fmt::format("synth config: {}", e.what()));
  }
  static const std::set<std::string> known = {
      "seed",          "n_users",          "class_vocabularies", "vocabulary_size",
      "class_mix",     "tail_histogram",   "planted_influencers", "edge_density",
      "cross_class_noise", "filler_rate",  "min_tokens",         "max_tokens",
      "n_private",     "min_relevant",     "n_training"};
  try {
    for (const auto& [key, value] : j.items()) {
      if (!known.contains(key)) throw Error(fmt::format("synth config: unknown field '{}'", key));
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("n_users")) c.n_users = j["n_users"].get<std::size_t>();
    if (j.contains("class_vocabularies")) {
      c.class_vocabularies =
          j["class_vocabularies"].get<std::array<std::vector<std::string>, kNumLabels>>();
    }
    if (j.contains("vocabulary_size")) c.vocabulary_size = j["vocabulary_size"].get<std::size_t>();
    if (j.contains("class_mix")) c.class_mix = j["class_mix"].get<ClassProbs>();
    if (j.contains("tail_histogram")) {
      const auto& h = j["tail_histogram"];
      if (h.is_array()) {
        c.tail_histogram = h.get<std::array<std::size_t, 7>>();
      } else {
        c.tail_histogram = {};
        for (const auto& [bucket, count] : h.items()) {
          const auto it = std::find(kHistogramBuckets.begin(), kHistogramBuckets.end(), bucket);
          if (it == kHistogramBuckets.end()) {
            throw Error(fmt::format("synth config: unknown histogram bucket '{}'", bucket));
          }
          c.tail_histogram[static_cast<std::size_t>(it - kHistogramBuckets.begin())] =
              count.get<std::size_t>();
        }
      }
    }
    if (j.contains("planted_influencers")) {
      c.planted_influencers.clear();
      for (const auto& p : j["planted_influencers"]) {
        c.planted_influencers.push_back({p.at("user_id").get<std::string>(),
                                         p.at("relevant_count").get<std::uint64_t>(),
                                         p.at("fan_in").get<std::uint64_t>()});
      }
    }
    if (j.contains("edge_density")) c.edge_density = j["edge_density"].get<double>();
    if (j.contains("cross_class_noise")) c.cross_class_noise = j["cross_class_noise"].get<double>();
    if (j.contains("filler_rate")) c.filler_rate = j["filler_rate"].get<double>();
    if (j.contains("min_tokens")) c.min_tokens = j["min_tokens"].get<std::size_t>();
    if (j.contains("max_tokens")) c.max_tokens = j["max_tokens"].get<std::size_t>();
    if (j.contains("n_private")) c.n_private = j["n_private"].get<std::size_t>();
    if (j.contains("min_relevant")) c.min_relevant = j["min_relevant"].get<std::uint64_t>();
    if (j.contains("n_training")) c.n_training = j["n_training"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(fmt::format("synth config: {}", e.what()));
  }
  c.validate();
  return c;
}

SynthConfig SynthConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

SynthOutput generate(const SynthConfig& config) {
  config.validate();
  SynthOutput out;
  const TextGenerator text(config, resolve_vocabularies(config));

  // Relevant counts per generated user, drawn from the tail histogram after
  // the influencers have taken their slots.
  auto slots = config.tail_histogram;
  std::uint64_t influencer_floor = UINT64_MAX;
  for (const auto& p : config.planted_influencers) {
    --slots[bucket_of(p.relevant_count)];
    influencer_floor = std::min(influencer_floor, p.relevant_count);
    out.influencers.push_back(p.user_id);
  }
  const std::size_t n_generated = config.n_users - config.planted_influencers.size();
  Rng rng = Rng::derive(config.seed, 2);
  std::vector<std::uint64_t> relevant;
  relevant.reserve(n_generated);
  for (std::size_t b = 0; b < slots.size(); ++b) {
    auto [lo, hi] = bucket_range(b);
    if (b == 6 && influencer_floor != UINT64_MAX && influencer_floor > lo) {
      hi = std::min(hi, influencer_floor - 1);
    }
    if (slots[b] > 0 && hi < lo) {
      throw Error("synth: influencer relevant_count leaves no room in the top bucket");
    }
    for (std::size_t i = 0; i < slots[b]; ++i) {
      relevant.push_back(static_cast<std::uint64_t>(
          rng.between(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi))));
    }
  }
  relevant.resize(n_generated, 0);
  rng.shuffle(std::span<std::uint64_t>(relevant));

  std::vector<std::string> users;
  std::vector<std::uint64_t> user_relevant;
  for (std::size_t i = 0; i < n_generated; ++i) {
    users.push_back(fmt::format("u{:05}", i));
    user_relevant.push_back(relevant[i]);
  }
  for (const auto& p : config.planted_influencers) {
    users.push_back(p.user_id);
    user_relevant.push_back(p.relevant_count);
  }

  // Non-relevant volume follows class_mix; only generated users post it.
  std::uint64_t relevant_total = 0;
  for (auto r : user_relevant) relevant_total += r;
  const auto n_tweets = static_cast<std::uint64_t>(
      std::llround(static_cast<double>(relevant_total) / config.class_mix[0]));
  const auto n_news = static_cast<std::uint64_t>(
      std::llround(static_cast<double>(n_tweets) * config.class_mix[1]));
  const auto n_noise = n_tweets - relevant_total - n_news;

  struct Draft {
    std::uint32_t user;
    Label label;
  };
  std::vector<Draft> drafts;
  drafts.reserve(n_tweets);
  std::vector<std::uint64_t> harvest(users.size(), 0);
  for (std::uint32_t u = 0; u < users.size(); ++u) {
    for (std::uint64_t k = 0; k < user_relevant[u]; ++k) drafts.push_back({u, Label::Relevant});
    harvest[u] += user_relevant[u];
  }
  for (std::uint64_t k = 0; k < n_news + n_noise; ++k) {
    const auto u = static_cast<std::uint32_t>(rng.below(n_generated));
    drafts.push_back({u, k < n_news ? Label::News : Label::Noise});
    ++harvest[u];
  }
  rng.shuffle(std::span<Draft>(drafts));

  std::vector<std::uint64_t> total(users.size(), 0);
  for (std::size_t u = 0; u < users.size(); ++u) {
    if (u >= n_generated) {
      total[u] = (harvest[u] * 5 + 3) / 4;
    } else {
      total[u] = harvest[u] * static_cast<std::uint64_t>(1 + rng.between(4, 40));
    }
  }

  std::vector<std::int64_t> times(drafts.size());
  for (auto& t : times) t = rng.between(kHarvestStart, kHarvestEnd - 1);
  std::sort(times.begin(), times.end());

  Rng text_rng = Rng::derive(config.seed, 3);
  out.harvest.records.reserve(drafts.size());
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    const auto& d = drafts[i];
    TweetRecord r;
    r.id = fmt::format("t{:07}", i + 1);
    r.author = users[d.user];
    r.text = text.tweet(d.label, text_rng);
    r.created_at = iso_timestamp(times[i]);
    r.label = d.label;
    r.user_total_tweets = total[d.user];
    out.harvest.records.push_back(std::move(r));
  }

  // Private accounts, then planted followers, from the candidate pool.
  std::vector<std::uint32_t> pool;
  for (std::uint32_t u = 0; u < n_generated; ++u) {
    if (user_relevant[u] >= config.min_relevant) pool.push_back(u);
  }
  Rng graph_rng = Rng::derive(config.seed, 4);
  graph_rng.shuffle(std::span<std::uint32_t>(pool));
  if (pool.size() < config.n_private) {
    throw Error(fmt::format("synth: only {} candidates, cannot mark {} private",
                            pool.size(), config.n_private));
  }
  for (std::size_t i = 0; i < config.n_private; ++i) out.excluded.insert(users[pool[i]]);
  const std::vector<std::uint32_t> visible(pool.begin() + static_cast<std::ptrdiff_t>(config.n_private),
                                           pool.end());

  const auto n_all = users.size();
  const auto mean_degree = config.edge_density * static_cast<double>(n_all - 1);
  const auto max_degree = static_cast<std::uint64_t>(std::llround(2.0 * mean_degree));
  for (std::uint32_t u = 0; u < n_all; ++u) {
    const auto degree = std::min<std::uint64_t>(graph_rng.below(max_degree + 1), n_all - 1);
    std::set<std::uint32_t> targets;
    while (targets.size() < degree) {
      const auto v = static_cast<std::uint32_t>(graph_rng.below(n_all));
      if (v != u) targets.insert(v);
    }
    for (auto v : targets) out.graph.add_edge(users[u], users[v]);
  }
  for (std::size_t p = 0; p < config.planted_influencers.size(); ++p) {
    const auto& inf = config.planted_influencers[p];
    if (visible.size() < inf.fan_in) {
      throw Error(fmt::format("synth: fan_in {} exceeds the {} visible candidates",
                              inf.fan_in, visible.size()));
    }
    auto followers = visible;
    graph_rng.shuffle(std::span<std::uint32_t>(followers));
    for (std::uint64_t f = 0; f < inf.fan_in; ++f) {
      out.graph.add_edge(users[followers[f]], inf.user_id);
    }
  }

  // Annotated training sample with exact class proportions.
  Rng train_rng = Rng::derive(config.seed, 5);
  const auto n_train = config.n_training;
  const auto train_news = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_train) * config.class_mix[1]));
  const auto train_noise = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_train) * config.class_mix[2]));
  std::vector<Label> train_labels;
  for (std::size_t i = 0; i < n_train; ++i) {
    train_labels.push_back(i < train_news                 ? Label::News
                           : i < train_news + train_noise ? Label::Noise
                                                          : Label::Relevant);
  }
  train_rng.shuffle(std::span<Label>(train_labels));
  for (std::size_t i = 0; i < n_train; ++i) {
    TweetRecord r;
    r.id = fmt::format("s{:07}", i + 1);
    r.author = fmt::format("a{:05}", train_rng.below(5000));
    r.text = text.tweet(train_labels[i], train_rng);
    r.created_at = iso_timestamp(train_rng.between(kHarvestStart, kHarvestEnd - 1));
    r.label = train_labels[i];
    out.training.records.push_back(std::move(r));
  }
  return out;
}

void write_synth(const SynthOutput& out, const SynthConfig& config,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_corpus(out.harvest, dir / "harvest.jsonl");
  write_corpus(out.training, dir / "train.jsonl");
  write_follower_graph(out.graph, dir / "followers.csv");
  {
    std::ofstream ex(dir / "exclusions.txt", std::ios::binary);
    for (const auto& u : out.excluded) ex << u << '\n';
  }
  nlohmann::ordered_json m;
  m["seed"] = config.seed;
  m["n_users"] = config.n_users;
  m["harvest_tweets"] = out.harvest.size();
  m["training_tweets"] = out.training.size();
  m["follow_edges"] = out.graph.edges.size();
  m["excluded_users"] = out.excluded.size();
  m["influencers"] = out.influencers;
  std::ofstream mf(dir / "manifest.json", std::ios::binary);
  mf << m.dump(2) << '\n';
}

Corpus generate_keyword_corpus(std::uint64_t seed, std::span<const std::string> seeds,
                               std::span<const std::string> planted,
                               std::span<const std::string> stopwords,
                               std::span<const std::string> distractors,
                               std::size_t n_docs) {
  if (seeds.empty()) throw Error("keyword corpus needs seed keywords");
  Rng rng = Rng::derive(seed, 6);
  std::unordered_set<std::string> used(seeds.begin(), seeds.end());
  used.insert(planted.begin(), planted.end());
  used.insert(stopwords.begin(), stopwords.end());
  used.insert(distractors.begin(), distractors.end());
  std::vector<std::string> filler;
  while (filler.size() < 3000) {
    auto w = pseudo_word(rng);
    if (used.insert(w).second) filler.push_back(std::move(w));
  }

  Corpus corpus;
  for (std::size_t d = 0; d < n_docs; ++d) {
    std::vector<std::string> words;
    words.push_back(seeds[rng.below(seeds.size())]);
    for (int i = 0; i < 6; ++i) words.push_back(filler[rng.below(filler.size())]);
    for (const auto& s : stopwords) {
      if (rng.bernoulli(0.8)) words.push_back(s);
    }
    for (const auto& t : planted) {
      if (rng.bernoulli(0.3)) words.insert(words.end(), 1 + rng.below(2), t);
    }
    for (const auto& t : distractors) {
      if (rng.bernoulli(0.4)) words.insert(words.end(), 1 + rng.below(2), t);
    }
    rng.shuffle(std::span<std::string>(words));
    std::string text;
    for (const auto& w : words) {
      if (!text.empty()) text.push_back(' ');
      text += w;
    }
    TweetRecord r;
    r.id = fmt::format("k{:06}", d + 1);
    r.author = fmt::format("k{:04}", rng.below(1000));
    r.text = std::move(text);
    r.created_at = iso_timestamp(rng.between(kHarvestStart, kHarvestEnd - 1));
    corpus.records.push_back(std::move(r));
  }
  return corpus;
}

}  // namespace sensor_rank
