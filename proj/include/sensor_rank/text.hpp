#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sensor_rank/features.hpp"

namespace sensor_rank {

struct Corpus;

using TokenSequence = std::vector<std::string>;
using StopwordSet = std::unordered_set<std::string>;

inline constexpr std::string_view kDropMarker = "<DROP>";

// Token rewrite rules applied during normalization. The pattern classes (url,
// image, number, funny, emoticon removal) are built in; exact_map holds
// lingo abbreviations and optional lemma entries loaded from a CSV file.
// Keys and values are stored in normalized form; a value equal to kDropMarker
// deletes the token.
class ReplacementTable {
 public:
  ReplacementTable() = default;

  // CSV `from,to` per line. Blank lines and lines starting with '#' are
  // skipped.
  static ReplacementTable load(const std::filesystem::path& path);

  // Throws on entries whose normalized value is not a single token, or whose
  // value is itself rewritten by the table (which would break idempotence).
  void add(std::string_view from, std::string_view to);

  const std::string* lookup(const std::string& token) const;
  std::size_t size() const { return exact_map_.size(); }

  // Stable FNV-1a digest of the sorted entries; stored in model files.
  std::uint64_t hash() const;

 private:
  std::unordered_map<std::string, std::string> exact_map_;
};

StopwordSet load_stopwords(const std::filesystem::path& path);

// Lowercase, accent-fold, rewrite pattern classes, drop emoticons and
// non-verbal glyphs, apply the exact map, split on non-alphanumerics.
TokenSequence normalize(std::string_view text, const ReplacementTable& table);

// Lowercase + accent folding only (no splitting). Used for keyword sets.
std::string fold_text(std::string_view text);

// All contiguous k-grams for k = 1..n_max joined with '_', ordered by
// (position, k). Requires 1 <= n_max <= 3.
std::vector<std::string> ngrams(std::span<const std::string> tokens, int n_max);

class Vocabulary {
 public:
  Vocabulary() = default;

  // Rebuilds a vocabulary from persisted columns (model files).
  static Vocabulary from_parts(std::vector<std::string> terms,
                               std::vector<std::uint32_t> doc_freq,
                               std::vector<std::uint64_t> term_total,
                               std::uint32_t doc_count, int n_max);

  // Adds one document's n-grams. Ids are assigned in first-appearance order.
  void add_document(std::span<const std::string> tokens);

  std::optional<TermId> find(const std::string& term) const;
  const std::string& term(TermId id) const { return terms_[id]; }
  std::span<const std::string> terms() const { return terms_; }
  std::uint32_t doc_freq(TermId id) const { return doc_freq_[id]; }
  std::span<const std::uint32_t> doc_freqs() const { return doc_freq_; }
  // Total occurrences across the corpus.
  std::uint64_t term_total(TermId id) const { return term_total_[id]; }
  std::span<const std::uint64_t> term_totals() const { return term_total_; }

  std::size_t size() const { return terms_.size(); }
  std::uint32_t doc_count() const { return doc_count_; }
  int n_max() const { return n_max_; }

 private:
  friend Vocabulary make_vocabulary(int n_max);

  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> ids_;
  std::vector<std::uint32_t> doc_freq_;
  std::vector<std::uint64_t> term_total_;
  std::uint32_t doc_count_ = 0;
  int n_max_ = 1;
};

Vocabulary make_vocabulary(int n_max);

Vocabulary build_vocabulary(std::span<const TokenSequence> docs, int n_max);
Vocabulary build_vocabulary(const Corpus& corpus, const ReplacementTable& table,
                            int n_max);

FeatureVector vectorize(std::span<const std::string> tokens,
                        const Vocabulary& vocab);

struct TermScore {
  std::string term;
  double score;
};

// score(t) = corpus-wide count(t) * ln(doc_count / doc_freq(t)). Terms with a
// stopword component are skipped. Sorted by score desc, then term asc.
std::vector<TermScore> tfidf_rank(const Vocabulary& vocab,
                                  const StopwordSet& stopwords);

}  // namespace sensor_rank
