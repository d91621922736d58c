#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sensor_rank/labels.hpp"

namespace sensor_rank {

class ReplacementTable;

struct TweetRecord {
  std::string id;
  std::string author;
  std::string text;
  std::string created_at;  // ISO-8601
  std::optional<Label> label;
  // Author's total posts over the harvest period, the T(u) source.
  std::optional<std::uint64_t> user_total_tweets;

  friend bool operator==(const TweetRecord&, const TweetRecord&) = default;
};

// Folded, deduplicated, sorted keyword terms.
class KeywordSet {
 public:
  KeywordSet() = default;
  explicit KeywordSet(const std::vector<std::string>& raw);

  static KeywordSet load(const std::filesystem::path& path);

  const std::vector<std::string>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  bool contains(const std::string& folded) const;

  friend bool operator==(const KeywordSet&, const KeywordSet&) = default;

 private:
  std::vector<std::string> terms_;
};

struct Corpus {
  std::vector<TweetRecord> records;
  std::optional<KeywordSet> keyword_set;

  std::size_t size() const { return records.size(); }
  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// One JSON object per line. Blank lines are skipped; malformed lines and
// duplicate ids throw with the 1-based line number.
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::istream& in);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);
void write_corpus(const Corpus& corpus, std::ostream& out);

// Keeps records whose normalized token stream contains at least one keyword
// as a whole token.
Corpus keyword_filter(const Corpus& corpus, const KeywordSet& keywords,
                      const ReplacementTable& table);

struct FollowerGraph {
  std::set<std::string> nodes;
  // (follower, friend)
  std::set<std::pair<std::string, std::string>> edges;

  // Throws on self-edges; duplicates collapse.
  void add_edge(const std::string& follower, const std::string& friend_id);

  friend bool operator==(const FollowerGraph&, const FollowerGraph&) = default;
};

FollowerGraph load_follower_graph(const std::filesystem::path& path);
FollowerGraph parse_follower_graph(std::istream& in);
void write_follower_graph(const FollowerGraph& graph,
                          const std::filesystem::path& path);

// One user id per line.
std::set<std::string> load_id_list(const std::filesystem::path& path);

}  // namespace sensor_rank
