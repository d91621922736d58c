#include "sensor_rank/corpus_io.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_set>

#include <fmt/core.h>
#include <json.hpp>

#include "sensor_rank/error.hpp"
#include "sensor_rank/text.hpp"

namespace sensor_rank {
namespace {

using nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool is_iso8601(const std::string& s) {
  static const std::regex re(
      R"(^\d{4}-\d{2}-\d{2}([T ]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?$)");
  return std::regex_match(s, re);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  return in;
}

std::string required_string(const ordered_json& obj, const char* key,
                            std::size_t line_no) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(fmt::format("line {}: missing or non-string field '{}'",
                            line_no, key));
  }
  return it->get<std::string>();
}

TweetRecord parse_record(std::string_view line, std::size_t line_no) {
  ordered_json obj;
  try {
    obj = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(fmt::format("line {}: malformed JSON ({})", line_no, e.what()));
  }
  if (!obj.is_object()) {
    throw Error(fmt::format("line {}: record is not a JSON object", line_no));
  }

  TweetRecord rec;
  rec.id = required_string(obj, "id", line_no);
  rec.author = required_string(obj, "user", line_no);
  rec.text = required_string(obj, "text", line_no);
  rec.created_at = required_string(obj, "created_at", line_no);
  if (rec.id.empty()) throw Error(fmt::format("line {}: empty id", line_no));
  if (rec.author.empty()) throw Error(fmt::format("line {}: empty user", line_no));
  if (trim(rec.text).empty()) {
    throw Error(fmt::format("line {}: empty text", line_no));
  }
  if (!is_iso8601(rec.created_at)) {
    throw Error(fmt::format("line {}: created_at '{}' is not ISO-8601", line_no,
                            rec.created_at));
  }

  if (const auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
    const auto label = it->is_string() ? parse_label(it->get<std::string>())
                                       : std::nullopt;
    if (!label) throw Error(fmt::format("line {}: invalid label", line_no));
    rec.label = label;
  }
  if (const auto it = obj.find("user_total_tweets");
      it != obj.end() && !it->is_null()) {
    if (!it->is_number_integer() ||
        (it->is_number_integer() && it->get<std::int64_t>() < 0)) {
      throw Error(fmt::format(
          "line {}: user_total_tweets must be a nonnegative integer", line_no));
    }
    rec.user_total_tweets = it->get<std::uint64_t>();
  }
  return rec;
}

}  // namespace

KeywordSet::KeywordSet(const std::vector<std::string>& raw) {
  for (const auto& r : raw) {
    auto folded = fold_text(trim(r));
    if (!folded.empty()) terms_.push_back(std::move(folded));
  }
  std::sort(terms_.begin(), terms_.end());
  terms_.erase(std::unique(terms_.begin(), terms_.end()), terms_.end());
}

KeywordSet KeywordSet::load(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::string> raw;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (!t.empty() && t.front() != '#') raw.emplace_back(t);
  }
  return KeywordSet(raw);
}

bool KeywordSet::contains(const std::string& folded) const {
  return std::binary_search(terms_.begin(), terms_.end(), folded);
}

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto rec = parse_record(line, line_no);
    if (!seen.insert(rec.id).second) {
      throw Error(fmt::format("line {}: duplicate id '{}'", line_no, rec.id));
    }
    corpus.records.push_back(std::move(rec));
  }
  if (in.bad()) throw Error("read failure while loading corpus");
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_corpus(in);
  } catch (const Error& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& r : corpus.records) {
    ordered_json obj;
    obj["id"] = r.id;
    obj["user"] = r.author;
    obj["text"] = r.text;
    obj["created_at"] = r.created_at;
    if (r.label) obj["label"] = std::string(to_string(*r.label));
    if (r.user_total_tweets) obj["user_total_tweets"] = *r.user_total_tweets;
    out << obj.dump() << '\n';
  }
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  write_corpus(corpus, out);
  if (!out) throw Error(fmt::format("write failure on '{}'", path.string()));
}

Corpus keyword_filter(const Corpus& corpus, const KeywordSet& keywords,
                      const ReplacementTable& table) {
  if (keywords.empty()) throw Error("keyword_filter: empty keyword set");
  Corpus out;
  out.keyword_set = keywords;
  for (const auto& rec : corpus.records) {
    const auto tokens = normalize(rec.text, table);
    const bool hit = std::any_of(tokens.begin(), tokens.end(),
                                 [&](const auto& t) { return keywords.contains(t); });
    if (hit) out.records.push_back(rec);
  }
  return out;
}

void FollowerGraph::add_edge(const std::string& follower,
                             const std::string& friend_id) {
  if (follower == friend_id) {
    throw Error(fmt::format("self-edge on user '{}'", follower));
  }
  nodes.insert(follower);
  nodes.insert(friend_id);
  edges.emplace(follower, friend_id);
}

FollowerGraph parse_follower_graph(std::istream& in) {
  FollowerGraph g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string_view::npos ||
        t.find(',', comma + 1) != std::string_view::npos) {
      throw Error(fmt::format("line {}: expected 'follower_id,friend_id'", line_no));
    }
    const auto follower = trim(t.substr(0, comma));
    const auto friend_id = trim(t.substr(comma + 1));
    if (follower.empty() || friend_id.empty()) {
      throw Error(fmt::format("line {}: empty user id", line_no));
    }
    try {
      g.add_edge(std::string(follower), std::string(friend_id));
    } catch (const Error& e) {
      throw Error(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  if (in.bad()) throw Error("read failure while loading follower graph");
  return g;
}

FollowerGraph load_follower_graph(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_follower_graph(in);
  } catch (const Error& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_follower_graph(const FollowerGraph& graph,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  for (const auto& [follower, friend_id] : graph.edges) {
    out << follower << ',' << friend_id << '\n';
  }
}

std::set<std::string> load_id_list(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (!t.empty()) ids.emplace(t);
  }
  return ids;
}

}  // namespace sensor_rank
