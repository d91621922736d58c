#include "sensor_rank/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <unordered_set>

#include <fmt/core.h>

#include "sensor_rank/corpus_io.hpp"
#include "sensor_rank/error.hpp"

namespace sensor_rank {
namespace {

// Lowercase base letters for U+0100..U+017F; '?' marks two-letter ligatures.
constexpr std::string_view kLatinExtA =
    "aaaaaaccccccccdd"
    "ddeeeeeeeeeegggg"
    "gggghhhhiiiiiiii"
    "ii??jjkkklllllll"
    "lllnnnnnnnnnoooo"
    "oo??rrrrrrssssss"
    "ssttttttuuuuuuuu"
    "uuuuwwyyyzzzzzzs";

// Lowercase base letters for U+00C0..U+00FF; '?' = multi-letter, ' ' = not a
// letter.
constexpr std::string_view kLatin1 =
    "aaaaaa?ceeeeiiii"
    "dnooooo ouuuuy??"
    "aaaaaa?ceeeeiiii"
    "dnooooo ouuuuy?y";

void append_folded(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    const char c = static_cast<char>(cp);
    out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
    return;
  }
  if (cp >= 0x300 && cp <= 0x36F) return;  // combining marks
  if (cp >= 0xC0 && cp <= 0xFF) {
    const char m = kLatin1[cp - 0xC0];
    if (m != '?') {
      out.push_back(m);
      return;
    }
    switch (cp) {
      case 0xC6: case 0xE6: out += "ae"; return;
      case 0xDE: case 0xFE: out += "th"; return;
      case 0xDF: out += "ss"; return;
      default: break;
    }
  }
  if (cp >= 0x100 && cp <= 0x17F) {
    const char m = kLatinExtA[cp - 0x100];
    if (m != '?') {
      out.push_back(m);
      return;
    }
    out += (cp == 0x132 || cp == 0x133) ? "ij" : "oe";
    return;
  }
  // Emoji, symbols and scripts without a folding rule act as separators.
  out.push_back(' ');
}

// Decodes UTF-8; invalid bytes decode to U+FFFD.
template <class F>
void for_each_codepoint(std::string_view s, F&& fn) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int len = 1;
    char32_t cp = 0xFFFD;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      fn(char32_t{0xFFFD});
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      fn(char32_t{0xFFFD});
      break;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      fn(char32_t{0xFFFD});
      ++i;
      continue;
    }
    fn(cp);
    i += len;
  }
}

bool is_alnum(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool repeats(std::string_view s, std::string_view unit, std::size_t min_reps) {
  if (s.size() < unit.size() * min_reps || s.size() % unit.size() != 0) return false;
  for (std::size_t i = 0; i < s.size(); i += unit.size()) {
    if (s.substr(i, unit.size()) != unit) return false;
  }
  return true;
}

// /^(k{3,}|(ha){2,}|(rs){2,})$/
bool is_laughter(std::string_view s) {
  return repeats(s, "k", 3) || repeats(s, "ha", 2) || repeats(s, "rs", 2);
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool ends_with_any(std::string_view s, std::initializer_list<std::string_view> suffixes) {
  return std::any_of(suffixes.begin(), suffixes.end(),
                     [&](auto suf) { return s.ends_with(suf); });
}

bool is_image_link(std::string_view lower) {
  if (lower.starts_with("pic.twitter.com")) return true;
  const bool link = lower.starts_with("http://") || lower.starts_with("https://") ||
                    lower.starts_with("www.");
  if (!link) return false;
  return lower.find("pic.twitter.com") != std::string_view::npos ||
         lower.find("instagram.com/p/") != std::string_view::npos ||
         ends_with_any(lower, {".jpg", ".jpeg", ".png", ".gif"});
}

bool is_url(std::string_view lower) {
  return lower.starts_with("http://") || lower.starts_with("https://") ||
         lower.starts_with("www.");
}

bool is_emoticon(const std::string& chunk) {
  static const std::regex re(
      R"(^(?:[:;=][-'^o]?[()\[\]dDpPoO3|/\\*$@]+|[()\[\]][-'^]?[:;=]|<3+|[xX]D+|\^[_.-]?\^)$)");
  return std::regex_match(chunk, re);
}

// Dates, times, prices and plain numerals: digits with numeric punctuation.
bool is_numeric_chunk(std::string_view chunk) {
  bool digit = false;
  for (char c : chunk) {
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if (std::string_view(".,:/%+-$").find(c) == std::string_view::npos) {
      return false;
    }
  }
  return digit;
}

constexpr std::array<std::string_view, 4> kConventionalTokens = {"url", "image",
                                                                 "number", "funny"};

bool is_conventional(std::string_view t) {
  return std::find(kConventionalTokens.begin(), kConventionalTokens.end(), t) !=
         kConventionalTokens.end();
}

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

}  // namespace

std::string fold_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for_each_codepoint(text, [&](char32_t cp) { append_folded(cp, out); });
  return out;
}

void ReplacementTable::add(std::string_view from, std::string_view to) {
  const auto key = fold_text(trim(from));
  if (key.empty() || !std::all_of(key.begin(), key.end(), is_alnum)) {
    throw Error(fmt::format("replacement key '{}' is not a single token", from));
  }
  if (is_conventional(key)) {
    throw Error(fmt::format("replacement key '{}' shadows a conventional term", key));
  }
  std::string value(trim(to));
  if (value != kDropMarker) {
    value = fold_text(value);
    if (value.empty() || !std::all_of(value.begin(), value.end(), is_alnum) ||
        all_digits(value) || is_laughter(value)) {
      throw Error(fmt::format("replacement value '{}' is not a plain token", to));
    }
    if (value != key && exact_map_.contains(value)) {
      throw Error(fmt::format("replacement value '{}' is itself rewritten", value));
    }
  }
  for (const auto& [k, v] : exact_map_) {
    if (v == key && k != key && value != key) {
      throw Error(fmt::format("replacement key '{}' is the target of '{}'", key, k));
    }
  }
  exact_map_[key] = std::move(value);
}

ReplacementTable ReplacementTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  ReplacementTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.find(',');
    if (comma == std::string_view::npos) {
      throw Error(fmt::format("{}:{}: expected 'from,to'", path.string(), line_no));
    }
    try {
      table.add(t.substr(0, comma), t.substr(comma + 1));
    } catch (const Error& e) {
      throw Error(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return table;
}

const std::string* ReplacementTable::lookup(const std::string& token) const {
  const auto it = exact_map_.find(token);
  return it == exact_map_.end() ? nullptr : &it->second;
}

std::uint64_t ReplacementTable::hash() const {
  std::vector<std::pair<std::string, std::string>> entries(exact_map_.begin(),
                                                           exact_map_.end());
  std::sort(entries.begin(), entries.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [k, v] : entries) {
    mix(k);
    mix("\t");
    mix(v);
    mix("\n");
  }
  return h;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  StopwordSet out;
  std::string line;
  while (std::getline(in, line)) {
    auto folded = fold_text(trim(line));
    if (!folded.empty()) out.insert(std::move(folded));
  }
  return out;
}

TokenSequence normalize(std::string_view text, const ReplacementTable& table) {
  TokenSequence tokens;
  std::size_t pos = 0;
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (pos < text.size()) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !is_space(text[end])) ++end;
    if (end == pos) break;
    const std::string chunk(text.substr(pos, end - pos));
    pos = end;

    const auto lower = ascii_lower(chunk);
    if (is_image_link(lower)) {
      tokens.emplace_back("image");
      continue;
    }
    if (is_url(lower)) {
      tokens.emplace_back("url");
      continue;
    }
    if (is_emoticon(chunk)) continue;
    if (is_numeric_chunk(chunk)) {
      tokens.emplace_back("number");
      continue;
    }

    const auto folded = fold_text(chunk);
    std::size_t i = 0;
    while (i < folded.size()) {
      while (i < folded.size() && !is_alnum(folded[i])) ++i;
      std::size_t j = i;
      while (j < folded.size() && is_alnum(folded[j])) ++j;
      if (j == i) break;
      std::string run = folded.substr(i, j - i);
      i = j;
      if (all_digits(run)) {
        tokens.emplace_back("number");
      } else if (is_laughter(run)) {
        tokens.emplace_back("funny");
      } else if (const auto* repl = table.lookup(run)) {
        if (*repl != kDropMarker) tokens.push_back(*repl);
      } else {
        tokens.push_back(std::move(run));
      }
    }
  }
  return tokens;
}

std::vector<std::string> ngrams(std::span<const std::string> tokens, int n_max) {
  if (n_max < 1 || n_max > 3) {
    throw Error(fmt::format("n-gram order {} outside 1..3", n_max));
  }
  std::vector<std::string> out;
  const auto n = tokens.size();
  out.reserve(n * static_cast<std::size_t>(n_max));
  for (std::size_t p = 0; p < n; ++p) {
    std::string gram;
    for (int k = 1; k <= n_max && p + static_cast<std::size_t>(k) <= n; ++k) {
      if (k > 1) gram.push_back('_');
      gram += tokens[p + static_cast<std::size_t>(k) - 1];
      out.push_back(gram);
    }
  }
  return out;
}

Vocabulary make_vocabulary(int n_max) {
  if (n_max < 1 || n_max > 3) {
    throw Error(fmt::format("n-gram order {} outside 1..3", n_max));
  }
  Vocabulary v;
  v.n_max_ = n_max;
  return v;
}

Vocabulary Vocabulary::from_parts(std::vector<std::string> terms,
                                  std::vector<std::uint32_t> doc_freq,
                                  std::vector<std::uint64_t> term_total,
                                  std::uint32_t doc_count, int n_max) {
  if (doc_freq.size() != terms.size() || term_total.size() != terms.size()) {
    throw Error("vocabulary columns have mismatched lengths");
  }
  Vocabulary v = make_vocabulary(n_max);
  v.doc_count_ = doc_count;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (doc_freq[i] < 1 || doc_freq[i] > doc_count) {
      throw Error(fmt::format("term '{}' has invalid document frequency", terms[i]));
    }
    if (!v.ids_.emplace(terms[i], static_cast<TermId>(i)).second) {
      throw Error(fmt::format("duplicate vocabulary term '{}'", terms[i]));
    }
  }
  v.terms_ = std::move(terms);
  v.doc_freq_ = std::move(doc_freq);
  v.term_total_ = std::move(term_total);
  return v;
}

void Vocabulary::add_document(std::span<const std::string> tokens) {
  ++doc_count_;
  std::unordered_set<TermId> seen;
  for (auto& gram : ngrams(tokens, n_max_)) {
    auto [it, inserted] = ids_.try_emplace(gram, static_cast<TermId>(terms_.size()));
    if (inserted) {
      terms_.push_back(std::move(gram));
      doc_freq_.push_back(0);
      term_total_.push_back(0);
    }
    const TermId id = it->second;
    ++term_total_[id];
    if (seen.insert(id).second) ++doc_freq_[id];
  }
}

std::optional<TermId> Vocabulary::find(const std::string& term) const {
  const auto it = ids_.find(term);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(std::span<const TokenSequence> docs, int n_max) {
  if (docs.empty()) throw Error("cannot build a vocabulary from an empty corpus");
  auto vocab = make_vocabulary(n_max);
  for (const auto& d : docs) vocab.add_document(d);
  return vocab;
}

Vocabulary build_vocabulary(const Corpus& corpus, const ReplacementTable& table,
                            int n_max) {
  if (corpus.records.empty()) {
    throw Error("cannot build a vocabulary from an empty corpus");
  }
  auto vocab = make_vocabulary(n_max);
  for (const auto& r : corpus.records) vocab.add_document(normalize(r.text, table));
  return vocab;
}

FeatureVector vectorize(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::vector<FeatureEntry> pairs;
  for (const auto& gram : ngrams(tokens, vocab.n_max())) {
    if (const auto id = vocab.find(gram)) pairs.push_back({*id, 1.0});
  }
  return FeatureVector::from_pairs(std::move(pairs));
}

std::vector<TermScore> tfidf_rank(const Vocabulary& vocab, const StopwordSet& stopwords) {
  const auto has_stopword = [&](const std::string& term) {
    std::size_t b = 0;
    while (b <= term.size()) {
      auto e = term.find('_', b);
      if (e == std::string::npos) e = term.size();
      if (stopwords.contains(term.substr(b, e - b))) return true;
      b = e + 1;
    }
    return false;
  };

  std::vector<TermScore> out;
  const double n_docs = vocab.doc_count();
  for (TermId id = 0; id < vocab.size(); ++id) {
    const auto& term = vocab.term(id);
    if (has_stopword(term)) continue;
    const double idf = std::log(n_docs / static_cast<double>(vocab.doc_freq(id)));
    out.push_back({term, static_cast<double>(vocab.term_total(id)) * idf});
  }
  std::sort(out.begin(), out.end(), [](const TermScore& a, const TermScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.term < b.term;
  });
  return out;
}

FeatureVector FeatureVector::from_pairs(std::vector<FeatureEntry> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const FeatureEntry& a, const FeatureEntry& b) { return a.id < b.id; });
  FeatureVector v;
  for (const auto& p : pairs) {
    if (!v.entries_.empty() && v.entries_.back().id == p.id) {
      v.entries_.back().value += p.value;
    } else {
      v.entries_.push_back(p);
    }
  }
  std::erase_if(v.entries_, [](const FeatureEntry& e) { return e.value == 0.0; });
  return v;
}

double FeatureVector::value(TermId id) const {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), id,
      [](const FeatureEntry& e, TermId key) { return e.id < key; });
  return (it != entries_.end() && it->id == id) ? it->value : 0.0;
}

double FeatureVector::total() const {
  double t = 0.0;
  for (const auto& e : entries_) t += e.value;
  return t;
}

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
  const auto ea = a.entries();
  const auto eb = b.entries();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < ea.size() || j < eb.size()) {
    double diff;
    if (j == eb.size() || (i < ea.size() && ea[i].id < eb[j].id)) {
      diff = ea[i++].value;
    } else if (i == ea.size() || eb[j].id < ea[i].id) {
      diff = eb[j++].value;
    } else {
      diff = ea[i++].value - eb[j++].value;
    }
    d += diff * diff;
  }
  return d;
}

}  // namespace sensor_rank
