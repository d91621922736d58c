#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/core.h>

#include "sensor_rank/corpus_io.hpp"
#include "sensor_rank/error.hpp"
#include "sensor_rank/random.hpp"
#include "sensor_rank/text.hpp"

using namespace sensor_rank;

namespace {

std::string error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_corpus(in);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string graph_error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_follower_graph(in);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string record(const std::string& id, const std::string& extra = "") {
  return fmt::format(
      R"({{"id":"{}","user":"ana","text":"dengue na rua","created_at":"2016-10-01T12:00:00Z"{}}})",
      id, extra);
}

}  // namespace

TEST(Corpus, ParsesOptionalFields) {
  std::istringstream in(record("1") + "\n\n" +
                        record("2", R"(,"label":"relevant","user_total_tweets":40)") + "\n");
  const auto c = parse_corpus(in);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_FALSE(c.records[0].label.has_value());
  EXPECT_EQ(c.records[1].label, Label::Relevant);
  EXPECT_EQ(c.records[1].user_total_tweets, 40u);
  EXPECT_EQ(c.records[1].author, "ana");
}

TEST(Corpus, DuplicateIdNamesTheLine) {
  const auto text = record("a") + "\n" + record("b") + "\n" + record("c") + "\n" +
                    record("d") + "\n" + record("b") + "\n";
  const auto err = error_of(text);
  EXPECT_NE(err.find("line 5"), std::string::npos) << err;
  EXPECT_NE(err.find("duplicate id 'b'"), std::string::npos) << err;
}

TEST(Corpus, MalformedRecordsAreRejected) {
  EXPECT_NE(error_of("{not json\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of(record("1") + "\n[1,2]\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of(R"({"id":"1","user":"a","text":"x"})").find("created_at"),
            std::string::npos);
  EXPECT_NE(error_of(record("1", R"(,"label":"spam")")).find("label"), std::string::npos);
  EXPECT_NE(error_of(R"({"id":"1","user":"a","text":"x","created_at":"yesterday"})")
                .find("ISO-8601"),
            std::string::npos);
}

TEST(Corpus, WriteThenLoadRoundTrips) {
  Rng rng(3);
  Corpus c;
  for (int i = 0; i < 300; ++i) {
    TweetRecord r;
    r.id = fmt::format("t{}", i);
    r.author = fmt::format("u{}", rng.below(20));
    r.text = fmt::format("dengue \"quoted\" \\ ação {} \n nova linha", rng.next());
    r.created_at = fmt::format("2016-{:02}-{:02}T{:02}:00:00Z", rng.between(9, 12),
                               rng.between(1, 28), rng.between(0, 23));
    if (rng.bernoulli(0.7)) r.label = kAllLabels[rng.below(kNumLabels)];
    if (rng.bernoulli(0.5)) r.user_total_tweets = rng.below(5000);
    c.records.push_back(r);
  }
  std::ostringstream out;
  write_corpus(c, out);
  std::istringstream in(out.str());
  EXPECT_EQ(parse_corpus(in).records, c.records);
}

TEST(KeywordSet, FoldsAndDeduplicates) {
  const KeywordSet k({"Dengue", "dengue", "Transmissão", "zika"});
  EXPECT_EQ(k.terms(), (std::vector<std::string>{"dengue", "transmissao", "zika"}));
  EXPECT_TRUE(k.contains("transmissao"));
  EXPECT_FALSE(k.contains("Dengue"));
}

TEST(KeywordFilter, WholeTokenMatches) {
  Corpus c;
  const std::vector<std::string> texts = {"Combate à #Dengue", "dengueiro de plantão",
                                          "TRANSMISSÃO do vírus", "nada aqui"};
  for (std::size_t i = 0; i < texts.size(); ++i) {
    c.records.push_back({fmt::format("{}", i), "u", texts[i], "2016-10-01T00:00:00Z", {}, {}});
  }
  const auto out = keyword_filter(c, KeywordSet({"dengue", "transmissão"}), {});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out.records[0].id, "0");
  EXPECT_EQ(out.records[1].id, "2");
  ASSERT_TRUE(out.keyword_set.has_value());
  EXPECT_THROW(keyword_filter(c, KeywordSet{}, {}), Error);
}

TEST(FollowerGraph, DeduplicatesAndRejectsSelfEdges) {
  std::istringstream in("a,b\nb,a\na,b\n\n c , a \n");
  const auto g = parse_follower_graph(in);
  EXPECT_EQ(g.edges.size(), 3u);
  EXPECT_EQ(g.nodes.size(), 3u);
  EXPECT_TRUE(g.edges.contains({"c", "a"}));

  const auto err = graph_error_of("a,b\nb,b\n");
  EXPECT_NE(err.find("line 2"), std::string::npos) << err;
  EXPECT_NE(err.find("self-edge"), std::string::npos) << err;
  EXPECT_NE(graph_error_of("a,b,c\n").find("line 1"), std::string::npos);
  EXPECT_NE(graph_error_of("a,\n").find("line 1"), std::string::npos);
}

TEST(FollowerGraph, RoundTripOnCandidateSizedGraph) {
  Rng rng(171);
  FollowerGraph g;
  for (int e = 0; e < 900; ++e) {
    const auto a = rng.below(171);
    const auto b = rng.below(171);
    if (a != b) g.add_edge(fmt::format("u{:03}", a), fmt::format("u{:03}", b));
  }
  const auto path = std::filesystem::temp_directory_path() / "sr_graph_roundtrip.csv";
  write_follower_graph(g, path);
  EXPECT_EQ(load_follower_graph(path), g);
}

TEST(IdList, TrimsAndSkipsBlanks) {
  const auto path = std::filesystem::temp_directory_path() / "sr_ids.txt";
  {
    std::ofstream out(path);
    out << "u1\n  u2 \n\nu1\n";
  }
  EXPECT_EQ(load_id_list(path), (std::set<std::string>{"u1", "u2"}));
}
