#include "doctest.h"
#include "support.hpp"

#include "coref/corpus.hpp"

#include <filesystem>

using namespace coref;
using testing_support::conll_doc;
using testing_support::fixture;

namespace {

const std::string kThree = conll_doc("t/three", {{"a", "b", "c"}}, {{"(0", "-", "0)"}});

std::vector<std::string> fixture_files() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(COREF_FIXTURE_DIR))
    if (e.path().extension() == ".conll") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("parse_conll: three-token cluster") {
  auto docs = parse_conll(kThree);
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].doc_key == "t/three_0");
  REQUIRE(docs[0].gold_clusters.size() == 1);
  CHECK(docs[0].gold_clusters[0] == Cluster{{0, 2}});
  REQUIRE(docs[0].gold_mentions.size() == 1);
  CHECK_FALSE(docs[0].gold_mentions[0].entity_type.has_value());
  CHECK_FALSE(docs[0].gold_mentions[0].info_status.has_value());
}

TEST_CASE("parse_conll: empty coref column") {
  auto docs = parse_conll(conll_doc("t/e", {{"x", "y"}}, {{"-", "-"}}));
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].gold_clusters.empty());
  CHECK(docs[0].gold_mentions.empty());
}

TEST_CASE("parse_conll: one token in two clusters") {
  auto docs = parse_conll(conll_doc("t/two", {{"x"}}, {{"(0)|(1)"}}));
  REQUIRE(docs[0].gold_clusters.size() == 2);
  CHECK(docs[0].gold_clusters[0] == Cluster{{0, 0}});
  CHECK(docs[0].gold_clusters[1] == Cluster{{0, 0}});
}

TEST_CASE("parse_conll: errors") {
  SUBCASE("unbalanced open names document, sentence and token") {
    try {
      parse_conll(conll_doc("t/bad", {{"a", "b"}}, {{"(0", "-"}}));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("t/bad") != std::string::npos);
      CHECK(std::string(e.what()).find("sentence") != std::string::npos);
    }
  }
  SUBCASE("close without open") {
    CHECK_THROWS_AS(parse_conll(conll_doc("t/bad", {{"a", "b"}}, {{"-", "0)"}})), ParseError);
  }
  SUBCASE("mention crossing a sentence boundary is unbalanced") {
    CHECK_THROWS_AS(parse_conll(conll_doc("t/bad", {{"a"}, {"b"}}, {{"(0"}, {"0)"}})), ParseError);
  }
  SUBCASE("duplicate begin") {
    std::string text = "#begin document (x); part 0\n" + kThree;
    CHECK_THROWS_AS(parse_conll(text), FramingError);
  }
  SUBCASE("missing end") {
    CHECK_THROWS_AS(parse_conll("#begin document (x); part 0\nx\t0\t0\ta\t-\t-\t-\t-\t-\t-\t*\t-\n"), FramingError);
  }
}

TEST_CASE("parse_conll: parts become separate documents") {
  auto docs = parse_conll(conll_doc("t/m", {{"a"}}, {{"(0)"}}, 0) + conll_doc("t/m", {{"b", "c"}}, {{"(0", "0)"}}, 1));
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].doc_key == "t/m_0");
  CHECK(docs[1].doc_key == "t/m_1");
  CHECK(docs[1].gold_clusters[0] == Cluster{{0, 1}});
}

TEST_CASE("write_conll: round trip and singleton filter") {
  auto docs = parse_conll(kThree);
  auto again = parse_conll(write_conll(docs, true));
  CHECK(again == docs);

  Document single;
  single.doc_key = "t/s_0";
  single.genre = "t";
  single.sentences = {{"x", "y"}};
  single.speakers = {"-", "-"};
  single.gold_mentions = {{{1, 1}, EntityType::Place, InfoStatus::New, std::nullopt}};
  const auto without = write_conll({single}, false);
  CHECK(without.find("(0)") == std::string::npos);
  CHECK(parse_conll(without)[0].gold_mentions.empty());
  const auto with = write_conll({single}, true);
  CHECK(with.find("\t(0)\n") != std::string::npos);
  auto parsed = parse_conll(with)[0];
  REQUIRE(parsed.gold_clusters.size() == 1);
  CHECK(parsed.gold_clusters[0] == Cluster{{1, 1}});
}

TEST_CASE("write_conll: round trip on every fixture") {
  for (const auto& path : fixture_files()) {
    CAPTURE(path);
    auto docs = parse_conll(read_file(path));
    CHECK(parse_conll(write_conll(docs, true)) == docs);
    for (const auto& d : docs) {
      CHECK(check_invariants(d).empty());
      const auto sent = d.sentence_map();
      for (const auto& c : d.gold_clusters)
        for (const auto& s : c) CHECK(sent[s.start] == sent[s.end]);
    }
  }
}

TEST_CASE("merge_sidecar") {
  const auto base = parse_conll(kThree + "")[0];
  Document doc = base;
  doc.sentences = {{"a", "b", "c", "d", "e"}};
  doc.speakers.assign(5, "-");

  SUBCASE("sidecar-only span becomes a singleton") {
    auto merged = merge_sidecar(doc, {{doc.doc_key, {4, 4}, EntityType::Person, InfoStatus::New, std::nullopt}});
    REQUIRE(merged.gold_mentions.size() == 2);
    const auto* m = merged.find_mention({4, 4});
    REQUIRE(m != nullptr);
    CHECK_FALSE(m->cluster_id.has_value());
    CHECK(m->entity_type == EntityType::Person);
    CHECK(merged.gold_clusters == doc.gold_clusters);
  }
  SUBCASE("empty sidecar is the identity") { CHECK(merge_sidecar(doc, {}) == doc); }
  SUBCASE("row on a coref span types it") {
    auto merged = merge_sidecar(doc, {{doc.doc_key, {0, 2}, EntityType::Organization, std::nullopt, std::nullopt}});
    REQUIRE(merged.gold_mentions.size() == 1);
    CHECK(merged.gold_mentions[0].entity_type == EntityType::Organization);
    CHECK(merged.gold_mentions[0].cluster_id == 0);
  }
  SUBCASE("idempotent") {
    std::vector<SidecarRow> rows = {{doc.doc_key, {0, 2}, EntityType::Place, InfoStatus::GivenActive, 0},
                                    {doc.doc_key, {3, 4}, EntityType::Time, InfoStatus::New, std::nullopt}};
    auto once = merge_sidecar(doc, rows);
    CHECK(merge_sidecar(once, rows) == once);
  }
  SUBCASE("span outside the document") {
    CHECK_THROWS_AS(merge_sidecar(doc, {{doc.doc_key, {3, 9}, EntityType::Person, InfoStatus::New, std::nullopt}}),
                    RangeError);
  }
  SUBCASE("conflicting types list both labels") {
    try {
      merge_sidecar(doc, {{doc.doc_key, {1, 1}, EntityType::Person, std::nullopt, std::nullopt},
                          {doc.doc_key, {1, 1}, EntityType::Place, std::nullopt, std::nullopt}});
      FAIL("expected ConflictError");
    } catch (const ConflictError& e) {
      const std::string what = e.what();
      CHECK(what.find("person") != std::string::npos);
      CHECK(what.find("place") != std::string::npos);
    }
  }
  SUBCASE("other documents are ignored") {
    CHECK(merge_sidecar(doc, {{"other", {9, 9}, EntityType::Person, InfoStatus::New, std::nullopt}}) == doc);
  }
}

TEST_CASE("sidecar text round trip") {
  std::vector<SidecarRow> rows = {{"k_0", {0, 1}, EntityType::Animal, InfoStatus::AccessibleAggregate, 3},
                                  {"k_0", {2, 2}, std::nullopt, std::nullopt, std::nullopt}};
  const auto text = write_sidecar(rows);
  CHECK(text.rfind(std::string(kSidecarHeader), 0) == 0);
  CHECK(parse_sidecar(text) == rows);
  CHECK_THROWS_AS(parse_sidecar("wrong header\n"), ParseError);
  CHECK_THROWS_AS(parse_sidecar(std::string(kSidecarHeader) + "\nk\t0\t1\tperson\tnew\n"), ParseError);
  CHECK_THROWS_AS(parse_sidecar(std::string(kSidecarHeader) + "\nk\t0\t1\tcelebrity\tnew\t_\n"), DataError);
}

TEST_CASE("label sets") {
  for (int i = 0; i < kNumEntityTypes; ++i) {
    auto t = static_cast<EntityType>(i);
    CHECK(parse_entity_type(to_string(t)) == t);
  }
  for (int i = 0; i < kNumInfoStatuses; ++i) {
    auto s = static_cast<InfoStatus>(i);
    CHECK(parse_info_status(to_string(s)) == s);
  }
  CHECK_FALSE(parse_entity_type("unknown").has_value());
  CHECK_THROWS_AS(parse_info_status("given"), DataError);
}

TEST_CASE("jsonl round trip keeps mention layers") {
  auto doc = testing_support::two_sentence_doc();
  auto back = parse_jsonl(write_jsonl({doc}));
  REQUIRE(back.size() == 1);
  CHECK(back[0].gold_clusters == doc.gold_clusters);
  CHECK(back[0].sentences == doc.sentences);
  CHECK(back[0].speakers == doc.speakers);
  REQUIRE(back[0].gold_mentions.size() == doc.gold_mentions.size());
  for (const auto& m : doc.gold_mentions) {
    const auto* b = back[0].find_mention(m.span);
    REQUIRE(b != nullptr);
    CHECK(b->entity_type == m.entity_type);
    CHECK(b->info_status == m.info_status);
  }
}

TEST_CASE("document invariants") {
  auto doc = testing_support::two_sentence_doc();
  CHECK(check_invariants(doc).empty());
  auto bad = doc;
  bad.gold_clusters.push_back({{3, 6}});
  CHECK_FALSE(check_invariants(bad).empty());
  bad = doc;
  bad.gold_mentions.pop_back();
  bad.gold_mentions.pop_back();
  CHECK_FALSE(check_invariants(bad).empty());
}

TEST_CASE("genre from key") {
  CHECK(genre_from_key("bc/cctv/00/x") == "bc");
  CHECK(genre_from_key("GUM_news_x") == "news");
}
