#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "reportcert/embeddings.hpp"
#include "reportcert/errors.hpp"

using namespace reportcert;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_word_vectors parses the text format") {
  const auto path = temp_file("rc_emb_ok.txt", "2 3\na 1 0 0\nb 0 1 0\n");
  const auto store = WordVectorStore::load(path);
  CHECK(store.dimension() == 3);
  CHECK(store.size() == 2);
  REQUIRE(store.find("a") != nullptr);
  CHECK((*store.find("a"))[0] == 1.0);
  CHECK(store.find("zzz") == nullptr);
  CHECK(store.oov_count() == 1);
}

TEST_CASE("load_word_vectors error paths") {
  SUBCASE("dimension mismatch with line number") {
    const auto path = temp_file("rc_emb_dim.txt", "1 3\na 1 0\n");
    try {
      WordVectorStore::load(path);
      FAIL("expected DimensionMismatch");
    } catch (const DimensionMismatch& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("malformed number") {
    const auto path = temp_file("rc_emb_num.txt", "1 2\na 1 zebra\n");
    CHECK_THROWS_AS(WordVectorStore::load(path), ParseError);
  }
  SUBCASE("bad header") {
    const auto path = temp_file("rc_emb_head.txt", "banana\na 1\n");
    CHECK_THROWS_AS(WordVectorStore::load(path), ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(WordVectorStore::load("/nonexistent/emb.txt"), IoError);
  }
}

TEST_CASE("duplicate tokens keep the first occurrence") {
  const auto path = temp_file("rc_emb_dup.txt", "2 3\na 1 0 0\na 9 9 9\n");
  const auto store = WordVectorStore::load(path);
  REQUIRE(store.find("a") != nullptr);
  CHECK((*store.find("a"))[0] == 1.0);
  CHECK((*store.find("a"))[2] == 0.0);
}

TEST_CASE("embed_words computes norms and mass") {
  const auto store = WordVectorStore::from_entries(
      2, {{"a", {3.0, 4.0}}, {"b", {0.0, 1.0}}});

  SUBCASE("hand-computed norms") {
    const auto s = embed_words(testhelp::sentence({"a", "b"}), store);
    REQUIRE(s.norms.size() == 2);
    CHECK(s.norms[0] == 5.0);
    CHECK(s.norms[1] == 1.0);
    CHECK(s.total_mass == 6.0);
  }
  SUBCASE("all OOV yields an empty embedded sentence") {
    const auto before = store.oov_count();
    const auto s = embed_words(testhelp::sentence({"zzz"}), store);
    CHECK(s.empty());
    CHECK(s.total_mass == 0.0);
    CHECK(store.oov_count() == before + 1);
  }
  SUBCASE("repetition carries double mass") {
    const auto s = embed_words(testhelp::sentence({"a", "a"}), store);
    CHECK(s.total_mass == 10.0);
    CHECK(s.vectors[0] == s.vectors[1]);
  }
}

TEST_CASE("mass distribution normalizes and is scale covariant") {
  std::mt19937_64 gen(21);
  const auto store = testhelp::random_store(gen, 30, 8);
  std::vector<std::pair<std::string, std::vector<double>>> scaled_entries;
  for (std::size_t k = 0; k < 30; ++k) {
    const auto token = "t" + std::to_string(k);
    auto v = *store.find(token);
    for (double& x : v) x *= 7.25;
    scaled_entries.emplace_back(token, v);
  }
  const auto scaled = WordVectorStore::from_entries(8, scaled_entries);

  for (int rep = 0; rep < 30; ++rep) {
    const auto sentence = testhelp::random_sentence(gen, 1 + gen() % 8, 30);
    const auto a = embed_words(sentence, store);
    const auto b = embed_words(sentence, scaled);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.norms.size(); ++i) {
      const double pa = a.norms[i] / a.total_mass;
      const double pb = b.norms[i] / b.total_mass;
      CHECK(std::abs(pa - pb) <= 1e-12);
      sum += pa;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("embed_sentence derived-mean") {
  const auto store = WordVectorStore::from_entries(
      2, {{"a", {1.0, 0.0}}, {"b", {0.0, 1.0}}});
  const auto src = SentenceVectorSource::derived_mean();

  CHECK(embed_sentence(testhelp::sentence({"a", "b"}), store, src) ==
        std::vector<double>{0.5, 0.5});
  CHECK(embed_sentence(testhelp::sentence({"b"}), store, src) ==
        std::vector<double>{0.0, 1.0});
  CHECK(embed_sentence(testhelp::sentence({"a", "zzz"}), store, src) ==
        std::vector<double>{1.0, 0.0});
  CHECK_THROWS_AS(embed_sentence(testhelp::sentence({"zzz"}), store, src),
                  NoEmbeddableTokens);
}

TEST_CASE("embed_sentence external table") {
  const auto store = WordVectorStore::from_entries(2, {{"a", {1.0, 0.0}}});
  const auto src = SentenceVectorSource::external_table(
      {{"heart size normal", {0.25, 0.5}}}, 2);
  Sentence s;
  s.tokens = {"heart", "size", "normal"};
  s.raw = "heart size normal";
  CHECK(embed_sentence(s, store, src) == std::vector<double>{0.25, 0.5});

  Sentence missing;
  missing.tokens = {"nope"};
  missing.raw = "nope";
  CHECK_THROWS_AS(embed_sentence(missing, store, src), MissingSentenceVector);
}

TEST_CASE("embedding file round-trip is bit-exact") {
  std::mt19937_64 gen(22);
  std::vector<std::pair<std::string, std::vector<double>>> entries;
  for (int k = 0; k < 20; ++k)
    entries.emplace_back("tok" + std::to_string(k), testhelp::random_vector(gen, 5));
  const auto path = std::filesystem::temp_directory_path() / "rc_emb_rt.txt";
  write_embedding_file(path, 5, entries);
  const auto store = WordVectorStore::load(path);
  CHECK(store.size() == entries.size());
  for (const auto& [token, vec] : entries) {
    const auto* loaded = store.find(token);
    REQUIRE(loaded != nullptr);
    CHECK(*loaded == vec);
  }
}

TEST_CASE("sentence table file loader maps underscored keys") {
  const auto path = temp_file("rc_sent_table.txt", "1 2\nheart_size_normal 0.25 0.5\n");
  const auto src = SentenceVectorSource::load_external_table(path);
  const auto store = WordVectorStore::from_entries(2, {{"a", {1.0, 0.0}}});
  Sentence s;
  s.tokens = {"heart", "size", "normal"};
  s.raw = "heart size normal";
  CHECK(embed_sentence(s, store, src) == std::vector<double>{0.25, 0.5});
}
