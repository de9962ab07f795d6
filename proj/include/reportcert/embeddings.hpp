#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "reportcert/text.hpp"

namespace reportcert {

/// Immutable token -> vector map loaded from a text embedding file.
/// Lookups are safe from concurrent threads; the OOV counter is atomic.
class WordVectorStore {
 public:
  /// Parse the whitespace text format: line 1 "<count> <dim>", then one
  /// "<token> <v1> ... <vD>" line per entry. Duplicate tokens keep the
  /// first occurrence. Throws ParseError / DimensionMismatch.
  static WordVectorStore load(const std::filesystem::path& path);

  /// Build directly from (token, vector) pairs; first occurrence wins.
  static WordVectorStore from_entries(
      std::size_t dimension,
      const std::vector<std::pair<std::string, std::vector<double>>>& entries);

  WordVectorStore(WordVectorStore&& other) noexcept;
  WordVectorStore& operator=(WordVectorStore&& other) noexcept;
  WordVectorStore(const WordVectorStore&) = delete;
  WordVectorStore& operator=(const WordVectorStore&) = delete;

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }

  /// nullptr for out-of-vocabulary tokens (also bumps oov_count).
  const std::vector<double>* find(std::string_view token) const;

  bool contains(std::string_view token) const;
  std::uint64_t oov_count() const { return oov_count_.load(); }

 private:
  WordVectorStore() = default;

  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::vector<double>> entries_;
  mutable std::atomic<std::uint64_t> oov_count_{0};
};

/// Word vectors of one sentence with their norms; the norms carry the
/// information mass used by the transport formulation.
struct EmbeddedSentence {
  std::vector<std::vector<double>> vectors;  // OOV tokens omitted, order kept
  std::vector<double> norms;                 // Euclidean norm per vector
  double total_mass = 0.0;                   // sum of norms, in stored order

  bool empty() const { return vectors.empty(); }
};

EmbeddedSentence embed_words(const Sentence& s, const WordVectorStore& store);

/// Pluggable sentence-embedding source for the matching step: either the
/// mean of in-vocabulary word vectors, or an external table of precomputed
/// sentence vectors keyed by the sentence's raw text.
class SentenceVectorSource {
 public:
  static SentenceVectorSource derived_mean();
  static SentenceVectorSource external_table(
      std::unordered_map<std::string, std::vector<double>> table,
      std::size_t dimension);
  /// Table file uses the embedding text format with the token field holding
  /// the sentence's raw text, internal spaces replaced by '_'.
  static SentenceVectorSource load_external_table(
      const std::filesystem::path& path);

  bool is_external() const { return external_; }
  std::size_t dimension() const { return dimension_; }

 private:
  friend std::vector<double> embed_sentence(const Sentence&,
                                            const WordVectorStore&,
                                            const SentenceVectorSource&);
  SentenceVectorSource() = default;

  bool external_ = false;
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::vector<double>> table_;
};

/// Sentence vector for matching. Derived-mean mode averages the
/// in-vocabulary word vectors (throws NoEmbeddableTokens when all are OOV);
/// external-table mode looks up the raw text (throws MissingSentenceVector).
std::vector<double> embed_sentence(const Sentence& s,
                                   const WordVectorStore& store,
                                   const SentenceVectorSource& src);

/// Write entries in the text embedding format, in the given order, with
/// shortest round-trip float formatting so a reload is bit-exact.
void write_embedding_file(
    const std::filesystem::path& path, std::size_t dimension,
    const std::vector<std::pair<std::string, std::vector<double>>>& entries);

}  // namespace reportcert
