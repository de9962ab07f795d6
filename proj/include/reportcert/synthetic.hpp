#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace reportcert {

/// Seeded generator of synthetic annotated clinical-style reports plus a
/// matching synthetic embedding vocabulary. Each sentence mentions exactly
/// one finding (occasionally two), rendered through one of several token
/// variants so that surface overlap is noisy while the embedding space
/// keeps same-finding sentences close.
struct SyntheticConfig {
  std::size_t reports = 200;
  std::uint64_t seed = 74520251;
  std::size_t n_findings = 12;
  std::size_t dim = 24;
  std::size_t max_sentences = 6;
  std::size_t cases = 0;             // MC-style cases to synthesize
  std::size_t samples_per_case = 4;  // T samples per case
};

struct SyntheticCase {
  std::string case_id;
  std::vector<std::string> samples;  // raw report strings
};

struct SyntheticCorpus {
  std::size_t dimension = 0;
  // Ordered (token, vector) entries for write_embedding_file.
  std::vector<std::pair<std::string, std::vector<double>>> embedding_entries;
  std::vector<std::string> report_texts;
  std::vector<std::vector<std::string>> report_labels;
  std::vector<SyntheticCase> cases;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& cfg);

}  // namespace reportcert
