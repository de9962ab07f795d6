#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reportcert/embeddings.hpp"
#include "reportcert/matrix.hpp"
#include "reportcert/similarity.hpp"
#include "reportcert/text.hpp"

namespace reportcert {

/// A report with its expert key-information tags (duplicates collapsed).
struct AnnotatedReport {
  Report report;
  std::vector<std::string> labels;  // unique, sorted

  static AnnotatedReport make(Report report, std::vector<std::string> labels);
};

/// Absolute difference in key-information label counts.
long info_diff(const AnnotatedReport& a, const AnnotatedReport& b);

/// Absolute difference in sentence counts.
long len_diff(const AnnotatedReport& a, const AnnotatedReport& b);

/// n index pairs drawn uniformly with replacement (self-pairs allowed) from
/// a seeded generator; identical across runs and platforms.
std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t corpus_size,
                                                              std::size_t n,
                                                              std::uint64_t seed);

/// Pearson correlation; throws DegenerateSeries on length < 2, length
/// mismatch, or zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Rectangular table of per-pair metric values, one column per metric.
struct MetricTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // each row has columns.size() values
};

struct NamedMatrix {
  std::vector<std::string> names;
  Matrix values;
};

/// Symmetric correlation matrix with unit diagonal over all table columns.
/// DegenerateSeries names the offending column.
NamedMatrix correlation_matrix(const MetricTable& table);

/// The metric-validation table: columns info_diff, len_diff, wrs_full,
/// bleu4, adj_bleu4, smas evaluated over the given report pairs.
MetricTable build_metric_table(const std::vector<AnnotatedReport>& corpus,
                               const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                               const WordVectorStore& store,
                               const SentenceVectorSource& src,
                               const MatchOptions& opts = {});

}  // namespace reportcert
