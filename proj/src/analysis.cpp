#include "reportcert/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "reportcert/errors.hpp"

namespace reportcert {

AnnotatedReport AnnotatedReport::make(Report report, std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return AnnotatedReport{std::move(report), std::move(labels)};
}

long info_diff(const AnnotatedReport& a, const AnnotatedReport& b) {
  return std::labs(static_cast<long>(a.labels.size()) -
                   static_cast<long>(b.labels.size()));
}

long len_diff(const AnnotatedReport& a, const AnnotatedReport& b) {
  return std::labs(static_cast<long>(a.report.size()) -
                   static_cast<long>(b.report.size()));
}

std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t corpus_size,
                                                              std::size_t n,
                                                              std::uint64_t seed) {
  if (corpus_size == 0) throw EmptyCorpus("cannot sample pairs from an empty corpus");
  // mt19937_64 plus modulo indexing: the distribution classes are
  // implementation-defined, this is reproducible everywhere.
  std::mt19937_64 gen(seed);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = static_cast<std::size_t>(gen() % corpus_size);
    const std::size_t b = static_cast<std::size_t>(gen() % corpus_size);
    pairs.emplace_back(a, b);
  }
  return pairs;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw DegenerateSeries("series lengths differ: " + std::to_string(x.size()) +
                           " vs " + std::to_string(y.size()));
  const std::size_t n = x.size();
  if (n < 2) throw DegenerateSeries("need at least 2 observations");
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mean_x += x[k];
    mean_y += y[k];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double cov = 0.0, var_x = 0.0, var_y = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = x[k] - mean_x;
    const double dy = y[k] - mean_y;
    cov += dx * dy;
    var_x += dx * dx;
    var_y += dy * dy;
  }
  if (var_x == 0.0 || var_y == 0.0)
    throw DegenerateSeries("zero variance series");
  return cov / std::sqrt(var_x * var_y);
}

NamedMatrix correlation_matrix(const MetricTable& table) {
  if (table.rows.size() < 2)
    throw DegenerateSeries("correlation needs at least 2 table rows");
  const std::size_t cols = table.columns.size();
  std::vector<std::vector<double>> series(cols);
  for (auto& s : series) s.reserve(table.rows.size());
  for (const auto& row : table.rows)
    for (std::size_t c = 0; c < cols; ++c) series[c].push_back(row[c]);

  for (std::size_t c = 0; c < cols; ++c) {
    double mean = 0.0, var = 0.0;
    for (double v : series[c]) mean += v;
    mean /= static_cast<double>(series[c].size());
    for (double v : series[c]) var += (v - mean) * (v - mean);
    if (var == 0.0)
      throw DegenerateSeries("column \"" + table.columns[c] +
                             "\" is degenerate (zero variance)");
  }

  NamedMatrix out{table.columns, Matrix(cols, cols)};
  for (std::size_t i = 0; i < cols; ++i) out.values(i, i) = 1.0;
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = i + 1; j < cols; ++j) {
      const double r = pearson(series[i], series[j]);
      out.values(i, j) = r;
      out.values(j, i) = r;
    }
  return out;
}

MetricTable build_metric_table(const std::vector<AnnotatedReport>& corpus,
                               const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                               const WordVectorStore& store,
                               const SentenceVectorSource& src,
                               const MatchOptions& opts) {
  MetricTable table;
  table.columns = {"info_diff", "len_diff", "wrs_full", "bleu4", "adj_bleu4", "smas"};
  table.rows.resize(pairs.size());
  const auto bleu = SentenceScorer::bleu4();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& a = corpus[pairs[k].first];
    const auto& b = corpus[pairs[k].second];
    table.rows[k] = {
        static_cast<double>(info_diff(a, b)),
        static_cast<double>(len_diff(a, b)),
        report_wrs(a.report, b.report, store),
        report_bleu4(a.report, b.report),
        adjusted_score(a.report, b.report, bleu, store, src, opts),
        smas(a.report, b.report, store, src, opts),
    };
  }
  return table;
}

}  // namespace reportcert
