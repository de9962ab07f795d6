#include "reportcert/uncertainty.hpp"

#include <algorithm>
#include <cmath>

#include "reportcert/errors.hpp"

namespace reportcert {

Matrix pairwise_smas(const McSampleSet& set, const WordVectorStore& store,
                     const SentenceVectorSource& src, const MatchOptions& opts) {
  const std::size_t t = set.samples.size();
  if (t < 2) throw DegenerateSamples("pairwise similarity needs at least 2 samples");
  Matrix m(t, t);
  for (std::size_t i = 0; i < t; ++i) m(i, i) = 1.0;
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = i + 1; j < t; ++j) {
      double value = smas(set.samples[i], set.samples[j], store, src, opts);
      m(i, j) = value;
      m(j, i) = value;
    }
  return m;
}

double smas_pair_variance(const Matrix& m) {
  const std::size_t t = m.rows();
  if (t < 2 || m.cols() != t)
    throw DegenerateSamples("variance needs a T x T matrix with T >= 2");
  bool all_equal = true;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = i + 1; j < t; ++j) {
      all_equal = all_equal && m(i, j) == m(0, 1);
      sum += m(i, j);
      ++pairs;
    }
  if (all_equal) return 0.0;  // exact zero, untouched by summation rounding
  const double mean = sum / static_cast<double>(pairs);
  double sq = 0.0;
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = i + 1; j < t; ++j) {
      const double d = m(i, j) - mean;
      sq += d * d;
    }
  return sq / static_cast<double>(pairs);
}

double smasvar(const Matrix& m) { return std::sqrt(smas_pair_variance(m)); }

std::size_t reference_report(const Matrix& m) {
  const std::size_t t = m.rows();
  if (t < 2) throw DegenerateSamples("reference report needs at least 2 samples");
  std::size_t best = 0;
  double best_distance = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    double distance = 0.0;
    for (std::size_t j = 0; j < t; ++j)
      if (j != i) distance += 1.0 - m(i, j);
    if (i == 0 || distance < best_distance) {
      best = i;
      best_distance = distance;
    }
  }
  return best;
}

std::vector<SentenceUncertainty> smasvar_l(const McSampleSet& set,
                                           std::size_t ref_index,
                                           const WordVectorStore& store,
                                           const SentenceVectorSource& src,
                                           const MatchOptions& opts) {
  const std::size_t t = set.samples.size();
  if (t < 2) throw DegenerateSamples("sentence-level uncertainty needs at least 2 samples");
  const Report& reference = set.samples[ref_index];
  const std::size_t n_sentences = reference.size();

  // wrs of each reference sentence against its matched sentence in every
  // other sample; 0 where the sample has no matched sentence.
  std::vector<std::vector<double>> scores(n_sentences);
  std::vector<std::size_t> matched_count(n_sentences, 0);
  for (std::size_t j = 0; j < t; ++j) {
    if (j == ref_index) continue;
    const Report& other = set.samples[j];
    auto pairing = match_sentences(reference, other, store, src, opts);
    std::vector<std::ptrdiff_t> partner(n_sentences, -1);
    for (const auto& pair : pairing.pairs) partner[pair.i] = static_cast<std::ptrdiff_t>(pair.j);
    for (std::size_t l = 0; l < n_sentences; ++l) {
      if (partner[l] < 0) {
        scores[l].push_back(0.0);
        continue;
      }
      ++matched_count[l];
      scores[l].push_back(wrs(embed_words(reference.sentences[l], store),
                              embed_words(other.sentences[static_cast<std::size_t>(partner[l])],
                                          store)));
    }
  }

  std::vector<SentenceUncertainty> out;
  out.reserve(n_sentences);
  for (std::size_t l = 0; l < n_sentences; ++l) {
    const auto& w = scores[l];
    double var = 0.0;
    const bool all_equal =
        std::all_of(w.begin(), w.end(), [&](double x) { return x == w.front(); });
    if (!all_equal) {
      double mean = 0.0;
      for (double x : w) mean += x;
      mean /= static_cast<double>(w.size());
      for (double x : w) var += (x - mean) * (x - mean);
      var /= static_cast<double>(w.size());
    }
    out.push_back(SentenceUncertainty{l, reference.sentences[l].raw, var, std::sqrt(var),
                                      matched_count[l] == 0});
  }
  return out;
}

VisStats vis_stats(const ReconstructionStack& stack) {
  const std::size_t t = stack.t;
  const std::size_t pixels = stack.pixels_per_sample();
  if (t < 2) throw DegenerateSamples("visual statistics need at least 2 samples");
  if (pixels == 0 || stack.data.size() != t * pixels)
    throw ShapeMismatch("stack data does not match its declared shape");

  VisStats stats;
  stats.mu = PixelMap{stack.c, stack.h, stack.w, std::vector<double>(pixels, 0.0)};
  stats.var = PixelMap{stack.c, stack.h, stack.w, std::vector<double>(pixels, 0.0)};
  for (std::size_t s = 0; s < t; ++s)
    for (std::size_t p = 0; p < pixels; ++p)
      stats.mu.values[p] += static_cast<double>(stack.at(s, p));
  for (double& v : stats.mu.values) v /= static_cast<double>(t);
  for (std::size_t s = 0; s < t; ++s)
    for (std::size_t p = 0; p < pixels; ++p) {
      const double d = static_cast<double>(stack.at(s, p)) - stats.mu.values[p];
      stats.var.values[p] += d * d;
    }
  for (double& v : stats.var.values) v /= static_cast<double>(t);
  return stats;
}

double visvar(const PixelMap& var_map) {
  if (var_map.values.empty()) throw ShapeMismatch("empty variance map");
  double sum = 0.0;
  for (double v : var_map.values) sum += std::sqrt(v);
  return sum / static_cast<double>(var_map.values.size());
}

double pixel_mean(const PixelMap& map) {
  if (map.values.empty()) throw ShapeMismatch("empty pixel map");
  double sum = 0.0;
  for (double v : map.values) sum += v;
  return sum / static_cast<double>(map.values.size());
}

UncertaintyReport evaluate_case(const McSampleSet& set, const WordVectorStore& store,
                                const SentenceVectorSource& src,
                                const std::optional<ReconstructionStack>& stack,
                                const MatchOptions& opts) {
  UncertaintyReport report;
  report.case_id = set.case_id;

  const Matrix m = pairwise_smas(set, store, src, opts);
  report.smas_variance = smas_pair_variance(m);
  report.smasvar = std::sqrt(report.smas_variance);
  report.reference_index = reference_report(m);
  report.reference_text = set.samples[report.reference_index].source;
  report.sentences = smasvar_l(set, report.reference_index, store, src, opts);

  if (stack) {
    const VisStats stats = vis_stats(*stack);
    report.visvar = visvar(stats.var);
    report.vis_mu_mean = pixel_mean(stats.mu);
    report.vis_var_mean = pixel_mean(stats.var);
  }
  return report;
}

}  // namespace reportcert
