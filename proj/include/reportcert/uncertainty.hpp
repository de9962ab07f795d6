#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reportcert/matrix.hpp"
#include "reportcert/similarity.hpp"
#include "reportcert/text.hpp"

namespace reportcert {

/// T Monte-Carlo report samples for one input case.
struct McSampleSet {
  std::string case_id;
  std::vector<Report> samples;
  std::optional<Report> ground_truth;
  std::vector<std::string> labels;
};

/// T pixel arrays of identical (C, H, W) shape from MC forward passes.
struct ReconstructionStack {
  std::uint32_t t = 0, c = 0, h = 0, w = 0;
  std::vector<float> data;  // t-major, then c, h, w row-major

  std::size_t pixels_per_sample() const {
    return std::size_t{c} * h * w;
  }
  float at(std::size_t sample, std::size_t pixel) const {
    return data[sample * pixels_per_sample() + pixel];
  }
};

/// Per-pixel map of shape (C, H, W), flattened row-major.
struct PixelMap {
  std::uint32_t c = 0, h = 0, w = 0;
  std::vector<double> values;
};

struct VisStats {
  PixelMap mu;   // per-pixel mean over the T samples
  PixelMap var;  // per-pixel population variance
};

/// Symmetric T x T matrix of pairwise report similarities, diagonal 1.
Matrix pairwise_smas(const McSampleSet& set, const WordVectorStore& store,
                     const SentenceVectorSource& src, const MatchOptions& opts = {});

/// Population variance of the T(T-1)/2 distinct pair values.
double smas_pair_variance(const Matrix& m);

/// Report-level textual uncertainty: sqrt of smas_pair_variance.
double smasvar(const Matrix& m);

/// Index of the sample with the smallest total similarity distance to the
/// others; ties go to the lowest index.
std::size_t reference_report(const Matrix& m);

struct SentenceUncertainty {
  std::size_t index = 0;   // sentence position in the reference report
  std::string text;        // its raw text
  double variance = 0.0;   // population variance of matched-sentence wrs
  double value = 0.0;      // sqrt(variance)
  bool unsupported = false;  // no other sample had a matched sentence
};

/// Sentence-level uncertainty for every sentence of the reference report.
/// A sample with no matched sentence contributes similarity 0.
std::vector<SentenceUncertainty> smasvar_l(const McSampleSet& set,
                                           std::size_t ref_index,
                                           const WordVectorStore& store,
                                           const SentenceVectorSource& src,
                                           const MatchOptions& opts = {});

/// Per-pixel mean and population variance over the T samples.
VisStats vis_stats(const ReconstructionStack& stack);

/// Mean over all pixels of the per-pixel standard deviation.
double visvar(const PixelMap& var_map);

/// Mean over all pixels of a per-pixel map.
double pixel_mean(const PixelMap& map);

struct UncertaintyReport {
  std::string case_id;
  std::size_t reference_index = 0;
  std::string reference_text;
  double smas_variance = 0.0;
  double smasvar = 0.0;  // sqrt(smas_variance)
  std::vector<SentenceUncertainty> sentences;
  std::optional<double> visvar;
  std::optional<double> vis_mu_mean;
  std::optional<double> vis_var_mean;
};

/// Full per-case evaluation: pairwise similarities, reference report,
/// report- and sentence-level uncertainties, optional visual statistics.
UncertaintyReport evaluate_case(const McSampleSet& set, const WordVectorStore& store,
                                const SentenceVectorSource& src,
                                const std::optional<ReconstructionStack>& stack = {},
                                const MatchOptions& opts = {});

}  // namespace reportcert
