#include "reportcert/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace reportcert {

namespace {

constexpr std::size_t kVariantsPerFinding = 4;

const std::vector<std::string> kFillers = {
    "the",   "is",     "are",   "no",    "seen",   "noted",  "in",    "of",
    "with",  "and",    "stable", "clear", "within", "limits", "views", "exam"};

// Deterministic helpers on top of mt19937_64; distribution classes are
// implementation-defined, so everything is derived from raw draws.
struct Rng {
  std::mt19937_64 gen;

  explicit Rng(std::uint64_t seed) : gen(seed) {}

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen() % n); }
  double unit() {  // in [0, 1)
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
  }
  double normal() {
    // Box-Muller from two uniform draws.
    double u1 = unit();
    double u2 = unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
  }
  bool chance(double p) { return unit() < p; }
};

std::vector<double> random_unit(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double sq = 0.0;
  for (double& x : v) {
    x = rng.normal();
    sq += x * x;
  }
  const double norm = std::sqrt(sq);
  for (double& x : v) x /= norm;
  return v;
}

std::vector<double> blend(const std::vector<double>& base, Rng& rng, double noise,
                          double target_norm) {
  std::vector<double> v(base.size());
  double sq = 0.0;
  for (std::size_t d = 0; d < base.size(); ++d) {
    v[d] = base[d] + noise * rng.normal();
    sq += v[d] * v[d];
  }
  const double scale = target_norm / std::sqrt(sq);
  for (double& x : v) x *= scale;
  return v;
}

std::string variant_token(std::size_t finding, std::size_t variant) {
  return "f" + std::to_string(finding) + "v" + std::to_string(variant);
}

std::string finding_label(std::size_t finding) {
  return "organ" + std::to_string(finding) + "|finding" + std::to_string(finding);
}

struct SentenceSpec {
  std::vector<std::size_t> findings;  // one, occasionally two
};

std::string render_sentence(const SentenceSpec& spec, Rng& rng) {
  std::vector<std::string> tokens;
  const std::size_t lead = 1 + rng.below(2);
  for (std::size_t k = 0; k < lead; ++k) tokens.push_back(kFillers[rng.below(kFillers.size())]);
  for (std::size_t finding : spec.findings)
    tokens.push_back(variant_token(finding, rng.below(kVariantsPerFinding)));
  const std::size_t tail = 1 + rng.below(2);
  for (std::size_t k = 0; k < tail; ++k) tokens.push_back(kFillers[rng.below(kFillers.size())]);
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::string render_report(const std::vector<SentenceSpec>& specs, Rng& rng) {
  std::string out;
  for (const auto& spec : specs) {
    out += render_sentence(spec, rng);
    out += ". ";
  }
  if (!out.empty()) out.pop_back();  // trailing space
  return out;
}

std::vector<SentenceSpec> random_report_spec(Rng& rng, const SyntheticConfig& cfg) {
  const std::size_t n = 1 + rng.below(cfg.max_sentences);
  std::vector<std::size_t> findings(cfg.n_findings);
  std::iota(findings.begin(), findings.end(), 0);
  // Fisher-Yates prefix shuffle for the n distinct findings.
  for (std::size_t k = 0; k < n; ++k)
    std::swap(findings[k], findings[k + rng.below(cfg.n_findings - k)]);
  std::vector<SentenceSpec> specs(n);
  for (std::size_t k = 0; k < n; ++k) specs[k].findings = {findings[k]};
  // Occasionally one sentence mentions a second finding.
  if (n < cfg.n_findings && rng.chance(0.2))
    specs[rng.below(n)].findings.push_back(findings[n]);
  return specs;
}

std::vector<std::string> labels_of(const std::vector<SentenceSpec>& specs) {
  std::vector<std::string> labels;
  for (const auto& spec : specs)
    for (std::size_t finding : spec.findings) labels.push_back(finding_label(finding));
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& cfg) {
  Rng rng(cfg.seed);
  SyntheticCorpus corpus;
  corpus.dimension = cfg.dim;

  // Vocabulary: fillers cluster around a shared background direction with
  // small norms; findings get independent directions, larger norms, and
  // kVariantsPerFinding noisy variants each.
  const auto background = random_unit(rng, cfg.dim);
  for (const auto& filler : kFillers) {
    auto direction = blend(background, rng, 0.45, 1.0);
    corpus.embedding_entries.emplace_back(
        filler, blend(direction, rng, 0.0, 0.4 + 0.1 * rng.unit()));
  }
  for (std::size_t k = 0; k < cfg.n_findings; ++k) {
    const auto base = random_unit(rng, cfg.dim);
    for (std::size_t v = 0; v < kVariantsPerFinding; ++v)
      corpus.embedding_entries.emplace_back(
          variant_token(k, v), blend(base, rng, 0.25, 1.2 + 0.2 * rng.unit()));
  }

  for (std::size_t r = 0; r < cfg.reports; ++r) {
    const auto specs = random_report_spec(rng, cfg);
    corpus.report_texts.push_back(render_report(specs, rng));
    corpus.report_labels.push_back(labels_of(specs));
  }

  for (std::size_t c = 0; c < cfg.cases; ++c) {
    SyntheticCase one;
    one.case_id = "case-" + std::to_string(c);
    const auto base_specs = random_report_spec(rng, cfg);
    for (std::size_t s = 0; s < cfg.samples_per_case; ++s) {
      // Each MC sample perturbs the base report: sentences may drop, the
      // wording re-rolls, and an extra finding may appear.
      std::vector<SentenceSpec> specs;
      for (const auto& spec : base_specs)
        if (specs.empty() || !rng.chance(0.15)) specs.push_back(spec);
      if (rng.chance(0.15))
        specs.push_back(SentenceSpec{{rng.below(cfg.n_findings)}});
      one.samples.push_back(render_report(specs, rng));
    }
    corpus.cases.push_back(std::move(one));
  }
  return corpus;
}

}  // namespace reportcert
