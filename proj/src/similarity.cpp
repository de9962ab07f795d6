#include "reportcert/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <tuple>

#include "reportcert/errors.hpp"

namespace reportcert {

namespace {

// Sentence embedding for matching, with the empty-sentence convention:
// nullopt stands for "no direction" (all tokens OOV, or zero-norm mean).
std::optional<std::vector<double>> matching_embedding(const Sentence& s,
                                                      const WordVectorStore& store,
                                                      const SentenceVectorSource& src) {
  std::vector<double> vec;
  try {
    vec = embed_sentence(s, store, src);
  } catch (const NoEmbeddableTokens&) {
    return std::nullopt;
  }
  double sq = 0.0;
  for (double v : vec) sq += v * v;
  if (sq == 0.0) return std::nullopt;
  return vec;
}

double cosine_similarity_or_convention(const std::optional<std::vector<double>>& a,
                                       const std::optional<std::vector<double>>& b) {
  if (!a && !b) return 1.0;
  if (!a || !b) return 0.0;
  return 1.0 - cosine_distance(*a, *b);
}

Matrix matching_table(const Report& r, const Report& r2, const WordVectorStore& store,
                      const SentenceVectorSource& src, const MatchOptions& opts) {
  Matrix table(r.size(), r2.size());
  if (opts.by == MatchBy::kWrs) {
    std::vector<EmbeddedSentence> ea, eb;
    for (const auto& s : r.sentences) ea.push_back(embed_words(s, store));
    for (const auto& s : r2.sentences) eb.push_back(embed_words(s, store));
    for (std::size_t i = 0; i < ea.size(); ++i)
      for (std::size_t j = 0; j < eb.size(); ++j) table(i, j) = wrs(ea[i], eb[j]);
    return table;
  }
  std::vector<std::optional<std::vector<double>>> ea, eb;
  for (const auto& s : r.sentences) ea.push_back(matching_embedding(s, store, src));
  for (const auto& s : r2.sentences) eb.push_back(matching_embedding(s, store, src));
  for (std::size_t i = 0; i < ea.size(); ++i)
    for (std::size_t j = 0; j < eb.size(); ++j)
      table(i, j) = cosine_similarity_or_convention(ea[i], eb[j]);
  return table;
}

}  // namespace

SentencePairing greedy_match(const Matrix& similarity) {
  struct Entry {
    double score;
    std::size_t i, j;
  };
  std::vector<Entry> entries;
  entries.reserve(similarity.rows() * similarity.cols());
  for (std::size_t i = 0; i < similarity.rows(); ++i)
    for (std::size_t j = 0; j < similarity.cols(); ++j)
      entries.push_back(Entry{similarity(i, j), i, j});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });

  SentencePairing pairing;
  std::vector<char> used_i(similarity.rows(), 0), used_j(similarity.cols(), 0);
  for (const auto& e : entries) {
    if (used_i[e.i] || used_j[e.j]) continue;
    used_i[e.i] = used_j[e.j] = 1;
    pairing.pairs.push_back(MatchedPair{e.i, e.j, e.score});
  }
  return pairing;
}

SentencePairing match_sentences(const Report& r, const Report& r2,
                                const WordVectorStore& store,
                                const SentenceVectorSource& src,
                                const MatchOptions& opts) {
  if (r.empty() || r2.empty()) return SentencePairing{};
  return greedy_match(matching_table(r, r2, store, src, opts));
}

SentenceScorer SentenceScorer::wrs(const WordVectorStore& store) {
  return SentenceScorer("wrs", true, [&store](const Sentence& a, const Sentence& b) {
    return reportcert::wrs(embed_words(a, store), embed_words(b, store));
  });
}

SentenceScorer SentenceScorer::bleu4() {
  return SentenceScorer("bleu4", false, [](const Sentence& a, const Sentence& b) {
    return sentence_bleu4(a, b);
  });
}

SentenceScorer SentenceScorer::embedding_cosine(const WordVectorStore& store,
                                                const SentenceVectorSource& src) {
  return SentenceScorer("embedding-cosine", true,
                        [&store, &src](const Sentence& a, const Sentence& b) {
                          return cosine_similarity_or_convention(
                              matching_embedding(a, store, src),
                              matching_embedding(b, store, src));
                        });
}

double sms(const Report& r, const Report& r2, const SentencePairing& pairing,
           const SentenceScorer& scorer) {
  const std::size_t total = r.size() + r2.size();
  if (total == 0) return 1.0;
  double sum = 0.0;
  for (const auto& pair : pairing.pairs)
    sum += scorer(r.sentences[pair.i], r2.sentences[pair.j]);
  return 2.0 / static_cast<double>(total) * sum;
}

double adjusted_score(const Report& r, const Report& r2, const SentenceScorer& scorer,
                      const WordVectorStore& store, const SentenceVectorSource& src,
                      const MatchOptions& opts) {
  const auto len_a = static_cast<double>(r.size());
  const auto len_b = static_cast<double>(r2.size());
  const double longest = std::max(len_a, len_b);
  if (longest == 0.0) return 1.0;  // two empty reports are identical
  const auto pairing = match_sentences(r, r2, store, src, opts);
  const double penalty = 1.0 - std::abs(len_a - len_b) / longest;
  return sms(r, r2, pairing, scorer) * penalty;
}

double smas(const Report& r, const Report& r2, const WordVectorStore& store,
            const SentenceVectorSource& src, const MatchOptions& opts) {
  return adjusted_score(r, r2, SentenceScorer::wrs(store), store, src, opts);
}

namespace {

std::map<std::vector<std::string_view>, std::size_t> ngram_counts(
    const std::vector<std::string>& tokens, std::size_t n) {
  std::map<std::vector<std::string_view>, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::vector<std::string_view> gram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                       tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[gram];
  }
  return counts;
}

}  // namespace

double sentence_bleu4(const Sentence& hyp, const Sentence& ref) {
  if (hyp.tokens.empty() || ref.tokens.empty()) return 0.0;

  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto hyp_counts = ngram_counts(hyp.tokens, n);
    if (hyp_counts.empty()) continue;  // sentence shorter than n
    auto ref_counts = ngram_counts(ref.tokens, n);
    std::size_t total = 0, matched = 0;
    for (const auto& [gram, count] : hyp_counts) {
      total += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    double precision = matched > 0
                           ? static_cast<double>(matched) / static_cast<double>(total)
                           : 1.0 / static_cast<double>(total + 1);  // add-1 smoothing
    log_sum += std::log(precision);
    ++orders;
  }
  if (orders == 0) return 0.0;

  const auto c = static_cast<double>(hyp.tokens.size());
  const auto r = static_cast<double>(ref.tokens.size());
  const double brevity = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return brevity * std::exp(log_sum / static_cast<double>(orders));
}

Sentence flatten(const Report& r) {
  Sentence out;
  for (const auto& s : r.sentences) {
    out.tokens.insert(out.tokens.end(), s.tokens.begin(), s.tokens.end());
    if (!out.raw.empty()) out.raw += ' ';
    out.raw += s.raw;
  }
  return out;
}

double report_bleu4(const Report& r, const Report& r2) {
  return sentence_bleu4(flatten(r), flatten(r2));
}

double report_wrs(const Report& r, const Report& r2, const WordVectorStore& store) {
  return wrs(embed_words(flatten(r), store), embed_words(flatten(r2), store));
}

}  // namespace reportcert
