#pragma once

#include <functional>
#include <string>
#include <vector>

#include "reportcert/embeddings.hpp"
#include "reportcert/matrix.hpp"
#include "reportcert/text.hpp"
#include "reportcert/transport.hpp"

namespace reportcert {

struct MatchedPair {
  std::size_t i;  // sentence index in R
  std::size_t j;  // sentence index in R'
  double score;   // the matcher's similarity value
};

/// A matching of size min(L, L'), in greedy pop order (scores non-increasing).
struct SentencePairing {
  std::vector<MatchedPair> pairs;
};

enum class MatchBy {
  kSentenceCosine,  // cosine of sentence embeddings (default, as the matcher)
  kWrs,             // full word-level transport similarity per pair
};

struct MatchOptions {
  MatchBy by = MatchBy::kSentenceCosine;
};

/// Greedy matching over an arbitrary L x L' similarity table: sort all
/// (i, j) entries by descending score (ties by ascending (i, j)), pop the
/// top pair, delete every entry sharing its i or j, repeat.
SentencePairing greedy_match(const Matrix& similarity);

/// The matching step between two reports. Sentences whose embedding is
/// unavailable (all tokens OOV) or has zero norm are treated as empty:
/// similarity 1 against another empty sentence, 0 against anything else.
SentencePairing match_sentences(const Report& r, const Report& r2,
                                const WordVectorStore& store,
                                const SentenceVectorSource& src,
                                const MatchOptions& opts = {});

/// Sentence-pair scorer used on matched pairs. wrs and embedding-cosine are
/// symmetric; bleu4 is directional and is evaluated as
/// score(generated, ground-truth).
class SentenceScorer {
 public:
  using Fn = std::function<double(const Sentence&, const Sentence&)>;

  SentenceScorer(std::string name, bool symmetric, Fn fn)
      : name_(std::move(name)), symmetric_(symmetric), fn_(std::move(fn)) {}

  double operator()(const Sentence& a, const Sentence& b) const { return fn_(a, b); }
  const std::string& name() const { return name_; }
  bool symmetric() const { return symmetric_; }

  static SentenceScorer wrs(const WordVectorStore& store);
  static SentenceScorer bleu4();
  static SentenceScorer embedding_cosine(const WordVectorStore& store,
                                         const SentenceVectorSource& src);

 private:
  std::string name_;
  bool symmetric_;
  Fn fn_;
};

/// Sentence-matched similarity: (2 / (L + L')) * sum of pair scores.
/// Defined as 1 when both reports are empty.
double sms(const Report& r, const Report& r2, const SentencePairing& pairing,
           const SentenceScorer& scorer);

/// SMS with the supplied scorer, multiplied by the length-consistency
/// penalty 1 - |L - L'| / max(L, L'); 1 when both reports are empty.
double adjusted_score(const Report& r, const Report& r2, const SentenceScorer& scorer,
                      const WordVectorStore& store, const SentenceVectorSource& src,
                      const MatchOptions& opts = {});

/// adjusted_score with the word-level transport similarity as the scorer.
double smas(const Report& r, const Report& r2, const WordVectorStore& store,
            const SentenceVectorSource& src, const MatchOptions& opts = {});

/// Smoothed sentence BLEU-4: modified 1..4-gram precisions with add-1
/// smoothing on orders that have hypothesis n-grams but no matches, orders
/// without hypothesis n-grams skipped, times the brevity penalty.
double sentence_bleu4(const Sentence& hyp, const Sentence& ref);

/// BLEU-4 treating each full report as a single token sequence.
double report_bleu4(const Report& r, const Report& r2);

/// Word-level transport similarity treating each full report as one sentence.
double report_wrs(const Report& r, const Report& r2, const WordVectorStore& store);

/// All tokens of a report as a single sentence, in reading order.
Sentence flatten(const Report& r);

}  // namespace reportcert
