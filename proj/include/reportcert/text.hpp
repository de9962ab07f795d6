#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace reportcert {

/// How raw report strings are cut into sentences and tokens.
///
/// Sentence boundaries are single characters (UTF-8 code points) from
/// `sentence_delimiters`. Tokens are maximal runs of ASCII alphanumerics or
/// non-ASCII code points; whitespace, ASCII punctuation and delimiter
/// characters all split tokens. With `lowercase` set, ASCII letters are
/// folded to lower case (non-ASCII text is left untouched).
struct SegmentationConfig {
  std::string sentence_delimiters = ".!?\xe3\x80\x82";  // . ! ? 。
  bool lowercase = true;
};

struct Sentence {
  std::vector<std::string> tokens;
  std::string raw;  // original segment text, whitespace-trimmed
};

struct Report {
  std::vector<Sentence> sentences;
  std::string source;  // original raw text

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

/// Tokenize one sentence. Throws EmptySentence if no tokens survive.
Sentence tokenize_sentence(std::string_view raw,
                           const SegmentationConfig& cfg = {});

/// Split a raw report at delimiter characters and tokenize each segment.
/// Segments with no tokens are dropped; empty input gives an empty Report.
Report segment_report(std::string_view raw, const SegmentationConfig& cfg = {});

}  // namespace reportcert
