#include "reportcert/text.hpp"

#include <cctype>
#include <set>

#include "reportcert/errors.hpp"

namespace reportcert {

namespace {

// Length in bytes of the UTF-8 sequence starting at `c`. Malformed lead
// bytes are treated as single-byte characters so segmentation never stalls.
std::size_t utf8_len(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c & 0xE0) == 0xC0) return 2;
  if ((c & 0xF0) == 0xE0) return 3;
  if ((c & 0xF8) == 0xF0) return 4;
  return 1;
}

std::set<std::string, std::less<>> delimiter_set(const SegmentationConfig& cfg) {
  std::set<std::string, std::less<>> out;
  std::size_t i = 0;
  while (i < cfg.sentence_delimiters.size()) {
    std::size_t n = utf8_len(static_cast<unsigned char>(cfg.sentence_delimiters[i]));
    n = std::min(n, cfg.sentence_delimiters.size() - i);
    out.insert(cfg.sentence_delimiters.substr(i, n));
    i += n;
  }
  return out;
}

bool is_ascii_token_char(unsigned char c) { return std::isalnum(c) != 0; }

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> tokenize_impl(std::string_view raw,
                                       const SegmentationConfig& cfg,
                                       const std::set<std::string, std::less<>>& delims) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  };
  std::size_t i = 0;
  while (i < raw.size()) {
    unsigned char c = static_cast<unsigned char>(raw[i]);
    std::size_t n = std::min(utf8_len(c), raw.size() - i);
    std::string_view cp = raw.substr(i, n);
    if (delims.count(cp)) {
      flush();
    } else if (n == 1) {
      if (is_ascii_token_char(c)) {
        current.push_back(cfg.lowercase
                              ? static_cast<char>(std::tolower(c))
                              : static_cast<char>(c));
      } else {
        flush();  // whitespace or ASCII punctuation
      }
    } else {
      current.append(cp);  // non-ASCII code points join the current token
    }
    i += n;
  }
  flush();
  return tokens;
}

}  // namespace

Sentence tokenize_sentence(std::string_view raw, const SegmentationConfig& cfg) {
  std::string_view trimmed = trim(raw);
  if (trimmed.empty()) throw EmptySentence("sentence is empty after trimming");
  auto tokens = tokenize_impl(trimmed, cfg, delimiter_set(cfg));
  if (tokens.empty())
    throw EmptySentence("no tokens survive tokenization: \"" +
                        std::string(trimmed) + "\"");
  return Sentence{std::move(tokens), std::string(trimmed)};
}

Report segment_report(std::string_view raw, const SegmentationConfig& cfg) {
  const auto delims = delimiter_set(cfg);
  Report report;
  report.source = std::string(raw);

  std::size_t i = 0;
  std::size_t seg_begin = 0;
  auto close_segment = [&](std::size_t seg_end) {
    std::string_view segment = trim(raw.substr(seg_begin, seg_end - seg_begin));
    if (segment.empty()) return;
    auto tokens = tokenize_impl(segment, cfg, delims);
    if (tokens.empty()) return;  // stray punctuation-only segments are dropped
    report.sentences.push_back(Sentence{std::move(tokens), std::string(segment)});
  };
  while (i < raw.size()) {
    std::size_t n = std::min(utf8_len(static_cast<unsigned char>(raw[i])),
                             raw.size() - i);
    if (delims.count(raw.substr(i, n))) {
      close_segment(i);
      seg_begin = i + n;
    }
    i += n;
  }
  close_segment(raw.size());  // trailing segment without a terminal delimiter
  return report;
}

}  // namespace reportcert
