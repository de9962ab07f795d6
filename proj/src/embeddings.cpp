#include "reportcert/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "reportcert/errors.hpp"

namespace reportcert {

namespace {

double parse_double(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("line " + std::to_string(line_no) +
                     ": malformed number \"" + std::string(field) + "\"");
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > b) fields.push_back(line.substr(b, i - b));
  }
  return fields;
}

struct ParsedEmbeddingFile {
  std::size_t dimension = 0;
  std::unordered_map<std::string, std::vector<double>> entries;  // first wins
};

ParsedEmbeddingFile parse_embedding_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1: missing header");
  auto header = split_ws(line);
  if (header.size() != 2)
    throw ParseError("line 1: header must be \"<count> <dimension>\"");
  std::size_t declared_count = 0, dimension = 0;
  try {
    declared_count = static_cast<std::size_t>(std::stoull(std::string(header[0])));
    dimension = static_cast<std::size_t>(std::stoull(std::string(header[1])));
  } catch (const std::exception&) {
    throw ParseError("line 1: header must be \"<count> <dimension>\"");
  }
  if (dimension == 0) throw ParseError("line 1: dimension must be positive");

  ParsedEmbeddingFile parsed;
  parsed.dimension = dimension;
  parsed.entries.reserve(declared_count);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_ws(line);
    if (fields.empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty line");
    if (fields.size() != dimension + 1)
      throw DimensionMismatch("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(dimension) + " components, got " +
                              std::to_string(fields.size() - 1));
    std::vector<double> vec(dimension);
    for (std::size_t d = 0; d < dimension; ++d)
      vec[d] = parse_double(fields[d + 1], line_no);
    parsed.entries.try_emplace(std::string(fields[0]), std::move(vec));
  }
  if (parsed.entries.empty())
    throw ParseError("embedding file has no entries: " + path.string());
  return parsed;
}

std::string underscore_key(std::string_view raw) {
  std::string key(raw);
  std::replace(key.begin(), key.end(), ' ', '_');
  return key;
}

}  // namespace

WordVectorStore WordVectorStore::load(const std::filesystem::path& path) {
  auto parsed = parse_embedding_text(path);
  WordVectorStore store;
  store.dimension_ = parsed.dimension;
  store.entries_ = std::move(parsed.entries);
  return store;
}

WordVectorStore WordVectorStore::from_entries(
    std::size_t dimension,
    const std::vector<std::pair<std::string, std::vector<double>>>& entries) {
  if (dimension == 0) throw ParseError("dimension must be positive");
  WordVectorStore store;
  store.dimension_ = dimension;
  for (const auto& [token, vec] : entries) {
    if (vec.size() != dimension)
      throw DimensionMismatch("entry \"" + token + "\" has " +
                              std::to_string(vec.size()) + " components, expected " +
                              std::to_string(dimension));
    store.entries_.try_emplace(token, vec);
  }
  if (store.entries_.empty()) throw ParseError("no entries");
  return store;
}

WordVectorStore::WordVectorStore(WordVectorStore&& other) noexcept
    : dimension_(other.dimension_),
      entries_(std::move(other.entries_)),
      oov_count_(other.oov_count_.load()) {}

WordVectorStore& WordVectorStore::operator=(WordVectorStore&& other) noexcept {
  dimension_ = other.dimension_;
  entries_ = std::move(other.entries_);
  oov_count_.store(other.oov_count_.load());
  return *this;
}

const std::vector<double>* WordVectorStore::find(std::string_view token) const {
  auto it = entries_.find(std::string(token));
  if (it == entries_.end()) {
    oov_count_.fetch_add(1, std::memory_order_relaxed);
    return nullptr;
  }
  return &it->second;
}

bool WordVectorStore::contains(std::string_view token) const {
  return entries_.count(std::string(token)) != 0;
}

EmbeddedSentence embed_words(const Sentence& s, const WordVectorStore& store) {
  EmbeddedSentence out;
  out.vectors.reserve(s.tokens.size());
  for (const auto& token : s.tokens) {
    const auto* vec = store.find(token);
    if (!vec) continue;
    double sq = 0.0;
    for (double v : *vec) sq += v * v;
    out.vectors.push_back(*vec);
    out.norms.push_back(std::sqrt(sq));
  }
  for (double n : out.norms) out.total_mass += n;
  return out;
}

SentenceVectorSource SentenceVectorSource::derived_mean() {
  return SentenceVectorSource{};
}

SentenceVectorSource SentenceVectorSource::external_table(
    std::unordered_map<std::string, std::vector<double>> table,
    std::size_t dimension) {
  SentenceVectorSource src;
  src.external_ = true;
  src.dimension_ = dimension;
  for (auto& [key, vec] : table) src.table_.emplace(underscore_key(key), std::move(vec));
  return src;
}

SentenceVectorSource SentenceVectorSource::load_external_table(
    const std::filesystem::path& path) {
  auto parsed = parse_embedding_text(path);
  SentenceVectorSource src;
  src.external_ = true;
  src.dimension_ = parsed.dimension;
  src.table_ = std::move(parsed.entries);  // keys stay in underscore form
  return src;
}

std::vector<double> embed_sentence(const Sentence& s, const WordVectorStore& store,
                                   const SentenceVectorSource& src) {
  if (src.external_) {
    auto it = src.table_.find(underscore_key(s.raw));
    if (it == src.table_.end())
      throw MissingSentenceVector("no sentence vector for \"" + s.raw + "\"");
    return it->second;
  }
  std::vector<double> mean(store.dimension(), 0.0);
  std::size_t hits = 0;
  for (const auto& token : s.tokens) {
    const auto* vec = store.find(token);
    if (!vec) continue;
    for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += (*vec)[d];
    ++hits;
  }
  if (hits == 0)
    throw NoEmbeddableTokens("no in-vocabulary tokens in \"" + s.raw + "\"");
  for (double& v : mean) v /= static_cast<double>(hits);
  return mean;
}

void write_embedding_file(
    const std::filesystem::path& path, std::size_t dimension,
    const std::vector<std::pair<std::string, std::vector<double>>>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << entries.size() << ' ' << dimension << '\n';
  char buf[64];
  for (const auto& [token, vec] : entries) {
    out << token;
    for (double v : vec) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      (void)ec;
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

}  // namespace reportcert
