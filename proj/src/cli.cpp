#include "reportcert/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <CLI11.hpp>
#include <json.hpp>

#include "reportcert/analysis.hpp"
#include "reportcert/embeddings.hpp"
#include "reportcert/errors.hpp"
#include "reportcert/similarity.hpp"
#include "reportcert/stack_io.hpp"
#include "reportcert/synthetic.hpp"
#include "reportcert/text.hpp"
#include "reportcert/transport.hpp"
#include "reportcert/uncertainty.hpp"
#include "reportcert/weighting.hpp"

namespace reportcert::cli {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Output formatting

struct Format {
  bool full_precision = false;
};

std::string format_number(double v, const Format& fmt) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  if (fmt.full_precision) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
  }
  int n = std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string escape(std::string_view s) { return json(std::string(s)).dump(); }

// Minimal ordered JSON-object builder; nlohmann parses inputs, this keeps
// field order and number formatting under our control on the way out.
class Record {
 public:
  explicit Record(const Format& fmt) : fmt_(fmt) {}

  Record& str(std::string_view key, std::string_view value) {
    return raw(key, escape(value));
  }
  Record& num(std::string_view key, double value) {
    return raw(key, format_number(value, fmt_));
  }
  Record& integer(std::string_view key, long long value) {
    return raw(key, std::to_string(value));
  }
  Record& boolean(std::string_view key, bool value) {
    return raw(key, value ? "true" : "false");
  }
  Record& nums(std::string_view key, const std::vector<double>& values) {
    std::string body = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) body += ',';
      body += format_number(values[i], fmt_);
    }
    body += ']';
    return raw(key, body);
  }
  Record& strs(std::string_view key, const std::vector<std::string>& values) {
    std::string body = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) body += ',';
      body += escape(values[i]);
    }
    body += ']';
    return raw(key, body);
  }
  Record& raw(std::string_view key, std::string_view value_json) {
    if (!body_.empty()) body_ += ',';
    body_ += escape(key);
    body_ += ':';
    body_ += value_json;
    return *this;
  }

  std::string str() const { return "{" + body_ + "}"; }

 private:
  Format fmt_;
  std::string body_;
};

// ---------------------------------------------------------------------------
// Shared configuration

struct CommonConfig {
  std::string embeddings_path;
  std::string sent_embeddings_path;
  std::string delimiters = ".!?\xe3\x80\x82";
  bool no_lowercase = false;
  double alpha = 1.0, beta = 1.0, gamma = 1.0, lambda_auto = 1.0;
  std::size_t samples = 0;  // 0: per-command default
  unsigned workers = 1;
  std::uint64_t seed = 0;
  std::string output_path;
  bool full_precision = false;
  std::string match_by = "cosine";

  SegmentationConfig segmentation() const {
    return SegmentationConfig{delimiters, !no_lowercase};
  }
  MatchOptions match_options() const {
    return MatchOptions{match_by == "wrs" ? MatchBy::kWrs : MatchBy::kSentenceCosine};
  }
  Format format() const { return Format{full_precision}; }
  WeightConfig weight_config() const { return WeightConfig{alpha, beta, gamma, lambda_auto}; }
};

void add_common_options(CLI::App* cmd, CommonConfig& cfg, bool needs_embeddings) {
  auto* emb = cmd->add_option("--embeddings", cfg.embeddings_path,
                              "Word-embedding file (text format)")
                  ->envname("REPORTCERT_EMBEDDINGS");
  if (needs_embeddings) emb->check(CLI::ExistingFile);
  cmd->add_option("--sent-embeddings", cfg.sent_embeddings_path,
                  "Precomputed sentence-vector table; default derives sentence "
                  "vectors as word-vector means")
      ->check(CLI::ExistingFile);
  cmd->add_option("--delimiters", cfg.delimiters, "Sentence delimiter characters");
  cmd->add_flag("--no-lowercase", cfg.no_lowercase, "Keep token case");
  cmd->add_option("--alpha", cfg.alpha, "Report-weight textual coefficient");
  cmd->add_option("--beta", cfg.beta, "Report-weight visual coefficient");
  cmd->add_option("--gamma", cfg.gamma, "Sentence-weight coefficient");
  cmd->add_option("--lambda-auto", cfg.lambda_auto, "Reconstruction-loss coefficient");
  cmd->add_option("--samples", cfg.samples, "Number of MC samples (T) to use per case");
  cmd->add_option("--workers", cfg.workers, "Worker threads for batch commands");
  cmd->add_option("--seed", cfg.seed, "Seed for randomized commands");
  cmd->add_option("--output", cfg.output_path, "Output path (default: stdout)");
  cmd->add_flag("--full-precision", cfg.full_precision,
                "Print numbers with shortest round-trip precision");
  cmd->add_option("--match-by", cfg.match_by,
                  "Sentence matcher: cosine (default) or wrs")
      ->check(CLI::IsMember({"cosine", "wrs"}));
}

// Output sink honoring --output.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw IoError("cannot open for writing: " + path);
      stream_ = &file_;
    }
  }
  std::ostream& out() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

WordVectorStore load_store(const CommonConfig& cfg) {
  if (cfg.embeddings_path.empty())
    throw IoError("this command needs --embeddings (or REPORTCERT_EMBEDDINGS)");
  return WordVectorStore::load(cfg.embeddings_path);
}

SentenceVectorSource load_source(const CommonConfig& cfg) {
  if (!cfg.sent_embeddings_path.empty())
    return SentenceVectorSource::load_external_table(cfg.sent_embeddings_path);
  return SentenceVectorSource::derived_mean();
}

// Evaluate records on a worker pool, then emit in input order so output is
// byte-identical no matter how many workers run.
void for_each_ordered(std::size_t count, unsigned workers,
                      const std::function<std::string(std::size_t)>& fn,
                      std::ostream& out) {
  std::vector<std::string> results(count);
  workers = std::max(1u, workers);
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        results[i] = fn(i);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& r : results) out << r << '\n';
}

// ---------------------------------------------------------------------------
// Input records

struct CaseRecord {
  std::string case_id;
  std::vector<std::string> samples;
  std::optional<std::string> ground_truth;
  std::vector<std::string> labels;
  std::optional<std::string> recon_path;
};

CaseRecord parse_case(const std::string& line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("case_id") || !j.contains("samples"))
    throw ParseError("line " + std::to_string(line_no) +
                     ": case record needs case_id and samples");
  CaseRecord rec;
  try {
    rec.case_id = j.at("case_id").get<std::string>();
    rec.samples = j.at("samples").get<std::vector<std::string>>();
    if (j.contains("ground_truth") && !j.at("ground_truth").is_null())
      rec.ground_truth = j.at("ground_truth").get<std::string>();
    if (j.contains("labels") && !j.at("labels").is_null())
      rec.labels = j.at("labels").get<std::vector<std::string>>();
    if (j.contains("recon_path") && !j.at("recon_path").is_null())
      rec.recon_path = j.at("recon_path").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
  }
  return rec;
}

// Parse every case line up front so duplicate ids can be rejected; the
// per-line error string is empty on success.
struct ParsedCases {
  std::vector<CaseRecord> records;
  std::vector<std::string> errors;
};

ParsedCases parse_cases(const std::vector<std::string>& lines) {
  ParsedCases out;
  out.records.resize(lines.size());
  out.errors.resize(lines.size());
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      out.records[i] = parse_case(lines[i], i + 1);
      if (!seen.insert(out.records[i].case_id).second)
        out.errors[i] = "duplicate case_id \"" + out.records[i].case_id + "\"";
    } catch (const Error& e) {
      out.errors[i] = e.what();
    }
  }
  return out;
}

// Truncate to the effective T, or explain why the case cannot be used.
std::vector<std::string> effective_samples(const CaseRecord& rec, std::size_t t) {
  if (rec.samples.size() < t)
    throw DegenerateSamples("case \"" + rec.case_id + "\" supplies " +
                            std::to_string(rec.samples.size()) + " samples, needs " +
                            std::to_string(t));
  return {rec.samples.begin(), rec.samples.begin() + static_cast<std::ptrdiff_t>(t)};
}

McSampleSet segment_case(const CaseRecord& rec, const std::vector<std::string>& samples,
                         const SegmentationConfig& seg) {
  McSampleSet set;
  set.case_id = rec.case_id;
  for (const auto& raw : samples) set.samples.push_back(segment_report(raw, seg));
  if (rec.ground_truth) set.ground_truth = segment_report(*rec.ground_truth, seg);
  set.labels = rec.labels;
  return set;
}

// ---------------------------------------------------------------------------
// score

const std::vector<std::string> kMetricOrder = {"smas", "wrs", "bleu4", "adj-bleu4",
                                               "sent-cosine"};

struct ScoreContext {
  const WordVectorStore* store = nullptr;
  const SentenceVectorSource* src = nullptr;
  SegmentationConfig seg;
  MatchOptions match;
};

double eval_metric(const std::string& metric, const Report& a, const Report& b,
                   const ScoreContext& ctx) {
  if (metric == "smas") return smas(a, b, *ctx.store, *ctx.src, ctx.match);
  if (metric == "wrs") return report_wrs(a, b, *ctx.store);
  if (metric == "bleu4") return report_bleu4(a, b);
  if (metric == "adj-bleu4")
    return adjusted_score(a, b, SentenceScorer::bleu4(), *ctx.store, *ctx.src, ctx.match);
  if (metric == "sent-cosine")
    return adjusted_score(a, b, SentenceScorer::embedding_cosine(*ctx.store, *ctx.src),
                          *ctx.store, *ctx.src, ctx.match);
  throw Error("unknown metric: " + metric);
}

std::string json_key(const std::string& metric) {
  std::string key = metric;
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

int cmd_score(const CommonConfig& cfg, const std::string& file_a,
              const std::string& file_b, const std::string& pairs_path,
              std::vector<std::string> metrics, std::ostream& out, std::ostream& err) {
  if (metrics.empty()) metrics = {"smas"};
  // Canonical metric order keeps output fields stable however flags arrive.
  std::vector<std::string> selected;
  for (const auto& name : kMetricOrder)
    if (std::find(metrics.begin(), metrics.end(), name) != metrics.end())
      selected.push_back(name);
  if (selected.size() != metrics.size()) {
    err << "error: unknown metric requested\n";
    return 2;
  }

  const bool needs_embeddings =
      std::any_of(selected.begin(), selected.end(),
                  [](const std::string& m) { return m != "bleu4"; });

  std::optional<WordVectorStore> store;
  SentenceVectorSource src = SentenceVectorSource::derived_mean();
  if (needs_embeddings) {
    store = load_store(cfg);
    src = load_source(cfg);
  } else if (!cfg.embeddings_path.empty()) {
    store = WordVectorStore::load(cfg.embeddings_path);
  }
  // bleu4-only runs never touch the store; give eval_metric a 1-d stub.
  if (!store)
    store = WordVectorStore::from_entries(1, {{"", {0.0}}});

  ScoreContext ctx{&*store, &src, cfg.segmentation(), cfg.match_options()};

  struct Pair {
    std::string id, a, b;
  };
  std::vector<Pair> pairs;
  std::vector<std::string> parse_errors;  // aligned with pairs; empty = ok
  if (!pairs_path.empty()) {
    auto lines = read_lines(pairs_path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      Pair p;
      p.id = std::to_string(i);
      std::string parse_error;
      try {
        json j = json::parse(lines[i]);
        if (j.contains("pair_id")) p.id = j.at("pair_id").get<std::string>();
        p.a = j.at("a").get<std::string>();
        p.b = j.at("b").get<std::string>();
      } catch (const json::exception& e) {
        parse_error = std::string("line ") + std::to_string(i + 1) + ": " + e.what();
      }
      pairs.push_back(std::move(p));
      parse_errors.push_back(std::move(parse_error));
    }
  } else {
    if (file_a.empty() || file_b.empty()) {
      err << "error: score needs two report files or --pairs\n";
      return 2;
    }
    pairs.push_back(Pair{"0", read_file(file_a), read_file(file_b)});
    parse_errors.emplace_back();
  }

  Sink sink(cfg.output_path, out);
  const Format fmt = cfg.format();
  for_each_ordered(
      pairs.size(), cfg.workers,
      [&](std::size_t i) {
        Record rec(fmt);
        rec.str("pair_id", pairs[i].id);
        if (!parse_errors[i].empty()) {
          rec.str("error", parse_errors[i]);
          return rec.str();
        }
        try {
          const Report ra = segment_report(pairs[i].a, ctx.seg);
          const Report rb = segment_report(pairs[i].b, ctx.seg);
          for (const auto& metric : selected)
            rec.num(json_key(metric), eval_metric(metric, ra, rb, ctx));
        } catch (const std::exception& e) {
          Record failed(fmt);
          failed.str("pair_id", pairs[i].id);
          failed.str("error", e.what());
          return failed.str();
        }
        return rec.str();
      },
      sink.out());
  return 0;
}

// ---------------------------------------------------------------------------
// match

int cmd_match(const CommonConfig& cfg, const std::string& file_a,
              const std::string& file_b, std::ostream& out, std::ostream& err) {
  (void)err;
  const auto store = load_store(cfg);
  const auto src = load_source(cfg);
  const auto seg = cfg.segmentation();
  const Report a = segment_report(read_file(file_a), seg);
  const Report b = segment_report(read_file(file_b), seg);

  const auto pairing = match_sentences(a, b, store, src, cfg.match_options());

  Sink sink(cfg.output_path, out);
  const Format fmt = cfg.format();
  std::vector<char> used_a(a.size(), 0), used_b(b.size(), 0);
  for (const auto& pair : pairing.pairs) {
    used_a[pair.i] = used_b[pair.j] = 1;
    const double pair_wrs = wrs(embed_words(a.sentences[pair.i], store),
                                embed_words(b.sentences[pair.j], store));
    sink.out() << "pair i=" << pair.i << " j=" << pair.j
               << " match=" << format_number(pair.score, fmt)
               << " wrs=" << format_number(pair_wrs, fmt) << " | "
               << a.sentences[pair.i].raw << " | " << b.sentences[pair.j].raw << '\n';
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!used_a[i]) sink.out() << "unmatched a i=" << i << " | " << a.sentences[i].raw << '\n';
  for (std::size_t j = 0; j < b.size(); ++j)
    if (!used_b[j]) sink.out() << "unmatched b j=" << j << " | " << b.sentences[j].raw << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// uncertainty

std::string uncertainty_record(const CaseRecord& rec, const CommonConfig& cfg,
                               const WordVectorStore& store,
                               const SentenceVectorSource& src, std::size_t t,
                               bool include_samples, const Format& fmt) {
  Record record(fmt);
  record.str("case_id", rec.case_id);
  try {
    const auto samples = effective_samples(rec, t);
    const auto set = segment_case(rec, samples, cfg.segmentation());
    std::optional<ReconstructionStack> stack;
    if (rec.recon_path) stack = read_stack(*rec.recon_path);
    const auto report = evaluate_case(set, store, src, stack, cfg.match_options());

    record.integer("reference_index", static_cast<long long>(report.reference_index));
    record.str("reference", report.reference_text);
    record.num("smasvar", report.smasvar);
    std::string sentences = "[";
    for (std::size_t l = 0; l < report.sentences.size(); ++l) {
      const auto& s = report.sentences[l];
      if (l) sentences += ',';
      Record entry(fmt);
      entry.integer("index", static_cast<long long>(s.index));
      entry.str("text", s.text);
      entry.num("smasvar_l", s.value);
      entry.boolean("unsupported", s.unsupported);
      sentences += entry.str();
    }
    sentences += ']';
    record.raw("sentences", sentences);
    if (report.visvar) {
      record.num("visvar", *report.visvar);
      record.num("vis_mu_mean", *report.vis_mu_mean);
      record.num("vis_var_mean", *report.vis_var_mean);
    }
    if (include_samples) record.strs("samples", samples);
  } catch (const std::exception& e) {
    Record failed(fmt);
    failed.str("case_id", rec.case_id);
    failed.str("error", e.what());
    return failed.str();
  }
  return record.str();
}

int cmd_uncertainty(const CommonConfig& cfg, const std::string& cases_path,
                    bool include_samples, std::ostream& out, std::ostream& err) {
  (void)err;
  const auto store = load_store(cfg);
  const auto src = load_source(cfg);
  const std::size_t t = cfg.samples == 0 ? 10 : cfg.samples;

  const auto cases = parse_cases(read_lines(cases_path));
  Sink sink(cfg.output_path, out);
  const Format fmt = cfg.format();
  for_each_ordered(
      cases.records.size(), cfg.workers,
      [&](std::size_t i) {
        if (!cases.errors[i].empty()) {
          Record failed(fmt);
          failed.str("case_id", cases.records[i].case_id);
          failed.str("error", cases.errors[i]);
          return failed.str();
        }
        return uncertainty_record(cases.records[i], cfg, store, src, t, include_samples,
                                  fmt);
      },
      sink.out());
  return 0;
}

// ---------------------------------------------------------------------------
// weights

int cmd_weights(const CommonConfig& cfg, const std::string& cases_path,
                const std::string& losses_path, std::ostream& out, std::ostream& err) {
  (void)err;
  const auto store = load_store(cfg);
  const auto src = load_source(cfg);
  const std::size_t t = cfg.samples == 0 ? 4 : cfg.samples;
  const WeightConfig weights = cfg.weight_config();

  std::unordered_map<std::string, std::vector<double>> losses;
  double autoen_loss = 0.0;
  {
    const auto lines = read_lines(losses_path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      json j;
      try {
        j = json::parse(lines[i]);
      } catch (const json::exception& e) {
        throw ParseError("losses line " + std::to_string(i + 1) + ": " + e.what());
      }
      if (j.contains("autoen_loss")) autoen_loss = j.at("autoen_loss").get<double>();
      if (j.contains("case_id"))
        losses[j.at("case_id").get<std::string>()] =
            j.at("sentence_losses").get<std::vector<double>>();
    }
  }

  const auto cases = parse_cases(read_lines(cases_path));
  Sink sink(cfg.output_path, out);
  const Format fmt = cfg.format();

  std::vector<double> contributions(cases.records.size(), 0.0);
  for_each_ordered(
      cases.records.size(), cfg.workers,
      [&](std::size_t i) {
        const CaseRecord& rec = cases.records[i];
        if (!cases.errors[i].empty()) {
          Record failed(fmt);
          failed.str("case_id", rec.case_id);
          failed.str("error", cases.errors[i]);
          return failed.str();
        }
        Record record(fmt);
        record.str("case_id", rec.case_id);
        try {
          const auto samples = effective_samples(rec, t);
          const auto set = segment_case(rec, samples, cfg.segmentation());
          std::optional<ReconstructionStack> stack;
          if (rec.recon_path) stack = read_stack(*rec.recon_path);
          const auto report = evaluate_case(set, store, src, stack, cfg.match_options());

          auto it = losses.find(rec.case_id);
          if (it == losses.end())
            throw LengthMismatch("case \"" + rec.case_id + "\" has no losses record");
          std::vector<double> sentence_vars;
          for (const auto& s : report.sentences) sentence_vars.push_back(s.variance);
          if (it->second.size() != sentence_vars.size())
            throw LengthMismatch(
                "case \"" + rec.case_id + "\": " + std::to_string(it->second.size()) +
                " sentence losses vs " + std::to_string(sentence_vars.size()) +
                " reference sentences (first unmatched sentence index " +
                std::to_string(std::min(it->second.size(), sentence_vars.size())) + ")");

          ReportLossInput input;
          input.case_id = rec.case_id;
          input.sentence_losses = it->second;
          input.smas_var = report.smas_variance;
          input.sentence_vars = sentence_vars;
          input.vis_mu_mean = report.vis_mu_mean.value_or(0.0);
          input.vis_var_mean = report.vis_var_mean.value_or(0.0);
          const auto batch =
              weighted_batch_loss(BatchLossInput{{input}, 0.0}, weights);
          const auto& row = batch.reports[0];
          contributions[i] = row.contribution;

          record.num("rep_weight", row.rep_weight);
          record.nums("sen_weights", row.sen_weights);
          record.num("smas_var", input.smas_var);
          record.nums("sentence_vars", sentence_vars);
          record.num("vis_mu_mean", input.vis_mu_mean);
          record.num("vis_var_mean", input.vis_var_mean);
          record.num("weighted_loss", row.contribution);
        } catch (const std::exception& e) {
          Record failed(fmt);
          failed.str("case_id", rec.case_id);
          failed.str("error", e.what());
          return failed.str();
        }
        return record.str();
      },
      sink.out());

  double rep_term = 0.0;
  for (double c : contributions) rep_term += c;
  const double autoen_term = weights.lambda_autoen * autoen_loss;
  Record total(fmt);
  total.num("autoen_term", autoen_term);
  total.num("rep_term", rep_term);
  total.num("total", autoen_term + rep_term);
  sink.out() << total.str() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// correlate

void write_table_csv(const MetricTable& table, const Format& fmt, std::ostream& out) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_number(row[c], fmt);
    }
    out << '\n';
  }
}

void write_matrix_csv(const NamedMatrix& matrix, const Format& fmt, std::ostream& out) {
  for (const auto& name : matrix.names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < matrix.names.size(); ++i) {
    out << matrix.names[i];
    for (std::size_t j = 0; j < matrix.names.size(); ++j)
      out << ',' << format_number(matrix.values(i, j), fmt);
    out << '\n';
  }
}

int cmd_correlate(const CommonConfig& cfg, const std::string& corpus_path,
                  std::size_t num_pairs, const std::string& table_path,
                  const std::string& matrix_path, std::ostream& out, std::ostream& err) {
  (void)err;
  const auto store = load_store(cfg);
  const auto src = load_source(cfg);
  const auto seg = cfg.segmentation();
  const auto opts = cfg.match_options();

  std::vector<AnnotatedReport> corpus;
  const auto lines = read_lines(corpus_path);
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto rec = parse_case(lines[i], i + 1);
    if (!seen.insert(rec.case_id).second)
      throw ParseError("line " + std::to_string(i + 1) + ": duplicate case_id \"" +
                       rec.case_id + "\"");
    const std::string& text =
        rec.ground_truth ? *rec.ground_truth
                         : (rec.samples.empty() ? std::string() : rec.samples.front());
    corpus.push_back(AnnotatedReport::make(segment_report(text, seg), rec.labels));
  }
  if (corpus.empty()) throw EmptyCorpus("corpus file has no records");

  const auto pairs = sample_pairs(corpus.size(), num_pairs, cfg.seed);

  // Rows are independent; fill them on the worker pool in index order.
  MetricTable table;
  table.columns = {"info_diff", "len_diff", "wrs_full", "bleu4", "adj_bleu4", "smas"};
  table.rows.resize(pairs.size());
  const auto bleu = SentenceScorer::bleu4();
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= pairs.size()) return;
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
  };
  const unsigned workers = std::max(1u, cfg.workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  const auto matrix = correlation_matrix(table);

  const Format fmt = cfg.format();
  if (!table_path.empty()) {
    std::ofstream f(table_path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + table_path);
    write_table_csv(table, fmt, f);
  }
  if (!matrix_path.empty()) {
    std::ofstream f(matrix_path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + matrix_path);
    write_matrix_csv(matrix, fmt, f);
  }
  if (table_path.empty() || matrix_path.empty()) {
    Sink sink(cfg.output_path, out);
    if (table_path.empty()) write_table_csv(table, fmt, sink.out());
    if (matrix_path.empty()) {
      if (table_path.empty()) sink.out() << '\n';
      write_matrix_csv(matrix, fmt, sink.out());
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const CommonConfig& cfg, const SyntheticConfig& synth_cfg,
              const std::string& corpus_path, const std::string& embeddings_path,
              const std::string& cases_path, std::ostream& out, std::ostream& err) {
  (void)out;
  (void)err;
  const auto corpus = make_synthetic_corpus(synth_cfg);
  const Format fmt = cfg.format();

  if (!embeddings_path.empty())
    write_embedding_file(embeddings_path, corpus.dimension, corpus.embedding_entries);
  if (!corpus_path.empty()) {
    std::ofstream f(corpus_path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + corpus_path);
    for (std::size_t i = 0; i < corpus.report_texts.size(); ++i) {
      Record rec(fmt);
      rec.str("case_id", "r-" + std::to_string(i));
      rec.strs("samples", {corpus.report_texts[i]});
      rec.strs("labels", corpus.report_labels[i]);
      f << rec.str() << '\n';
    }
  }
  if (!cases_path.empty()) {
    std::ofstream f(cases_path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + cases_path);
    for (const auto& one : corpus.cases) {
      Record rec(fmt);
      rec.str("case_id", one.case_id);
      rec.strs("samples", one.samples);
      f << rec.str() << '\n';
    }
  }
  return 0;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantic similarity and MC-dropout uncertainty toolkit for "
               "clinical diagnostic reports"};
  app.require_subcommand(1);

  CommonConfig cfg;

  // score
  auto* score = app.add_subcommand(
      "score", "Score report pairs with SMAS and related metrics");
  std::string score_a, score_b, score_pairs;
  std::vector<std::string> metrics;
  score->add_option("file_a", score_a, "First report text file");
  score->add_option("file_b", score_b, "Second report text file");
  score->add_option("--pairs", score_pairs, "Line-delimited pair records")
      ->check(CLI::ExistingFile);
  score->add_option("--metric", metrics,
                    "smas|wrs|bleu4|adj-bleu4|sent-cosine (repeatable)");
  add_common_options(score, cfg, false);

  // match
  auto* match = app.add_subcommand("match", "Dump the sentence alignment of two reports");
  std::string match_a, match_b;
  match->add_option("report_a", match_a, "First report text file")
      ->required()
      ->check(CLI::ExistingFile);
  match->add_option("report_b", match_b, "Second report text file")
      ->required()
      ->check(CLI::ExistingFile);
  add_common_options(match, cfg, true);

  // uncertainty
  auto* uncertainty = app.add_subcommand(
      "uncertainty", "Report- and sentence-level uncertainty per case (default T = 10)");
  std::string unc_cases;
  bool include_samples = false;
  uncertainty->add_option("--cases", unc_cases, "Line-delimited case records")
      ->required()
      ->check(CLI::ExistingFile);
  uncertainty->add_flag("--include-samples", include_samples,
                        "Echo the MC sample texts in each record");
  add_common_options(uncertainty, cfg, true);

  // weights
  auto* weights = app.add_subcommand(
      "weights", "Uncertainty-derived loss weights per case (default T = 4)");
  std::string w_cases, w_losses;
  weights->add_option("--cases", w_cases, "Line-delimited case records")
      ->required()
      ->check(CLI::ExistingFile);
  weights->add_option("--losses", w_losses, "Line-delimited per-sentence loss records")
      ->required()
      ->check(CLI::ExistingFile);
  add_common_options(weights, cfg, true);

  // correlate
  auto* correlate = app.add_subcommand(
      "correlate", "Metric table and correlation matrix over sampled report pairs");
  std::string corr_corpus, corr_table, corr_matrix;
  std::size_t num_pairs = 2500;
  correlate->add_option("--corpus", corr_corpus, "Annotated corpus (case records)")
      ->required()
      ->check(CLI::ExistingFile);
  correlate->add_option("--num-pairs", num_pairs, "Sampled pair count");
  correlate->add_option("--table-output", corr_table, "Metric table CSV path");
  correlate->add_option("--matrix-output", corr_matrix, "Correlation matrix CSV path");
  add_common_options(correlate, cfg, true);

  // synth
  auto* synth = app.add_subcommand(
      "synth", "Generate the seeded synthetic corpus, embeddings and cases");
  SyntheticConfig synth_cfg;
  std::string synth_corpus, synth_embeddings, synth_cases;
  synth->add_option("--reports", synth_cfg.reports, "Corpus size");
  synth->add_option("--findings", synth_cfg.n_findings, "Distinct findings");
  synth->add_option("--dim", synth_cfg.dim, "Embedding dimension");
  synth->add_option("--cases", synth_cfg.cases, "MC-style cases to generate");
  synth->add_option("--case-samples", synth_cfg.samples_per_case, "Samples per case");
  synth->add_option("--corpus-output", synth_corpus, "Annotated corpus path");
  synth->add_option("--embeddings-output", synth_embeddings, "Embedding file path");
  synth->add_option("--cases-output", synth_cases, "Cases file path");
  add_common_options(synth, cfg, false);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (score->parsed())
      return cmd_score(cfg, score_a, score_b, score_pairs, metrics, out, err);
    if (match->parsed()) return cmd_match(cfg, match_a, match_b, out, err);
    if (uncertainty->parsed())
      return cmd_uncertainty(cfg, unc_cases, include_samples, out, err);
    if (weights->parsed()) return cmd_weights(cfg, w_cases, w_losses, out, err);
    if (correlate->parsed())
      return cmd_correlate(cfg, corr_corpus, num_pairs, corr_table, corr_matrix, out, err);
    if (synth->parsed()) {
      if (cfg.seed != 0) synth_cfg.seed = cfg.seed;
      return cmd_synth(cfg, synth_cfg, synth_corpus, synth_embeddings, synth_cases, out,
                       err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace reportcert::cli
