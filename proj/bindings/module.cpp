#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include "reportcert/analysis.hpp"
#include "reportcert/embeddings.hpp"
#include "reportcert/errors.hpp"
#include "reportcert/similarity.hpp"
#include "reportcert/stack_io.hpp"
#include "reportcert/text.hpp"
#include "reportcert/transport.hpp"
#include "reportcert/uncertainty.hpp"
#include "reportcert/weighting.hpp"

namespace py = pybind11;
using namespace reportcert;

namespace {

SegmentationConfig make_config(const std::string& delimiters, bool lowercase) {
  return SegmentationConfig{delimiters, lowercase};
}

MatchOptions make_match_options(const std::string& match_by) {
  if (match_by != "cosine" && match_by != "wrs")
    throw py::value_error("match_by must be 'cosine' or 'wrs'");
  return MatchOptions{match_by == "wrs" ? MatchBy::kWrs : MatchBy::kSentenceCosine};
}

const SentenceVectorSource& default_source() {
  static const SentenceVectorSource src = SentenceVectorSource::derived_mean();
  return src;
}

std::vector<std::vector<double>> matrix_to_lists(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    rows[i].resize(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_reportcert, m) {
  m.doc() = "Semantic similarity and MC-dropout uncertainty for clinical reports";

  py::register_exception<Error>(m, "ReportcertError", PyExc_RuntimeError);

  py::class_<Sentence>(m, "Sentence")
      .def_readonly("tokens", &Sentence::tokens)
      .def_readonly("raw", &Sentence::raw)
      .def("__repr__", [](const Sentence& s) { return "Sentence(" + s.raw + ")"; });

  py::class_<Report>(m, "Report")
      .def_readonly("sentences", &Report::sentences)
      .def_readonly("source", &Report::source)
      .def("__len__", &Report::size);

  m.def(
      "segment",
      [](const std::string& text, const std::string& delimiters, bool lowercase) {
        return segment_report(text, make_config(delimiters, lowercase));
      },
      py::arg("text"), py::arg("delimiters") = std::string(".!?\xe3\x80\x82"),
      py::arg("lowercase") = true,
      "Split raw report text into tokenized sentences");

  py::class_<WordVectorStore>(m, "WordVectorStore")
      .def_static("load", &WordVectorStore::load, py::arg("path"))
      .def_static(
          "from_dict",
          [](const std::map<std::string, std::vector<double>>& entries,
             std::size_t dimension) {
            std::vector<std::pair<std::string, std::vector<double>>> ordered(
                entries.begin(), entries.end());
            return WordVectorStore::from_entries(dimension, ordered);
          },
          py::arg("entries"), py::arg("dimension"))
      .def_property_readonly("dimension", &WordVectorStore::dimension)
      .def("__len__", &WordVectorStore::size)
      .def("__contains__",
           [](const WordVectorStore& store, const std::string& token) {
             return store.contains(token);
           })
      .def(
          "lookup",
          [](const WordVectorStore& store, const std::string& token)
              -> std::optional<std::vector<double>> {
            const auto* vec = store.find(token);
            if (!vec) return std::nullopt;
            return *vec;
          },
          py::arg("token"))
      .def_property_readonly("oov_count", &WordVectorStore::oov_count);

  py::class_<SentenceVectorSource>(m, "SentenceVectorSource")
      .def_static("derived_mean", &SentenceVectorSource::derived_mean)
      .def_static(
          "external_table",
          [](const std::map<std::string, std::vector<double>>& table,
             std::size_t dimension) {
            return SentenceVectorSource::external_table(
                {table.begin(), table.end()}, dimension);
          },
          py::arg("table"), py::arg("dimension"))
      .def_static("load_external_table", &SentenceVectorSource::load_external_table,
                  py::arg("path"));

  py::class_<EmbeddedSentence>(m, "EmbeddedSentence")
      .def_readonly("norms", &EmbeddedSentence::norms)
      .def_readonly("total_mass", &EmbeddedSentence::total_mass)
      .def("__len__", [](const EmbeddedSentence& s) { return s.vectors.size(); });

  m.def("embed_words", &embed_words, py::arg("sentence"), py::arg("store"));

  m.def("cosine_distance",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return cosine_distance(a, b);
        });

  m.def(
      "solve_transport",
      [](const std::vector<double>& p, const std::vector<double>& q,
         const std::vector<std::vector<double>>& cost) {
        TransportInstance inst{p, q, Matrix(p.size(), q.size())};
        for (std::size_t i = 0; i < p.size(); ++i) {
          if (cost.at(i).size() != q.size())
            throw py::value_error("cost matrix shape mismatch");
          for (std::size_t j = 0; j < q.size(); ++j) inst.cost(i, j) = cost[i][j];
        }
        const auto plan = solve_transport(inst);
        return py::make_tuple(matrix_to_lists(plan.flows), plan.objective);
      },
      py::arg("p"), py::arg("q"), py::arg("cost"),
      "Exact transport plan; returns (flows, objective)");

  m.def("wrd", &wrd, py::arg("a"), py::arg("b"));
  m.def("wrs", &wrs, py::arg("a"), py::arg("b"));

  m.def(
      "match",
      [](const Report& a, const Report& b, const WordVectorStore& store,
         const SentenceVectorSource* src, const std::string& match_by) {
        const auto pairing = match_sentences(a, b, store, src ? *src : default_source(),
                                             make_match_options(match_by));
        std::vector<py::tuple> out;
        for (const auto& pair : pairing.pairs)
          out.push_back(py::make_tuple(pair.i, pair.j, pair.score));
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("store"), py::arg("src") = nullptr,
      py::arg("match_by") = "cosine",
      "Greedy sentence pairing in pop order as (i, j, score) tuples");

  m.def(
      "smas",
      [](const Report& a, const Report& b, const WordVectorStore& store,
         const SentenceVectorSource* src, const std::string& match_by) {
        return smas(a, b, store, src ? *src : default_source(),
                    make_match_options(match_by));
      },
      py::arg("a"), py::arg("b"), py::arg("store"), py::arg("src") = nullptr,
      py::arg("match_by") = "cosine");

  m.def(
      "report_wrs",
      [](const Report& a, const Report& b, const WordVectorStore& store) {
        return report_wrs(a, b, store);
      },
      py::arg("a"), py::arg("b"), py::arg("store"),
      "Transport similarity over whole reports flattened to one sentence");

  m.def("report_bleu4", &report_bleu4, py::arg("hypothesis"), py::arg("reference"));
  m.def("sentence_bleu4", &sentence_bleu4, py::arg("hypothesis"), py::arg("reference"));

  m.def(
      "adjusted_bleu4",
      [](const Report& a, const Report& b, const WordVectorStore& store,
         const SentenceVectorSource* src, const std::string& match_by) {
        return adjusted_score(a, b, SentenceScorer::bleu4(), store,
                              src ? *src : default_source(), make_match_options(match_by));
      },
      py::arg("a"), py::arg("b"), py::arg("store"), py::arg("src") = nullptr,
      py::arg("match_by") = "cosine",
      "BLEU-4 averaged over matched sentence pairs with the length penalty");

  py::class_<SentenceUncertainty>(m, "SentenceUncertainty")
      .def_readonly("index", &SentenceUncertainty::index)
      .def_readonly("text", &SentenceUncertainty::text)
      .def_readonly("variance", &SentenceUncertainty::variance)
      .def_readonly("value", &SentenceUncertainty::value)
      .def_readonly("unsupported", &SentenceUncertainty::unsupported);

  py::class_<UncertaintyReport>(m, "UncertaintyReport")
      .def_readonly("case_id", &UncertaintyReport::case_id)
      .def_readonly("reference_index", &UncertaintyReport::reference_index)
      .def_readonly("reference_text", &UncertaintyReport::reference_text)
      .def_readonly("smas_variance", &UncertaintyReport::smas_variance)
      .def_readonly("smasvar", &UncertaintyReport::smasvar)
      .def_readonly("sentences", &UncertaintyReport::sentences)
      .def_readonly("visvar", &UncertaintyReport::visvar)
      .def_readonly("vis_mu_mean", &UncertaintyReport::vis_mu_mean)
      .def_readonly("vis_var_mean", &UncertaintyReport::vis_var_mean);

  py::class_<ReconstructionStack>(m, "ReconstructionStack")
      .def(py::init([](std::uint32_t t, std::uint32_t c, std::uint32_t h,
                       std::uint32_t w, const std::vector<float>& data) {
             ReconstructionStack stack{t, c, h, w, data};
             if (stack.data.size() != std::size_t{t} * c * h * w)
               throw ShapeMismatch("stack data does not match its declared shape");
             return stack;
           }),
           py::arg("t"), py::arg("c"), py::arg("h"), py::arg("w"), py::arg("data"))
      .def_readonly("t", &ReconstructionStack::t)
      .def_readonly("c", &ReconstructionStack::c)
      .def_readonly("h", &ReconstructionStack::h)
      .def_readonly("w", &ReconstructionStack::w)
      .def_readonly("data", &ReconstructionStack::data);

  m.def("read_stack", &read_stack, py::arg("path"));
  m.def("write_stack", &write_stack, py::arg("path"), py::arg("stack"));

  m.def(
      "vis_summary",
      [](const ReconstructionStack& stack) {
        const auto stats = vis_stats(stack);
        return py::make_tuple(visvar(stats.var), pixel_mean(stats.mu),
                              pixel_mean(stats.var));
      },
      py::arg("stack"),
      "Returns (visvar, mean of mu over pixels, mean of variance over pixels)");

  m.def(
      "evaluate_case",
      [](const std::string& case_id, const std::vector<std::string>& samples,
         const WordVectorStore& store, const SentenceVectorSource* src,
         const std::optional<ReconstructionStack>& stack, const std::string& delimiters,
         bool lowercase, const std::string& match_by) {
        McSampleSet set;
        set.case_id = case_id;
        const auto cfg = make_config(delimiters, lowercase);
        for (const auto& raw : samples) set.samples.push_back(segment_report(raw, cfg));
        return evaluate_case(set, store, src ? *src : default_source(), stack,
                             make_match_options(match_by));
      },
      py::arg("case_id"), py::arg("samples"), py::arg("store"), py::arg("src") = nullptr,
      py::arg("stack") = std::nullopt,
      py::arg("delimiters") = std::string(".!?\xe3\x80\x82"),
      py::arg("lowercase") = true, py::arg("match_by") = "cosine",
      "Report- and sentence-level uncertainty for one case of MC samples");

  m.def(
      "rep_weight",
      [](double smas_var, double vis_mu_mean, double vis_var_mean, double alpha,
         double beta) {
        return rep_weight(smas_var, vis_mu_mean, vis_var_mean,
                          WeightConfig{alpha, beta, 1.0, 1.0});
      },
      py::arg("smas_var"), py::arg("vis_mu_mean") = 0.0, py::arg("vis_var_mean") = 0.0,
      py::arg("alpha") = 1.0, py::arg("beta") = 1.0);

  m.def(
      "sen_weight",
      [](double sentence_var, double gamma) {
        return sen_weight(sentence_var, WeightConfig{1.0, 1.0, gamma, 1.0});
      },
      py::arg("sentence_var"), py::arg("gamma") = 1.0);

  m.def(
      "weighted_batch_loss",
      [](const std::vector<py::dict>& reports, double autoen_loss, double alpha,
         double beta, double gamma, double lambda_autoen) {
        BatchLossInput input;
        input.autoen_loss = autoen_loss;
        for (const auto& entry : reports) {
          ReportLossInput report;
          report.case_id = entry.contains("case_id")
                               ? entry["case_id"].cast<std::string>()
                               : std::string();
          report.sentence_losses = entry["sentence_losses"].cast<std::vector<double>>();
          report.sentence_vars = entry["sentence_vars"].cast<std::vector<double>>();
          report.smas_var =
              entry.contains("smas_var") ? entry["smas_var"].cast<double>() : 0.0;
          report.vis_mu_mean =
              entry.contains("vis_mu_mean") ? entry["vis_mu_mean"].cast<double>() : 0.0;
          report.vis_var_mean = entry.contains("vis_var_mean")
                                    ? entry["vis_var_mean"].cast<double>()
                                    : 0.0;
          input.reports.push_back(std::move(report));
        }
        const auto out =
            weighted_batch_loss(input, WeightConfig{alpha, beta, gamma, lambda_autoen});
        py::list rows;
        for (const auto& row : out.reports) {
          py::dict d;
          d["case_id"] = row.case_id;
          d["rep_weight"] = row.rep_weight;
          d["sen_weights"] = row.sen_weights;
          d["weighted_loss"] = row.contribution;
          rows.append(d);
        }
        py::dict result;
        result["reports"] = rows;
        result["autoen_term"] = out.autoen_term;
        result["rep_term"] = out.rep_term;
        result["total"] = out.total;
        return result;
      },
      py::arg("reports"), py::arg("autoen_loss") = 0.0, py::arg("alpha") = 1.0,
      py::arg("beta") = 1.0, py::arg("gamma") = 1.0, py::arg("lambda_autoen") = 1.0,
      "Uncertainty-weighted batch loss with a per-report breakdown");

  m.def(
      "pearson",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return pearson(x, y);
      },
      py::arg("x"), py::arg("y"));

#ifdef VERSION_INFO
#define RC_STR(x) #x
#define RC_XSTR(x) RC_STR(x)
  m.attr("__version__") = RC_XSTR(VERSION_INFO);
#undef RC_XSTR
#undef RC_STR
#else
  m.attr("__version__") = "dev";
#endif
}
