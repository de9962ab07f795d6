#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "reportcert/errors.hpp"
#include "reportcert/stack_io.hpp"
#include "reportcert/text.hpp"
#include "reportcert/uncertainty.hpp"

using namespace reportcert;

namespace {

// Vocabulary engineered for exact pair values: wrs(a, x) = 0.9,
// wrs(a, h) = 0.5, wrs(a, o) = 0.
const WordVectorStore& fixture_store() {
  static const WordVectorStore store = WordVectorStore::from_entries(
      3, {{"a", {1.0, 0.0, 0.0}},
          {"x", {0.9, std::sqrt(1.0 - 0.81), 0.0}},
          {"h", {0.5, std::sqrt(0.75), 0.0}},
          {"o", {0.0, 0.0, 1.0}},
          {"u", {0.0, 1.0, 0.0}}});
  return store;
}

McSampleSet set_of(std::initializer_list<const char*> raw_samples) {
  McSampleSet set;
  set.case_id = "case";
  for (const char* raw : raw_samples) set.samples.push_back(segment_report(raw));
  return set;
}

Matrix matrix_with_pairs(double v01, double v02, double v12) {
  Matrix m(3, 3);
  for (int i = 0; i < 3; ++i) m(i, i) = 1.0;
  m(0, 1) = m(1, 0) = v01;
  m(0, 2) = m(2, 0) = v02;
  m(1, 2) = m(2, 1) = v12;
  return m;
}

}  // namespace

TEST_CASE("pairwise_smas structure") {
  const auto& store = fixture_store();
  const auto src = SentenceVectorSource::derived_mean();

  SUBCASE("identical samples give an all-ones matrix") {
    const auto set = set_of({"a. o.", "a. o.", "a. o."});
    const auto m = pairwise_smas(set, store, src);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(m(i, j) - 1.0) <= 1e-12);
  }
  SUBCASE("T=2 has a single off-diagonal value, mirrored") {
    const auto set = set_of({"a.", "h."});
    const auto m = pairwise_smas(set, store, src);
    CHECK(std::abs(m(0, 1) - 0.5) <= 1e-9);
    CHECK(m(0, 1) == m(1, 0));
    CHECK(m(0, 0) == 1.0);
  }
  SUBCASE("two identical plus one disjoint sample") {
    const auto set = set_of({"a.", "a.", "u."});
    const auto m = pairwise_smas(set, store, src);
    CHECK(std::abs(m(0, 1) - 1.0) <= 1e-12);
    CHECK(std::abs(m(0, 2) - m(1, 2)) <= 1e-12);
    CHECK(m(0, 2) < 1.0);
  }
  SUBCASE("T < 2 throws") {
    CHECK_THROWS_AS(pairwise_smas(set_of({"a."}), store, src), DegenerateSamples);
  }
}

TEST_CASE("smasvar is the pair-population standard deviation") {
  SUBCASE("all pairs equal gives 0") {
    CHECK(smasvar(matrix_with_pairs(0.7, 0.7, 0.7)) == 0.0);
  }
  SUBCASE("hand-computed pair values {1.0, 0.5, 0.5}") {
    const auto m = matrix_with_pairs(1.0, 0.5, 0.5);
    CHECK(std::abs(smas_pair_variance(m) - 0.05555555555555555) <= 1e-12);
    CHECK(std::abs(smasvar(m) - 0.23570226039551584) <= 1e-12);
  }
  SUBCASE("T=2 always gives 0") {
    Matrix m(2, 2);
    m(0, 0) = m(1, 1) = 1.0;
    m(0, 1) = m(1, 0) = 0.37;
    CHECK(smasvar(m) == 0.0);
  }
  SUBCASE("sample order permutation leaves the value unchanged") {
    const auto m = matrix_with_pairs(0.9, 0.4, 0.6);
    // Permute samples (0 1 2) -> (2 0 1).
    Matrix p(3, 3);
    const std::size_t perm[3] = {2, 0, 1};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) p(i, j) = m(perm[i], perm[j]);
    CHECK(std::abs(smasvar(m) - smasvar(p)) <= 1e-12);
  }
}

TEST_CASE("reference_report argmin with tie-breaks") {
  SUBCASE("identical pair of samples wins over the outlier") {
    const auto m = matrix_with_pairs(1.0, 0.5, 0.5);  // samples {A, A, B}
    CHECK(reference_report(m) == 0);
  }
  SUBCASE("direct evaluation") {
    const auto m = matrix_with_pairs(0.9, 0.9, 0.2);
    // distances: 0.2, 0.9, 0.9
    CHECK(reference_report(m) == 0);
  }
  SUBCASE("all identical ties to index 0") {
    CHECK(reference_report(matrix_with_pairs(1.0, 1.0, 1.0)) == 0);
  }
  SUBCASE("constructed tie between 1 and 2 resolves to 1") {
    Matrix m(3, 3);
    for (int i = 0; i < 3; ++i) m(i, i) = 1.0;
    m(0, 1) = m(1, 0) = 0.6;
    m(0, 2) = m(2, 0) = 0.6;
    m(1, 2) = m(2, 1) = 0.9;  // d1 = d2 = 0.5, d0 = 0.8
    CHECK(reference_report(m) == 1);
  }
  SUBCASE("exhaustive recomputation on random matrices") {
    std::mt19937_64 gen(41);
    for (int rep = 0; rep < 100; ++rep) {
      const std::size_t t = 2 + gen() % 5;
      Matrix m(t, t);
      for (std::size_t i = 0; i < t; ++i) m(i, i) = 1.0;
      for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = i + 1; j < t; ++j)
          m(i, j) = m(j, i) = testhelp::uniform(gen, -1.0, 1.0);
      const std::size_t got = reference_report(m);
      double best = 1e300;
      std::size_t want = 0;
      for (std::size_t i = 0; i < t; ++i) {
        double d = 0;
        for (std::size_t j = 0; j < t; ++j)
          if (j != i) d += 1.0 - m(i, j);
        if (d < best) {
          best = d;
          want = i;
        }
      }
      CHECK(got == want);
    }
  }
}

TEST_CASE("smasvar_l sentence-level uncertainty") {
  const auto& store = fixture_store();
  const auto src = SentenceVectorSource::derived_mean();

  SUBCASE("sentence present identically in all samples gives 0") {
    const auto set = set_of({"a. o.", "a. o.", "a. o."});
    const auto values = smasvar_l(set, 0, store, src);
    REQUIRE(values.size() == 2);
    for (const auto& v : values) {
      CHECK(v.value == 0.0);
      CHECK(!v.unsupported);
    }
  }
  SUBCASE("hand-computed w = {1.0, 0.0} gives 0.5") {
    // Reference sample 0 = "a."; sample 1 matches it exactly (wrs 1);
    // sample 2 is "u." whose single sentence matches with wrs 0.
    const auto set = set_of({"a.", "a.", "u."});
    const auto values = smasvar_l(set, 0, store, src);
    REQUIRE(values.size() == 1);
    CHECK(std::abs(values[0].variance - 0.25) <= 1e-12);
    CHECK(std::abs(values[0].value - 0.5) <= 1e-12);
    CHECK(!values[0].unsupported);
  }
  SUBCASE("sentence unmatched everywhere is flagged unsupported") {
    // Reference has 2 sentences; the other samples have only 1, and their
    // sentence matches the first reference sentence.
    const auto set = set_of({"a. u.", "a.", "a."});
    const auto values = smasvar_l(set, 0, store, src);
    REQUIRE(values.size() == 2);
    CHECK(values[0].value == 0.0);
    CHECK(!values[0].unsupported);
    CHECK(values[1].value == 0.0);
    CHECK(values[1].unsupported);
  }
}

TEST_CASE("vis_stats and visvar") {
  SUBCASE("forced arithmetic: T=2 two-pixel stack") {
    ReconstructionStack stack{2, 1, 1, 2, {0.0f, 0.0f, 2.0f, 2.0f}};
    const auto stats = vis_stats(stack);
    CHECK(stats.mu.values == std::vector<double>{1.0, 1.0});
    CHECK(stats.var.values == std::vector<double>{1.0, 1.0});
    CHECK(visvar(stats.var) == 1.0);
  }
  SUBCASE("identical samples give zero variance") {
    ReconstructionStack stack{3, 1, 2, 1, {4.f, 5.f, 4.f, 5.f, 4.f, 5.f}};
    const auto stats = vis_stats(stack);
    CHECK(stats.var.values == std::vector<double>{0.0, 0.0});
    CHECK(visvar(stats.var) == 0.0);
  }
  SUBCASE("sigma^2 = (0, 4) averages to 1") {
    PixelMap var{1, 1, 2, {0.0, 4.0}};
    CHECK(visvar(var) == 1.0);
  }
  SUBCASE("random stacks match the Welford oracle") {
    std::mt19937_64 gen(42);
    for (int rep = 0; rep < 20; ++rep) {
      const std::uint32_t t = 2 + static_cast<std::uint32_t>(gen() % 6);
      ReconstructionStack stack{t, 2, 3, 2, {}};
      stack.data.resize(std::size_t{t} * 12);
      for (auto& x : stack.data)
        x = static_cast<float>(testhelp::uniform(gen, -1.0, 1.0));
      const auto stats = vis_stats(stack);
      for (std::size_t p = 0; p < 12; ++p) {
        std::vector<double> series;
        for (std::uint32_t s = 0; s < t; ++s)
          series.push_back(static_cast<double>(stack.at(s, p)));
        const auto [mean, var] = testhelp::welford(series);
        CHECK(std::abs(stats.mu.values[p] - mean) <= 1e-12);
        CHECK(std::abs(stats.var.values[p] - var) <= 1e-12);
      }
    }
  }
  SUBCASE("shift invariance and scale behaviour") {
    std::mt19937_64 gen(43);
    ReconstructionStack stack{4, 1, 2, 2, {}};
    stack.data.resize(16);
    for (auto& x : stack.data) x = static_cast<float>(testhelp::uniform(gen, 0.0, 1.0));
    const double base = visvar(vis_stats(stack).var);

    ReconstructionStack shifted = stack;
    for (auto& x : shifted.data) x += 2.0f;
    CHECK(std::abs(visvar(vis_stats(shifted).var) - base) <= 1e-6);

    ReconstructionStack scaled = stack;
    for (auto& x : scaled.data) x *= 4.0f;
    CHECK(std::abs(visvar(vis_stats(scaled).var) - 4.0 * base) <= 1e-6);
  }
  SUBCASE("inconsistent data size throws") {
    ReconstructionStack stack{2, 1, 1, 2, {1.f, 2.f, 3.f}};
    CHECK_THROWS_AS(vis_stats(stack), ShapeMismatch);
  }
}

TEST_CASE("stack file round-trip and rejection") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "rc_stack.vstk";

  SUBCASE("write then read preserves every float bit-exactly") {
    std::mt19937_64 gen(44);
    ReconstructionStack stack{3, 2, 4, 5, {}};
    stack.data.resize(3 * 2 * 4 * 5);
    for (auto& x : stack.data)
      x = static_cast<float>(testhelp::uniform(gen, -100.0, 100.0));
    write_stack(path, stack);
    const auto loaded = read_stack(path);
    CHECK(loaded.t == stack.t);
    CHECK(loaded.c == stack.c);
    CHECK(loaded.h == stack.h);
    CHECK(loaded.w == stack.w);
    CHECK(loaded.data == stack.data);
  }
  SUBCASE("bad magic is rejected") {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE" << std::string(20, '\0');
    out.close();
    try {
      read_stack(path);
      FAIL("expected StackFormatError");
    } catch (const StackFormatError& e) {
      CHECK(std::string(e.what()).find("magic") != std::string::npos);
    }
  }
  SUBCASE("truncated data is rejected") {
    ReconstructionStack stack{2, 1, 1, 2, {1.f, 2.f, 3.f, 4.f}};
    write_stack(path, stack);
    fs::resize_file(path, fs::file_size(path) - 4);
    CHECK_THROWS_AS(read_stack(path), StackFormatError);
  }
  SUBCASE("zero dimension is rejected") {
    std::ofstream out(path, std::ios::binary);
    const char header[6] = {'V', 'S', 'T', 'K', 1, 0};
    out.write(header, 6);
    const std::uint32_t dims[4] = {2, 0, 1, 1};
    out.write(reinterpret_cast<const char*>(dims), 16);
    out.close();
    CHECK_THROWS_AS(read_stack(path), ShapeMismatch);
  }
  SUBCASE("T below 2 is rejected") {
    std::ofstream out(path, std::ios::binary);
    const char header[6] = {'V', 'S', 'T', 'K', 1, 0};
    out.write(header, 6);
    const std::uint32_t dims[4] = {1, 1, 1, 1};
    out.write(reinterpret_cast<const char*>(dims), 16);
    const float value = 0.f;
    out.write(reinterpret_cast<const char*>(&value), 4);
    out.close();
    CHECK_THROWS_AS(read_stack(path), ShapeMismatch);
  }
}

TEST_CASE("evaluate_case end to end") {
  const auto& store = fixture_store();
  const auto src = SentenceVectorSource::derived_mean();

  SUBCASE("identical samples: all uncertainties zero") {
    const auto set = set_of({"a. o.", "a. o.", "a. o."});
    const auto report = evaluate_case(set, store, src);
    CHECK(report.smasvar == 0.0);
    CHECK(report.reference_index == 0);
    for (const auto& s : report.sentences) CHECK(s.value == 0.0);
    CHECK(!report.visvar.has_value());
  }
  SUBCASE("divergent sample raises smasvar") {
    const auto identical = evaluate_case(set_of({"a.", "a.", "a."}), store, src);
    const auto divergent = evaluate_case(set_of({"a.", "a.", "u."}), store, src);
    CHECK(divergent.smasvar > identical.smasvar);
  }
  SUBCASE("visual statistics attach when a stack is supplied") {
    const auto set = set_of({"a.", "a."});
    ReconstructionStack stack{2, 1, 1, 2, {0.f, 0.f, 2.f, 2.f}};
    const auto report = evaluate_case(set, store, src, stack);
    REQUIRE(report.visvar.has_value());
    CHECK(*report.visvar == 1.0);
    CHECK(*report.vis_mu_mean == 1.0);
    CHECK(*report.vis_var_mean == 1.0);
  }
}

TEST_CASE("permutation invariance of case-level uncertainties") {
  const auto& store = fixture_store();
  const auto src = SentenceVectorSource::derived_mean();
  const auto base = set_of({"a. o.", "x.", "h. u."});
  auto permuted = base;
  std::swap(permuted.samples[0], permuted.samples[2]);

  const auto ma = pairwise_smas(base, store, src);
  const auto mb = pairwise_smas(permuted, store, src);
  CHECK(std::abs(smasvar(ma) - smasvar(mb)) <= 1e-12);

  // The majority rule: k > T/2 identical samples must supply the reference.
  const auto majority = set_of({"u.", "a.", "a.", "a."});
  const auto m = pairwise_smas(majority, store, src);
  CHECK(reference_report(m) >= 1);
}
