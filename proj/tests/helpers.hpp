#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "reportcert/embeddings.hpp"
#include "reportcert/matrix.hpp"
#include "reportcert/text.hpp"
#include "reportcert/transport.hpp"

namespace testhelp {

// Deterministic uniform double in [lo, hi) from raw mt19937_64 draws.
inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

inline std::vector<double> random_vector(std::mt19937_64& gen, std::size_t dim,
                                         double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(dim);
  for (double& x : v) x = uniform(gen, lo, hi);
  return v;
}

// Random simplex masses bounded away from zero.
inline std::vector<double> random_masses(std::mt19937_64& gen, std::size_t n) {
  std::vector<double> m(n);
  double sum = 0.0;
  for (double& x : m) {
    x = uniform(gen, 0.1, 1.0);
    sum += x;
  }
  for (double& x : m) x /= sum;
  return m;
}

// ---------------------------------------------------------------------------
// Transport oracles (independent of the production solver)

// A 2x2 coupling has one free parameter lambda_00 = t; the objective is
// linear in t, so the optimum sits at an endpoint of the feasible segment.
inline double endpoint_oracle_2x2(const reportcert::TransportInstance& inst) {
  const double p0 = inst.p[0], q0 = inst.q[0], q1 = inst.q[1];
  const double lo = std::max(0.0, p0 - q1);
  const double hi = std::min(p0, q0);
  auto objective = [&](double t) {
    const double l00 = t;
    const double l01 = p0 - t;
    const double l10 = q0 - t;
    const double l11 = q1 - (p0 - t);
    return l00 * inst.cost(0, 0) + l01 * inst.cost(0, 1) + l10 * inst.cost(1, 0) +
           l11 * inst.cost(1, 1);
  };
  return std::min(objective(lo), objective(hi));
}

// Log-domain Sinkhorn with epsilon annealing: anneal from eps 1.0 down to
// the target, warm-starting the potentials at each stage so the iteration
// never stalls in the min-plus regime, then iterate the final stage until
// the implied plan's marginals match. Returns <P_eps, C>.
inline double sinkhorn_objective(const reportcert::TransportInstance& inst,
                                 double target_eps, bool* converged = nullptr) {
  const std::size_t n = inst.p.size(), m = inst.q.size();
  std::vector<double> f(n, 0.0), g(m, 0.0);
  auto logsumexp = [](const std::vector<double>& terms) {
    const double hi = *std::max_element(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - hi);
    return hi + std::log(sum);
  };
  std::vector<double> terms;
  auto sweep = [&](double eps) {
    for (std::size_t i = 0; i < n; ++i) {
      terms.clear();
      for (std::size_t j = 0; j < m; ++j)
        terms.push_back((g[j] - inst.cost(i, j)) / eps + std::log(inst.q[j]));
      f[i] = -eps * logsumexp(terms);
    }
    for (std::size_t j = 0; j < m; ++j) {
      terms.clear();
      for (std::size_t i = 0; i < n; ++i)
        terms.push_back((f[i] - inst.cost(i, j)) / eps + std::log(inst.p[i]));
      g[j] = -eps * logsumexp(terms);
    }
  };
  // Column marginals are exact right after a sweep; row residual decides.
  auto row_residual = [&](double eps) {
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        row += std::exp((f[i] + g[j] - inst.cost(i, j)) / eps + std::log(inst.p[i]) +
                        std::log(inst.q[j]));
      residual = std::max(residual, std::abs(row - inst.p[i]));
    }
    return residual;
  };

  for (double eps = 1.0; eps > target_eps; eps *= 0.7) {
    for (int it = 0; it < 50; ++it) {
      sweep(eps);
      if (row_residual(eps) < 1e-9) break;
    }
  }
  bool ok = false;
  for (std::size_t it = 0; it < 100000 && !ok; ++it) {
    sweep(target_eps);
    ok = row_residual(target_eps) < 1e-13;
  }
  if (converged) *converged = ok;

  double objective = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double log_pij = (f[i] + g[j] - inst.cost(i, j)) / target_eps +
                             std::log(inst.p[i]) + std::log(inst.q[j]);
      objective += std::exp(log_pij) * inst.cost(i, j);
    }
  return objective;
}

// Entropic objective extrapolated to vanishing regularization: halve eps
// while the solver still converges, Richardson-extrapolating once the
// objective stabilizes; on a non-converging level, trust the last
// converged one (its residual bias is already far below tolerance).
inline double sinkhorn_extrapolated(const reportcert::TransportInstance& inst) {
  double eps = 0.01;
  bool converged = false;
  double prev = sinkhorn_objective(inst, eps, &converged);
  if (!converged) return prev;
  for (int k = 0; k < 6; ++k) {
    eps *= 0.5;
    const double cur = sinkhorn_objective(inst, eps, &converged);
    if (!converged) return prev;
    if (std::abs(prev - cur) <= 1e-6) return 2.0 * cur - prev;
    prev = cur;
  }
  return prev;
}

// Feasible plan from a random greedy fill order; exact marginals.
inline double random_feasible_plan_cost(const reportcert::TransportInstance& inst,
                                        std::mt19937_64& gen) {
  const std::size_t n = inst.p.size(), m = inst.q.size();
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) cells.emplace_back(i, j);
  for (std::size_t k = cells.size(); k > 1; --k)
    std::swap(cells[k - 1], cells[gen() % k]);
  std::vector<double> a = inst.p, b = inst.q;
  double cost = 0.0;
  for (const auto& [i, j] : cells) {
    const double x = std::min(a[i], b[j]);
    if (x <= 0.0) continue;
    cost += x * inst.cost(i, j);
    a[i] -= x;
    b[j] -= x;
  }
  // Sweep any tiny leftovers into the last cells deterministically.
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] > 0.0) cost += a[i] * inst.cost(i, m - 1);
  return cost;
}

// ---------------------------------------------------------------------------
// Statistics oracles

// Welford's online algorithm: population mean and variance.
inline std::pair<double, double> welford(const std::vector<double>& xs) {
  double mean = 0.0, m2 = 0.0;
  std::size_t count = 0;
  for (double x : xs) {
    ++count;
    const double d1 = x - mean;
    mean += d1 / static_cast<double>(count);
    m2 += d1 * (x - mean);
  }
  return {mean, m2 / static_cast<double>(count)};
}

// Raw-moment Pearson formula (one pass), as an independent route.
inline double pearson_raw_moments(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    syy += y[k] * y[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) /
         std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

// ---------------------------------------------------------------------------
// Reference BLEU (direct nested-loop counting, no hash maps)

inline double reference_bleu4(const std::vector<std::string>& hyp,
                              const std::vector<std::string>& ref) {
  if (hyp.empty() || ref.empty()) return 0.0;
  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    if (hyp.size() < n) continue;
    const std::size_t hyp_count = hyp.size() - n + 1;
    const std::size_t ref_count = ref.size() >= n ? ref.size() - n + 1 : 0;
    std::size_t matched = 0;
    std::vector<char> ref_used(ref_count, 0);
    for (std::size_t i = 0; i < hyp_count; ++i) {
      for (std::size_t j = 0; j < ref_count; ++j) {
        if (ref_used[j]) continue;
        bool equal = true;
        for (std::size_t k = 0; k < n; ++k)
          if (hyp[i + k] != ref[j + k]) {
            equal = false;
            break;
          }
        if (equal) {
          ref_used[j] = 1;
          ++matched;
          break;
        }
      }
    }
    const double precision =
        matched > 0 ? static_cast<double>(matched) / static_cast<double>(hyp_count)
                    : 1.0 / static_cast<double>(hyp_count + 1);
    log_sum += std::log(precision);
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double c = static_cast<double>(hyp.size());
  const double r = static_cast<double>(ref.size());
  const double brevity = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return brevity * std::exp(log_sum / static_cast<double>(orders));
}

// ---------------------------------------------------------------------------
// Synthetic embedding fixtures

inline reportcert::Sentence sentence(std::initializer_list<const char*> tokens) {
  reportcert::Sentence s;
  for (const char* t : tokens) {
    s.tokens.emplace_back(t);
    if (!s.raw.empty()) s.raw += ' ';
    s.raw += t;
  }
  return s;
}

inline reportcert::EmbeddedSentence embedded(
    std::initializer_list<std::vector<double>> vectors) {
  reportcert::EmbeddedSentence s;
  for (const auto& v : vectors) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    s.vectors.push_back(v);
    s.norms.push_back(std::sqrt(sq));
  }
  for (double n : s.norms) s.total_mass += n;
  return s;
}

// Store over tokens "t0".."t<n-1>" with random vectors.
inline reportcert::WordVectorStore random_store(std::mt19937_64& gen, std::size_t tokens,
                                                std::size_t dim) {
  std::vector<std::pair<std::string, std::vector<double>>> entries;
  for (std::size_t k = 0; k < tokens; ++k)
    entries.emplace_back("t" + std::to_string(k), random_vector(gen, dim));
  return reportcert::WordVectorStore::from_entries(dim, entries);
}

// Random sentence over the random_store vocabulary.
inline reportcert::Sentence random_sentence(std::mt19937_64& gen, std::size_t tokens,
                                            std::size_t vocab) {
  reportcert::Sentence s;
  for (std::size_t k = 0; k < tokens; ++k) {
    std::string t = "t" + std::to_string(gen() % vocab);
    if (!s.raw.empty()) s.raw += ' ';
    s.raw += t;
    s.tokens.push_back(std::move(t));
  }
  return s;
}

}  // namespace testhelp
