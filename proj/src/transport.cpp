#include "reportcert/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <tuple>

#include "reportcert/errors.hpp"

namespace reportcert {

namespace {

constexpr double kBalanceTol = 1e-6;

struct Cell {
  std::size_t i, j;
};

// Transportation simplex over the rows/cols that carry positive mass.
// Bland's rule on the lexicographic (i, j) cell order: the entering cell is
// the first one with negative reduced cost, the leaving cell is the
// lowest-indexed among those attaining the minimum cycle flow. This cannot
// cycle and makes the pivot sequence deterministic.
class TransportationSimplex {
 public:
  TransportationSimplex(std::vector<double> supply, std::vector<double> demand,
                        const Matrix& cost, const std::vector<std::size_t>& row_ids,
                        const std::vector<std::size_t>& col_ids)
      : r_(supply.size()),
        c_(demand.size()),
        supply_(std::move(supply)),
        demand_(std::move(demand)),
        cost_(r_, c_),
        flow_(r_, c_),
        basic_(r_ * c_, 0) {
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) cost_(i, j) = cost(row_ids[i], col_ids[j]);
    double max_cost = 0.0;
    for (double v : cost_.data()) max_cost = std::max(max_cost, std::abs(v));
    enter_tol_ = 1e-12 * std::max(1.0, max_cost);
  }

  const Matrix& run() {
    northwest_corner();
    const std::size_t max_pivots = 200000;
    for (std::size_t it = 0; it < max_pivots; ++it) {
      compute_duals();
      auto entering = find_entering();
      if (!entering) return flow_;
      pivot(*entering);
    }
    throw Error("transport solver exceeded pivot limit");
  }

 private:
  bool is_basic(std::size_t i, std::size_t j) const { return basic_[i * c_ + j] != 0; }
  void set_basic(std::size_t i, std::size_t j, bool b) { basic_[i * c_ + j] = b ? 1 : 0; }

  void northwest_corner() {
    std::vector<double> a = supply_;
    std::vector<double> b = demand_;
    std::size_t i = 0, j = 0;
    while (true) {
      double x = std::min(a[i], b[j]);
      flow_(i, j) = x;
      set_basic(i, j, true);
      a[i] -= x;
      b[j] -= x;
      if (i == r_ - 1 && j == c_ - 1) break;
      if (i == r_ - 1) {
        ++j;
      } else if (j == c_ - 1) {
        ++i;
      } else if (a[i] <= b[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  // Duals from u[0] = 0 over the basis tree (nodes: rows then cols).
  void compute_duals() {
    u_.assign(r_, 0.0);
    v_.assign(c_, 0.0);
    std::vector<char> seen(r_ + c_, 0);
    std::vector<std::vector<std::size_t>> adj(r_ + c_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j)
        if (is_basic(i, j)) {
          adj[i].push_back(r_ + j);
          adj[r_ + j].push_back(i);
        }
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t next : adj[node]) {
        if (seen[next]) continue;
        seen[next] = 1;
        if (node < r_)
          v_[next - r_] = cost_(node, next - r_) - u_[node];
        else
          u_[next] = cost_(next, node - r_) - v_[node - r_];
        stack.push_back(next);
      }
    }
  }

  std::optional<Cell> find_entering() const {
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) {
        if (is_basic(i, j)) continue;
        if (cost_(i, j) - u_[i] - v_[j] < -enter_tol_) return Cell{i, j};
      }
    return std::nullopt;
  }

  // Unique tree path from row node i to col node j, as an edge list.
  std::vector<Cell> tree_path(std::size_t i, std::size_t j) const {
    std::vector<std::vector<std::size_t>> adj(r_ + c_);
    for (std::size_t a = 0; a < r_; ++a)
      for (std::size_t b = 0; b < c_; ++b)
        if (is_basic(a, b)) {
          adj[a].push_back(r_ + b);
          adj[r_ + b].push_back(a);
        }
    std::vector<std::size_t> parent(r_ + c_, SIZE_MAX);
    std::vector<std::size_t> queue{i};
    parent[i] = i;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      std::size_t node = queue[head];
      if (node == r_ + j) break;
      for (std::size_t next : adj[node])
        if (parent[next] == SIZE_MAX) {
          parent[next] = node;
          queue.push_back(next);
        }
    }
    std::vector<Cell> path;
    std::size_t node = r_ + j;
    while (node != i) {
      std::size_t prev = parent[node];
      if (node < r_)
        path.push_back(Cell{node, prev - r_});
      else
        path.push_back(Cell{prev, node - r_});
      node = prev;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  void pivot(const Cell& enter) {
    auto path = tree_path(enter.i, enter.j);
    // Entering cell takes +theta; walking from the entering row, path edges
    // alternate -, +, -, ... to keep every marginal balanced.
    double theta = std::numeric_limits<double>::infinity();
    Cell leaving{SIZE_MAX, SIZE_MAX};
    for (std::size_t t = 0; t < path.size(); t += 2) {
      const Cell& cell = path[t];
      double f = flow_(cell.i, cell.j);
      if (f < theta ||
          (f == theta && std::tie(cell.i, cell.j) < std::tie(leaving.i, leaving.j))) {
        theta = f;
        leaving = cell;
      }
    }
    for (std::size_t t = 0; t < path.size(); ++t) {
      const Cell& cell = path[t];
      if (t % 2 == 0)
        flow_(cell.i, cell.j) -= theta;
      else
        flow_(cell.i, cell.j) += theta;
    }
    flow_(enter.i, enter.j) = theta;
    flow_(leaving.i, leaving.j) = 0.0;
    set_basic(enter.i, enter.j, true);
    set_basic(leaving.i, leaving.j, false);
  }

  std::size_t r_, c_;
  std::vector<double> supply_, demand_;
  Matrix cost_, flow_;
  std::vector<char> basic_;
  std::vector<double> u_, v_;
  double enter_tol_ = 1e-12;
};

}  // namespace

double cosine_distance(std::span<const double> w, std::span<const double> w2) {
  if (w.size() != w2.size())
    throw DimensionMismatch("cosine_distance: vectors of length " +
                            std::to_string(w.size()) + " vs " +
                            std::to_string(w2.size()));
  double dot = 0.0, sq_a = 0.0, sq_b = 0.0;
  for (std::size_t d = 0; d < w.size(); ++d) {
    dot += w[d] * w2[d];
    sq_a += w[d] * w[d];
    sq_b += w2[d] * w2[d];
  }
  if (sq_a == 0.0 || sq_b == 0.0)
    throw ZeroNormVector("cosine_distance on a zero-norm vector");
  double d = 1.0 - dot / (std::sqrt(sq_a) * std::sqrt(sq_b));
  return std::clamp(d, 0.0, 2.0);
}

TransportPlan solve_transport(const TransportInstance& inst) {
  const std::size_t n = inst.p.size();
  const std::size_t m = inst.q.size();
  if (inst.cost.rows() != n || inst.cost.cols() != m)
    throw InfeasibleInstance("cost matrix shape does not match mass vectors");

  double sum_p = 0.0, sum_q = 0.0;
  for (double x : inst.p) {
    if (!std::isfinite(x) || x < 0.0) throw InfeasibleInstance("negative or non-finite mass in p");
    sum_p += x;
  }
  for (double x : inst.q) {
    if (!std::isfinite(x) || x < 0.0) throw InfeasibleInstance("negative or non-finite mass in q");
    sum_q += x;
  }
  for (double x : inst.cost.data())
    if (!std::isfinite(x)) throw InfeasibleInstance("non-finite cost entry");
  if (std::abs(sum_p - sum_q) > kBalanceTol)
    throw InfeasibleInstance("mass sums differ: " + std::to_string(sum_p) + " vs " +
                             std::to_string(sum_q));

  TransportPlan plan{Matrix(n, m), 0.0};

  std::vector<std::size_t> row_ids, col_ids;
  for (std::size_t i = 0; i < n; ++i)
    if (inst.p[i] > 0.0) row_ids.push_back(i);
  for (std::size_t j = 0; j < m; ++j)
    if (inst.q[j] > 0.0) col_ids.push_back(j);
  if (row_ids.empty() || col_ids.empty()) return plan;  // nothing to move

  std::vector<double> supply(row_ids.size());
  for (std::size_t i = 0; i < row_ids.size(); ++i) supply[i] = inst.p[row_ids[i]];
  // Rescale demand so both sides balance exactly; the caller-visible
  // residual stays below the instance tolerance.
  const double scale = sum_p / sum_q;
  std::vector<double> demand(col_ids.size());
  for (std::size_t j = 0; j < col_ids.size(); ++j) demand[j] = inst.q[col_ids[j]] * scale;

  TransportationSimplex simplex(std::move(supply), std::move(demand), inst.cost,
                                row_ids, col_ids);
  const Matrix& reduced = simplex.run();

  for (std::size_t i = 0; i < row_ids.size(); ++i)
    for (std::size_t j = 0; j < col_ids.size(); ++j) {
      double f = reduced(i, j);
      plan.flows(row_ids[i], col_ids[j]) = f < 0.0 ? 0.0 : f;
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      plan.objective += plan.flows(i, j) * inst.cost(i, j);
  return plan;
}

namespace {

// Active entries of an embedded sentence: zero-norm vectors carry no mass
// and have no direction, so they never enter the transport instance.
std::vector<std::size_t> massive_indices(const EmbeddedSentence& s) {
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < s.norms.size(); ++i)
    if (s.norms[i] > 0.0) ids.push_back(i);
  return ids;
}

}  // namespace

double wrd(const EmbeddedSentence& s, const EmbeddedSentence& s2) {
  if (s.total_mass == 0.0 || s2.total_mass == 0.0)
    throw EmptyMass("wrd over a sentence with zero total mass");

  auto ids_a = massive_indices(s);
  auto ids_b = massive_indices(s2);

  TransportInstance inst;
  inst.p.resize(ids_a.size());
  inst.q.resize(ids_b.size());
  inst.cost = Matrix(ids_a.size(), ids_b.size());
  for (std::size_t i = 0; i < ids_a.size(); ++i) inst.p[i] = s.norms[ids_a[i]] / s.total_mass;
  for (std::size_t j = 0; j < ids_b.size(); ++j) inst.q[j] = s2.norms[ids_b[j]] / s2.total_mass;
  for (std::size_t i = 0; i < ids_a.size(); ++i)
    for (std::size_t j = 0; j < ids_b.size(); ++j)
      inst.cost(i, j) = cosine_distance(s.vectors[ids_a[i]], s2.vectors[ids_b[j]]);

  return solve_transport(inst).objective;
}

double wrs(const EmbeddedSentence& s, const EmbeddedSentence& s2) {
  const bool empty_a = s.total_mass == 0.0;
  const bool empty_b = s2.total_mass == 0.0;
  if (empty_a && empty_b) return 1.0;
  if (empty_a || empty_b) return 0.0;
  return 1.0 - wrd(s, s2);
}

}  // namespace reportcert
