#pragma once

#include <span>
#include <vector>

#include "reportcert/embeddings.hpp"
#include "reportcert/matrix.hpp"

namespace reportcert {

/// Balanced discrete transport problem: masses p (length n), q (length m)
/// and an n x m cost matrix.
struct TransportInstance {
  std::vector<double> p;
  std::vector<double> q;
  Matrix cost;
};

struct TransportPlan {
  Matrix flows;      // n x m coupling, non-negative
  double objective;  // sum of flows * cost
};

/// 1 - cos(w, w'), clamped to [0, 2]. Throws ZeroNormVector.
double cosine_distance(std::span<const double> w, std::span<const double> w2);

/// Exact solution of the transport problem by the transportation simplex
/// with Bland's pivot rule (lowest (i, j) lexicographic index), which makes
/// the returned plan deterministic. Throws InfeasibleInstance when the mass
/// sums differ by more than 1e-6.
TransportPlan solve_transport(const TransportInstance& inst);

/// Word-level transport distance: norm-derived masses, cosine cost.
/// Throws EmptyMass when either sentence has zero total mass.
double wrd(const EmbeddedSentence& s, const EmbeddedSentence& s2);

/// 1 - wrd, with degenerate extensions: 1 when both sentences carry zero
/// mass, 0 when exactly one does.
double wrs(const EmbeddedSentence& s, const EmbeddedSentence& s2);

}  // namespace reportcert
