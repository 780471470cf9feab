#pragma once

#include <vector>

#include "dbtsw/types.hpp"

namespace dbtsw {

/// Exact optimal transport oracles for evaluation and tests.

/// Largest n * m accepted by exact_w1_lp.
inline constexpr long kExactLpMaxEntries = 10'000;

/// Min-cost assignment. Returns the column assigned to each row.
/// Shortest augmenting path with potentials, O(n^3). Ties are broken by scan
/// order, so the result is deterministic.
std::vector<int> solve_assignment(const Matrix& cost);

/// W_p between the uniform measures on the rows of X and Y (equal sizes),
/// with ground cost |x - y|_2^p: (min_sigma sum |x_i - y_sigma(i)|^p / n)^(1/p).
/// Throws SizeError on shape mismatch.
double exact_wp_assignment(const Matrix& X, const Matrix& Y, double p);

/// Optimal value of the transportation LP min <C, P> over couplings of a and
/// b. Successive shortest paths with Dijkstra on reduced costs; exact up to
/// floating point. Throws MassError when a or b does not sum to 1 (1e-8),
/// ScaleError when n * m exceeds kExactLpMaxEntries, DataError for negative
/// or non-finite costs.
double exact_w1_lp(const Vector& a, const Vector& b, const Matrix& cost);

/// Euclidean cost matrix |x_i - y_j|_2.
Matrix euclidean_cost(const Matrix& X, const Matrix& Y);

}  // namespace dbtsw
