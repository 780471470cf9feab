#pragma once

#include <cstddef>
#include <vector>

#include "dbtsw/projection.hpp"
#include "dbtsw/trees.hpp"

namespace dbtsw {

/// Closed-form 1-Wasserstein distances on lines and tree systems.
///
/// All routines integrate |far-side mass difference| over segment lengths.
/// Ties between atoms produce zero-length segments, so the value does not
/// depend on how equal coordinates are ordered.

/// Tolerance on |mass(a) - mass(b)| before MassError is thrown.
inline constexpr double kMassTolerance = 1e-8;

/// W1 between two weighted atom sets on R, as the area between their CDFs.
double wasserstein_1d(const LineAtoms& a, const LineAtoms& b);

/// W_p^p between two weighted atom sets on R via the quantile coupling.
/// For p == 1 this equals wasserstein_1d.
double wasserstein_1d_pow(const LineAtoms& a, const LineAtoms& b, double p);

/// Fast path for Concurrent systems: every line is a pair of rays glued at
/// the common root (t = 0); per-line cost is the suffix-sum integral on the
/// positive ray plus the prefix-sum integral on the negative ray.
/// Throws StructureError for non-concurrent t, MassError on mass mismatch.
double tree_wasserstein_concurrent(const ProjectedMeasure& p, const ProjectedMeasure& q,
                                   const TreeSystem& t);

/// Generic path for any supported structure. Builds the explicit tree of
/// events (atoms, junctions, root), roots it at line 0's source, and sums
/// edge length * |subtree (p - q) mass| over all edges.
double tree_wasserstein_general(const ProjectedMeasure& p, const ProjectedMeasure& q,
                                const TreeSystem& t);

/// Dispatches to the concurrent fast path or the generic path.
double tree_wasserstein(const ProjectedMeasure& p, const ProjectedMeasure& q,
                        const TreeSystem& t);

/// A point of a tree system: coordinate `coord` on line `line`.
struct TreePoint {
  std::size_t line = 0;
  double coord = 0.0;
};

/// Length of the unique path between two points of t. Throws IndexError for
/// an out-of-range line.
double pairwise_tree_distance(const TreePoint& a, const TreePoint& b, const TreeSystem& t);

/// Per-line event profile of (p - q) on a concurrent system.
///
/// For every line: `events` are the sorted unique coordinates of all atoms
/// plus the root 0; `far_diff[j]` is the signed (p - q) mass beyond segment
/// [events[j], events[j+1]] as seen from the root (segments on the negative
/// side count mass at coordinates <= events[j], on the positive side mass at
/// coordinates >= events[j+1]).
struct SegmentProfile {
  struct Line {
    std::vector<double> events;
    std::vector<double> far_diff;
    double net = 0.0;  // total (p - q) mass on the line
  };
  std::vector<Line> lines;

  /// sum over segments of length * |far_diff|.
  [[nodiscard]] double cost() const;
};

SegmentProfile segment_profile(const ProjectedMeasure& p, const ProjectedMeasure& q,
                               const TreeSystem& t);

}  // namespace dbtsw
