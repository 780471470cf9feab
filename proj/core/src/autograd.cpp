#include "dbtsw/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "dbtsw/error.hpp"
#include "dbtsw/parallel.hpp"

namespace dbtsw {

namespace {

// Atom on one line during the reverse pass. `source` is the row of X for
// atoms of the moving measure and -1 for target atoms.
struct Atom {
  double coord;
  double mass;  // signed: + source, - target
  long source;
};

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

struct LineResult {
  double value = 0.0;
  std::size_t hits = 0;
};

// Forward value of one line plus, when `gc`/`gm` are given, the partial
// derivatives of the line cost with respect to each source atom's
// coordinate and mass. The sort order is frozen by stable_sort, so ties are
// resolved by insertion order (sources before targets, by index).
LineResult line_pass(std::vector<Atom>& atoms, double* gc, double* gm,
                     std::vector<std::int64_t>* signature) {
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& a, const Atom& b) { return a.coord < b.coord; });
  const std::size_t n = atoms.size();
  LineResult res;

  // First index with coord >= 0 and first with coord > 0.
  std::size_t zero_begin = 0;
  while (zero_begin < n && atoms[zero_begin].coord < 0.0) ++zero_begin;
  std::size_t pos_begin = zero_begin;
  while (pos_begin < n && !(atoms[pos_begin].coord > 0.0)) ++pos_begin;

  if (signature) {
    for (const auto& a : atoms) signature->push_back(a.source);
    signature->push_back(static_cast<std::int64_t>(zero_begin));
    signature->push_back(static_cast<std::int64_t>(pos_begin));
  }

  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (atoms[j].coord == atoms[j + 1].coord &&
        (atoms[j].source >= 0 || atoms[j + 1].source >= 0)) {
      ++res.hits;
    }
  }
  for (std::size_t j = zero_begin; j < pos_begin; ++j) {
    if (atoms[j].source >= 0) ++res.hits;  // sitting on the root
  }

  const bool want_grad = gc != nullptr;
  std::vector<double> beyond(n, 0.0);
  std::vector<double> length(n, 0.0);

  // Positive ray: beyond[j] = mass at sorted positions >= j.
  double s = 0.0;
  for (std::size_t j = n; j-- > pos_begin;) {
    s += atoms[j].mass;
    beyond[j] = s;
    length[j] = atoms[j].coord - (j > pos_begin ? atoms[j - 1].coord : 0.0);
    res.value += length[j] * std::abs(s);
  }
  // Negative ray: beyond[j] = mass at sorted positions <= j.
  s = 0.0;
  for (std::size_t j = 0; j < zero_begin; ++j) {
    s += atoms[j].mass;
    beyond[j] = s;
    length[j] = (j + 1 < zero_begin ? atoms[j + 1].coord : 0.0) - atoms[j].coord;
    res.value += length[j] * std::abs(s);
  }

  if (signature) {
    for (std::size_t j = 0; j < n; ++j) {
      const double b = beyond[j];
      signature->push_back(std::abs(b) < 1e-15 ? 0 : sign_of(b));
    }
  }
  if (!want_grad) return res;

  // d/dm of the positive ray: sum of length * sign over segments at or
  // below the atom, accumulated outwards from the root.
  double acc = 0.0;
  for (std::size_t j = pos_begin; j < n; ++j) {
    acc += length[j] * sign_of(beyond[j]);
    if (atoms[j].source >= 0) {
      // Zero-length segments (ties) take the zero subgradient.
      const double above = j + 1 < n && length[j + 1] > 0.0 ? std::abs(beyond[j + 1]) : 0.0;
      const double below = length[j] > 0.0 ? std::abs(beyond[j]) : 0.0;
      gc[atoms[j].source] = below - above;
      gm[atoms[j].source] = acc;
    }
  }
  acc = 0.0;
  for (std::size_t j = zero_begin; j-- > 0;) {
    acc += length[j] * sign_of(beyond[j]);
    if (atoms[j].source >= 0) {
      const double below = j > 0 && length[j - 1] > 0.0 ? std::abs(beyond[j - 1]) : 0.0;
      const double above = length[j] > 0.0 ? std::abs(beyond[j]) : 0.0;
      gc[atoms[j].source] = below - above;
      gm[atoms[j].source] = acc;
    }
  }
  for (std::size_t j = zero_begin; j < pos_begin; ++j) {
    if (atoms[j].source >= 0) {
      gc[atoms[j].source] = 0.0;
      gm[atoms[j].source] = 0.0;
    }
  }
  return res;
}

struct TreeResult {
  double value = 0.0;
  std::size_t hits = 0;
  Matrix gradient;
};

void check_inputs(const Matrix& X, const Vector& weights, const EmpiricalMeasure& nu,
                  const std::vector<TreeSystem>& trees) {
  if (X.rows() < 1) throw DimensionError("source has no supports");
  if (weights.size() != X.rows()) throw DimensionError("weight count does not match supports");
  if (X.cols() != nu.dim()) throw DimensionError("source and target dimensions differ");
  if (trees.empty()) throw ConfigError("gradient needs at least one tree");
  for (const auto& t : trees) {
    if (t.kind != TreeKind::Concurrent) {
      throw StructureError("gradient path supports Concurrent tree systems only");
    }
    if (t.dim() != X.cols()) throw DimensionError("tree dimension does not match data");
  }
}

TreeResult tree_pass(const Matrix& X, const Vector& weights, const EmpiricalMeasure& nu,
                     const TreeSystem& t, const SplittingConfig& cfg, bool want_grad,
                     std::vector<std::int64_t>* signature) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = t.num_lines();
  const ProjectionTerms src = projection_terms(X, t, cfg);
  const ProjectionTerms tgt = projection_terms(nu.supports(), t, cfg);

  TreeResult res;
  Matrix gc;  // n x k, d cost / d coordinate
  Matrix gm;  // n x k, d cost / d mass
  if (want_grad) {
    gc = Matrix::Zero(n, k);
    gm = Matrix::Zero(n, k);
  }
  std::vector<double> gc_line(static_cast<std::size_t>(n));
  std::vector<double> gm_line(static_cast<std::size_t>(n));
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(n + nu.size()));

  for (Eigen::Index l = 0; l < k; ++l) {
    atoms.clear();
    for (Eigen::Index i = 0; i < n; ++i) {
      atoms.push_back({src.coords(i, l), weights(i) * src.split(i, l), static_cast<long>(i)});
    }
    for (Eigen::Index j = 0; j < nu.size(); ++j) {
      atoms.push_back({tgt.coords(j, l), -nu.weights()(j) * tgt.split(j, l), -1});
    }
    const LineResult lr = line_pass(atoms, want_grad ? gc_line.data() : nullptr,
                                    want_grad ? gm_line.data() : nullptr, signature);
    res.value += lr.value;
    res.hits += lr.hits;
    if (want_grad) {
      for (Eigen::Index i = 0; i < n; ++i) {
        gc(i, l) = gc_line[static_cast<std::size_t>(i)];
        gm(i, l) = gm_line[static_cast<std::size_t>(i)];
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index l = 0; l < k; ++l) {
      if (src.distances(i, l) == 0.0 && cfg.mode == SplitMode::DistanceSoftmax) ++res.hits;
      if (signature) signature->push_back(src.distances(i, l) == 0.0);
    }
  }
  if (!want_grad) return res;

  // Coordinates: u_il = <x_i - root, theta_l>.
  res.gradient = gc * t.directions;
  if (cfg.mode == SplitMode::DistanceSoftmax && cfg.delta != 0.0) {
    const RowVector root = t.roots.row(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const RowVector alpha = src.split.row(i);
      const RowVector g_mass = weights(i) * gm.row(i);  // d cost / d alpha
      const double mean = g_mass.dot(alpha);
      const RowVector diff = X.row(i) - root;
      for (Eigen::Index j = 0; j < k; ++j) {
        const double dist = src.distances(i, j);
        if (dist == 0.0) continue;
        // softmax Jacobian: d alpha_l / d z_j = alpha_l (1[l=j] - alpha_j).
        const double g_z = alpha(j) * (g_mass(j) - mean);
        const double scale = cfg.delta * g_z / dist;
        res.gradient.row(i) +=
            scale * (diff - src.coords(i, j) * t.directions.row(j));
      }
    }
  }
  return res;
}

std::vector<std::int64_t> kink_signature(const Matrix& X, const Vector& weights,
                                         const EmpiricalMeasure& nu,
                                         const std::vector<TreeSystem>& trees,
                                         const SplittingConfig& cfg) {
  std::vector<std::int64_t> sig;
  for (const auto& t : trees) tree_pass(X, weights, nu, t, cfg, false, &sig);
  return sig;
}

}  // namespace

GradientReport dbtsw_value_and_grad(const Matrix& X, const Vector& weights,
                                    const EmpiricalMeasure& nu,
                                    const std::vector<TreeSystem>& trees,
                                    const SplittingConfig& cfg) {
  check_inputs(X, weights, nu, trees);
  std::vector<TreeResult> per_tree(trees.size());
  parallel_for(trees.size(), [&](std::size_t i) {
    per_tree[i] = tree_pass(X, weights, nu, trees[i], cfg, true, nullptr);
  });

  GradientReport out;
  out.gradient = Matrix::Zero(X.rows(), X.cols());
  double total = 0.0;
  for (const auto& r : per_tree) {
    total += r.value;
    out.gradient += r.gradient;
    out.nondifferentiable_hits += r.hits;
  }
  const double inv_l = 1.0 / static_cast<double>(trees.size());
  out.value = total * inv_l;
  out.gradient *= inv_l;
  return out;
}

double dbtsw_value(const Matrix& X, const Vector& weights, const EmpiricalMeasure& nu,
                   const std::vector<TreeSystem>& trees, const SplittingConfig& cfg) {
  check_inputs(X, weights, nu, trees);
  std::vector<double> values(trees.size());
  parallel_for(trees.size(), [&](std::size_t i) {
    values[i] = tree_pass(X, weights, nu, trees[i], cfg, false, nullptr).value;
  });
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(trees.size());
}

FiniteDifferenceResult finite_difference_check(const Matrix& X, const Vector& weights,
                                               const EmpiricalMeasure& nu,
                                               const std::vector<TreeSystem>& trees,
                                               const SplittingConfig& cfg, double h) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be > 0");
  const GradientReport analytic = dbtsw_value_and_grad(X, weights, nu, trees, cfg);
  const auto base_sig = kink_signature(X, weights, nu, trees, cfg);

  FiniteDifferenceResult res;
  Matrix probe = X;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
      probe(i, c) = X(i, c) + h;
      const double f_plus = dbtsw_value(probe, weights, nu, trees, cfg);
      const bool kink_plus = kink_signature(probe, weights, nu, trees, cfg) != base_sig;
      probe(i, c) = X(i, c) - h;
      const double f_minus = dbtsw_value(probe, weights, nu, trees, cfg);
      const bool kink_minus = kink_signature(probe, weights, nu, trees, cfg) != base_sig;
      probe(i, c) = X(i, c);

      if (kink_plus || kink_minus) {
        ++res.kinked;
        continue;
      }
      const double a = analytic.gradient(i, c);
      if (!(std::abs(a) > 1e-9)) continue;
      const double fd = (f_plus - f_minus) / (2.0 * h);
      const double rel = std::abs(a - fd) / std::max(std::abs(a), std::abs(fd));
      res.max_relative_error = std::max(res.max_relative_error, rel);
      ++res.compared;
    }
  }
  return res;
}

}  // namespace dbtsw
