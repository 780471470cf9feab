#include "dbtsw/treemetric.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "dbtsw/error.hpp"

namespace dbtsw {

namespace {

// Kahan-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  [[nodiscard]] double value() const noexcept { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct SignedAtom {
  double coord;
  double mass;
};

void check_line(const LineAtoms& a, const char* what) {
  if (a.coords.size() != a.masses.size()) {
    throw DimensionError(std::string(what) + ": coordinate and mass counts differ");
  }
}

void check_mass(double ma, double mb) {
  if (std::abs(ma - mb) > kMassTolerance) {
    throw MassError("total masses differ: " + std::to_string(ma) + " vs " + std::to_string(mb));
  }
}

void check_pair(const ProjectedMeasure& p, const ProjectedMeasure& q, const TreeSystem& t) {
  const auto k = static_cast<std::size_t>(t.num_lines());
  if (p.num_lines() != k || q.num_lines() != k) {
    throw DimensionError("projected measures and tree system have different line counts");
  }
  for (std::size_t l = 0; l < k; ++l) {
    check_line(p.lines[l], "first measure");
    check_line(q.lines[l], "second measure");
  }
  check_mass(p.total_mass(), q.total_mass());
}

std::vector<SignedAtom> signed_atoms(const LineAtoms& a, const LineAtoms& b) {
  std::vector<SignedAtom> out;
  out.reserve(a.size() + b.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back({a.coords[i], a.masses[i]});
  for (std::size_t i = 0; i < b.size(); ++i) out.push_back({b.coords[i], -b.masses[i]});
  std::stable_sort(out.begin(), out.end(),
                   [](const SignedAtom& x, const SignedAtom& y) { return x.coord < y.coord; });
  return out;
}

// Cost of one line of a concurrent system: rays (0, +inf) and (-inf, 0)
// hanging off the root, each integrating |mass beyond s|.
void add_line_cost(const std::vector<SignedAtom>& atoms, CompensatedSum& acc) {
  const std::size_t n = atoms.size();
  // Positive ray, from the far end towards the root.
  double beyond = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    if (!(atoms[j].coord > 0.0)) break;
    beyond += atoms[j].mass;
    const double lower = (j > 0 && atoms[j - 1].coord > 0.0) ? atoms[j - 1].coord : 0.0;
    acc.add((atoms[j].coord - lower) * std::abs(beyond));
  }
  // Negative ray.
  beyond = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!(atoms[j].coord < 0.0)) break;
    beyond += atoms[j].mass;
    const double upper = (j + 1 < n && atoms[j + 1].coord < 0.0) ? atoms[j + 1].coord : 0.0;
    acc.add((upper - atoms[j].coord) * std::abs(beyond));
  }
}

}  // namespace

double wasserstein_1d(const LineAtoms& a, const LineAtoms& b) {
  check_line(a, "first measure");
  check_line(b, "second measure");
  check_mass(a.total_mass(), b.total_mass());
  const auto atoms = signed_atoms(a, b);
  CompensatedSum acc;
  double cdf_diff = 0.0;
  for (std::size_t j = 0; j + 1 < atoms.size(); ++j) {
    cdf_diff += atoms[j].mass;
    acc.add((atoms[j + 1].coord - atoms[j].coord) * std::abs(cdf_diff));
  }
  return acc.value();
}

double wasserstein_1d_pow(const LineAtoms& a, const LineAtoms& b, double p) {
  check_line(a, "first measure");
  check_line(b, "second measure");
  check_mass(a.total_mass(), b.total_mass());
  if (!(p >= 1.0)) throw ConfigError("Wasserstein order p must be >= 1");

  auto order = [](const LineAtoms& x) {
    std::vector<std::size_t> idx(x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t i, std::size_t j) { return x.coords[i] < x.coords[j]; });
    return idx;
  };
  const auto ia = order(a);
  const auto ib = order(b);

  CompensatedSum acc;
  std::size_t i = 0;
  std::size_t j = 0;
  double ra = ia.empty() ? 0.0 : a.masses[ia[0]];
  double rb = ib.empty() ? 0.0 : b.masses[ib[0]];
  while (i < ia.size() && j < ib.size()) {
    const double m = std::min(ra, rb);
    const double gap = std::abs(a.coords[ia[i]] - b.coords[ib[j]]);
    acc.add(m * (p == 1.0 ? gap : std::pow(gap, p)));
    ra -= m;
    rb -= m;
    if (ra <= rb) {
      if (++i < ia.size()) ra = a.masses[ia[i]];
    } else {
      if (++j < ib.size()) rb = b.masses[ib[j]];
    }
  }
  return acc.value();
}

double tree_wasserstein_concurrent(const ProjectedMeasure& p, const ProjectedMeasure& q,
                                   const TreeSystem& t) {
  if (t.kind != TreeKind::Concurrent) {
    throw StructureError("concurrent fast path needs a Concurrent tree system");
  }
  check_pair(p, q, t);
  CompensatedSum acc;
  for (std::size_t l = 0; l < p.num_lines(); ++l) {
    add_line_cost(signed_atoms(p.lines[l], q.lines[l]), acc);
  }
  return acc.value();
}

namespace {

// Explicit event tree used by the generic path.
class EventTree {
 public:
  EventTree(const ProjectedMeasure& p, const ProjectedMeasure& q, const TreeSystem& t) {
    const auto k = static_cast<std::size_t>(t.num_lines());
    line_events_.resize(k);
    line_ids_.resize(k);
    for (std::size_t l = 0; l < k; ++l) {
      auto& ev = line_events_[l];
      ev.push_back(0.0);
      ev.insert(ev.end(), p.lines[l].coords.begin(), p.lines[l].coords.end());
      ev.insert(ev.end(), q.lines[l].coords.begin(), q.lines[l].coords.end());
      if (t.kind == TreeKind::Chain && l + 1 < k) ev.push_back(t.attachments[l]);
      std::sort(ev.begin(), ev.end());
      ev.erase(std::unique(ev.begin(), ev.end()), ev.end());
    }

    // Node ids; a line's t = 0 node is the junction with its parent.
    for (std::size_t l = 0; l < k; ++l) {
      const auto& ev = line_events_[l];
      auto& ids = line_ids_[l];
      ids.resize(ev.size());
      for (std::size_t e = 0; e < ev.size(); ++e) {
        if (l > 0 && ev[e] == 0.0) {
          ids[e] = t.kind == TreeKind::Chain ? node_of(l - 1, t.attachments[l - 1])
                                             : node_of(0, 0.0);
        } else {
          ids[e] = mass_.size();
          mass_.push_back(0.0);
        }
      }
      for (std::size_t e = 0; e + 1 < ev.size(); ++e) {
        edges_.push_back({ids[e], ids[e + 1], ev[e + 1] - ev[e]});
      }
    }

    for (std::size_t l = 0; l < k; ++l) {
      for (std::size_t i = 0; i < p.lines[l].size(); ++i) {
        mass_[node_of(l, p.lines[l].coords[i])] += p.lines[l].masses[i];
      }
      for (std::size_t i = 0; i < q.lines[l].size(); ++i) {
        mass_[node_of(l, q.lines[l].coords[i])] -= q.lines[l].masses[i];
      }
    }
  }

  // Eq. "sum over edges of length * |mass of the far subtree|", rooted at
  // line 0's source.
  [[nodiscard]] double cost() const {
    const std::size_t nodes = mass_.size();
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(nodes);
    for (const auto& e : edges_) {
      adj[e.a].push_back({e.b, e.length});
      adj[e.b].push_back({e.a, e.length});
    }
    const std::size_t root = node_of(0, 0.0);
    std::vector<std::size_t> parent(nodes, nodes);
    std::vector<double> up_length(nodes, 0.0);
    std::vector<std::size_t> order;
    order.reserve(nodes);
    std::vector<std::size_t> stack{root};
    parent[root] = root;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (const auto& [w, len] : adj[v]) {
        if (parent[w] != nodes) continue;
        parent[w] = v;
        up_length[w] = len;
        stack.push_back(w);
      }
    }
    if (order.size() != nodes) throw StructureError("tree system is not connected");

    std::vector<double> subtree = mass_;
    CompensatedSum acc;
    for (std::size_t idx = order.size(); idx-- > 1;) {
      const std::size_t v = order[idx];
      acc.add(up_length[v] * std::abs(subtree[v]));
      subtree[parent[v]] += subtree[v];
    }
    return acc.value();
  }

 private:
  struct Edge {
    std::size_t a;
    std::size_t b;
    double length;
  };

  [[nodiscard]] std::size_t node_of(std::size_t line, double coord) const {
    const auto& ev = line_events_[line];
    const auto it = std::lower_bound(ev.begin(), ev.end(), coord);
    return line_ids_[line][static_cast<std::size_t>(it - ev.begin())];
  }

  std::vector<std::vector<double>> line_events_;
  std::vector<std::vector<std::size_t>> line_ids_;
  std::vector<double> mass_;
  std::vector<Edge> edges_;
};

}  // namespace

double tree_wasserstein_general(const ProjectedMeasure& p, const ProjectedMeasure& q,
                                const TreeSystem& t) {
  check_pair(p, q, t);
  if (t.kind == TreeKind::Chain &&
      t.attachments.size() + 1 != static_cast<std::size_t>(t.num_lines())) {
    throw StructureError("chain needs k - 1 attachment coordinates");
  }
  return EventTree(p, q, t).cost();
}

double tree_wasserstein(const ProjectedMeasure& p, const ProjectedMeasure& q,
                        const TreeSystem& t) {
  return t.kind == TreeKind::Concurrent ? tree_wasserstein_concurrent(p, q, t)
                                        : tree_wasserstein_general(p, q, t);
}

double pairwise_tree_distance(const TreePoint& a, const TreePoint& b, const TreeSystem& t) {
  const auto k = static_cast<std::size_t>(t.num_lines());
  if (a.line >= k || b.line >= k) {
    throw IndexError("line index out of range (k = " + std::to_string(k) + ")");
  }
  if (a.line == b.line) return std::abs(a.coord - b.coord);
  if (t.kind == TreeKind::Concurrent) return std::abs(a.coord) + std::abs(b.coord);

  const TreePoint& lo = a.line < b.line ? a : b;
  const TreePoint& hi = a.line < b.line ? b : a;
  double dist = std::abs(hi.coord);
  for (std::size_t m = hi.line - 1; m > lo.line; --m) dist += std::abs(t.attachments[m]);
  dist += std::abs(lo.coord - t.attachments[lo.line]);
  return dist;
}

double SegmentProfile::cost() const {
  CompensatedSum acc;
  for (const auto& line : lines) {
    for (std::size_t j = 0; j < line.far_diff.size(); ++j) {
      acc.add((line.events[j + 1] - line.events[j]) * std::abs(line.far_diff[j]));
    }
  }
  return acc.value();
}

SegmentProfile segment_profile(const ProjectedMeasure& p, const ProjectedMeasure& q,
                               const TreeSystem& t) {
  if (t.kind != TreeKind::Concurrent) {
    throw StructureError("segment profiles are defined for Concurrent systems");
  }
  check_pair(p, q, t);
  SegmentProfile out;
  out.lines.resize(p.num_lines());
  for (std::size_t l = 0; l < p.num_lines(); ++l) {
    const auto atoms = signed_atoms(p.lines[l], q.lines[l]);
    auto& line = out.lines[l];
    line.events.push_back(0.0);
    for (const auto& a : atoms) line.events.push_back(a.coord);
    std::sort(line.events.begin(), line.events.end());
    line.events.erase(std::unique(line.events.begin(), line.events.end()), line.events.end());
    for (const auto& a : atoms) line.net += a.mass;

    line.far_diff.assign(line.events.size() - 1, 0.0);
    for (std::size_t j = 0; j + 1 < line.events.size(); ++j) {
      const double lo = line.events[j];
      const double hi = line.events[j + 1];
      double sum = 0.0;
      if (lo >= 0.0) {
        for (const auto& a : atoms) {
          if (a.coord >= hi) sum += a.mass;
        }
      } else {
        for (const auto& a : atoms) {
          if (a.coord <= lo) sum += a.mass;
        }
      }
      line.far_diff[j] = sum;
    }
  }
  return out;
}

}  // namespace dbtsw
