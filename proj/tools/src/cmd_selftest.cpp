#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "commands.hpp"
#include "dbtsw/autograd.hpp"
#include "dbtsw/error.hpp"
#include "dbtsw/estimators.hpp"
#include "dbtsw/exactot.hpp"
#include "dbtsw/serialize.hpp"
#include "dbtsw/transform.hpp"
#include "dbtsw/treemetric.hpp"

namespace dbtsw::cli {

namespace {

struct SuiteResult {
  std::string name;
  double metric = 0.0;
  double tolerance = 0.0;
  std::size_t cases = 0;
  [[nodiscard]] bool passed() const { return metric <= tolerance; }
};

Matrix gaussian(Engine& rng, Eigen::Index n, Eigen::Index d, double shift) {
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) m(i, c) = shift + standard_normal(rng);
  }
  return m;
}

Eigen::Index draw(Engine& rng, Eigen::Index lo, Eigen::Index hi) {
  return lo + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

double relative(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
}

SuiteResult suite_k1(const SeedSpec& seed) {
  SuiteResult r{"k1", 0.0, 1e-10, 20};
  for (std::size_t i = 0; i < r.cases; ++i) {
    Engine rng = seed.child(i).engine();
    const Eigen::Index d = draw(rng, 1, 8);
    const auto mu = uniform_measure(gaussian(rng, draw(rng, 1, 32), d, 0.0));
    const auto nu = uniform_measure(gaussian(rng, draw(rng, 1, 32), d, 0.5));
    EstimatorConfig tree;
    tree.L = 16;
    tree.k = 1;
    tree.seed = seed.child(i).child(1);
    EstimatorConfig sliced = tree;
    sliced.variant = Variant::SW;
    r.metric = std::max(r.metric, relative(dbtsw(mu, nu, tree).value, sw(mu, nu, sliced).value));
  }
  return r;
}

SuiteResult suite_invariance(const SeedSpec& seed) {
  SuiteResult r{"invariance", 0.0, 1e-8, 30};
  for (std::size_t i = 0; i < r.cases; ++i) {
    Engine rng = seed.child(i).engine();
    const Eigen::Index d = std::array<Eigen::Index, 3>{2, 8, 32}[i % 3];
    const auto mu = uniform_measure(gaussian(rng, 16, d, 0.0));
    const auto nu = uniform_measure(gaussian(rng, 16, d, 1.0));
    EstimatorConfig cfg;
    cfg.k = 3;
    cfg.seed = seed.child(i).child(1);
    r.metric = std::max(r.metric, invariance_audit(mu, nu, cfg, 1, seed.child(i).child(2)));
  }
  return r;
}

// Transport LP on the flattened atoms with tree-path costs.
double lp_on_tree(const ProjectedMeasure& p, const ProjectedMeasure& q, const TreeSystem& t) {
  std::vector<TreePoint> pa;
  std::vector<TreePoint> pb;
  std::vector<double> ma;
  std::vector<double> mb;
  for (std::size_t l = 0; l < p.num_lines(); ++l) {
    for (std::size_t i = 0; i < p.lines[l].size(); ++i) {
      pa.push_back({l, p.lines[l].coords[i]});
      ma.push_back(p.lines[l].masses[i]);
    }
    for (std::size_t i = 0; i < q.lines[l].size(); ++i) {
      pb.push_back({l, q.lines[l].coords[i]});
      mb.push_back(q.lines[l].masses[i]);
    }
  }
  Matrix cost(static_cast<Eigen::Index>(pa.size()), static_cast<Eigen::Index>(pb.size()));
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < pb.size(); ++j) {
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          pairwise_tree_distance(pa[i], pb[j], t);
    }
  }
  return exact_w1_lp(Eigen::Map<const Vector>(ma.data(), static_cast<Eigen::Index>(ma.size())),
                     Eigen::Map<const Vector>(mb.data(), static_cast<Eigen::Index>(mb.size())),
                     cost);
}

SuiteResult suite_oracle(const SeedSpec& seed) {
  SuiteResult r{"oracle", 0.0, 1e-9, 40};
  for (std::size_t i = 0; i < r.cases; ++i) {
    Engine rng = seed.child(i).engine();
    const Eigen::Index d = draw(rng, 2, 4);
    const auto mu = uniform_measure(gaussian(rng, draw(rng, 1, 6), d, 0.0));
    const auto nu = uniform_measure(gaussian(rng, draw(rng, 1, 6), d, 0.5));
    TreeSamplerConfig sc;
    sc.k = static_cast<std::size_t>(draw(rng, 1, 3));
    sc.structure = i % 2 == 0 ? TreeKind::Concurrent : TreeKind::Chain;
    const TreeSystem t = sample_trees(sc, d, 1, seed.child(i).child(1)).front();
    const SplittingConfig split;
    const auto p = project(mu, t, split);
    const auto q = project(nu, t, split);
    r.metric = std::max(r.metric, std::abs(tree_wasserstein_general(p, q, t) - lp_on_tree(p, q, t)));
  }
  return r;
}

SuiteResult suite_fastpath(const SeedSpec& seed) {
  SuiteResult r{"fastpath", 0.0, 1e-10, 40};
  for (std::size_t i = 0; i < r.cases; ++i) {
    Engine rng = seed.child(i).engine();
    const Eigen::Index d = draw(rng, 2, 8);
    const auto mu = uniform_measure(gaussian(rng, draw(rng, 1, 100), d, 0.0));
    const auto nu = uniform_measure(gaussian(rng, draw(rng, 1, 100), d, 0.5));
    TreeSamplerConfig sc;
    sc.k = static_cast<std::size_t>(draw(rng, 1, 8));
    const TreeSystem t = sample_trees(sc, d, 1, seed.child(i).child(1)).front();
    const SplittingConfig split;
    const auto p = project(mu, t, split);
    const auto q = project(nu, t, split);
    r.metric = std::max(r.metric, std::abs(tree_wasserstein_concurrent(p, q, t) -
                                           tree_wasserstein_general(p, q, t)));
  }
  return r;
}

SuiteResult suite_gradient(const SeedSpec& seed) {
  SuiteResult r{"gradient", 0.0, 1e-4, 10};
  for (std::size_t i = 0; i < r.cases; ++i) {
    Engine rng = seed.child(i).engine();
    const Matrix X = gaussian(rng, 12, 4, 0.0);
    const auto nu = uniform_measure(gaussian(rng, 12, 4, 0.5));
    EstimatorConfig cfg;
    cfg.L = 8;
    cfg.k = 3;
    cfg.seed = seed.child(i).child(1);
    const auto trees = sample_estimator_trees(cfg, 4);
    const Vector w = Vector::Constant(12, 1.0 / 12.0);
    r.metric = std::max(
        r.metric, finite_difference_check(X, w, nu, trees, cfg.splitting, 1e-5).max_relative_error);
  }
  return r;
}

SuiteResult suite_axioms(const SeedSpec& seed) {
  SuiteResult r{"axioms", 0.0, 1e-9, 30};
  for (std::size_t i = 0; i < r.cases; ++i) {
    Engine rng = seed.child(i).engine();
    const Eigen::Index d = draw(rng, 2, 6);
    const auto a = uniform_measure(gaussian(rng, draw(rng, 2, 20), d, 0.0));
    const auto b = uniform_measure(gaussian(rng, draw(rng, 2, 20), d, 0.5));
    const auto c = uniform_measure(gaussian(rng, draw(rng, 2, 20), d, -0.5));
    EstimatorConfig cfg;
    cfg.L = 16;
    cfg.seed = seed.child(i).child(1);
    const double ab = dbtsw(a, b, cfg).value;
    const double ba = dbtsw(b, a, cfg).value;
    const double bc = dbtsw(b, c, cfg).value;
    const double ac = dbtsw(a, c, cfg).value;
    const double aa = dbtsw(a, a, cfg).value;
    r.metric = std::max({r.metric, std::abs(ab - ba), std::abs(aa), ac - (ab + bc)});
  }
  return r;
}

const std::vector<std::pair<std::string, std::function<SuiteResult(const SeedSpec&)>>>& suites() {
  static const std::vector<std::pair<std::string, std::function<SuiteResult(const SeedSpec&)>>>
      table{{"k1", suite_k1},           {"invariance", suite_invariance},
            {"oracle", suite_oracle},   {"fastpath", suite_fastpath},
            {"gradient", suite_gradient}, {"axioms", suite_axioms}};
  return table;
}

json selftest_config(const json& j, json base) {
  if (!j.is_object()) throw ConfigError("selftest config must be a JSON object");
  for (const auto& item : j.items()) {
    if (item.key() == "suite") {
      base["suite"] = item.value();
    } else if (item.key() == "seed") {
      base["seed"] = to_json(seed_from_json(item.value(), seed_from_json(base["seed"])));
    } else {
      throw ConfigError("unknown key '" + item.key() + "' in selftest config");
    }
  }
  if (!base["suite"].is_string()) throw ConfigError("--suite must be a string");
  const auto suite = base["suite"].get<std::string>();
  const bool known = suite == "all" || std::any_of(suites().begin(), suites().end(),
                                                   [&](const auto& s) { return s.first == suite; });
  if (!known) {
    throw ConfigError("unknown suite '" + suite +
                      "' (expected all, k1, invariance, oracle, fastpath, gradient, axioms)");
  }
  return base;
}

json selftest_defaults() { return {{"suite", "all"}, {"seed", {{"master", 0}, {"stream", 0}}}}; }

struct SelftestFlags {
  CommonFlags common;
  bool json_output = false;
};

}  // namespace

Command register_selftest(CLI::App& root) {
  auto flags = std::make_shared<SelftestFlags>();
  auto* sub = root.add_subcommand("selftest", "Run the built-in property suites");
  add_common(sub, flags->common);
  sub->add_flag("--json", flags->json_output, "Print machine-readable results");
  flags->common.flags.add<std::string>(
      sub, "--suite", "/suite", "all, k1, invariance, oracle, fastpath, gradient or axioms");
  add_seed_flags(sub, flags->common.flags, "");
  return {[flags] {
    json cfg = selftest_config(load_config_file(flags->common), selftest_defaults());
    cfg = selftest_config(flags->common.flags.overrides(), cfg);
    Invocation inv;
    inv.subcommand = "selftest";
    inv.config = cfg;
    inv.options = {{"json", flags->json_output}};
    inv.out_dir = flags->common.out_dir;
    return inv;
  }};
}

int execute_selftest(const Invocation& inv, Context& ctx) {
  const std::string started = now_iso8601();
  const json cfg = selftest_config(inv.config, selftest_defaults());
  const auto suite = cfg["suite"].get<std::string>();
  const SeedSpec seed = seed_from_json(cfg["seed"]);

  std::vector<SuiteResult> results;
  std::uint64_t index = 0;
  for (const auto& [name, fn] : suites()) {
    if (suite == "all" || suite == name) results.push_back(fn(seed.child(index)));
    ++index;
  }

  json out = json::array();
  const SuiteResult* first_failure = nullptr;
  for (const auto& r : results) {
    out.push_back({{"suite", r.name},
                   {"passed", r.passed()},
                   {"metric", r.metric},
                   {"tolerance", r.tolerance},
                   {"cases", r.cases}});
    if (!r.passed() && first_failure == nullptr) first_failure = &r;
  }
  const auto path = inv.out_dir / "selftest.json";
  write_json_file(out, path);
  write_manifest(inv, {{"results", path.string()}}, started);

  if (inv.options.value("json", false)) {
    ctx.out << out.dump(2) << '\n';
  } else {
    for (const auto& r : results) {
      fmt::print(ctx.out, "{:<11} {}  max {:.3e}  tol {:.1e}  cases {}\n", r.name,
                 r.passed() ? "PASS" : "FAIL", r.metric, r.tolerance, r.cases);
    }
  }
  if (first_failure != nullptr) {
    fmt::print(ctx.err, "selftest failed: {} (max {:.3e} > tol {:.1e})\n", first_failure->name,
               first_failure->metric, first_failure->tolerance);
    return 1;
  }
  return 0;
}

}  // namespace dbtsw::cli
