#include "dbtsw/flows.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "dbtsw/autograd.hpp"
#include "dbtsw/error.hpp"
#include "dbtsw/exactot.hpp"
#include "dbtsw/parallel.hpp"

namespace dbtsw {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<std::size_t> sorted_order(const Vector& v) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return v(static_cast<Eigen::Index>(a)) < v(static_cast<Eigen::Index>(b));
  });
  return idx;
}

struct SlicePass {
  double value = 0.0;  // W_p^p on this direction
  Vector grad;         // d value / d projected source coordinate
};

// Quantile coupling of the projected source (weights w) and target
// (weights v), with derivatives of sum m |x - y|^p in the source coordinates.
SlicePass slice_pass(const Vector& px, const Vector& w, const Vector& py, const Vector& v,
                     double p) {
  const auto ix = sorted_order(px);
  const auto iy = sorted_order(py);
  SlicePass out;
  out.grad = Vector::Zero(px.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double rx = w(static_cast<Eigen::Index>(ix[0]));
  double ry = v(static_cast<Eigen::Index>(iy[0]));
  while (i < ix.size() && j < iy.size()) {
    const double m = std::min(rx, ry);
    const auto a = static_cast<Eigen::Index>(ix[i]);
    const auto b = static_cast<Eigen::Index>(iy[j]);
    const double diff = px(a) - py(b);
    const double gap = std::abs(diff);
    const double s = static_cast<double>((diff > 0.0) - (diff < 0.0));
    if (p == 1.0) {
      out.value += m * gap;
      out.grad(a) += m * s;
    } else {
      out.value += m * std::pow(gap, p);
      out.grad(a) += m * p * std::pow(gap, p - 1.0) * s;
    }
    rx -= m;
    ry -= m;
    if (rx <= ry) {
      if (++i < ix.size()) rx = w(static_cast<Eigen::Index>(ix[i]));
    } else {
      if (++j < iy.size()) ry = v(static_cast<Eigen::Index>(iy[j]));
    }
  }
  return out;
}

EstimateGradient sw_value_and_grad(const Matrix& X, const Vector& weights,
                                   const EmpiricalMeasure& target, const EstimatorConfig& cfg) {
  validate_estimator(cfg, X.cols());
  const Eigen::Index d = X.cols();
  std::vector<SlicePass> passes(cfg.L);
  std::vector<Vector> thetas(cfg.L);
  parallel_for(cfg.L, [&](std::size_t l) {
    thetas[l] = sample_directions(cfg.seed, l, 1, d).row(0).transpose();
    passes[l] = slice_pass(X * thetas[l], weights, target.supports() * thetas[l],
                           target.weights(), cfg.p);
  });
  EstimateGradient out;
  out.gradient = Matrix::Zero(X.rows(), d);
  double mean_pow = 0.0;
  for (std::size_t l = 0; l < cfg.L; ++l) {
    mean_pow += passes[l].value;
    out.gradient += passes[l].grad * thetas[l].transpose();
  }
  const double inv_l = 1.0 / static_cast<double>(cfg.L);
  mean_pow *= inv_l;
  out.gradient *= inv_l;
  if (cfg.p == 1.0) {
    out.value = mean_pow;
  } else {
    out.value = std::pow(mean_pow, 1.0 / cfg.p);
    const double outer = mean_pow > 0.0 ? out.value / (cfg.p * mean_pow) : 0.0;
    out.gradient *= outer;
  }
  return out;
}

using Clock = std::chrono::steady_clock;

}  // namespace

std::string to_string(Optimizer o) { return o == Optimizer::Adam ? "adam" : "sgd"; }

Optimizer parse_optimizer(const std::string& name) {
  if (name == "sgd") return Optimizer::Sgd;
  if (name == "adam") return Optimizer::Adam;
  throw ConfigError("unknown optimizer '" + name + "' (expected sgd, adam)");
}

EmpiricalMeasure swiss_roll(std::size_t n, double noise, const SeedSpec& seed) {
  if (n < 1) throw ConfigError("swiss roll needs n >= 1");
  if (!(noise >= 0.0)) throw ConfigError("swiss roll noise must be >= 0");
  Engine rng = seed.engine();
  constexpr double pi = std::numbers::pi;
  Matrix pts(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const double phi = uniform(rng, 1.5 * pi, 4.5 * pi);
    pts(i, 0) = phi * std::cos(phi) / (4.5 * pi);
    pts(i, 1) = phi * std::sin(phi) / (4.5 * pi);
    if (noise > 0.0) {
      pts(i, 0) += noise * standard_normal(rng);
      pts(i, 1) += noise * standard_normal(rng);
    }
  }
  return uniform_measure(std::move(pts));
}

EmpiricalMeasure gaussians_25(std::size_t n, const SeedSpec& seed) {
  if (n < 1) throw ConfigError("25 gaussians needs n >= 1");
  Engine rng = seed.engine();
  Matrix pts(static_cast<Eigen::Index>(n), 2);
  // Components are assigned round-robin so every mode is populated once n >= 25.
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const auto c = static_cast<int>(i % 25);
    pts(i, 0) = -4.0 + 2.0 * (c / 5) + 0.05 * standard_normal(rng);
    pts(i, 1) = -4.0 + 2.0 * (c % 5) + 0.05 * standard_normal(rng);
  }
  return uniform_measure(std::move(pts));
}

EmpiricalMeasure gaussian_shift(std::size_t n, const Vector& mean, const SeedSpec& seed) {
  if (n < 1) throw ConfigError("gaussian needs n >= 1");
  if (mean.size() < 1) throw ConfigError("gaussian mean must be non-empty");
  Engine rng = seed.engine();
  Matrix pts(static_cast<Eigen::Index>(n), mean.size());
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (Eigen::Index c = 0; c < pts.cols(); ++c) pts(i, c) = mean(c) + standard_normal(rng);
  }
  return uniform_measure(std::move(pts));
}

std::string dataset_name(const FlowDataset& ds) {
  return std::visit(Overloaded{[](const SwissRollData&) { return std::string("swiss-roll"); },
                               [](const Gaussians25Data&) { return std::string("gaussians-25"); },
                               [](const GaussianShiftData&) { return std::string("gaussian-shift"); }},
                    ds);
}

std::size_t dataset_dim(const FlowDataset& ds) {
  return std::visit(Overloaded{[](const SwissRollData&) { return std::size_t{2}; },
                               [](const Gaussians25Data&) { return std::size_t{2}; },
                               [](const GaussianShiftData& g) { return g.d; }},
                    ds);
}

std::size_t dataset_size(const FlowDataset& ds) {
  return std::visit([](const auto& d) { return d.n; }, ds);
}

void validate_flow(const FlowConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw ConfigError("learning rate must be a finite value > 0");
  }
  if (cfg.eval_stride < 1) throw ConfigError("evaluation stride must be >= 1");
  if (!(cfg.divergence_factor > 1.0)) throw ConfigError("divergence factor must be > 1");
  if (dataset_size(cfg.dataset) < 1) throw ConfigError("dataset size must be >= 1");
  const auto d = dataset_dim(cfg.dataset);
  if (d < 1) throw ConfigError("dataset dimension must be >= 1");
  if (cfg.distance.variant == Variant::TSWSLChain) {
    throw ConfigError("flows need a differentiable variant (dbtsw, dbtsw-orth, sw)");
  }
  validate_estimator(cfg.distance, static_cast<Eigen::Index>(d));
}

EmpiricalMeasure flow_target(const FlowConfig& cfg) {
  const SeedSpec s = cfg.seed.child(0);
  return std::visit(
      Overloaded{[&](const SwissRollData& d) { return swiss_roll(d.n, d.noise, s); },
                 [&](const Gaussians25Data& d) { return gaussians_25(d.n, s); },
                 [&](const GaussianShiftData& d) {
                   return gaussian_shift(
                       d.n, Vector::Constant(static_cast<Eigen::Index>(d.d), d.shift), s);
                 }},
      cfg.dataset);
}

Matrix flow_initial_source(const FlowConfig& cfg) {
  const auto d = static_cast<Eigen::Index>(dataset_dim(cfg.dataset));
  return gaussian_shift(dataset_size(cfg.dataset), Vector::Zero(d), cfg.seed.child(1))
      .supports();
}

EstimatorConfig flow_estimator(const FlowConfig& cfg, const EmpiricalMeasure& target) {
  EstimatorConfig ec = cfg.distance;
  if (!cfg.center_roots) return ec;
  const Vector mean = target.supports().transpose() * target.weights();
  if (auto* cube = std::get_if<UniformCube>(&ec.sampler.root); cube && cube->center.size() == 0) {
    cube->center = mean;
  } else if (auto* g = std::get_if<GaussianRoot>(&ec.sampler.root); g && g->mean.size() == 0) {
    g->mean = mean;
  }
  return ec;
}

EstimateGradient estimate_value_and_grad(const Matrix& X, const Vector& weights,
                                         const EmpiricalMeasure& target,
                                         const EstimatorConfig& cfg) {
  if (X.cols() != target.dim()) throw DimensionError("source and target dimensions differ");
  if (weights.size() != X.rows()) throw DimensionError("weight count does not match supports");
  switch (cfg.variant) {
    case Variant::SW:
      return sw_value_and_grad(X, weights, target, cfg);
    case Variant::TSWSLChain:
      throw StructureError("chain systems have no gradient path");
    case Variant::DbTSW:
    case Variant::DbTSWOrth:
      break;
  }
  const auto trees = sample_estimator_trees(cfg, X.cols());
  const GradientReport g = dbtsw_value_and_grad(X, weights, target, trees, cfg.splitting);
  return {g.gradient, g.value};
}

FlowTrace run_flow(const FlowConfig& cfg) {
  validate_flow(cfg);
  const auto start = Clock::now();
  const EmpiricalMeasure target = flow_target(cfg);
  Matrix X = flow_initial_source(cfg);
  const Vector weights = Vector::Constant(X.rows(), 1.0 / static_cast<double>(X.rows()));
  const SeedSpec step_seeds = cfg.seed.child(2);
  const EstimatorConfig base = flow_estimator(cfg, target);
  Matrix m1;
  Matrix m2;
  if (cfg.optimizer == Optimizer::Adam) {
    m1 = Matrix::Zero(X.rows(), X.cols());
    m2 = Matrix::Zero(X.rows(), X.cols());
  }
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;

  FlowTrace trace;
  trace.dataset = dataset_name(cfg.dataset);
  double w2_initial = 0.0;
  for (std::size_t it = 0; it <= cfg.iterations; ++it) {
    const bool record = it % cfg.eval_stride == 0 || it == cfg.iterations;
    EstimatorConfig ec = base;
    ec.seed = step_seeds.child(it);
    const EstimateGradient eg = estimate_value_and_grad(X, weights, target, ec);
    if (record) {
      const double w2 = exact_wp_assignment(X, target.supports(), 2.0);
      if (it == 0) w2_initial = w2;
      if (!std::isfinite(w2) || w2 > cfg.divergence_factor * w2_initial) {
        throw DivergenceError("flow diverged at iteration " + std::to_string(it) +
                              ": exact W2 " + std::to_string(w2) + " vs initial " +
                              std::to_string(w2_initial));
      }
      trace.records.push_back(
          {it, w2, eg.value, std::chrono::duration<double>(Clock::now() - start).count()});
    }
    if (it == cfg.iterations) break;
    Matrix velocity = eg.gradient;
    for (Eigen::Index i = 0; i < X.rows(); ++i) velocity.row(i) /= weights(i);
    if (cfg.optimizer == Optimizer::Sgd) {
      X -= cfg.learning_rate * velocity;
    } else {
      constexpr double beta1 = 0.9;
      constexpr double beta2 = 0.999;
      constexpr double eps = 1e-8;
      beta1_pow *= beta1;
      beta2_pow *= beta2;
      m1 = beta1 * m1 + (1.0 - beta1) * velocity;
      m2 = beta2 * m2 + (1.0 - beta2) * velocity.cwiseProduct(velocity);
      const auto mhat = m1.array() / (1.0 - beta1_pow);
      const auto vhat = m2.array() / (1.0 - beta2_pow);
      X.array() -= cfg.learning_rate * mhat / (vhat.sqrt() + eps);
    }
    if (!X.allFinite()) {
      throw DivergenceError("flow produced non-finite positions at iteration " +
                            std::to_string(it + 1));
    }
  }
  trace.final_source = std::move(X);
  return trace;
}

void write_flow_csv(const FlowTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.precision(17);
  out << "iteration,w2,estimate,seconds\n";
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << r.w2 << ',' << r.estimate << ',' << r.seconds << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace dbtsw
