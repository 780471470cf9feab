#include "dbtsw/colortransfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dbtsw/error.hpp"
#include "dbtsw/flows.hpp"
#include "dbtsw/parallel.hpp"

namespace dbtsw {

namespace {

constexpr std::size_t kMaxLloydIterations = 50;
constexpr double kMoveTolerance = 1e-3;

// Index of the nearest centroid; ties go to the lowest index.
std::size_t nearest(const Matrix& centroids, const double* x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double a = centroids(c, 0) - x[0];
    const double b = centroids(c, 1) - x[1];
    const double e = centroids(c, 2) - x[2];
    const double dd = a * a + b * b + e * e;
    if (dd < best_d) {
      best_d = dd;
      best = static_cast<std::size_t>(c);
    }
  }
  return best;
}

EstimatorConfig transfer_estimator(const TransferConfig& cfg, const SeedSpec& seed) {
  EstimatorConfig ec;
  ec.variant = cfg.variant;
  ec.L = cfg.L;
  ec.k = cfg.k;
  ec.splitting = cfg.splitting;
  ec.sampler.root = color_root_distribution();
  ec.seed = seed;
  return ec;
}

void round_and_clamp(Matrix& z) {
  z = z.array().round().max(0.0).min(255.0).matrix();
}

}  // namespace

Vector Palette::weights() const {
  Vector w(static_cast<Eigen::Index>(counts.size()));
  double total = 0.0;
  for (std::size_t c : counts) total += static_cast<double>(c);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    w(static_cast<Eigen::Index>(i)) = static_cast<double>(counts[i]) / total;
  }
  return w;
}

Matrix image_pixels(const RgbImage& image) {
  if (image.pixels.size() != image.pixel_count() * 3) {
    throw DimensionError("image buffer does not match its width and height");
  }
  Matrix px(static_cast<Eigen::Index>(image.pixel_count()), 3);
  for (Eigen::Index i = 0; i < px.rows(); ++i) {
    for (Eigen::Index c = 0; c < 3; ++c) {
      px(i, c) = image.pixels[static_cast<std::size_t>(3 * i + c)];
    }
  }
  return px;
}

Palette kmeans_palette(const Matrix& pixels, std::size_t c, const SeedSpec& seed) {
  if (pixels.cols() != 3) throw DimensionError("pixels must have 3 columns");
  const auto n = static_cast<std::size_t>(pixels.rows());
  if (c == 0) throw ConfigError("palette size must be >= 1");
  if (c > n) {
    throw ConfigError("palette size " + std::to_string(c) + " exceeds pixel count " +
                      std::to_string(n));
  }

  // Seeded farthest-point initialization.
  Matrix centroids(static_cast<Eigen::Index>(c), 3);
  Engine rng = seed.engine();
  auto first = static_cast<Eigen::Index>(rng() % n);
  centroids.row(0) = pixels.row(first);
  std::vector<double> min_d(n);
  for (std::size_t i = 0; i < n; ++i) {
    min_d[i] = (pixels.row(static_cast<Eigen::Index>(i)) - centroids.row(0)).squaredNorm();
  }
  for (std::size_t k = 1; k < c; ++k) {
    const auto far = static_cast<Eigen::Index>(
        std::max_element(min_d.begin(), min_d.end()) - min_d.begin());
    centroids.row(static_cast<Eigen::Index>(k)) = pixels.row(far);
    for (std::size_t i = 0; i < n; ++i) {
      const double dd =
          (pixels.row(static_cast<Eigen::Index>(i)) - centroids.row(static_cast<Eigen::Index>(k)))
              .squaredNorm();
      min_d[i] = std::min(min_d[i], dd);
    }
  }

  Palette pal;
  pal.assignment.assign(n, 0);
  const Matrix& px = pixels;
  for (std::size_t iter = 0; iter < kMaxLloydIterations; ++iter) {
    const std::size_t blocks = 64;
    parallel_for(blocks, [&](std::size_t b) {
      const std::size_t lo = n * b / blocks;
      const std::size_t hi = n * (b + 1) / blocks;
      double row[3];
      for (std::size_t i = lo; i < hi; ++i) {
        for (int e = 0; e < 3; ++e) row[e] = px(static_cast<Eigen::Index>(i), e);
        pal.assignment[i] = nearest(centroids, row);
      }
    });
    Matrix sums = Matrix::Zero(static_cast<Eigen::Index>(c), 3);
    std::vector<std::size_t> counts(c, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(pal.assignment[i])) += px.row(static_cast<Eigen::Index>(i));
      ++counts[pal.assignment[i]];
    }
    double moved = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      if (counts[k] == 0) continue;  // empty cluster keeps its centroid
      const auto r = static_cast<Eigen::Index>(k);
      const RowVector next = sums.row(r) / static_cast<double>(counts[k]);
      moved = std::max(moved, (next - centroids.row(r)).norm());
      centroids.row(r) = next;
    }
    pal.counts = std::move(counts);
    if (moved < kMoveTolerance) break;
  }
  pal.colors = std::move(centroids);
  return pal;
}

RootDistribution color_root_distribution() {
  return UniformCube{127.5, Vector::Constant(3, 127.5)};
}

double palette_distance(const Matrix& colors_a, const Vector& weights_a,
                        const Matrix& colors_b, const Vector& weights_b,
                        const TransferConfig& cfg, const SeedSpec& seed) {
  const EmpiricalMeasure a = make_measure(colors_a, weights_a);
  const EmpiricalMeasure b = make_measure(colors_b, weights_b);
  return estimate(a, b, transfer_estimator(cfg, seed)).value;
}

TransferResult transfer_curve(const Palette& source, const Palette& target,
                              const TransferConfig& cfg) {
  if (source.colors.cols() != 3 || target.colors.cols() != 3) {
    throw DimensionError("palettes must be RGB (3 columns)");
  }
  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) throw ConfigError("step must be > 0");
  if (!(cfg.rounding_fraction >= 0.0 && cfg.rounding_fraction <= 1.0)) {
    throw ConfigError("rounding fraction must lie in [0, 1]");
  }
  if (cfg.variant != Variant::DbTSW && cfg.variant != Variant::DbTSWOrth &&
      cfg.variant != Variant::SW) {
    throw ConfigError("color transfer needs a differentiable variant (dbtsw, dbtsw-orth, sw)");
  }
  if (!(cfg.divergence_factor > 1.0)) throw ConfigError("divergence factor must be > 1");

  const Vector w = source.weights();
  const EmpiricalMeasure tgt = make_measure(target.colors, target.weights());
  const auto rounding_iters = static_cast<std::size_t>(
      std::ceil(cfg.rounding_fraction * static_cast<double>(cfg.iterations)));
  const std::size_t rounding_start = cfg.iterations - std::min(rounding_iters, cfg.iterations);

  TransferResult res;
  res.palette = source;
  Matrix& z = res.palette.colors;
  double initial = 0.0;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const EstimatorConfig ec = transfer_estimator(cfg, cfg.seed.child(it));
    const EstimateGradient g = estimate_value_and_grad(z, w, tgt, ec);
    if (it == 0) initial = g.value;
    if (!std::isfinite(g.value) || g.value > cfg.divergence_factor * initial + 1e-300) {
      throw DivergenceError("color transfer diverged at iteration " + std::to_string(it));
    }
    if (cfg.record_stride > 0 && it % cfg.record_stride == 0) res.estimates.emplace_back(it, g.value);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      if (w(i) > 0.0) z.row(i) -= (cfg.step / w(i)) * g.gradient.row(i);
    }
    if (!z.allFinite()) {
      throw DivergenceError("color transfer produced non-finite colors at iteration " +
                            std::to_string(it));
    }
    if (it >= rounding_start) round_and_clamp(z);
  }
  round_and_clamp(z);
  if (cfg.record_stride > 0) {
    const EstimatorConfig ec = transfer_estimator(cfg, cfg.seed.child(cfg.iterations));
    res.estimates.emplace_back(cfg.iterations,
                               estimate_value_and_grad(z, w, tgt, ec).value);
  }
  return res;
}

RgbImage recolor(const RgbImage& image, const Palette& palette) {
  if (palette.assignment.size() != image.pixel_count()) {
    throw DimensionError("palette assignment length does not match the image");
  }
  if (palette.colors.cols() != 3) throw DimensionError("palette must be RGB");
  RgbImage out = image;
  const auto c = static_cast<std::size_t>(palette.size());
  for (std::size_t i = 0; i < palette.assignment.size(); ++i) {
    const std::size_t k = palette.assignment[i];
    if (k >= c) {
      throw IndexError("pixel " + std::to_string(i) + " maps to palette entry " +
                       std::to_string(k) + " of " + std::to_string(c));
    }
    for (int e = 0; e < 3; ++e) {
      const double v = std::clamp(std::round(palette.colors(static_cast<Eigen::Index>(k), e)), 0.0, 255.0);
      out.pixels[3 * i + static_cast<std::size_t>(e)] = static_cast<std::uint8_t>(v);
    }
  }
  return out;
}

}  // namespace dbtsw
