#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "dbtsw/estimators.hpp"
#include "dbtsw/image_io.hpp"
#include "dbtsw/rng.hpp"
#include "dbtsw/types.hpp"

namespace dbtsw {

/// Quantized colors of an image.
struct Palette {
  Matrix colors;                     // c x 3, RGB in [0, 255]
  std::vector<std::size_t> counts;   // pixels per color
  std::vector<std::size_t> assignment;  // palette index per pixel

  [[nodiscard]] Eigen::Index size() const noexcept { return colors.rows(); }
  /// counts / total, the weights of the palette measure.
  [[nodiscard]] Vector weights() const;
};

/// N x 3 matrix of pixel colors as doubles.
Matrix image_pixels(const RgbImage& image);

/// Lloyd's k-means with seeded farthest-point initialization. Stops after 50
/// iterations or when no centroid moves more than 1e-3. Empty clusters keep
/// their previous centroid. Throws ConfigError when c == 0 or c > N.
Palette kmeans_palette(const Matrix& pixels, std::size_t c, const SeedSpec& seed);

struct TransferConfig {
  std::size_t iterations = 2000;
  double step = 17.0;
  std::size_t L = 33;
  std::size_t k = 3;
  SplittingConfig splitting{};
  Variant variant = Variant::DbTSW;
  /// Fraction of final iterations that round and clamp after every step.
  double rounding_fraction = 0.1;
  SeedSpec seed{};
  /// Record the estimate every `record_stride` iterations (0 disables).
  std::size_t record_stride = 10;
  double divergence_factor = 10.0;
};

struct TransferResult {
  Palette palette;  // source palette with transported colors
  std::vector<std::pair<std::size_t, double>> estimates;  // (iteration, Db-TSW)
};

/// Root box of the sampled trees: centred on the colour cube.
RootDistribution color_root_distribution();

/// Euler steps Z <- Z - step * (dV/dz_i) / w_i of the Db-TSW estimate between
/// the count-weighted palettes, starting from Z = X and resampling trees
/// every step. During the last `rounding_fraction` of the iterations Z is
/// rounded to integers and clamped to [0, 255] after each step; the result
/// is always integral and in range. Throws DivergenceError if the estimate
/// grows past divergence_factor times its initial value.
TransferResult transfer_curve(const Palette& source, const Palette& target,
                              const TransferConfig& cfg);

/// Db-TSW between two palettes on trees drawn from `seed`.
double palette_distance(const Matrix& colors_a, const Vector& weights_a,
                        const Matrix& colors_b, const Vector& weights_b,
                        const TransferConfig& cfg, const SeedSpec& seed);

/// Replaces each pixel by its cluster's palette color (rounded, clamped).
/// Throws IndexError for assignments outside the palette and DimensionError
/// when the assignment length does not match the image.
RgbImage recolor(const RgbImage& image, const Palette& palette);

}  // namespace dbtsw
