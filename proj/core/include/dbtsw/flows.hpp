#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dbtsw/estimators.hpp"
#include "dbtsw/measure.hpp"
#include "dbtsw/rng.hpp"

namespace dbtsw {

/// 2-D spiral: phi ~ U[1.5 pi, 4.5 pi], point (phi cos phi, phi sin phi)/(4.5 pi)
/// plus isotropic N(0, noise^2) jitter; uniform weights.
EmpiricalMeasure swiss_roll(std::size_t n, double noise, const SeedSpec& seed);

/// Equal-weight mixture of 25 Gaussians (stddev 0.05) centred on {-4,-2,0,2,4}^2.
EmpiricalMeasure gaussians_25(std::size_t n, const SeedSpec& seed);

/// N(mean, I) in dimension mean.size().
EmpiricalMeasure gaussian_shift(std::size_t n, const Vector& mean, const SeedSpec& seed);

struct SwissRollData {
  std::size_t n = 100;
  double noise = 0.0;
};
struct Gaussians25Data {
  std::size_t n = 100;
};
/// Target N(m*, I) in dimension d with m* = shift * (1, ..., 1).
struct GaussianShiftData {
  std::size_t d = 20;
  std::size_t n = 100;
  double shift = 4.0;
};
using FlowDataset = std::variant<SwissRollData, Gaussians25Data, GaussianShiftData>;

std::string dataset_name(const FlowDataset& ds);
std::size_t dataset_dim(const FlowDataset& ds);
std::size_t dataset_size(const FlowDataset& ds);

/// Update rule for the particle positions. Sgd is explicit Euler on the
/// particle velocity; Adam applies the standard bias-corrected moment
/// estimates (beta1 = 0.9, beta2 = 0.999, eps = 1e-8) to the same velocity.
enum class Optimizer { Sgd, Adam };
std::string to_string(Optimizer o);
/// Accepts sgd, adam. Throws ConfigError otherwise.
Optimizer parse_optimizer(const std::string& name);

struct FlowConfig {
  EstimatorConfig distance{};
  double learning_rate = 5e-3;
  Optimizer optimizer = Optimizer::Adam;
  /// Centre the root distribution on the target mean when the configured
  /// cube (or Gaussian) has no explicit centre.
  bool center_roots = true;
  std::size_t iterations = 2500;
  std::size_t eval_stride = 100;
  FlowDataset dataset = SwissRollData{};
  SeedSpec seed{};
  /// Abort once exact W2 exceeds this multiple of its initial value.
  double divergence_factor = 10.0;
};

struct FlowRecord {
  std::size_t iteration = 0;
  double w2 = 0.0;
  double estimate = 0.0;
  double seconds = 0.0;
};

struct FlowTrace {
  std::vector<FlowRecord> records;
  Matrix final_source;
  std::string dataset;
};

/// Throws ConfigError on lr <= 0, stride == 0, or a dimension mismatch.
void validate_flow(const FlowConfig& cfg);

/// Target measure of the configured dataset (stream 0 of cfg.seed).
EmpiricalMeasure flow_target(const FlowConfig& cfg);
/// Initial source N(0, I), same size and dimension as the target.
Matrix flow_initial_source(const FlowConfig& cfg);
/// cfg.distance with roots centred on the target mean when requested.
EstimatorConfig flow_estimator(const FlowConfig& cfg, const EmpiricalMeasure& target);

/// Descent on the particle positions along v_i = (dV/dx_i) / w_i, where V
/// is the configured estimate against the target on trees (or directions)
/// resampled every iteration. Dividing by w_i turns the Euclidean gradient
/// into the particle velocity of the Wasserstein gradient flow. With Sgd the
/// step is x_i <- x_i - lr * v_i. Exact W2 and the estimate are logged at iteration 0, every
/// `eval_stride` iterations, and at the last iteration.
/// Throws DivergenceError when exact W2 grows past divergence_factor times
/// its initial value.
FlowTrace run_flow(const FlowConfig& cfg);

/// Euclidean gradient and value of the sliced estimate, for any variant.
/// Db-TSW variants differentiate on concurrent trees; SW uses the quantile
/// coupling; chains are not differentiable here (StructureError).
struct EstimateGradient {
  Matrix gradient;
  double value = 0.0;
};
EstimateGradient estimate_value_and_grad(const Matrix& X, const Vector& weights,
                                         const EmpiricalMeasure& target,
                                         const EstimatorConfig& cfg);

void write_flow_csv(const FlowTrace& trace, const std::filesystem::path& path);

}  // namespace dbtsw
