#pragma once

// Self-supervised recovery of a colormap and scalar field from a single
// color-mapped image: heuristic initialization, two-phase projected Adam over
// control points and field values, and dark-first canonicalization.

#include "cmr/losses.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace cmr {

enum class Direction { canonical, flipped };
enum class InitMode { luminance, random };

const char* toString(Direction d);

struct OptimizerConfig {
  double learningRate = 2e-3;
  /// Cosine decay from learningRate down to learningRate * finalLearningRateFraction.
  double finalLearningRateFraction = 5e-2;
  Index iterations = 2000;
  double adamBeta1 = 0.5;
  double adamBeta2 = 0.999;
  double adamEpsilon = 1e-8;
  /// Leading fraction of iterations that keep the anchor terms active.
  double anchorPhaseFraction = 0.5;
  Index samples = kDefaultSamples;
  Index controlPoints = kDefaultControlPoints;
  LossWeights weights;
  InitMode init = InitMode::luminance;
  std::uint64_t seed = 0;

  bool earlyStop = true;
  double convergedReconstruction = 1e-4;
  double convergedRelativeImprovement = 1e-6;
  Index convergenceWindow = 100;

  void validate() const;
};

struct RecoveryResult {
  Colormap cmap;
  ScalarField field;
  std::vector<LossReport> trace;
  bool converged = false;
  Direction direction = Direction::canonical;
};

struct Initialization {
  ControlPoints control;
  ScalarField field;
};

/// Field from min-max normalized luma. Control points start at the mean color
/// of each luma bin (empty bins interpolated from their neighbours) and are
/// then refined by a ridge-regularized least-squares fit of the curve to the
/// (luma value, pixel color) pairs, with the bin means as the ridge target.
Initialization initialize(const RgbImage& image, Index controlPoints = kDefaultControlPoints);

/// Uniform random control points and field values.
Initialization randomInitialization(Index height, Index width, Index controlPoints, std::uint64_t seed);

/// Reverses the colormap and inverts the field when c_0 is lighter than c_n.
RecoveryResult canonicalize(RecoveryResult result);

struct AdamState {
  explicit AdamState(Index size) : m(Eigen::VectorXd::Zero(size)), v(Eigen::VectorXd::Zero(size)) {}
  Index step = 0;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
};

/// One bias-corrected Adam update followed by projection onto [0,1].
void adamStep(AdamState& state, Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& gradient,
              const OptimizerConfig& config, double learningRate);

/// Learning rate used at iteration k (0-based).
double scheduledLearningRate(const OptimizerConfig& config, Index k);

class RecoveryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ProgressCallback = std::function<void(Index done, Index total)>;

RecoveryResult recover(const RgbImage& image, const OptimizerConfig& config = {},
                       const ProgressCallback& progress = {});

}  // namespace cmr
