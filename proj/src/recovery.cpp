#include "cmr/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace cmr {

namespace {
constexpr double kInitRidge = 1e-3;
}

const char* toString(Direction d) { return d == Direction::canonical ? "canonical" : "flipped"; }

void OptimizerConfig::validate() const {
  if (!(learningRate > 0)) throw std::invalid_argument("OptimizerConfig: learningRate must be > 0");
  if (!(finalLearningRateFraction > 0 && finalLearningRateFraction <= 1)) {
    throw std::invalid_argument("OptimizerConfig: finalLearningRateFraction must be in (0,1]");
  }
  if (iterations < 0) throw std::invalid_argument("OptimizerConfig: iterations must be >= 0");
  if (!(anchorPhaseFraction >= 0 && anchorPhaseFraction <= 1)) {
    throw std::invalid_argument("OptimizerConfig: anchorPhaseFraction must be in [0,1]");
  }
  if (!(adamBeta1 >= 0 && adamBeta1 < 1 && adamBeta2 >= 0 && adamBeta2 < 1 && adamEpsilon > 0)) {
    throw std::invalid_argument("OptimizerConfig: invalid Adam hyper-parameters");
  }
  if (samples < 2) throw std::invalid_argument("OptimizerConfig: samples must be >= 2");
  if (controlPoints < kDegree + 1) throw std::invalid_argument("OptimizerConfig: need at least 4 control points");
  if (convergenceWindow < 1) throw std::invalid_argument("OptimizerConfig: convergenceWindow must be >= 1");
  weights.validate();
}

Initialization initialize(const RgbImage& image, Index controlPoints) {
  if (image.empty()) throw std::invalid_argument("initialize: empty image");
  if (controlPoints < kDegree + 1) throw std::invalid_argument("initialize: need at least 4 control points");

  const Eigen::Vector3d lumaWeights(0.2126, 0.7152, 0.0722);
  const Eigen::VectorXd luma = image.pixels.matrix() * lumaWeights;
  const double lo = luma.minCoeff(), hi = luma.maxCoeff();

  Initialization init;
  init.field.resize(image.height, image.width);
  if (!(hi - lo > 1e-12)) {
    init.field.setConstant(0.5);
    const Eigen::RowVector3d mean = image.pixels.matrix().colwise().mean();
    init.control = ControlPoints(controlPoints, 3);
    init.control.rowwise() = mean;
    return init;
  }

  Eigen::Map<Eigen::VectorXd> values(init.field.data(), init.field.size());
  values = (luma.array() - lo) / (hi - lo);

  ControlPoints sums = ControlPoints::Zero(controlPoints, 3);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(controlPoints);
  for (Index p = 0; p < image.size(); ++p) {
    const auto bin = std::min<Index>(static_cast<Index>(values[p] * double(controlPoints)), controlPoints - 1);
    sums.row(bin) += image.pixels.row(p).matrix();
    counts[bin] += 1.0;
  }

  std::vector<Index> filled;
  for (Index b = 0; b < controlPoints; ++b) {
    if (counts[b] > 0) {
      sums.row(b) /= counts[b];
      filled.push_back(b);
    }
  }
  // Empty bins: linear interpolation between filled neighbours, nearest at the ends.
  init.control = sums;
  for (Index b = 0; b < controlPoints; ++b) {
    if (counts[b] > 0) continue;
    auto right = std::upper_bound(filled.begin(), filled.end(), b);
    if (right == filled.begin()) {
      init.control.row(b) = sums.row(*right);
    } else if (right == filled.end()) {
      init.control.row(b) = sums.row(filled.back());
    } else {
      const Index l = *(right - 1), r = *right;
      const double u = double(b - l) / double(r - l);
      init.control.row(b) = (1.0 - u) * sums.row(l) + u * sums.row(r);
    }
  }
  // Least-squares fit of the curve to (luma value, pixel colour) pairs, pulled
  // weakly towards the bin means so unpopulated spans stay determined.
  const KnotVector knots = clampedUniformKnots(controlPoints);
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(controlPoints, controlPoints);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(controlPoints, 3);
  for (Index p = 0; p < image.size(); ++p) {
    const LocalBasis<double> b = localBasis(values[p], knots);
    for (int a = 0; a < 4; ++a) {
      rhs.row(b.first() + a) += b.cubic[a] * image.pixels.row(p).matrix();
      for (int c = 0; c < 4; ++c) normal(b.first() + a, b.first() + c) += b.cubic[a] * b.cubic[c];
    }
  }
  const double ridge = kInitRidge * double(image.size()) / double(controlPoints);
  normal.diagonal().array() += ridge;
  rhs += ridge * init.control;
  init.control = normal.ldlt().solve(rhs);
  init.control = init.control.cwiseMax(0.0).cwiseMin(1.0);
  return init;
}

Initialization randomInitialization(Index height, Index width, Index controlPoints, std::uint64_t seed) {
  if (height < 1 || width < 1) throw std::invalid_argument("randomInitialization: empty shape");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Initialization init;
  init.control = ControlPoints(controlPoints, 3);
  for (Index i = 0; i < init.control.size(); ++i) init.control.data()[i] = unit(rng);
  init.field = ScalarField(height, width);
  for (Index i = 0; i < init.field.size(); ++i) init.field.data()[i] = unit(rng);
  return init;
}

RecoveryResult canonicalize(RecoveryResult result) {
  const ControlPoints& c = result.cmap.control();
  const double first = relativeLuminance<double>(c.row(0).transpose());
  const double last = relativeLuminance<double>(c.row(c.rows() - 1).transpose());
  if (first > last) {
    result.cmap = result.cmap.reversed();
    result.field = 1.0 - result.field;
    result.direction = result.direction == Direction::canonical ? Direction::flipped : Direction::canonical;
  }
  return result;
}

void adamStep(AdamState& state, Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& gradient,
              const OptimizerConfig& config, double learningRate) {
  if (params.size() != gradient.size() || state.m.size() != gradient.size()) {
    throw std::invalid_argument("adamStep: parameter, gradient and state sizes differ");
  }
  ++state.step;
  const double b1 = config.adamBeta1, b2 = config.adamBeta2;
  state.m = b1 * state.m + (1.0 - b1) * gradient;
  state.v = b2 * state.v + (1.0 - b2) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(b1, double(state.step));
  const double c2 = 1.0 - std::pow(b2, double(state.step));
  params.array() -= learningRate * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + config.adamEpsilon);
  params = params.cwiseMax(0.0).cwiseMin(1.0);
}

double scheduledLearningRate(const OptimizerConfig& config, Index k) {
  const double f = config.finalLearningRateFraction;
  const double progress = config.iterations > 1 ? double(k) / double(config.iterations - 1) : 0.0;
  return config.learningRate * (f + (1.0 - f) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress)));
}

namespace {

// Minimum of the objective before and within the trailing window.
class PlateauDetector {
 public:
  PlateauDetector(Index window, double tolerance) : window_(window), tolerance_(tolerance) {}

  bool push(double value) {
    values_.push_back(value);
    const auto n = static_cast<Index>(values_.size());
    if (n <= window_) return false;
    bestBefore_ = std::min(bestBefore_, values_[static_cast<std::size_t>(n - 1 - window_)]);
    const double bestRecent = *std::min_element(values_.end() - window_, values_.end());
    return bestBefore_ - bestRecent < tolerance_ * std::max(std::abs(bestBefore_), 1e-12);
  }

 private:
  Index window_;
  double tolerance_;
  double bestBefore_ = std::numeric_limits<double>::infinity();
  std::vector<double> values_;
};

}  // namespace

RecoveryResult recover(const RgbImage& image, const OptimizerConfig& config, const ProgressCallback& progress) {
  config.validate();
  if (image.empty()) throw std::invalid_argument("recover: empty image");
  if (!image.pixels.allFinite()) throw std::invalid_argument("recover: image has non-finite pixels");

  const Initialization init = config.init == InitMode::luminance
                                  ? initialize(image, config.controlPoints)
                                  : randomInitialization(image.height, image.width, config.controlPoints, config.seed);

  const Index nControl = init.control.size();
  const Index nField = init.field.size();
  Eigen::VectorXd params(nControl + nField);
  using RowMajorPoints = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
  Eigen::Map<RowMajorPoints>(params.data(), init.control.rows(), 3) = init.control;
  params.tail(nField) = Eigen::Map<const Eigen::VectorXd>(init.field.data(), nField);

  const auto unpackControl = [&] {
    return ControlPoints(Eigen::Map<const RowMajorPoints>(params.data(), init.control.rows(), 3));
  };
  const auto unpackField = [&] {
    ScalarField f(image.height, image.width);
    Eigen::Map<Eigen::VectorXd>(f.data(), nField) = params.tail(nField);
    return f;
  };

  LossAnchors anchors;
  anchors.colormap = Colormap(init.control, {}, 0).sampleRange(config.samples);
  anchors.field = init.field;

  const Index anchorIterations = std::lround(config.anchorPhaseFraction * double(config.iterations));
  LossWeights freeWeights = config.weights;
  freeWeights.gamma = 0.0;
  freeWeights.delta = 0.0;

  AdamState state(params.size());
  PlateauDetector plateau(config.convergenceWindow, config.convergedRelativeImprovement);
  RecoveryResult result{Colormap(init.control), init.field, {}, false, Direction::canonical};
  result.trace.reserve(static_cast<std::size_t>(config.iterations));

  Eigen::VectorXd gradient(params.size());
  for (Index k = 0; k < config.iterations; ++k) {
    const bool anchored = k < anchorIterations;
    const Colormap cmap(unpackControl(), {}, 0);
    const ScalarField field = unpackField();
    const LossGradient g = lossGradients(anchored ? config.weights : freeWeights, image, cmap, field, anchors,
                                         config.samples);
    const LossReport& r = g.report;
    if (!std::isfinite(r.total) || !std::isfinite(r.reconstruction) || !g.control.allFinite() ||
        !g.field.allFinite()) {
      throw RecoveryError("recover: non-finite loss or gradient at iteration " + std::to_string(k));
    }
    result.trace.push_back(r);

    if (config.earlyStop) {
      if (r.reconstruction < config.convergedReconstruction) {
        result.converged = true;
        break;
      }
      if (!anchored && plateau.push(r.total)) {
        result.converged = true;
        break;
      }
    }

    Eigen::Map<RowMajorPoints>(gradient.data(), init.control.rows(), 3) = g.control;
    gradient.tail(nField) = Eigen::Map<const Eigen::VectorXd>(g.field.data(), nField);
    adamStep(state, params, gradient, config, scheduledLearningRate(config, k));
    if (progress) progress(k + 1, config.iterations);
  }
  if (!config.earlyStop && !result.trace.empty()) {
    result.converged = result.trace.back().reconstruction < config.convergedReconstruction;
  }

  result.cmap = Colormap(unpackControl());
  result.field = unpackField();
  return canonicalize(std::move(result));
}

}  // namespace cmr
