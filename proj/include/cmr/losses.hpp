#pragma once

// Reconstruction, data fidelity, color fidelity and color order losses, their
// weighted total, and its exact gradient with respect to control points and
// field values.

#include "cmr/colormapping.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cmr {

/// Guard inside the square root of the Euclidean-distance gradients.
inline constexpr double kNormGuard = 1e-12;

struct LossWeights {
  double alpha = 1.0;  // reconstruction
  double gamma = 1.0;  // data fidelity
  double delta = 1.0;  // color fidelity
  double eta = 1.0;    // color order

  void validate() const {
    if (!(alpha >= 0 && gamma >= 0 && delta >= 0 && eta >= 0)) {
      throw std::invalid_argument("LossWeights: weights must be non-negative");
    }
  }
  LossWeights scaled(double k) const { return {alpha * k, gamma * k, delta * k, eta * k}; }
};

struct LossReport {
  double reconstruction = 0.0;
  double dataFidelity = 0.0;
  double colorFidelity = 0.0;
  double colorOrder = 0.0;
  double total = 0.0;
};

inline LossReport totalLoss(const LossWeights& w, LossReport parts) {
  parts.total = w.alpha * parts.reconstruction + w.gamma * parts.dataFidelity + w.delta * parts.colorFidelity +
                w.eta * parts.colorOrder;
  return parts;
}

namespace detail {

template <typename Scalar>
struct SampledCurve {
  std::vector<LocalBasis<Scalar>> basis;
  ColorTableT<Scalar> colors;
};

template <typename Scalar>
SampledCurve<Scalar> sampleCurve(const ColormapT<Scalar>& cmap, Index m) {
  if (m < 2) throw std::invalid_argument("colormap losses: need m >= 2 samples");
  SampledCurve<Scalar> s;
  s.basis.reserve(static_cast<std::size_t>(m));
  s.colors.resize(m, 3);
  for (Index k = 0; k < m; ++k) {
    s.basis.push_back(localBasis(ColormapT<Scalar>::template sampleParameter<Scalar>(k, m), cmap.knots()));
    s.colors.row(k) = cmap.valueAt(s.basis.back()).transpose();
  }
  return s;
}

template <typename Scalar>
void scatter(ControlPointsT<Scalar>& grad, const LocalBasis<Scalar>& b, const Eigen::Matrix<Scalar, 1, 3>& g) {
  for (int k = 0; k < 4; ++k) grad.row(b.first() + k) += b.cubic[k] * g;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 1, 3> unitDirection(const Eigen::Matrix<Scalar, 1, 3>& d) {
  return d / std::sqrt(d.squaredNorm() + Scalar(kNormGuard));
}

}  // namespace detail

/// (1/m) sum_k ||reference_k - S(t_k)|| with t_k = k / (m-1), m = reference rows.
template <typename Scalar>
Scalar colorFidelityLoss(const ColormapT<Scalar>& recovered, const ColorTableT<Scalar>& reference) {
  if (reference.rows() == 0) throw std::invalid_argument("colorFidelityLoss: empty reference");
  const ColorTableT<Scalar> samples = recovered.sampleRange(reference.rows());
  return (reference - samples).rowwise().norm().sum() / Scalar(reference.rows());
}

template <typename Scalar>
ControlPointsT<Scalar> colorFidelityGradient(const ColormapT<Scalar>& recovered,
                                             const ColorTableT<Scalar>& reference) {
  if (reference.rows() == 0) throw std::invalid_argument("colorFidelityLoss: empty reference");
  const Index m = reference.rows();
  const auto curve = detail::sampleCurve(recovered, m);
  ControlPointsT<Scalar> grad = ControlPointsT<Scalar>::Zero(recovered.size(), 3);
  for (Index k = 0; k < m; ++k) {
    const Eigen::Matrix<Scalar, 1, 3> d = curve.colors.row(k) - reference.row(k);
    const Eigen::Matrix<Scalar, 1, 3> g = detail::unitDirection(d) / Scalar(m);
    detail::scatter(grad, curve.basis[static_cast<std::size_t>(k)], g);
  }
  return grad;
}

template <typename Scalar>
struct OrderLossDetail {
  Scalar value = 0;
  Index i = 0;  // minimizing pair, i < j, 0-based sample indices
  Index j = 1;
  Scalar minRatio = 0;
  Scalar runnerUpRatio = std::numeric_limits<Scalar>::infinity();
};

/// -min_{i != j} ||S(t_i) - S(t_j)|| / (i - j)^2 over all m(m-1)/2 pairs.
/// Ties resolve to the lexicographically smallest (i, j).
template <typename Scalar>
OrderLossDetail<Scalar> colorOrderDetail(const ColorTableT<Scalar>& samples) {
  const Index m = samples.rows();
  if (m < 2) throw std::invalid_argument("colorOrderLoss: need m >= 2 samples");
  OrderLossDetail<Scalar> out;
  out.minRatio = std::numeric_limits<Scalar>::infinity();
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      const Scalar gap = Scalar(j - i);
      const Scalar ratio = (samples.row(i) - samples.row(j)).norm() / (gap * gap);
      if (ratio < out.minRatio) {
        out.runnerUpRatio = out.minRatio;
        out.minRatio = ratio;
        out.i = i;
        out.j = j;
      } else if (ratio < out.runnerUpRatio) {
        out.runnerUpRatio = ratio;
      }
    }
  }
  out.value = -out.minRatio;
  return out;
}

template <typename Scalar>
Scalar colorOrderLoss(const ColormapT<Scalar>& cmap, Index m = kDefaultSamples) {
  return colorOrderDetail<Scalar>(cmap.sampleRange(m)).value;
}

/// Subgradient of the order loss through the achieved minimizing pair.
template <typename Scalar>
ControlPointsT<Scalar> colorOrderGradient(const ColormapT<Scalar>& cmap, Index m = kDefaultSamples) {
  const auto curve = detail::sampleCurve(cmap, m);
  const auto best = colorOrderDetail<Scalar>(curve.colors);
  ControlPointsT<Scalar> grad = ControlPointsT<Scalar>::Zero(cmap.size(), 3);
  const Scalar gap = Scalar(best.j - best.i);
  const Eigen::Matrix<Scalar, 1, 3> d = curve.colors.row(best.i) - curve.colors.row(best.j);
  const Eigen::Matrix<Scalar, 1, 3> g = -detail::unitDirection(d) / (gap * gap);
  detail::scatter(grad, curve.basis[static_cast<std::size_t>(best.i)], g);
  detail::scatter(grad, curve.basis[static_cast<std::size_t>(best.j)], Eigen::Matrix<Scalar, 1, 3>(-g));
  return grad;
}

/// mean of squared value differences.
template <typename Scalar>
Scalar dataFidelityLoss(const ScalarFieldT<Scalar>& recovered, const ScalarFieldT<Scalar>& reference) {
  if (recovered.rows() != reference.rows() || recovered.cols() != reference.cols()) {
    throw std::invalid_argument("dataFidelityLoss: field dimensions differ");
  }
  if (recovered.size() == 0) throw std::invalid_argument("dataFidelityLoss: empty field");
  return (recovered - reference).square().mean();
}

/// mean over pixels of the (non-squared) Euclidean RGB distance.
template <typename Scalar>
Scalar reconstructionLoss(const RgbImageT<Scalar>& input, const RgbImageT<Scalar>& reconstructed) {
  if (!input.sameShape(reconstructed)) throw std::invalid_argument("reconstructionLoss: image dimensions differ");
  if (input.empty()) throw std::invalid_argument("reconstructionLoss: empty image");
  return (input.pixels - reconstructed.pixels).matrix().rowwise().norm().mean();
}

/// Targets for the color and data fidelity terms.
template <typename Scalar>
struct LossAnchorsT {
  std::optional<ColorTableT<Scalar>> colormap;
  std::optional<ScalarFieldT<Scalar>> field;
};
using LossAnchors = LossAnchorsT<double>;

template <typename Scalar>
struct LossGradientT {
  LossReport report;
  ControlPointsT<Scalar> control;
  ScalarFieldT<Scalar> field;
};
using LossGradient = LossGradientT<double>;

/// Evaluates every loss term and the gradient of the weighted total.
/// A term whose weight is 0 contributes nothing; a positive weight on an
/// anchored term requires the anchor.
template <typename Scalar>
LossGradientT<Scalar> lossGradients(const LossWeights& weights, const RgbImageT<Scalar>& input,
                                    const ColormapT<Scalar>& cmap, const ScalarFieldT<Scalar>& field,
                                    const LossAnchorsT<Scalar>& anchors, Index m = kDefaultSamples) {
  weights.validate();
  if (input.height != field.rows() || input.width != field.cols()) {
    throw std::invalid_argument("lossGradients: image and field dimensions differ");
  }
  if (field.size() == 0) throw std::invalid_argument("lossGradients: empty field");
  const Scalar alpha(weights.alpha), gamma(weights.gamma), delta(weights.delta), eta(weights.eta);
  const Scalar pixels = Scalar(field.size());

  LossGradientT<Scalar> out;
  out.control = ControlPointsT<Scalar>::Zero(cmap.size(), 3);
  out.field = ScalarFieldT<Scalar>::Zero(field.rows(), field.cols());

  // Reconstruction through the colormapping adjoint.
  const RgbImageT<Scalar> recon = render(field, cmap);
  RgbImageT<Scalar> upstream(field.rows(), field.cols());
  Scalar recLoss(0);
  for (Index p = 0; p < field.size(); ++p) {
    const Eigen::Matrix<Scalar, 1, 3> d = (recon.pixels.row(p) - input.pixels.row(p)).matrix();
    recLoss += d.norm();
    upstream.pixels.row(p) = (alpha / pixels * detail::unitDirection(d)).array();
  }
  out.report.reconstruction = double(recLoss / pixels);
  if (alpha > Scalar(0)) {
    RenderGradient<Scalar> rg = renderAdjoint(field, cmap, upstream);
    out.control += rg.control;
    out.field += rg.field;
  }

  if (anchors.field) {
    const ScalarFieldT<Scalar>& ref = *anchors.field;
    out.report.dataFidelity = double(dataFidelityLoss(field, ref));
    if (gamma > Scalar(0)) out.field += gamma * Scalar(2) / pixels * (field - ref);
  } else if (gamma > Scalar(0)) {
    throw std::invalid_argument("lossGradients: data fidelity weight set without a field anchor");
  }

  const auto curve = detail::sampleCurve(cmap, m);
  if (anchors.colormap) {
    const ColorTableT<Scalar>& ref = *anchors.colormap;
    if (ref.rows() != m) throw std::invalid_argument("lossGradients: colormap anchor must have m samples");
    Scalar cLoss(0);
    for (Index k = 0; k < m; ++k) {
      const Eigen::Matrix<Scalar, 1, 3> d = curve.colors.row(k) - ref.row(k);
      cLoss += d.norm();
      if (delta > Scalar(0)) {
        detail::scatter(out.control, curve.basis[static_cast<std::size_t>(k)],
                        Eigen::Matrix<Scalar, 1, 3>(delta / Scalar(m) * detail::unitDirection(d)));
      }
    }
    out.report.colorFidelity = double(cLoss / Scalar(m));
  } else if (delta > Scalar(0)) {
    throw std::invalid_argument("lossGradients: color fidelity weight set without a colormap anchor");
  }

  const auto best = colorOrderDetail<Scalar>(curve.colors);
  out.report.colorOrder = double(best.value);
  if (eta > Scalar(0)) {
    const Scalar gap = Scalar(best.j - best.i);
    const Eigen::Matrix<Scalar, 1, 3> d = curve.colors.row(best.i) - curve.colors.row(best.j);
    const Eigen::Matrix<Scalar, 1, 3> g = -eta * detail::unitDirection(d) / (gap * gap);
    detail::scatter(out.control, curve.basis[static_cast<std::size_t>(best.i)], g);
    detail::scatter(out.control, curve.basis[static_cast<std::size_t>(best.j)], Eigen::Matrix<Scalar, 1, 3>(-g));
  }

  out.report = totalLoss(weights, out.report);
  return out;
}

}  // namespace cmr
