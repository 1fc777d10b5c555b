#pragma once

// Differentiable colormapping: render a normalized scalar field through a
// spline colormap, and pull per-pixel color gradients back to the control
// points and the field.

#include "cmr/spline.hpp"

#include <stdexcept>

namespace cmr {

/// H x W normalized scalar values.
template <typename Scalar>
using ScalarFieldT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ScalarField = ScalarFieldT<double>;

/// H x W RGB image, pixel (h, w) stored in row h * width + w.
template <typename Scalar>
struct RgbImageT {
  using Pixels = Eigen::Array<Scalar, Eigen::Dynamic, 3, Eigen::RowMajor>;

  Index height = 0;
  Index width = 0;
  Pixels pixels;

  RgbImageT() = default;
  RgbImageT(Index h, Index w) : height(h), width(w), pixels(Pixels::Zero(h * w, 3)) {}
  RgbImageT(Index h, Index w, Pixels p) : height(h), width(w), pixels(std::move(p)) {
    if (pixels.rows() != h * w) throw std::invalid_argument("RgbImage: pixel count mismatch");
  }

  static RgbImageT filled(Index h, Index w, const Rgb<Scalar>& c) {
    RgbImageT img(h, w);
    img.pixels.rowwise() = c.transpose().array();
    return img;
  }

  bool empty() const { return height == 0 || width == 0; }
  Index size() const { return height * width; }
  auto pixel(Index h, Index w) { return pixels.row(h * width + w); }
  auto pixel(Index h, Index w) const { return pixels.row(h * width + w); }

  bool sameShape(const RgbImageT& other) const { return height == other.height && width == other.width; }
  friend bool operator==(const RgbImageT& a, const RgbImageT& b) {
    return a.sameShape(b) && (a.pixels == b.pixels).all();
  }
};
using RgbImage = RgbImageT<double>;

template <typename Scalar>
struct RenderGradient {
  ControlPointsT<Scalar> control;  // (n+1) x 3
  ScalarFieldT<Scalar> field;      // H x W
};

/// Affine rescale to [0,1]; a constant field maps to 0.5 everywhere.
template <typename Scalar>
ScalarFieldT<Scalar> normalizeMinMax(const ScalarFieldT<Scalar>& field) {
  if (field.size() == 0) throw std::invalid_argument("normalizeMinMax: empty field");
  const Scalar lo = field.minCoeff(), hi = field.maxCoeff();
  if (!(hi > lo)) return ScalarFieldT<Scalar>::Constant(field.rows(), field.cols(), Scalar(0.5));
  return (field - lo) / (hi - lo);
}

/// pixel(h, w) = S(clamp(field(h, w))). Evaluates the spline exactly per pixel.
template <typename Scalar>
RgbImageT<Scalar> render(const ScalarFieldT<Scalar>& field, const ColormapT<Scalar>& cmap) {
  if (field.size() == 0) throw std::invalid_argument("render: empty field");
  RgbImageT<Scalar> out(field.rows(), field.cols());
  const Scalar* values = field.data();
  for (Index p = 0; p < field.size(); ++p) {
    out.pixels.row(p) = cmap(values[p]).transpose().array();
  }
  return out;
}

/// Adjoint of render for an upstream gradient dL/dI.
///
/// Field entries outside [0,1] were clamped by render and get zero gradient.
template <typename Scalar>
RenderGradient<Scalar> renderAdjoint(const ScalarFieldT<Scalar>& field, const ColormapT<Scalar>& cmap,
                                     const RgbImageT<Scalar>& upstream) {
  if (upstream.height != field.rows() || upstream.width != field.cols()) {
    throw std::invalid_argument("renderAdjoint: upstream gradient shape does not match field");
  }
  RenderGradient<Scalar> grad{ControlPointsT<Scalar>::Zero(cmap.size(), 3),
                              ScalarFieldT<Scalar>::Zero(field.rows(), field.cols())};
  const Scalar* values = field.data();
  Scalar* gField = grad.field.data();
  for (Index p = 0; p < field.size(); ++p) {
    const Scalar raw = values[p];
    const LocalBasis<Scalar> b = localBasis(ColormapT<Scalar>::clampParameter(raw), cmap.knots());
    const Eigen::Matrix<Scalar, 1, 3> g = upstream.pixels.row(p).matrix();
    for (int k = 0; k < 4; ++k) grad.control.row(b.first() + k) += b.cubic[k] * g;
    if (raw >= Scalar(0) && raw <= Scalar(1)) gField[p] = g.dot(cmap.derivativeAt(b));
  }
  return grad;
}

}  // namespace cmr
