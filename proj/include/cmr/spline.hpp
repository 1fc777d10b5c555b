#pragma once

// Cubic B-spline colormaps: control points, clamped knot vectors, basis
// evaluation and colormap sampling.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmr {

using Index = Eigen::Index;

inline constexpr int kDegree = 3;
inline constexpr Index kDefaultControlPoints = 10;
inline constexpr Index kDefaultSamples = 256;

template <typename Scalar>
using Rgb = Eigen::Matrix<Scalar, 3, 1>;

/// Row i holds control color c_i as (r, g, b).
template <typename Scalar>
using ControlPointsT = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;

template <typename Scalar>
using KnotVectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// m sampled colors, one per row.
template <typename Scalar>
using ColorTableT = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;

using ControlPoints = ControlPointsT<double>;
using KnotVector = KnotVectorT<double>;
using ColorTable = ColorTableT<double>;

/// [0,0,0,0, 1/(k-3), ..., (k-4)/(k-3), 1,1,1,1] for k control points.
template <typename Scalar = double>
KnotVectorT<Scalar> clampedUniformKnots(Index count) {
  if (count < kDegree + 1) {
    throw std::invalid_argument("clampedUniformKnots: need at least 4 control points, got " +
                                std::to_string(count));
  }
  KnotVectorT<Scalar> knots(count + kDegree + 1);
  const Index interior = count - kDegree;  // number of spans
  for (Index i = 0; i <= kDegree; ++i) {
    knots[i] = Scalar(0);
    knots[count + i] = Scalar(1);
  }
  for (Index k = 1; k < interior; ++k) {
    knots[kDegree + k] = Scalar(k) / Scalar(interior);
  }
  return knots;
}

/// Index of the last non-degenerate knot interval; it is closed on the right.
template <typename Scalar>
Index lastSpan(const KnotVectorT<Scalar>& knots) {
  Index s = knots.size() - 2;
  while (s > 0 && !(knots[s] < knots[s + 1])) --s;
  return s;
}

/// Cox-de Boor recursion. Intervals are half-open except the last non-empty
/// one, so the final basis function is 1 at t = 1.
template <typename Scalar>
Scalar basis(Index i, int degree, Scalar t, const KnotVectorT<Scalar>& knots) {
  if (degree == 0) {
    if (knots[i] <= t && t < knots[i + 1]) return Scalar(1);
    if (t == knots[knots.size() - 1] && i == lastSpan(knots)) return Scalar(1);
    return Scalar(0);
  }
  Scalar value(0);
  const Scalar leftDen = knots[i + degree] - knots[i];
  if (leftDen > Scalar(0)) {
    value += (t - knots[i]) / leftDen * basis(i, degree - 1, t, knots);
  }
  const Scalar rightDen = knots[i + degree + 1] - knots[i + 1];
  if (rightDen > Scalar(0)) {
    value += (knots[i + degree + 1] - t) / rightDen * basis(i + 1, degree - 1, t, knots);
  }
  return value;
}

/// Knot span s with knots[s] <= t < knots[s+1], t = 1 mapped to the last span.
template <typename Scalar>
Index findSpan(Scalar t, const KnotVectorT<Scalar>& knots) {
  const Index count = knots.size() - kDegree - 1;
  if (t >= knots[count]) return lastSpan(knots);
  const auto* begin = knots.data();
  const auto* it = std::upper_bound(begin + kDegree, begin + count + 1, t);
  return std::clamp<Index>(static_cast<Index>(it - begin) - 1, kDegree, count - 1);
}

/// The non-zero cubic basis functions at t, plus the non-zero quadratic
/// ones needed for the derivative.
template <typename Scalar>
struct LocalBasis {
  Index span = kDegree;                 // cubic N_{span-3..span,3} are non-zero
  std::array<Scalar, 4> cubic{};        // N_{span-3+k,3}(t)
  std::array<Scalar, 3> quadratic{};    // N_{span-2+k,2}(t)

  Index first() const { return span - kDegree; }
};

template <typename Scalar>
LocalBasis<Scalar> localBasis(Scalar t, const KnotVectorT<Scalar>& knots) {
  LocalBasis<Scalar> out;
  const Index s = findSpan(t, knots);
  out.span = s;
  std::array<Scalar, 4> n{Scalar(1), Scalar(0), Scalar(0), Scalar(0)};
  std::array<Scalar, 4> left{}, right{};
  for (int j = 1; j <= kDegree; ++j) {
    left[j] = t - knots[s + 1 - j];
    right[j] = knots[s + j] - t;
    Scalar saved(0);
    for (int r = 0; r < j; ++r) {
      const Scalar den = right[r + 1] + left[j - r];
      const Scalar temp = den > Scalar(0) ? n[r] / den : Scalar(0);
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
    if (j == kDegree - 1) {
      for (int k = 0; k < 3; ++k) out.quadratic[k] = n[k];
    }
  }
  out.cubic = n;
  return out;
}

/// A cubic B-spline colormap S(t) = sum_i N_{i,3}(t) c_i.
///
/// Immutable after construction. The 256-entry lookup table is built eagerly
/// unless lutSize is 0.
template <typename Scalar>
class ColormapT {
 public:
  explicit ColormapT(ControlPointsT<Scalar> control, std::optional<KnotVectorT<Scalar>> knots = {},
                     Index lutSize = kDefaultSamples)
      : control_(std::move(control)) {
    if (control_.rows() < kDegree + 1) {
      throw std::invalid_argument("Colormap: need at least 4 control points, got " +
                                  std::to_string(control_.rows()));
    }
    for (Index i = 0; i < control_.size(); ++i) {
      const Scalar v = control_.data()[i];
      if (!(v >= Scalar(0) && v <= Scalar(1))) {
        throw std::invalid_argument("Colormap: control point channel outside [0,1]");
      }
    }
    knots_ = knots ? std::move(*knots) : clampedUniformKnots<Scalar>(control_.rows());
    validateKnots();
    if (lutSize > 0) lut_ = sampleRange(lutSize);
  }

  Index size() const { return control_.rows(); }
  const ControlPointsT<Scalar>& control() const { return control_; }
  const KnotVectorT<Scalar>& knots() const { return knots_; }
  const std::optional<ColorTableT<Scalar>>& lut() const { return lut_; }

  /// S(t); t outside [0,1] is clamped.
  Rgb<Scalar> operator()(Scalar t) const {
    const LocalBasis<Scalar> b = localBasis(clampParameter(t), knots_);
    Rgb<Scalar> c = Rgb<Scalar>::Zero();
    for (int k = 0; k < 4; ++k) c += b.cubic[k] * control_.row(b.first() + k).transpose();
    return c;
  }

  /// dS/dt via the quadratic basis on differenced control points.
  Rgb<Scalar> derivative(Scalar t) const { return derivativeAt(localBasis(clampParameter(t), knots_)); }

  Rgb<Scalar> derivativeAt(const LocalBasis<Scalar>& b) const {
    Rgb<Scalar> d = Rgb<Scalar>::Zero();
    for (int k = 0; k < 3; ++k) {
      const Index i = b.span - 3 + k;  // Q_i pairs with N_{i+1,2}
      if (i < 0 || i + 1 >= size()) continue;
      const Scalar den = knots_[i + kDegree + 1] - knots_[i + 1];
      if (den <= Scalar(0)) continue;
      d += b.quadratic[k] * Scalar(kDegree) / den *
           (control_.row(i + 1) - control_.row(i)).transpose();
    }
    return d;
  }

  Rgb<Scalar> valueAt(const LocalBasis<Scalar>& b) const {
    Rgb<Scalar> c = Rgb<Scalar>::Zero();
    for (int k = 0; k < 4; ++k) c += b.cubic[k] * control_.row(b.first() + k).transpose();
    return c;
  }

  /// m samples at t_k = k / (m - 1), k = 0..m-1.
  ColorTableT<Scalar> sampleRange(Index m) const {
    if (m < 2) throw std::invalid_argument("sampleColormap: need m >= 2");
    ColorTableT<Scalar> out(m, 3);
    for (Index k = 0; k < m; ++k) out.row(k) = (*this)(sampleParameter<Scalar>(k, m)).transpose();
    return out;
  }

  /// The same curve traversed from t = 1 to t = 0.
  ColormapT reversed() const {
    ControlPointsT<Scalar> flipped = control_.colwise().reverse();
    const Index lutSize = lut_ ? lut_->rows() : 0;
    // Uniform knots are symmetric; keep them bit-identical.
    if (knots_ == clampedUniformKnots<Scalar>(size())) return ColormapT(std::move(flipped), {}, lutSize);
    KnotVectorT<Scalar> k(knots_.size());
    for (Index i = 0; i < knots_.size(); ++i) k[i] = Scalar(1) - knots_[knots_.size() - 1 - i];
    return ColormapT(std::move(flipped), std::move(k), lutSize);
  }

  template <typename T>
  static T sampleParameter(Index k, Index m) {
    return T(k) / T(m - 1);
  }

  static Scalar clampParameter(Scalar t) {
    if (!(t > Scalar(0))) return Scalar(0);
    return t < Scalar(1) ? t : Scalar(1);
  }

 private:
  void validateKnots() const {
    const Index n = control_.rows();
    if (knots_.size() != n + kDegree + 1) {
      throw std::invalid_argument("Colormap: knot vector length must equal control points + 4");
    }
    for (Index i = 1; i < knots_.size(); ++i) {
      if (knots_[i] < knots_[i - 1]) throw std::invalid_argument("Colormap: knots must be non-decreasing");
    }
    for (Index i = 0; i <= kDegree; ++i) {
      if (knots_[i] != Scalar(0) || knots_[n + i] != Scalar(1)) {
        throw std::invalid_argument("Colormap: knot vector must be clamped to [0,1]");
      }
    }
  }

  ControlPointsT<Scalar> control_;
  KnotVectorT<Scalar> knots_;
  std::optional<ColorTableT<Scalar>> lut_;
};

using Colormap = ColormapT<double>;

template <typename Scalar>
Rgb<Scalar> evalColormap(const ColormapT<Scalar>& cmap, Scalar t) {
  return cmap(t);
}

template <typename Scalar>
ColorTableT<Scalar> sampleColormap(const ColormapT<Scalar>& cmap, Index m) {
  return cmap.sampleRange(m);
}

/// Jacobian dS(t)/dc as a 3 x 3(n+1) matrix; column 3i+r is channel r of c_i.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, Eigen::Dynamic> evalColormapGradient(const ColormapT<Scalar>& cmap, Scalar t) {
  Eigen::Matrix<Scalar, 3, Eigen::Dynamic> jac =
      Eigen::Matrix<Scalar, 3, Eigen::Dynamic>::Zero(3, 3 * cmap.size());
  const LocalBasis<Scalar> b = localBasis(ColormapT<Scalar>::clampParameter(t), cmap.knots());
  for (int k = 0; k < 4; ++k) {
    for (int r = 0; r < 3; ++r) jac(r, 3 * (b.first() + k) + r) = b.cubic[k];
  }
  return jac;
}

template <typename Scalar>
Rgb<Scalar> splineDerivative(const ColormapT<Scalar>& cmap, Scalar t) {
  return cmap.derivative(t);
}

/// Weighted luma of gamma-encoded RGB.
template <typename Scalar>
Scalar relativeLuminance(const Rgb<Scalar>& c) {
  return Scalar(0.2126) * c[0] + Scalar(0.7152) * c[1] + Scalar(0.0722) * c[2];
}

}  // namespace cmr
