#include "cmr/colormapping.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cmr;

namespace {

Colormap grayRamp(Index n = 10) {
  const auto u = oracle::uniformClampedKnots(n);
  ControlPoints c(n, 3);
  for (Index i = 0; i < n; ++i) c.row(i).setConstant((u[i + 1] + u[i + 2] + u[i + 3]) / 3.0);
  return Colormap(c);
}

Colormap randomColormap(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ControlPoints c(n, 3);
  for (Index i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
  return Colormap(c);
}

}  // namespace

TEST(Render, GrayRampReproducesField) {
  ScalarField f(3, 4);
  f << 0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 1.0;
  const RgbImage img = render(f, grayRamp());
  ASSERT_EQ(img.height, 3);
  ASSERT_EQ(img.width, 4);
  for (Index h = 0; h < 3; ++h) {
    for (Index w = 0; w < 4; ++w) {
      for (int ch = 0; ch < 3; ++ch) EXPECT_NEAR(img.pixel(h, w)[ch], f(h, w), 1e-12);
    }
  }
}

TEST(Render, ClampsOutOfRangeValues) {
  std::mt19937_64 rng(1);
  const Colormap cmap = randomColormap(6, rng);
  ScalarField f(1, 2);
  f << -0.5, 1.5;
  const RgbImage img = render(f, cmap);
  EXPECT_EQ(img.pixel(0, 0).matrix().transpose(), cmap.control().row(0).transpose());
  EXPECT_EQ(img.pixel(0, 1).matrix().transpose(), cmap.control().row(5).transpose());
}

TEST(Render, RejectsEmptyField) {
  EXPECT_THROW(render(ScalarField(0, 0), grayRamp()), std::invalid_argument);
}

TEST(RenderAdjoint, DotProductIdentityWithFiniteDifferences) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.05, 0.95), g(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Colormap cmap = randomColormap(4 + trial % 7, rng);
    ScalarField f(5, 6);
    for (Index i = 0; i < f.size(); ++i) f.data()[i] = u(rng);
    RgbImage up(5, 6);
    for (Index i = 0; i < up.pixels.size(); ++i) up.pixels.data()[i] = g(rng);

    const RenderGradient<double> grad = renderAdjoint(f, cmap, up);
    const auto objective = [&](const ScalarField& field, const ControlPoints& c) {
      return (render(field, Colormap(c, {}, 0)).pixels * up.pixels).sum();
    };
    const double h = 1e-6;
    for (Index i = 0; i < f.size(); ++i) {
      ScalarField a = f, b = f;
      a.data()[i] += h;
      b.data()[i] -= h;
      EXPECT_NEAR(grad.field.data()[i], (objective(a, cmap.control()) - objective(b, cmap.control())) / (2 * h), 1e-6);
    }
    // Linear in the control points, so differences are exact up to rounding.
    for (Index i = 0; i < cmap.control().size(); ++i) {
      ControlPoints a = cmap.control(), b = cmap.control();
      a.data()[i] = std::min(1.0, a.data()[i] + h);
      b.data()[i] = std::max(0.0, b.data()[i] - h);
      const double step = a.data()[i] - b.data()[i];
      EXPECT_NEAR(grad.control.data()[i], (objective(f, a) - objective(f, b)) / step, 1e-6);
    }
  }
}

TEST(RenderAdjoint, ZeroFieldGradientOnlyStrictlyOutsideUnitInterval) {
  std::mt19937_64 rng(3);
  const Colormap cmap = randomColormap(5, rng);
  ScalarField f(1, 4);
  f << -0.1, 0.0, 1.0, 1.1;
  const RgbImage up = RgbImage::filled(1, 4, Rgb<double>(1, 1, 1));
  const RenderGradient<double> grad = renderAdjoint(f, cmap, up);
  EXPECT_EQ(grad.field(0, 0), 0.0);
  EXPECT_EQ(grad.field(0, 3), 0.0);
  EXPECT_NE(grad.field(0, 1), 0.0);
  EXPECT_NE(grad.field(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(grad.field(0, 1), cmap.derivative(0.0).sum());
  // Clamped pixels still pass colour gradients to the end control points.
  EXPECT_NEAR(grad.control(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(grad.control(4, 0), 2.0, 1e-15);
}

TEST(RenderAdjoint, RejectsShapeMismatch) {
  EXPECT_THROW(renderAdjoint(ScalarField(ScalarField::Zero(2, 2)), grayRamp(), RgbImage(2, 3)), std::invalid_argument);
}

TEST(NormalizeMinMax, AffineAndConstantCase) {
  ScalarField f(1, 3);
  f << 2.0, 4.0, 3.0;
  const ScalarField n = normalizeMinMax(f);
  EXPECT_EQ(n(0, 0), 0.0);
  EXPECT_EQ(n(0, 1), 1.0);
  EXPECT_EQ(n(0, 2), 0.5);
  EXPECT_TRUE((normalizeMinMax(ScalarField(ScalarField::Constant(2, 2, 7.0))) == 0.5).all());
  EXPECT_THROW(normalizeMinMax(ScalarField(0, 0)), std::invalid_argument);
}

TEST(RgbImage, ShapeAndEquality) {
  const RgbImage a = RgbImage::filled(2, 3, Rgb<double>(0.1, 0.2, 0.3));
  EXPECT_EQ(a.size(), 6);
  EXPECT_FALSE(a.empty());
  EXPECT_TRUE(RgbImage().empty());
  RgbImage b = a;
  EXPECT_TRUE(a == b);
  b.pixel(1, 2)[0] = 0.5;
  EXPECT_FALSE(a == b);
  EXPECT_EQ(b.pixels(5, 0), 0.5);
  EXPECT_THROW(RgbImage(2, 2, RgbImage::Pixels::Zero(3, 3)), std::invalid_argument);
}

TEST(Render, ZeroFieldIsUniformFirstControlPoint) {
  std::mt19937_64 rng(4);
  const Colormap cmap = randomColormap(7, rng);
  const RgbImage img = render(ScalarField(ScalarField::Zero(3, 5)), cmap);
  for (Index p = 0; p < img.size(); ++p) EXPECT_EQ(img.pixels.row(p).matrix(), cmap.control().row(0));
}
