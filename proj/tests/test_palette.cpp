#include "cmr/palette.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cmr;

TEST(Dbscan, MatchesQuadraticReference) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    std::uniform_real_distribution<double> centre(0.0, 1.0), spread(0.0, 0.05);
    std::vector<double> v(n);
    const int groups = 1 + int(rng() % 5);
    std::vector<double> centres(groups);
    for (double& c : centres) c = centre(rng);
    for (double& x : v) {
      std::normal_distribution<double> g(centres[rng() % groups], spread(rng));
      x = g(rng);
      if (rng() % 4 == 0) x = std::round(x * 100) / 100;  // ties
    }
    DbscanParams p;
    p.eps = 0.005 + 0.03 * centre(rng);
    p.minPts = 1 + Index(rng() % 12);
    EXPECT_EQ(dbscan1d(v, p), oracle::dbscan(v, p.eps, std::size_t(p.minPts))) << "trial " << trial;
  }
}

TEST(Dbscan, DefaultMinPts) {
  DbscanParams p;
  EXPECT_EQ(p.resolvedMinPts(100), 8);
  EXPECT_EQ(p.resolvedMinPts(4096), 21);
  p.minPts = 3;
  EXPECT_EQ(p.resolvedMinPts(4096), 3);
}

TEST(Dbscan, EdgeCasesAndValidation) {
  EXPECT_TRUE(dbscan1d({}).empty());
  const std::vector<double> lone{0.5};
  EXPECT_EQ(dbscan1d(lone), std::vector<int>{kNoise});
  DbscanParams one;
  one.minPts = 1;
  EXPECT_EQ(dbscan1d(lone, one), std::vector<int>{0});
  DbscanParams bad;
  bad.eps = 0;
  EXPECT_THROW(dbscan1d(lone, bad), std::invalid_argument);
  bad = {};
  bad.minPts = -1;
  EXPECT_THROW(dbscan1d(lone, bad), std::invalid_argument);
}

TEST(Palette, TwoLevelFieldGivesTwoEntriesOnTheCurve) {
  ControlPoints c(6, 3);
  c << 0.1, 0.0, 0.3, 0.2, 0.3, 0.6, 0.1, 0.6, 0.5, 0.4, 0.8, 0.3, 0.8, 0.9, 0.1, 1.0, 0.9, 0.2;
  const Colormap cmap(c);
  ScalarField f(32, 32);
  for (Index y = 0; y < 32; ++y) {
    for (Index x = 0; x < 32; ++x) f(y, x) = x < 16 ? 0.2 : 0.8;
  }
  const Palette p = extractPalette(cmap, f);
  ASSERT_EQ(p.entries.size(), 2u);
  EXPECT_NEAR(p.entries[0].value, 0.2, 1e-12);
  EXPECT_NEAR(p.entries[1].value, 0.8, 1e-12);
  for (const PaletteEntry& e : p.entries) EXPECT_EQ(e.color, cmap(e.value));

  const json j = paletteToJson(p);
  ASSERT_EQ(j["entries"].size(), 2u);
  EXPECT_EQ(j["entries"][0]["color"].size(), 3u);
  EXPECT_EQ(j["entries"][1]["value"].get<double>(), p.entries[1].value);
}

TEST(Palette, AllNoiseIsAnError) {
  ScalarField f(1, 4);
  f << 0.0, 0.3, 0.6, 0.9;
  const Colormap cmap(ControlPoints::Constant(4, 3, 0.5));
  EXPECT_THROW(extractPalette(cmap, f), PaletteError);
  EXPECT_THROW(extractPalette(cmap, ScalarField(0, 0)), std::invalid_argument);
}
