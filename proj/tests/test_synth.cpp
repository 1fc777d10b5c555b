#include "cmr/synth.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include <unistd.h>

using namespace cmr;
namespace fs = std::filesystem;

namespace {

fs::path scratchDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cmr-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(FieldKind, NamesRoundTrip) {
  for (FieldKind k : {FieldKind::linearGradient, FieldKind::radial, FieldKind::sinusoidProduct,
                      FieldKind::gaussianBumps, FieldKind::ridge}) {
    EXPECT_EQ(fieldKindFromString(toString(k)), k);
  }
  EXPECT_THROW(fieldKindFromString("spiral"), std::invalid_argument);
}

TEST(GenerateField, EveryKindIsNormalized) {
  for (const char* kind : {"linear-gradient", "radial", "sinusoid-product", "gaussian-bumps", "ridge"}) {
    FieldSpec spec;
    spec.kind = fieldKindFromString(kind);
    spec.height = 20;
    spec.width = 30;
    spec.seed = 3;
    const ScalarField f = generateField(spec);
    ASSERT_EQ(f.rows(), 20);
    ASSERT_EQ(f.cols(), 30);
    EXPECT_EQ(f.minCoeff(), 0.0) << kind;
    EXPECT_EQ(f.maxCoeff(), 1.0) << kind;
  }
}

TEST(GenerateField, LinearGradientDirection) {
  FieldSpec spec;
  spec.height = 4;
  spec.width = 5;
  const ScalarField f = generateField(spec);
  for (Index x = 0; x < 5; ++x) EXPECT_NEAR(f(2, x), x / 4.0, 1e-15);
  spec.params["angle"] = 90;
  const ScalarField g = generateField(spec);
  for (Index y = 0; y < 4; ++y) EXPECT_NEAR(g(y, 1), y / 3.0, 1e-12);
}

TEST(GenerateField, RadialIsZeroAtCentre) {
  FieldSpec spec;
  spec.kind = FieldKind::radial;
  spec.height = 9;
  spec.width = 9;
  const ScalarField f = generateField(spec);
  EXPECT_EQ(f(4, 4), 0.0);
  EXPECT_EQ(f(0, 0), 1.0);
}

TEST(GenerateField, SeedControlsBumps) {
  FieldSpec spec;
  spec.kind = FieldKind::gaussianBumps;
  spec.height = spec.width = 16;
  spec.seed = 1;
  const ScalarField a = generateField(spec), b = generateField(spec);
  spec.seed = 2;
  const ScalarField c = generateField(spec);
  EXPECT_TRUE((a == b).all());
  EXPECT_FALSE((a == c).all());
  spec.height = 0;
  EXPECT_THROW(generateField(spec), std::invalid_argument);
}

TEST(FieldSpec, JsonRoundTrip) {
  const json j = json::parse(R"({"kind":"ridge","height":10,"width":12,"seed":5,"name":"r","params":{"angle":45}})");
  const FieldSpec spec = fieldSpecFromJson(j);
  EXPECT_EQ(spec.kind, FieldKind::ridge);
  EXPECT_EQ(spec.param("angle", 0), 45);
  EXPECT_EQ(spec.label(), "r");
  EXPECT_EQ(fieldSpecFromJson(fieldSpecToJson(spec)).params, spec.params);
  EXPECT_EQ(fieldSpecsFromJson(json::parse(R"({"specs":[{"kind":"radial"}]})")).size(), 1u);
  EXPECT_THROW(fieldSpecFromJson(json::parse(R"({"height":3})")), IoError);
  EXPECT_THROW(fieldSpecFromJson(json::parse(R"({"kind":"radial","params":{"cx":"left"}})")), IoError);
  EXPECT_THROW(fieldSpecsFromJson(json::parse(R"({"kind":"radial"})")), IoError);
}

TEST(FitColormap, ReproducesRepresentableCurve) {
  ControlPoints c(7, 3);
  c << 0.1, 0.2, 0.3, 0.9, 0.1, 0.4, 0.5, 0.5, 0.5, 0.2, 0.8, 0.1, 0.7, 0.3, 0.9, 0.4, 0.6, 0.2, 1.0, 0.9, 0.0;
  const ColormapFit fit = fitColormap(Colormap(c).sampleRange(256), 7);
  EXPECT_LT((fit.control - c).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(fit.rmsResidual, 1e-12);
  EXPECT_THROW(fitColormap(ColorTable::Zero(5, 3), 7), std::invalid_argument);
}

TEST(Library, BundledColormapsLoad) {
  const ColormapLibrary lib = loadColormapLibrary(bundledColormapDir());
  EXPECT_TRUE(lib.warnings.empty());
  ASSERT_GE(lib.colormaps.size(), 10u);
  for (const char* name : {"gray", "viridis", "plasma", "cividis", "blues"}) {
    const NamedColormap* c = lib.find(name);
    ASSERT_NE(c, nullptr) << name;
    EXPECT_EQ(c->cmap.size(), kDefaultControlPoints);
    EXPECT_LT(c->fitResidual, 0.02) << name;
  }
  EXPECT_EQ(lib.find("nope"), nullptr);
  EXPECT_FALSE(loadColormapLibrary("/nonexistent/dir").warnings.empty());
}

TEST(Library, BadFilesBecomeWarnings) {
  const fs::path dir = scratchDir("lib");
  fs::create_directories(dir);
  writeFile(dir / "good.json", R"({"n":3,"control_points":[[0,0,0],[0.3,0.3,0.3],[0.6,0.6,0.6],[1,1,1]]})");
  writeFile(dir / "bad.json", "{not json");
  writeFile(dir / "bad.csv", "1,2\n");
  writeFile(dir / "notes.txt", "ignored");
  const ColormapLibrary lib = loadColormapLibrary(dir);
  ASSERT_EQ(lib.colormaps.size(), 1u);
  EXPECT_EQ(lib.colormaps[0].name, "good");
  EXPECT_EQ(lib.warnings.size(), 2u);
  fs::remove_all(dir);
}

TEST(Corpus, IdsOrderAndFiles) {
  const ColormapLibrary lib = loadColormapLibrary(bundledColormapDir());
  std::vector<NamedColormap> cmaps{*lib.find("gray"), *lib.find("viridis")};
  FieldSpec a, b;
  a.height = a.width = b.height = b.width = 12;
  b.kind = FieldKind::radial;
  const auto entries = buildCorpus(cmaps, {a, b});
  ASSERT_EQ(entries.size(), 4u);
  EXPECT_EQ(entries[0].id, "gray__s00-linear-gradient");
  EXPECT_EQ(entries[3].id, "viridis__s01-radial");
  EXPECT_TRUE(entries[3].image == render(entries[3].field, entries[3].cmap));

  const fs::path dir = scratchDir("corpus");
  const Manifest m = makeCorpus(cmaps, {a, b}, dir);
  const Manifest back = manifestFromJson(json::parse(readFile(dir / "manifest.json")));
  ASSERT_EQ(back.entries.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(back.entries[k].id, m.entries[k].id);
    EXPECT_TRUE(fs::exists(dir / back.entries[k].image));
    EXPECT_TRUE((readField(dir / back.entries[k].field) == entries[k].field).all());
    EXPECT_EQ(readColormap(dir / back.entries[k].cmap).control(), entries[k].cmap.control());
  }
  EXPECT_THROW(manifestFromJson(json::parse(R"({"entries":[{"id":"x"}]})")), IoError);
  EXPECT_THROW(buildCorpus({}, {a}), std::invalid_argument);
  fs::remove_all(dir);
}

TEST(GenerateField, ZeroFrequencySinusoidIsMidGray) {
  FieldSpec spec;
  spec.kind = FieldKind::sinusoidProduct;
  spec.height = spec.width = 6;
  spec.params["frequency"] = 0;
  EXPECT_TRUE((generateField(spec) == 0.5).all());
}

TEST(FitColormap, GrayRampAndConstantSamples) {
  ColorTable ramp(256, 3);
  for (Index k = 0; k < 256; ++k) ramp.row(k).setConstant(k / 255.0);
  const ColormapFit fit = fitColormap(ramp, 10);
  EXPECT_LE((Colormap(fit.control).sampleRange(256) - ramp).array().square().mean(), 1e-6);
  EXPECT_LE((Colormap(fit.control).sampleRange(256) - ramp).cwiseAbs().maxCoeff(), 1e-6);

  const ColormapFit flat = fitColormap(ColorTable(ColorTable::Constant(256, 3, 0.25)), 6);
  EXPECT_LT((flat.control.array() - 0.25).abs().maxCoeff(), 1e-12);
}

TEST(Corpus, RegenerationIsByteIdentical) {
  const ColormapLibrary lib = loadColormapLibrary(bundledColormapDir());
  FieldSpec spec;
  spec.kind = FieldKind::gaussianBumps;
  spec.height = spec.width = 10;
  spec.seed = 3;
  const fs::path a = scratchDir("regen-a"), b = scratchDir("regen-b");
  makeCorpus({*lib.find("magma")}, {spec}, a);
  makeCorpus({*lib.find("magma")}, {spec}, b);
  for (const auto& f : fs::recursive_directory_iterator(a)) {
    if (!f.is_regular_file()) continue;
    EXPECT_EQ(readFile(f.path()), readFile(b / fs::relative(f.path(), a))) << f.path();
  }
  fs::remove_all(a);
  fs::remove_all(b);
}
