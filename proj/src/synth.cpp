#include "cmr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#ifndef CMR_DATA_DIR
#define CMR_DATA_DIR "data"
#endif

namespace cmr {

namespace fs = std::filesystem;

namespace {

constexpr std::pair<FieldKind, const char*> kKindNames[] = {
    {FieldKind::linearGradient, "linear-gradient"},
    {FieldKind::radial, "radial"},
    {FieldKind::sinusoidProduct, "sinusoid-product"},
    {FieldKind::gaussianBumps, "gaussian-bumps"},
    {FieldKind::ridge, "ridge"},
};

double degrees(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

const char* toString(FieldKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

FieldKind fieldKindFromString(const std::string& name) {
  for (const auto& [k, n] : kKindNames) {
    if (name == n) return k;
  }
  throw std::invalid_argument("unknown field kind '" + name + "'");
}

double FieldSpec::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::string FieldSpec::label() const { return name.empty() ? std::string(toString(kind)) : name; }

FieldSpec fieldSpecFromJson(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw IoError("field spec: missing 'kind'");
  FieldSpec spec;
  spec.kind = fieldKindFromString(j.at("kind").get<std::string>());
  spec.height = j.value("height", Index{64});
  spec.width = j.value("width", Index{64});
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.name = j.value("name", std::string{});
  if (j.contains("params")) {
    for (const auto& [key, value] : j.at("params").items()) {
      if (!value.is_number()) throw IoError("field spec: parameter '" + key + "' must be numeric");
      spec.params[key] = value.get<double>();
    }
  }
  return spec;
}

json fieldSpecToJson(const FieldSpec& spec) {
  json j = {{"kind", toString(spec.kind)}, {"height", spec.height}, {"width", spec.width}, {"seed", spec.seed}};
  if (!spec.name.empty()) j["name"] = spec.name;
  if (!spec.params.empty()) j["params"] = spec.params;
  return j;
}

std::vector<FieldSpec> fieldSpecsFromJson(const json& j) {
  const json& list = j.is_object() && j.contains("specs") ? j.at("specs") : j;
  if (!list.is_array()) throw IoError("field specs: expected an array");
  std::vector<FieldSpec> specs;
  for (const auto& item : list) specs.push_back(fieldSpecFromJson(item));
  return specs;
}

ScalarField generateField(const FieldSpec& spec) {
  if (spec.height < 1 || spec.width < 1) throw std::invalid_argument("generateField: dimensions must be positive");
  const Index h = spec.height, w = spec.width;
  const double shorter = double(std::min(h, w));
  ScalarField f(h, w);

  switch (spec.kind) {
    case FieldKind::linearGradient: {
      const double a = degrees(spec.param("angle", 0.0));
      const double ca = std::cos(a), sa = std::sin(a);
      for (Index y = 0; y < h; ++y)
        for (Index x = 0; x < w; ++x) f(y, x) = double(x) * ca + double(y) * sa;
      break;
    }
    case FieldKind::radial: {
      const double cx = spec.param("cx", 0.5) * double(w - 1), cy = spec.param("cy", 0.5) * double(h - 1);
      for (Index y = 0; y < h; ++y)
        for (Index x = 0; x < w; ++x) f(y, x) = std::hypot(double(x) - cx, double(y) - cy);
      break;
    }
    case FieldKind::sinusoidProduct: {
      const double freq = spec.param("frequency", 2.0);
      const double fx = spec.param("fx", freq), fy = spec.param("fy", freq);
      const double phase = spec.param("phase", 0.0);
      const double tau = 2.0 * std::numbers::pi;
      for (Index y = 0; y < h; ++y)
        for (Index x = 0; x < w; ++x)
          f(y, x) = std::sin(tau * fx * double(x) / double(w) + phase) * std::sin(tau * fy * double(y) / double(h) + phase);
      break;
    }
    case FieldKind::gaussianBumps: {
      const auto count = static_cast<int>(spec.param("count", 3.0));
      const double sigma = spec.param("width", 0.15) * shorter;
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> pos(0.15, 0.85), amp(0.5, 1.0);
      struct Bump {
        double x, y, a;
      };
      std::vector<Bump> bumps;
      for (int i = 0; i < count; ++i) {
        const double bx = pos(rng) * double(w - 1);
        const double by = pos(rng) * double(h - 1);
        bumps.push_back({bx, by, amp(rng)});
      }
      for (Index y = 0; y < h; ++y) {
        for (Index x = 0; x < w; ++x) {
          double v = 0.0;
          for (const Bump& b : bumps) {
            const double d2 = (double(x) - b.x) * (double(x) - b.x) + (double(y) - b.y) * (double(y) - b.y);
            v += b.a * std::exp(-d2 / (2.0 * sigma * sigma));
          }
          f(y, x) = v;
        }
      }
      break;
    }
    case FieldKind::ridge: {
      const double a = degrees(spec.param("angle", 30.0));
      const double sigma = spec.param("width", 0.2) * shorter;
      const double offset = spec.param("offset", 0.0) * shorter;
      const double cx = 0.5 * double(w - 1), cy = 0.5 * double(h - 1);
      const double nx = -std::sin(a), ny = std::cos(a);
      for (Index y = 0; y < h; ++y) {
        for (Index x = 0; x < w; ++x) {
          const double d = (double(x) - cx) * nx + (double(y) - cy) * ny - offset;
          f(y, x) = std::exp(-d * d / (2.0 * sigma * sigma));
        }
      }
      break;
    }
  }
  return normalizeMinMax(f);
}

ColormapFit fitColormap(const ColorTable& samples, Index controlPoints) {
  const Index m = samples.rows();
  if (controlPoints < kDegree + 1) throw std::invalid_argument("fitColormap: need at least 4 control points");
  if (m < controlPoints) throw std::invalid_argument("fitColormap: need at least as many samples as control points");
  const KnotVector knots = clampedUniformKnots(controlPoints);
  Eigen::MatrixXd basisMatrix = Eigen::MatrixXd::Zero(m, controlPoints);
  for (Index k = 0; k < m; ++k) {
    const LocalBasis<double> b = localBasis(Colormap::sampleParameter<double>(k, m), knots);
    for (int j = 0; j < 4; ++j) basisMatrix(k, b.first() + j) = b.cubic[j];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basisMatrix);
  if (qr.rank() < controlPoints) throw std::runtime_error("fitColormap: rank-deficient basis matrix");
  ColormapFit fit;
  fit.control = qr.solve(samples).cwiseMax(0.0).cwiseMin(1.0);
  fit.rmsResidual = std::sqrt((basisMatrix * fit.control - samples).squaredNorm() / double(samples.size()));
  return fit;
}

const NamedColormap* ColormapLibrary::find(const std::string& name) const {
  for (const auto& c : colormaps) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ColormapLibrary loadColormapLibrary(const fs::path& dir, Index controlPoints) {
  ColormapLibrary lib;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    lib.warnings.push_back("colormap library: not a directory: " + dir.string());
    return lib;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    const std::string ext = file.extension().string();
    if (ext != ".json" && ext != ".csv") continue;
    try {
      if (ext == ".json") {
        lib.colormaps.push_back({file.stem().string(), readColormap(file), 0.0});
      } else {
        const ColormapFit fit = fitColormap(parseColorTable(readFile(file)), controlPoints);
        lib.colormaps.push_back({file.stem().string(), Colormap(fit.control), fit.rmsResidual});
      }
    } catch (const std::exception& e) {
      lib.warnings.push_back(file.filename().string() + ": " + e.what());
    }
  }
  if (lib.colormaps.empty()) lib.warnings.push_back("colormap library: no colormaps found in " + dir.string());
  return lib;
}

fs::path bundledColormapDir() { return fs::path(CMR_DATA_DIR) / "colormaps"; }

std::vector<CorpusEntry> buildCorpus(const std::vector<NamedColormap>& cmaps, const std::vector<FieldSpec>& specs) {
  if (cmaps.empty() || specs.empty()) throw std::invalid_argument("buildCorpus: need colormaps and field specs");
  std::vector<CorpusEntry> entries;
  entries.reserve(cmaps.size() * specs.size());
  for (const NamedColormap& c : cmaps) {
    for (std::size_t s = 0; s < specs.size(); ++s) {
      char index[16];
      std::snprintf(index, sizeof index, "s%02zu", s);
      ScalarField field = generateField(specs[s]);
      RgbImage image = render(field, c.cmap);
      entries.push_back({c.name + "__" + index + "-" + specs[s].label(), std::move(image), c.cmap, std::move(field)});
    }
  }
  return entries;
}

json manifestToJson(const Manifest& m) {
  json entries = json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"id", e.id}, {"image", e.image}, {"cmap", e.cmap}, {"field", e.field}});
  }
  return {{"entries", entries}};
}

Manifest manifestFromJson(const json& j) {
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array()) {
    throw IoError("manifest: missing 'entries' array");
  }
  Manifest m;
  try {
    for (const auto& e : j["entries"]) {
      m.entries.push_back({e.at("id").get<std::string>(), e.at("image").get<std::string>(),
                           e.at("cmap").get<std::string>(), e.at("field").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("manifest: ") + e.what());
  }
  return m;
}

Manifest makeCorpus(const std::vector<NamedColormap>& cmaps, const std::vector<FieldSpec>& specs,
                    const fs::path& outDir) {
  std::error_code ec;
  fs::create_directories(outDir, ec);
  if (ec || !fs::is_directory(outDir)) throw IoError("cannot create corpus directory " + outDir.string());
  Manifest manifest;
  for (const CorpusEntry& e : buildCorpus(cmaps, specs)) {
    ManifestEntry me{e.id, e.id + "/image.png", e.id + "/colormap.json", e.id + "/field.csv"};
    writePng(outDir / me.image, e.image);
    writeColormap(outDir / me.cmap, e.cmap);
    writeField(outDir / me.field, e.field);
    manifest.entries.push_back(std::move(me));
  }
  writeFile(outDir / "manifest.json", manifestToJson(manifest).dump(2) + "\n");
  return manifest;
}

}  // namespace cmr
