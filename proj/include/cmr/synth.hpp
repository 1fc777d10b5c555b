#pragma once

// Synthetic benchmark generation: analytic scalar fields, colormap library
// ingestion and (image, colormap, field) corpora.

#include "cmr/colormapping.hpp"
#include "cmr/io.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cmr {

enum class FieldKind { linearGradient, radial, sinusoidProduct, gaussianBumps, ridge };

const char* toString(FieldKind kind);
FieldKind fieldKindFromString(const std::string& name);

/// Parameters by kind (all optional):
///   linear-gradient:  angle (degrees, 0 = left to right)
///   radial:           cx, cy (fractions of width / height)
///   sinusoid-product: frequency (sets fx and fy), fx, fy (cycles per image), phase (radians)
///   gaussian-bumps:   count, width (sigma as a fraction of the shorter side)
///   ridge:            angle (degrees), width (fraction of the shorter side), offset (fraction)
struct FieldSpec {
  FieldKind kind = FieldKind::linearGradient;
  std::map<std::string, double> params;
  Index height = 64;
  Index width = 64;
  std::uint64_t seed = 0;
  std::string name;

  double param(const std::string& key, double fallback) const;
  std::string label() const;
};

FieldSpec fieldSpecFromJson(const json& j);
json fieldSpecToJson(const FieldSpec& spec);
/// Accepts either a JSON array of specs or {"specs": [...]}.
std::vector<FieldSpec> fieldSpecsFromJson(const json& j);

/// Deterministic in the seed; min-max normalized, all 0.5 when constant.
ScalarField generateField(const FieldSpec& spec);

struct ColormapFit {
  ControlPoints control;
  double rmsResidual = 0.0;  // per-channel RMS against the samples, after clamping
};

/// Least-squares projection of samples taken at t_k = k/(m-1) onto the
/// clamped uniform cubic basis, clamped to [0,1] afterwards.
ColormapFit fitColormap(const ColorTable& samples, Index controlPoints = kDefaultControlPoints);

struct NamedColormap {
  std::string name;
  Colormap cmap;
  double fitResidual = 0.0;
};

struct ColormapLibrary {
  std::vector<NamedColormap> colormaps;
  std::vector<std::string> warnings;

  const NamedColormap* find(const std::string& name) const;
};

/// Loads *.json (colormap format) and *.csv (sample rows, fitted to
/// controlPoints) files in name order. Bad files become warnings.
ColormapLibrary loadColormapLibrary(const std::filesystem::path& dir,
                                    Index controlPoints = kDefaultControlPoints);

/// Directory of the colormaps shipped with the project.
std::filesystem::path bundledColormapDir();

struct CorpusEntry {
  std::string id;
  RgbImage image;
  Colormap cmap;
  ScalarField field;
};

/// Cross product colormaps x specs, colormap-major.
std::vector<CorpusEntry> buildCorpus(const std::vector<NamedColormap>& cmaps, const std::vector<FieldSpec>& specs);

struct ManifestEntry {
  std::string id;
  std::string image;  // paths relative to the manifest directory
  std::string cmap;
  std::string field;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
};

json manifestToJson(const Manifest& m);
Manifest manifestFromJson(const json& j);

/// Writes <outDir>/<id>/{image.png,colormap.json,field.csv} and
/// <outDir>/manifest.json.
Manifest makeCorpus(const std::vector<NamedColormap>& cmaps, const std::vector<FieldSpec>& specs,
                    const std::filesystem::path& outDir);

}  // namespace cmr
