#pragma once

// File formats shared by the library, CLI and service: 8-bit RGB PNG,
// plain-text scalar fields, colormap JSON and 256-row colormap CSV.

#include "cmr/colormapping.hpp"
#include "cmr/losses.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cmr {

using json = nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string readFile(const std::filesystem::path& path);
void writeFile(const std::filesystem::path& path, std::string_view bytes);

// PNG. Channel values decode as v8 / 255.0 and encode as round(255 v).
// Alpha, if present, is composited over white.
RgbImage decodePng(std::string_view bytes);
std::string encodePng(const RgbImage& image);
RgbImage readPng(const std::filesystem::path& path);
void writePng(const std::filesystem::path& path, const RgbImage& image);

/// First line "H W", then H rows of W values separated by commas or blanks.
ScalarField parseField(std::string_view text);
/// Values are written with 17 significant digits so they reload bit-exactly.
std::string formatField(const ScalarField& field);
ScalarField readField(const std::filesystem::path& path);
void writeField(const std::filesystem::path& path, const ScalarField& field);

/// {"n": <control points - 1>, "control_points": [[r,g,b],...], "knots": [...]}
/// "knots" is optional on input and defaults to clamped uniform.
Colormap colormapFromJson(const json& j);
json colormapToJson(const Colormap& cmap);
Colormap readColormap(const std::filesystem::path& path);
void writeColormap(const std::filesystem::path& path, const Colormap& cmap);

/// One "r,g,b" row per sample, values in [0,1].
ColorTable parseColorTable(std::string_view text);

json lossReportToJson(const LossReport& report);

/// Rounds every floating-point number in j to the given significant digits.
json roundFloats(json j, int digits = 9);

std::string base64Encode(std::string_view bytes);

}  // namespace cmr
