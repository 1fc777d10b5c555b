#include "cmr/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cmr {

namespace fs = std::filesystem;

std::string readFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFile(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// PNG

RgbImage decodePng(std::string_view bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw IoError(std::string("invalid PNG: ") + image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError("invalid PNG: " + msg);
  }
  const Index h = image.height, w = image.width;
  if (h == 0 || w == 0) throw IoError("invalid PNG: empty image");
  RgbImage out(h, w);
  for (Index p = 0; p < h * w; ++p) {
    const png_byte* px = &buffer[static_cast<std::size_t>(4 * p)];
    const unsigned a = px[3];
    for (int c = 0; c < 3; ++c) {
      unsigned v = px[c];
      if (a != 255) v = (v * a + 255u * (255u - a) + 127u) / 255u;
      out.pixels(p, c) = double(v) / 255.0;
    }
  }
  return out;
}

std::string encodePng(const RgbImage& img) {
  if (img.empty()) throw IoError("cannot encode an empty image");
  std::vector<png_byte> raw(static_cast<std::size_t>(img.size() * 3));
  for (Index p = 0; p < img.size(); ++p) {
    for (int c = 0; c < 3; ++c) {
      const double v = std::clamp(img.pixels(p, c), 0.0, 1.0);
      raw[static_cast<std::size_t>(3 * p + c)] = static_cast<png_byte>(std::lround(v * 255.0));
    }
  }
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, raw.data(), 0, nullptr)) {
    throw IoError(std::string("PNG encode failed: ") + image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, raw.data(), 0, nullptr)) {
    throw IoError(std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

RgbImage readPng(const fs::path& path) { return decodePng(readFile(path)); }

void writePng(const fs::path& path, const RgbImage& image) { writeFile(path, encodePng(image)); }

// ---------------------------------------------------------------------------
// Scalar fields

namespace {

std::vector<double> parseNumbers(std::string_view line, const std::string& what) {
  std::string s(line);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      throw IoError(what + ": not a number: '" + token + "'");
    }
    if (used != token.size()) throw IoError(what + ": not a number: '" + token + "'");
    values.push_back(v);
  }
  return values;
}

std::vector<std::string_view> nonEmptyLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

std::string formatDouble(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace

ScalarField parseField(std::string_view text) {
  const auto lines = nonEmptyLines(text);
  if (lines.empty()) throw IoError("field: empty input");
  const auto header = parseNumbers(lines[0], "field header");
  if (header.size() != 2 || header[0] < 1 || header[1] < 1 || header[0] != std::floor(header[0]) ||
      header[1] != std::floor(header[1])) {
    throw IoError("field: first line must be 'H W' with positive integers");
  }
  const auto h = static_cast<Index>(header[0]), w = static_cast<Index>(header[1]);
  if (static_cast<Index>(lines.size()) - 1 != h) {
    throw IoError("field: expected " + std::to_string(h) + " rows, found " + std::to_string(lines.size() - 1));
  }
  ScalarField field(h, w);
  for (Index r = 0; r < h; ++r) {
    const auto row = parseNumbers(lines[static_cast<std::size_t>(r + 1)], "field row " + std::to_string(r + 1));
    if (static_cast<Index>(row.size()) != w) {
      throw IoError("field: row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) + " values, expected " +
                    std::to_string(w));
    }
    for (Index c = 0; c < w; ++c) {
      if (!std::isfinite(row[static_cast<std::size_t>(c)])) throw IoError("field: non-finite value");
      field(r, c) = row[static_cast<std::size_t>(c)];
    }
  }
  return field;
}

std::string formatField(const ScalarField& field) {
  std::string out = std::to_string(field.rows()) + " " + std::to_string(field.cols()) + "\n";
  for (Index r = 0; r < field.rows(); ++r) {
    for (Index c = 0; c < field.cols(); ++c) {
      if (c) out += ',';
      out += formatDouble(field(r, c), 17);
    }
    out += '\n';
  }
  return out;
}

ScalarField readField(const fs::path& path) { return parseField(readFile(path)); }

void writeField(const fs::path& path, const ScalarField& field) { writeFile(path, formatField(field)); }

// ---------------------------------------------------------------------------
// Colormaps

Colormap colormapFromJson(const json& j) {
  if (!j.is_object() || !j.contains("control_points") || !j["control_points"].is_array()) {
    throw IoError("colormap JSON: missing 'control_points' array");
  }
  const json& pts = j["control_points"];
  ControlPoints control(static_cast<Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i].is_array() || pts[i].size() != 3) throw IoError("colormap JSON: control points must be [r,g,b]");
    for (std::size_t c = 0; c < 3; ++c) {
      if (!pts[i][c].is_number()) throw IoError("colormap JSON: non-numeric channel");
      control(static_cast<Index>(i), static_cast<Index>(c)) = pts[i][c].get<double>();
    }
  }
  if (j.contains("n")) {
    if (!j["n"].is_number_integer() || j["n"].get<Index>() + 1 != control.rows()) {
      throw IoError("colormap JSON: 'n' must equal the number of control points minus one");
    }
  }
  std::optional<KnotVector> knots;
  if (j.contains("knots") && !j["knots"].is_null()) {
    const json& k = j["knots"];
    if (!k.is_array()) throw IoError("colormap JSON: 'knots' must be an array");
    KnotVector kv(static_cast<Index>(k.size()));
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (!k[i].is_number()) throw IoError("colormap JSON: non-numeric knot");
      kv[static_cast<Index>(i)] = k[i].get<double>();
    }
    knots = std::move(kv);
  }
  try {
    return Colormap(std::move(control), std::move(knots));
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("colormap JSON: ") + e.what());
  }
}

json colormapToJson(const Colormap& cmap) {
  json pts = json::array();
  for (Index i = 0; i < cmap.size(); ++i) {
    pts.push_back({cmap.control()(i, 0), cmap.control()(i, 1), cmap.control()(i, 2)});
  }
  json knots = json::array();
  for (Index i = 0; i < cmap.knots().size(); ++i) knots.push_back(cmap.knots()[i]);
  return {{"n", cmap.size() - 1}, {"control_points", pts}, {"knots", knots}};
}

Colormap readColormap(const fs::path& path) {
  json j;
  try {
    j = json::parse(readFile(path));
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return colormapFromJson(j);
}

void writeColormap(const fs::path& path, const Colormap& cmap) {
  writeFile(path, colormapToJson(cmap).dump(2) + "\n");
}

ColorTable parseColorTable(std::string_view text) {
  const auto lines = nonEmptyLines(text);
  ColorTable table(static_cast<Index>(lines.size()), 3);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto row = parseNumbers(lines[i], "colormap CSV row " + std::to_string(i + 1));
    if (row.size() != 3) throw IoError("colormap CSV: row " + std::to_string(i + 1) + " must have 3 values");
    for (int c = 0; c < 3; ++c) {
      if (!(row[static_cast<std::size_t>(c)] >= 0.0 && row[static_cast<std::size_t>(c)] <= 1.0)) {
        throw IoError("colormap CSV: value outside [0,1] in row " + std::to_string(i + 1));
      }
      table(static_cast<Index>(i), c) = row[static_cast<std::size_t>(c)];
    }
  }
  return table;
}

json lossReportToJson(const LossReport& r) {
  return {{"reconstruction", r.reconstruction},
          {"dataFidelity", r.dataFidelity},
          {"colorFidelity", r.colorFidelity},
          {"colorOrder", r.colorOrder},
          {"total", r.total}};
}

json roundFloats(json j, int digits) {
  if (j.is_number_float()) return std::stod(formatDouble(j.get<double>(), digits));
  if (j.is_array() || j.is_object()) {
    for (auto& v : j) v = roundFloats(std::move(v), digits);
  }
  return j;
}

std::string base64Encode(std::string_view bytes) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const auto n = (std::uint32_t(std::uint8_t(bytes[i])) << 16) | (std::uint32_t(std::uint8_t(bytes[i + 1])) << 8) |
                   std::uint8_t(bytes[i + 2]);
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += kAlphabet[n & 63];
  }
  if (i < bytes.size()) {
    std::uint32_t n = std::uint32_t(std::uint8_t(bytes[i])) << 16;
    if (i + 1 < bytes.size()) n |= std::uint32_t(std::uint8_t(bytes[i + 1])) << 8;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(n >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

}  // namespace cmr
