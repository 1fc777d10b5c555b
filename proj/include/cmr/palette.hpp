#pragma once

// Discrete palette extraction: density-based clustering of recovered field
// values, one palette color per cluster.

#include "cmr/io.hpp"
#include "cmr/recovery.hpp"

#include <span>
#include <vector>

namespace cmr {

inline constexpr int kNoise = -1;

struct DbscanParams {
  double eps = 0.02;
  /// 0 selects the default: 0.5% of the point count, at least 8.
  Index minPts = 0;

  Index resolvedMinPts(Index pointCount) const;
  void validate() const;
};

/// DBSCAN on scalars with |a - b| <= eps neighbourhoods (a point counts
/// itself). Points are visited in ascending value order, ties by index, so
/// cluster ids increase with value. Returns one label per input, kNoise for
/// noise.
std::vector<int> dbscan1d(std::span<const double> values, const DbscanParams& params = {});

struct PaletteEntry {
  double value = 0.0;
  Rgb<double> color = Rgb<double>::Zero();
};

struct Palette {
  std::vector<PaletteEntry> entries;  // ascending value
};

class PaletteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One entry per cluster: the cluster's mean value and S(mean).
Palette extractPalette(const Colormap& cmap, const ScalarField& field, const DbscanParams& params = {});
Palette extractPalette(const RecoveryResult& result, const DbscanParams& params = {});

json paletteToJson(const Palette& palette);

}  // namespace cmr
