#include "cmr/palette.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cmr {

Index DbscanParams::resolvedMinPts(Index pointCount) const {
  if (minPts > 0) return minPts;
  return std::max<Index>(8, static_cast<Index>(std::ceil(0.005 * double(pointCount))));
}

void DbscanParams::validate() const {
  if (!(eps > 0)) throw std::invalid_argument("DBSCAN: eps must be > 0");
  if (minPts < 0) throw std::invalid_argument("DBSCAN: minPts must be >= 1 (or 0 for the default)");
}

std::vector<int> dbscan1d(std::span<const double> values, const DbscanParams& params) {
  params.validate();
  const std::size_t n = values.size();
  std::vector<int> labels(n, kNoise);
  if (n == 0) return labels;
  const auto minPts = static_cast<std::size_t>(params.resolvedMinPts(static_cast<Index>(n)));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> sorted(n);
  for (std::size_t k = 0; k < n; ++k) sorted[k] = values[order[k]];

  // Neighbourhood of sorted[k] is the contiguous range [lo[k], hi[k]).
  std::vector<std::size_t> lo(n), hi(n);
  std::vector<bool> core(n);
  std::size_t l = 0, h = 0;
  for (std::size_t k = 0; k < n; ++k) {
    while (sorted[k] - sorted[l] > params.eps) ++l;
    if (h < k) h = k;
    while (h < n && sorted[h] - sorted[k] <= params.eps) ++h;
    lo[k] = l;
    hi[k] = h;
    core[k] = hi[k] - lo[k] >= minPts;
  }

  // Consecutive core points within eps of each other chain into one cluster.
  std::vector<int> sortedLabels(n, kNoise);
  int next = 0;
  std::size_t lastCore = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (!core[k]) continue;
    if (lastCore == n || sorted[k] - sorted[lastCore] > params.eps) ++next;
    sortedLabels[k] = next - 1;
    lastCore = k;
  }
  // Border points join the earliest-discovered cluster that reaches them,
  // which is that of the nearest core on the left when one is within eps.
  std::size_t prevCore = n;
  std::vector<std::size_t> nextCore(n + 1, n);
  for (std::size_t k = n; k-- > 0;) nextCore[k] = core[k] ? k : nextCore[k + 1];
  for (std::size_t k = 0; k < n; ++k) {
    if (core[k]) {
      prevCore = k;
      continue;
    }
    if (prevCore != n && sorted[k] - sorted[prevCore] <= params.eps) {
      sortedLabels[k] = sortedLabels[prevCore];
    } else if (nextCore[k] != n && sorted[nextCore[k]] - sorted[k] <= params.eps) {
      sortedLabels[k] = sortedLabels[nextCore[k]];
    }
  }
  for (std::size_t k = 0; k < n; ++k) labels[order[k]] = sortedLabels[k];
  return labels;
}

Palette extractPalette(const Colormap& cmap, const ScalarField& field, const DbscanParams& params) {
  if (field.size() == 0) throw std::invalid_argument("extractPalette: empty field");
  const std::span<const double> values(field.data(), static_cast<std::size_t>(field.size()));
  const std::vector<int> labels = dbscan1d(values, params);
  const int clusters = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  if (clusters == 0) {
    throw PaletteError("extractPalette: every value was classified as noise; increase eps or lower minPts");
  }
  std::vector<double> sums(static_cast<std::size_t>(clusters), 0.0);
  std::vector<std::size_t> counts(static_cast<std::size_t>(clusters), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kNoise) continue;
    sums[static_cast<std::size_t>(labels[i])] += values[i];
    ++counts[static_cast<std::size_t>(labels[i])];
  }
  Palette palette;
  for (int c = 0; c < clusters; ++c) {
    const double mean = sums[static_cast<std::size_t>(c)] / double(counts[static_cast<std::size_t>(c)]);
    palette.entries.push_back({mean, cmap(mean)});
  }
  std::sort(palette.entries.begin(), palette.entries.end(),
            [](const PaletteEntry& a, const PaletteEntry& b) { return a.value < b.value; });
  return palette;
}

Palette extractPalette(const RecoveryResult& result, const DbscanParams& params) {
  return extractPalette(result.cmap, result.field, params);
}

json paletteToJson(const Palette& palette) {
  json entries = json::array();
  for (const PaletteEntry& e : palette.entries) {
    entries.push_back({{"value", e.value}, {"color", {e.color[0], e.color[1], e.color[2]}}});
  }
  return {{"entries", entries}};
}

}  // namespace cmr
