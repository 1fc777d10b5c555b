#pragma once

// Colormap adjustment and transfer on top of a recovery result, plus the
// field histogram shown next to them.

#include "cmr/recovery.hpp"

#include <cstdint>
#include <vector>

namespace cmr {

inline constexpr Index kHistogramBins = 64;

/// Re-renders the recovered field under a different colormap.
RgbImage adjust(const RecoveryResult& result, const Colormap& newCmap);

/// Renders new data under a colormap; fields outside [0,1] are min-max
/// normalized first.
RgbImage transfer(const Colormap& cmap, const ScalarField& newField);

/// Counts per equal-width bin over [0,1]; values outside are clamped.
std::vector<std::uint64_t> fieldHistogram(const ScalarField& field, Index bins = kHistogramBins);

}  // namespace cmr
