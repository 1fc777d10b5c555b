#include "cmr/apps.hpp"

#include <algorithm>

namespace cmr {

RgbImage adjust(const RecoveryResult& result, const Colormap& newCmap) { return render(result.field, newCmap); }

RgbImage transfer(const Colormap& cmap, const ScalarField& newField) {
  if (newField.size() == 0) throw std::invalid_argument("transfer: empty field");
  if (newField.minCoeff() < 0.0 || newField.maxCoeff() > 1.0) return render(normalizeMinMax(newField), cmap);
  return render(newField, cmap);
}

std::vector<std::uint64_t> fieldHistogram(const ScalarField& field, Index bins) {
  if (bins < 1) throw std::invalid_argument("fieldHistogram: bins must be >= 1");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
  for (Index i = 0; i < field.size(); ++i) {
    const double v = std::clamp(field.data()[i], 0.0, 1.0);
    const auto b = std::min<Index>(static_cast<Index>(v * double(bins)), bins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  return counts;
}

}  // namespace cmr
