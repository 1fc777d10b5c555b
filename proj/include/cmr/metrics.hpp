#pragma once

// Colormap and image comparison: MSE, PSNR and SSIM, with or without
// regard to colormap direction.

#include "cmr/colormapping.hpp"

#include <map>
#include <string>
#include <vector>

namespace cmr {

enum class DirectionMode { considering, ignoring };

struct MetricReport {
  double mse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  DirectionMode direction = DirectionMode::considering;
};

inline constexpr double kMseFloor = 1e-12;

/// 20 log10(1 / sqrt(max(mse, 1e-12))) for unit peak signal.
double psnr(double mse);

/// Mean squared channel difference over m samples. Ignoring mode also
/// compares against b sampled from t = 1 down to 0 and keeps the smaller.
double colormapMse(const Colormap& a, const Colormap& b, Index m = kDefaultSamples,
                   DirectionMode mode = DirectionMode::considering);

/// 1 x m strip of colormap samples; reversed runs from t = 1 to t = 0.
RgbImage colormapStrip(const Colormap& cmap, Index m = kDefaultSamples, bool reversed = false);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double range = 1.0;
};

/// Mean local SSIM over valid window positions, averaged over channels.
/// Axes of extent 1 use a single tap, so 1 x m strips get a 1D window; other
/// axes must be at least window long.
double ssim(const RgbImage& a, const RgbImage& b, const SsimOptions& options = {});

MetricReport compareColormaps(const Colormap& recovered, const Colormap& truth, Index m = kDefaultSamples,
                              DirectionMode mode = DirectionMode::considering);

struct CorpusRow {
  std::string id;
  MetricReport ignoring;
  MetricReport considering;
};

struct CorpusEvaluation {
  std::vector<CorpusRow> rows;
  CorpusRow mean;
  std::vector<std::string> missing;
};

/// Rows follow the order of truth; ids without a result are listed in missing.
CorpusEvaluation evaluateCorpus(const std::vector<std::pair<std::string, Colormap>>& truth,
                                const std::map<std::string, Colormap>& results, Index m = kDefaultSamples);

/// Columns: id, mse_ign, psnr_ign, ssim_ign, mse_dir, psnr_dir, ssim_dir. Last row id is "mean".
std::string formatEvaluationCsv(const CorpusEvaluation& eval);

}  // namespace cmr
