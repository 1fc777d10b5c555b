#include "cmr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cmr {

double psnr(double mse) { return 20.0 * std::log10(1.0 / std::sqrt(std::max(mse, kMseFloor))); }

RgbImage colormapStrip(const Colormap& cmap, Index m, bool reversed) {
  ColorTable samples = cmap.sampleRange(m);
  if (reversed) samples = samples.colwise().reverse().eval();
  return RgbImage(1, m, samples.array());
}

double colormapMse(const Colormap& a, const Colormap& b, Index m, DirectionMode mode) {
  const ColorTable sa = a.sampleRange(m);
  const ColorTable sb = b.sampleRange(m);
  const double forward = (sa - sb).squaredNorm() / double(sa.size());
  if (mode == DirectionMode::considering) return forward;
  const double backward = (sa - sb.colwise().reverse()).squaredNorm() / double(sa.size());
  return std::min(forward, backward);
}

namespace {

using Plane = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::ArrayXd gaussianTaps(Index extent, const SsimOptions& o) {
  if (extent == 1) return Eigen::ArrayXd::Ones(1);
  if (extent < o.window) {
    throw std::invalid_argument("ssim: image extent " + std::to_string(extent) + " is shorter than the window");
  }
  Eigen::ArrayXd taps(o.window);
  const double c = 0.5 * double(o.window - 1);
  for (int i = 0; i < o.window; ++i) taps[i] = std::exp(-(double(i) - c) * (double(i) - c) / (2.0 * o.sigma * o.sigma));
  return taps / taps.sum();
}

// Valid-mode separable filter.
Plane filter(const Plane& in, const Eigen::ArrayXd& rowTaps, const Eigen::ArrayXd& colTaps) {
  const Index oh = in.rows() - rowTaps.size() + 1;
  const Index ow = in.cols() - colTaps.size() + 1;
  Plane horizontal = Plane::Zero(in.rows(), ow);
  for (Index y = 0; y < in.rows(); ++y)
    for (Index x = 0; x < ow; ++x)
      for (Index k = 0; k < colTaps.size(); ++k) horizontal(y, x) += colTaps[k] * in(y, x + k);
  Plane out = Plane::Zero(oh, ow);
  for (Index y = 0; y < oh; ++y)
    for (Index k = 0; k < rowTaps.size(); ++k) out.row(y) += rowTaps[k] * horizontal.row(y + k);
  return out;
}

}  // namespace

double ssim(const RgbImage& a, const RgbImage& b, const SsimOptions& o) {
  if (!a.sameShape(b)) throw std::invalid_argument("ssim: image dimensions differ");
  if (a.empty()) throw std::invalid_argument("ssim: empty image");
  const Eigen::ArrayXd rowTaps = gaussianTaps(a.height, o);
  const Eigen::ArrayXd colTaps = gaussianTaps(a.width, o);
  const double c1 = (o.k1 * o.range) * (o.k1 * o.range);
  const double c2 = (o.k2 * o.range) * (o.k2 * o.range);

  double total = 0.0;
  for (int ch = 0; ch < 3; ++ch) {
    const Plane x = Eigen::Map<const Plane, 0, Eigen::Stride<Eigen::Dynamic, 3>>(
        a.pixels.data() + ch, a.height, a.width, Eigen::Stride<Eigen::Dynamic, 3>(3 * a.width, 3));
    const Plane y = Eigen::Map<const Plane, 0, Eigen::Stride<Eigen::Dynamic, 3>>(
        b.pixels.data() + ch, b.height, b.width, Eigen::Stride<Eigen::Dynamic, 3>(3 * b.width, 3));
    const Plane mx = filter(x, rowTaps, colTaps);
    const Plane my = filter(y, rowTaps, colTaps);
    const Plane sxx = filter(x * x, rowTaps, colTaps) - mx * mx;
    const Plane syy = filter(y * y, rowTaps, colTaps) - my * my;
    const Plane sxy = filter(x * y, rowTaps, colTaps) - mx * my;
    const Plane map = ((2.0 * mx * my + c1) * (2.0 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2));
    total += map.mean();
  }
  return total / 3.0;
}

MetricReport compareColormaps(const Colormap& recovered, const Colormap& truth, Index m, DirectionMode mode) {
  MetricReport r;
  r.direction = mode;
  const RgbImage a = colormapStrip(recovered, m);
  const RgbImage forward = colormapStrip(truth, m);
  const double mseForward = colormapMse(recovered, truth, m, DirectionMode::considering);
  r.mse = mseForward;
  r.psnr = psnr(mseForward);
  r.ssim = ssim(a, forward);
  if (mode == DirectionMode::ignoring) {
    const RgbImage backward = colormapStrip(truth, m, true);
    const double mseBackward = (a.pixels - backward.pixels).matrix().squaredNorm() / double(a.pixels.size());
    r.mse = std::min(r.mse, mseBackward);
    r.psnr = std::max(r.psnr, psnr(mseBackward));
    r.ssim = std::max(r.ssim, ssim(a, backward));
  }
  return r;
}

CorpusEvaluation evaluateCorpus(const std::vector<std::pair<std::string, Colormap>>& truth,
                                const std::map<std::string, Colormap>& results, Index m) {
  CorpusEvaluation ev;
  ev.mean.id = "mean";
  ev.mean.ignoring.direction = DirectionMode::ignoring;
  for (const auto& [id, gt] : truth) {
    const auto it = results.find(id);
    if (it == results.end()) {
      ev.missing.push_back(id);
      continue;
    }
    ev.rows.push_back({id, compareColormaps(it->second, gt, m, DirectionMode::ignoring),
                       compareColormaps(it->second, gt, m, DirectionMode::considering)});
  }
  if (!ev.rows.empty()) {
    const double n = double(ev.rows.size());
    for (const CorpusRow& r : ev.rows) {
      ev.mean.ignoring.mse += r.ignoring.mse;
      ev.mean.ignoring.psnr += r.ignoring.psnr;
      ev.mean.ignoring.ssim += r.ignoring.ssim;
      ev.mean.considering.mse += r.considering.mse;
      ev.mean.considering.psnr += r.considering.psnr;
      ev.mean.considering.ssim += r.considering.ssim;
    }
    for (MetricReport* mean : {&ev.mean.ignoring, &ev.mean.considering}) {
      mean->mse /= n;
      mean->psnr /= n;
      mean->ssim /= n;
    }
  }
  return ev;
}

std::string formatEvaluationCsv(const CorpusEvaluation& ev) {
  std::string out = "id,mse_ign,psnr_ign,ssim_ign,mse_dir,psnr_dir,ssim_dir\n";
  const auto line = [&](const CorpusRow& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.ignoring.mse, r.ignoring.psnr,
                  r.ignoring.ssim, r.considering.mse, r.considering.psnr, r.considering.ssim);
    out += r.id + buf;
  };
  for (const CorpusRow& r : ev.rows) line(r);
  if (!ev.rows.empty()) line(ev.mean);
  return out;
}

}  // namespace cmr
