#pragma once

// Reference implementations used as test oracles. Each one is written from
// the textbook definition, independently of the library code it checks.

#include "cmr/colormapping.hpp"
#include "cmr/losses.hpp"
#include "cmr/metrics.hpp"
#include "cmr/palette.hpp"

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using cmr::Index;

// Cox-de Boor recursion with half-open intervals except the last non-empty
// one, which is closed so that N(1) interpolates the final control point.
inline double coxDeBoor(Index i, int p, double t, const std::vector<double>& u) {
  if (p == 0) {
    Index last = static_cast<Index>(u.size()) - 2;
    while (last > 0 && !(u[last] < u[last + 1])) --last;
    if (i == last) return (u[i] <= t && t <= u[i + 1]) ? 1.0 : 0.0;
    return (u[i] <= t && t < u[i + 1]) ? 1.0 : 0.0;
  }
  double a = 0.0, b = 0.0;
  if (u[i + p] - u[i] > 0) a = (t - u[i]) / (u[i + p] - u[i]) * coxDeBoor(i, p - 1, t, u);
  if (u[i + p + 1] - u[i + 1] > 0) b = (u[i + p + 1] - t) / (u[i + p + 1] - u[i + 1]) * coxDeBoor(i + 1, p - 1, t, u);
  return a + b;
}

inline std::vector<double> uniformClampedKnots(Index count) {
  std::vector<double> u;
  const Index interior = count - 3;
  for (int k = 0; k < 4; ++k) u.push_back(0.0);
  for (Index k = 1; k < interior; ++k) u.push_back(double(k) / double(interior));
  for (int k = 0; k < 4; ++k) u.push_back(1.0);
  return u;
}

inline Eigen::Vector3d curvePoint(const cmr::ControlPoints& c, double t) {
  const auto u = uniformClampedKnots(c.rows());
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (Index i = 0; i < c.rows(); ++i) out += coxDeBoor(i, 3, t, u) * c.row(i).transpose();
  return out;
}

// -min over all ordered pairs i != j of ||S_i - S_j|| / (j - i)^2.
inline double orderLoss(const cmr::ColorTable& s) {
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < s.rows(); ++i) {
    for (Index j = 0; j < s.rows(); ++j) {
      if (i == j) continue;
      const double gap = double(j - i);
      best = std::min(best, (s.row(i) - s.row(j)).norm() / (gap * gap));
    }
  }
  return -best;
}

// SSIM with a full 2D Gaussian window evaluated directly at every valid
// position; an axis of extent 1 uses a single unit tap.
inline double ssim(const cmr::RgbImage& a, const cmr::RgbImage& b, int window = 11, double sigma = 1.5) {
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const auto taps = [&](Index extent) {
    std::vector<double> w;
    if (extent == 1) return std::vector<double>{1.0};
    double sum = 0.0;
    for (int i = 0; i < window; ++i) {
      const double x = double(i) - 0.5 * double(window - 1);
      w.push_back(std::exp(-x * x / (2 * sigma * sigma)));
      sum += w.back();
    }
    for (double& v : w) v /= sum;
    return w;
  };
  const auto wy = taps(a.height), wx = taps(a.width);
  const Index ny = a.height - Index(wy.size()) + 1, nx = a.width - Index(wx.size()) + 1;
  double total = 0.0;
  for (int ch = 0; ch < 3; ++ch) {
    for (Index y0 = 0; y0 < ny; ++y0) {
      for (Index x0 = 0; x0 < nx; ++x0) {
        double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
        for (std::size_t dy = 0; dy < wy.size(); ++dy) {
          for (std::size_t dx = 0; dx < wx.size(); ++dx) {
            const double w = wy[dy] * wx[dx];
            const double va = a.pixel(y0 + Index(dy), x0 + Index(dx))[ch];
            const double vb = b.pixel(y0 + Index(dy), x0 + Index(dx))[ch];
            ma += w * va;
            mb += w * vb;
            saa += w * va * va;
            sbb += w * vb * vb;
            sab += w * va * vb;
          }
        }
        const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
        total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      }
    }
  }
  return total / double(3 * ny * nx);
}

// Classic DBSCAN with O(n^2) region queries. Points are visited in ascending
// value order (ties by index); a border point keeps the first cluster that
// reaches it.
inline std::vector<int> dbscan(const std::vector<double>& v, double eps, std::size_t minPts) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  const auto region = [&](std::size_t p) {
    std::vector<std::size_t> out;
    for (std::size_t q : order) {
      if (std::abs(v[p] - v[q]) <= eps) out.push_back(q);
    }
    return out;
  };
  constexpr int kUnvisited = -2;
  std::vector<int> label(n, kUnvisited);
  int cluster = 0;
  for (std::size_t p : order) {
    if (label[p] != kUnvisited) continue;
    const auto seeds = region(p);
    if (seeds.size() < minPts) {
      label[p] = cmr::kNoise;
      continue;
    }
    label[p] = cluster;
    std::deque<std::size_t> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
      const std::size_t q = queue.front();
      queue.pop_front();
      if (label[q] == cmr::kNoise) label[q] = cluster;
      if (label[q] != kUnvisited) continue;
      label[q] = cluster;
      const auto more = region(q);
      if (more.size() >= minPts) queue.insert(queue.end(), more.begin(), more.end());
    }
    ++cluster;
  }
  return label;
}

// Central differences of f over every coordinate of x.
inline Eigen::VectorXd finiteDifference(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                                        double h) {
  Eigen::VectorXd g(x.size());
  for (Index k = 0; k < x.size(); ++k) {
    const double x0 = x[k];
    x[k] = x0 + h;
    const double up = f(x);
    x[k] = x0 - h;
    const double down = f(x);
    x[k] = x0;
    g[k] = (up - down) / (2 * h);
  }
  return g;
}

}  // namespace oracle
