#include "umbra/filter.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace umbra {
namespace {

int Clampi(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

void RequirePositive(int size, const char* what) {
  if (size < 1) {
    throw Error(ErrorCode::kInvalidParameter,
                std::string(what) + " must be at least 1");
  }
}

void RequirePositive(double sigma, const char* what) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                std::string(what) + " must be positive");
  }
}

// Correlates every row with `taps`; taps[i] applies to offset i - anchor.
// Taps sum to 1, so accumulating offsets from the centre sample keeps
// constant images exact.
RasterImage FilterRows(const RasterImage& img, const std::vector<double>& taps,
                       int anchor) {
  RasterImage out(img.width(), img.height(), img.channels());
  const int w = img.width();
  const int n = static_cast<int>(taps.size());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        const double ref = img.at(x, y, c);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          acc += taps[i] * (img.at(Clampi(x + i - anchor, 0, w - 1), y, c) - ref);
        }
        out.at(x, y, c) = ref + acc;
      }
    }
  }
  return out;
}

RasterImage FilterColumns(const RasterImage& img,
                          const std::vector<double>& taps, int anchor) {
  RasterImage out(img.width(), img.height(), img.channels());
  const int h = img.height();
  const int n = static_cast<int>(taps.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        const double ref = img.at(x, y, c);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          acc += taps[i] * (img.at(x, Clampi(y + i - anchor, 0, h - 1), c) - ref);
        }
        out.at(x, y, c) = ref + acc;
      }
    }
  }
  return out;
}

// Separable blur of a 3-D grid with a truncated Gaussian (sigma in cells).
void BlurGrid(std::vector<double>& grid, int nx, int ny, int nz,
              double sigma) {
  const int radius = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> taps(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
  }
  std::vector<double> tmp(grid.size());
  auto index = [&](int x, int y, int z) {
    return (static_cast<std::size_t>(z) * ny + y) * nx + x;
  };
  const int dims[3] = {nx, ny, nz};
  for (int axis = 0; axis < 3; ++axis) {
    for (int z = 0; z < nz; ++z) {
      for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
          double acc = 0.0;
          for (int i = -radius; i <= radius; ++i) {
            int p[3] = {x, y, z};
            p[axis] += i;
            if (p[axis] < 0 || p[axis] >= dims[axis]) continue;
            acc += taps[i + radius] * grid[index(p[0], p[1], p[2])];
          }
          tmp[index(x, y, z)] = acc;
        }
      }
    }
    grid.swap(tmp);
  }
}

RasterImage BilateralGridChannel(const RasterImage& plane, double sigma_space,
                                 double sigma_range) {
  const int w = plane.width();
  const int h = plane.height();
  // Replicated border wide enough that the spatial kernel never sees the
  // true image edge.
  const int pad = static_cast<int>(std::ceil(2 * sigma_space));
  const int pw = w + 2 * pad;
  const int ph = h + 2 * pad;

  const auto values = plane.data();
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  // Sample the grid at half the kernel widths and blur with sigma = 2 cells.
  const double step_s = sigma_space / 2.0;
  const double step_r = sigma_range / 2.0;
  const int margin = 7;
  const int nx = static_cast<int>((pw - 1) / step_s) + 1 + 2 * margin;
  const int ny = static_cast<int>((ph - 1) / step_s) + 1 + 2 * margin;
  const int nz = static_cast<int>((hi - lo) / step_r) + 1 + 2 * margin;

  // Offsets from the minimum, so a constant plane comes back exactly.
  std::vector<double> sum(static_cast<std::size_t>(nx) * ny * nz, 0.0);
  std::vector<double> weight(sum.size(), 0.0);
  auto index = [&](int x, int y, int z) {
    return (static_cast<std::size_t>(z) * ny + y) * nx + x;
  };
  for (int py = 0; py < ph; ++py) {
    const int sy = Clampi(py - pad, 0, h - 1);
    const int gy = static_cast<int>(std::lround(py / step_s)) + margin;
    for (int px = 0; px < pw; ++px) {
      const int sx = Clampi(px - pad, 0, w - 1);
      const double v = plane.at(sx, sy);
      const int gx = static_cast<int>(std::lround(px / step_s)) + margin;
      const int gz = static_cast<int>(std::lround((v - lo) / step_r)) + margin;
      sum[index(gx, gy, gz)] += v - lo;
      weight[index(gx, gy, gz)] += 1.0;
    }
  }
  BlurGrid(sum, nx, ny, nz, 2.0);
  BlurGrid(weight, nx, ny, nz, 2.0);

  RasterImage out(w, h, 1);
  for (int y = 0; y < h; ++y) {
    const double fy = (y + pad) / step_s + margin;
    const int y0 = static_cast<int>(std::floor(fy));
    const double ty = fy - y0;
    for (int x = 0; x < w; ++x) {
      const double v = plane.at(x, y);
      const double fx = (x + pad) / step_s + margin;
      const double fz = (v - lo) / step_r + margin;
      const int x0 = static_cast<int>(std::floor(fx));
      const int z0 = static_cast<int>(std::floor(fz));
      const double tx = fx - x0;
      const double tz = fz - z0;
      double num = 0.0;
      double den = 0.0;
      for (int dz = 0; dz < 2; ++dz) {
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const double k = (dx ? tx : 1 - tx) * (dy ? ty : 1 - ty) *
                             (dz ? tz : 1 - tz);
            const std::size_t i = index(x0 + dx, y0 + dy, z0 + dz);
            num += k * sum[i];
            den += k * weight[i];
          }
        }
      }
      out.at(x, y) = den > 0.0 ? lo + num / den : v;
    }
  }
  return out;
}

}  // namespace

std::vector<double> GaussianKernel(int size, double sigma) {
  RequirePositive(size, "Gaussian size");
  RequirePositive(sigma, "Gaussian sigma");
  const int n = OddAtLeast(size);
  const int half = n / 2;
  std::vector<double> taps(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = i - half;
    taps[i] = std::exp(-0.5 * d * d / (sigma * sigma));
    total += taps[i];
  }
  for (double& t : taps) t /= total;
  return taps;
}

RasterImage GaussianFilter(const RasterImage& img, int size, double sigma) {
  const std::vector<double> taps = GaussianKernel(size, sigma);
  const int anchor = static_cast<int>(taps.size()) / 2;
  return FilterColumns(FilterRows(img, taps, anchor), taps, anchor);
}

RasterImage MedianFilter(const RasterImage& img, int size) {
  RequirePositive(size, "median size");
  const int n = OddAtLeast(size);
  const int half = n / 2;
  const int w = img.width();
  const int h = img.height();
  RasterImage out(w, h, img.channels());
  std::vector<double> window(static_cast<std::size_t>(n) * n);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        std::size_t k = 0;
        for (int dy = -half; dy <= half; ++dy) {
          const int sy = Clampi(y + dy, 0, h - 1);
          for (int dx = -half; dx <= half; ++dx) {
            window[k++] = img.at(Clampi(x + dx, 0, w - 1), sy, c);
          }
        }
        auto mid = window.begin() + window.size() / 2;
        std::nth_element(window.begin(), mid, window.end());
        out.at(x, y, c) = *mid;
      }
    }
  }
  return out;
}

RasterImage AverageFilter(const RasterImage& img, int width, int height) {
  RequirePositive(width, "average width");
  RequirePositive(height, "average height");
  RasterImage out = img;
  if (width > 1) {
    out = FilterRows(out, std::vector<double>(width, 1.0 / width), width / 2);
  }
  if (height > 1) {
    out = FilterColumns(out, std::vector<double>(height, 1.0 / height),
                        height / 2);
  }
  return out;
}

RasterImage BilateralFilter(const RasterImage& img, double sigma_space,
                            double sigma_range) {
  RequirePositive(sigma_space, "bilateral spatial sigma");
  RequirePositive(sigma_range, "bilateral range sigma");
  if (sigma_space < 4.0) {
    return BilateralFilterDirect(img, sigma_space, sigma_range);
  }
  RasterImage out(img.width(), img.height(), img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    out.SetChannel(c, BilateralGridChannel(img.Channel(c), sigma_space,
                                           sigma_range));
  }
  return out;
}

RasterImage BilateralFilterDirect(const RasterImage& img, double sigma_space,
                                  double sigma_range) {
  RequirePositive(sigma_space, "bilateral spatial sigma");
  RequirePositive(sigma_range, "bilateral range sigma");
  const int radius = static_cast<int>(std::ceil(3 * sigma_space));
  const int w = img.width();
  const int h = img.height();
  std::vector<double> spatial(static_cast<std::size_t>(2 * radius + 1) *
                              (2 * radius + 1));
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      spatial[(dy + radius) * (2 * radius + 1) + dx + radius] =
          std::exp(-0.5 * (dx * dx + dy * dy) / (sigma_space * sigma_space));
    }
  }
  const double range_scale = -0.5 / (sigma_range * sigma_range);
  RasterImage out(w, h, img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double center = img.at(x, y, c);
        double num = 0.0;
        double den = 0.0;
        for (int dy = -radius; dy <= radius; ++dy) {
          const int sy = Clampi(y + dy, 0, h - 1);
          for (int dx = -radius; dx <= radius; ++dx) {
            const double v = img.at(Clampi(x + dx, 0, w - 1), sy, c);
            const double d = v - center;
            const double k =
                spatial[(dy + radius) * (2 * radius + 1) + dx + radius] *
                std::exp(range_scale * d * d);
            num += k * d;
            den += k;
          }
        }
        out.at(x, y, c) = center + num / den;
      }
    }
  }
  return out;
}

VectorField GradientField(const RasterImage& img) {
  if (img.channels() != 1) {
    throw Error(ErrorCode::kInvalidInput,
                "gradient requires a single-channel image");
  }
  const int w = img.width();
  const int h = img.height();
  VectorField out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      Vec2 g;
      if (w > 1) {
        if (x == 0) {
          g.x = img.at(1, y) - img.at(0, y);
        } else if (x == w - 1) {
          g.x = img.at(w - 1, y) - img.at(w - 2, y);
        } else {
          g.x = 0.5 * (img.at(x + 1, y) - img.at(x - 1, y));
        }
      }
      if (h > 1) {
        if (y == 0) {
          g.y = img.at(x, 1) - img.at(x, 0);
        } else if (y == h - 1) {
          g.y = img.at(x, h - 1) - img.at(x, h - 2);
        } else {
          g.y = 0.5 * (img.at(x, y + 1) - img.at(x, y - 1));
        }
      }
      out.at(x, y) = g;
    }
  }
  return out;
}

}  // namespace umbra
