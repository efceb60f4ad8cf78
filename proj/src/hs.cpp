#include "omniflow/hs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "omniflow/kernels.hpp"

namespace omniflow {

void HSParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("hs: alpha must be positive");
  if (iterations < 1) throw std::invalid_argument("hs: need at least one iteration");
  if (pyramid_levels < 1) throw std::invalid_argument("hs: need at least one pyramid level");
  if (warps_per_level < 1) throw std::invalid_argument("hs: need at least one warp per level");
}

Grid<float> luma_from_rgb(const Image8& image) {
  Grid<float> out(image.width, image.height);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const uint8_t* p = image.pixel(x, y);
      out.at(x, y) = image.channels == 1
                         ? static_cast<float>(p[0])
                         : static_cast<float>(0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]);
    }
  }
  return out;
}

namespace {

// 5-tap binomial smoothing confined to the domain; pixels outside stay 0.
// Rendered frames are point sampled, so derivatives and decimation need a
// band limited signal to be meaningful.
Grid<float> smooth_masked(const Grid<float>& img, const Grid<uint8_t>& mask) {
  static constexpr float kTap[5] = {1.0f, 4.0f, 6.0f, 4.0f, 1.0f};
  Grid<float> out(img.width(), img.height(), 0.0f);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!mask.at(x, y)) continue;
      float num = 0.0f, den = 0.0f;
      for (int dy = -2; dy <= 2; ++dy) {
        const int sy = y + dy;
        if (sy < 0 || sy >= img.height()) continue;
        for (int dx = -2; dx <= 2; ++dx) {
          const int sx = x + dx;
          if (sx < 0 || sx >= img.width()) continue;
          if (!mask.at(sx, sy)) continue;
          const float w = kTap[dy + 2] * kTap[dx + 2];
          num += w * img.at(sx, sy);
          den += w;
        }
      }
      out.at(x, y) = num / den;  // centre tap is in the domain, so den > 0
    }
  }
  return out;
}

Grid<float> downsample(const Grid<float>& src) {
  const int w = std::max(1, src.width() / 2);
  const int h = std::max(1, src.height() / 2);
  Grid<float> out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float sum = 0.0f;
      int n = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const int sx = 2 * x + dx, sy = 2 * y + dy;
          if (sx < src.width() && sy < src.height()) {
            sum += src.at(sx, sy);
            ++n;
          }
        }
      }
      out.at(x, y) = sum / static_cast<float>(n);
    }
  }
  return out;
}

Grid<uint8_t> downsample_mask(const Grid<uint8_t>& src) {
  const int w = std::max(1, src.width() / 2);
  const int h = std::max(1, src.height() / 2);
  Grid<uint8_t> out(w, h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          const int sx = 2 * x + dx, sy = 2 * y + dy;
          if (sx < src.width() && sy < src.height() && src.at(sx, sy)) out.at(x, y) = 1;
        }
  return out;
}

float sample_bilinear(const Grid<float>& img, float sx, float sy) {
  sx = std::clamp(sx, 0.0f, static_cast<float>(img.width() - 1));
  sy = std::clamp(sy, 0.0f, static_cast<float>(img.height() - 1));
  const int x0 = static_cast<int>(sx);
  const int y0 = static_cast<int>(sy);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const float fx = sx - static_cast<float>(x0);
  const float fy = sy - static_cast<float>(y0);
  const float top = img.at(x0, y0) + fx * (img.at(x1, y0) - img.at(x0, y0));
  const float bot = img.at(x0, y1) + fx * (img.at(x1, y1) - img.at(x0, y1));
  return top + fy * (bot - top);
}

// Padded solver scratch: (h+2) x (w+2) buffers with a zero border so the
// Jacobi kernel needs no bounds checks.
struct Workspace {
  int w = 0, h = 0, stride = 0;
  std::vector<float> u, v, un, vn, ix, iy, it, inv_den, inv_count, mask;

  void reset(int width, int height) {
    w = width;
    h = height;
    stride = width + 2;
    const size_t n = static_cast<size_t>(stride) * (height + 2);
    for (auto* b : {&u, &v, &un, &vn, &ix, &iy, &it, &inv_den, &inv_count, &mask})
      b->assign(n, 0.0f);
  }
  size_t at(int x, int y) const {
    return static_cast<size_t>(y + 1) * stride + (x + 1);
  }
  float* interior(std::vector<float>& b) const { return b.data() + stride + 1; }
};

float central_dx(const Grid<float>& img, int x, int y) {
  const int xm = std::max(x - 1, 0);
  const int xp = std::min(x + 1, img.width() - 1);
  return 0.5f * (img.at(xp, y) - img.at(xm, y));
}

float central_dy(const Grid<float>& img, int x, int y) {
  const int ym = std::max(y - 1, 0);
  const int yp = std::min(y + 1, img.height() - 1);
  return 0.5f * (img.at(x, yp) - img.at(x, ym));
}

Grid<float> upsample_flow_component(const Grid<float>& src, int W, int H, double scale) {
  Grid<float> out(W, H);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const float sx = static_cast<float>((x + 0.5) * src.width() / W - 0.5);
      const float sy = static_cast<float>((y + 0.5) * src.height() / H - 0.5);
      out.at(x, y) = static_cast<float>(scale) * sample_bilinear(src, sx, sy);
    }
  }
  return out;
}

bool is_constant_on(const Grid<float>& img, const Grid<uint8_t>& domain) {
  bool seen = false;
  float lo = 0.0f, hi = 0.0f;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!domain.at(x, y)) continue;
      const float v = img.at(x, y);
      if (!seen) {
        lo = hi = v;
        seen = true;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  return !seen || (hi - lo) < 1e-12f;
}

}  // namespace

HSResult hs_estimate(const Grid<float>& frame0, const Grid<float>& frame1,
                     const Grid<uint8_t>& domain, const HSParams& params) {
  params.validate();
  if (frame0.width() != frame1.width() || frame0.height() != frame1.height())
    throw std::invalid_argument("hs: frames differ in size");
  if (domain.width() != frame0.width() || domain.height() != frame0.height())
    throw std::invalid_argument("hs: domain size differs from the frames");

  const int width = frame0.width();
  const int height = frame0.height();

  auto make_result = [&](const Grid<float>& fu, const Grid<float>& fv, bool degenerate,
                         float residual) {
    HSResult res;
    res.flow = FlowField(width, height);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        if (domain.at(x, y))
          res.flow.set(x, y, fu.at(x, y), fv.at(x, y));
        else
          res.flow.set_invalid(x, y);
      }
    res.degenerate = degenerate;
    res.final_residual = residual;
    return res;
  };

  if (is_constant_on(frame0, domain) && is_constant_on(frame1, domain))
    return make_result(Grid<float>(width, height, 0.0f), Grid<float>(width, height, 0.0f), true,
                       0.0f);

  // Cap the pyramid so the coarsest level keeps at least 8 px on a side.
  int levels = params.pyramid_levels;
  while (levels > 1 && (std::min(width, height) >> (levels - 1)) < 8) --levels;

  std::vector<Grid<float>> pyr0{smooth_masked(frame0, domain)};
  std::vector<Grid<float>> pyr1{smooth_masked(frame1, domain)};
  std::vector<Grid<uint8_t>> pyrd{domain};
  for (int l = 1; l < levels; ++l) {
    pyr0.push_back(downsample(smooth_masked(pyr0.back(), pyrd.back())));
    pyr1.push_back(downsample(smooth_masked(pyr1.back(), pyrd.back())));
    pyrd.push_back(downsample_mask(pyrd.back()));
  }

  const auto& kern = kernels::active_kernels();
  const float alpha_sq = static_cast<float>(params.alpha * params.alpha);

  Workspace ws;
  Grid<float> fu, fv;  // total flow at the current level
  float residual = 0.0f;

  for (int l = levels - 1; l >= 0; --l) {
    const Grid<float>& i0 = pyr0[static_cast<size_t>(l)];
    const Grid<float>& i1 = pyr1[static_cast<size_t>(l)];
    const Grid<uint8_t>& dom = pyrd[static_cast<size_t>(l)];
    const int w = i0.width();
    const int h = i0.height();

    if (l == levels - 1) {
      fu = Grid<float>(w, h, 0.0f);
      fv = Grid<float>(w, h, 0.0f);
    } else {
      fu = upsample_flow_component(fu, w, h, static_cast<double>(w) / pyr0[l + 1].width());
      fv = upsample_flow_component(fv, w, h, static_cast<double>(h) / pyr0[l + 1].height());
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if (!dom.at(x, y)) {
            fu.at(x, y) = 0.0f;
            fv.at(x, y) = 0.0f;
          }
    }

    ws.reset(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const size_t i = ws.at(x, y);
        if (!dom.at(x, y)) continue;
        ws.mask[i] = 1.0f;
        int neighbours = 0;
        if (x > 0 && dom.at(x - 1, y)) ++neighbours;
        if (x + 1 < w && dom.at(x + 1, y)) ++neighbours;
        if (y > 0 && dom.at(x, y - 1)) ++neighbours;
        if (y + 1 < h && dom.at(x, y + 1)) ++neighbours;
        ws.inv_count[i] = neighbours ? 1.0f / static_cast<float>(neighbours) : 0.0f;
      }
    }

    Grid<float> warped(w, h, 0.0f);
    for (int warp = 0; warp < params.warps_per_level; ++warp) {
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          warped.at(x, y) = sample_bilinear(i1, static_cast<float>(x) + fu.at(x, y),
                                            static_cast<float>(y) + fv.at(x, y));

      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const size_t i = ws.at(x, y);
          if (!dom.at(x, y)) {
            ws.ix[i] = ws.iy[i] = ws.it[i] = 0.0f;
            ws.inv_den[i] = 0.0f;
            continue;
          }
          const float gx = 0.5f * (central_dx(i0, x, y) + central_dx(warped, x, y));
          const float gy = 0.5f * (central_dy(i0, x, y) + central_dy(warped, x, y));
          ws.ix[i] = gx;
          ws.iy[i] = gy;
          ws.it[i] = warped.at(x, y) - i0.at(x, y);
          ws.inv_den[i] = 1.0f / (alpha_sq + gx * gx + gy * gy);
        }
      }

      std::fill(ws.u.begin(), ws.u.end(), 0.0f);
      std::fill(ws.v.begin(), ws.v.end(), 0.0f);
      std::fill(ws.un.begin(), ws.un.end(), 0.0f);
      std::fill(ws.vn.begin(), ws.vn.end(), 0.0f);

      std::vector<float>* cur_u = &ws.u;
      std::vector<float>* cur_v = &ws.v;
      std::vector<float>* nxt_u = &ws.un;
      std::vector<float>* nxt_v = &ws.vn;
      for (int sweep = 0; sweep < params.iterations; ++sweep) {
        kern.jacobi_step(ws.interior(*cur_u), ws.interior(*cur_v), ws.interior(*nxt_u),
                         ws.interior(*nxt_v), ws.interior(ws.ix), ws.interior(ws.iy),
                         ws.interior(ws.it), ws.interior(ws.inv_den), ws.interior(ws.inv_count),
                         ws.interior(ws.mask), w, h, ws.stride);
        std::swap(cur_u, nxt_u);
        std::swap(cur_v, nxt_v);
      }

      const bool last_pass = l == 0 && warp == params.warps_per_level - 1;
      if (last_pass) {
        kern.jacobi_step(ws.interior(*cur_u), ws.interior(*cur_v), ws.interior(*nxt_u),
                         ws.interior(*nxt_v), ws.interior(ws.ix), ws.interior(ws.iy),
                         ws.interior(ws.it), ws.interior(ws.inv_den), ws.interior(ws.inv_count),
                         ws.interior(ws.mask), w, h, ws.stride);
        float worst = 0.0f;
        for (int y = 0; y < h; ++y)
          for (int x = 0; x < w; ++x) {
            const size_t i = ws.at(x, y);
            worst = std::max(worst, std::fabs((*nxt_u)[i] - (*cur_u)[i]));
            worst = std::max(worst, std::fabs((*nxt_v)[i] - (*cur_v)[i]));
          }
        residual = worst;
      }

      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const size_t i = ws.at(x, y);
          if (!dom.at(x, y)) continue;
          fu.at(x, y) += (*cur_u)[i];
          fv.at(x, y) += (*cur_v)[i];
        }
    }
  }

  return make_result(fu, fv, false, residual);
}

}  // namespace omniflow
