#include "omniflow/flowio.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

static_assert(std::endian::native == std::endian::little,
              "flo codec assumes a little-endian host");

namespace omniflow {

FlowField::FlowField(int width, int height)
    : width_(width), height_(height),
      u_(Grid<float>(width, height).size(), 0.0f),
      v_(u_.size(), 0.0f),
      valid_(u_.size(), 1) {}

namespace {

constexpr int kMaxFloDimension = 1 << 20;

void write_raw(std::ostream& out, const void* data, size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

template <typename T>
bool read_raw(std::istream& in, T* value) {
  in.read(reinterpret_cast<char*>(value), sizeof(T));
  return in.gcount() == sizeof(T);
}

}  // namespace

void write_flo(const FlowField& flow, std::ostream& out) {
  if (flow.width() <= 0 || flow.height() <= 0)
    throw std::invalid_argument("write_flo: empty flow field");
  const float magic = kFloMagic;
  const int32_t w = flow.width();
  const int32_t h = flow.height();
  write_raw(out, &magic, 4);
  write_raw(out, &w, 4);
  write_raw(out, &h, 4);
  std::vector<float> row(static_cast<size_t>(w) * 2);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool ok = flow.valid(x, y);
      row[static_cast<size_t>(x) * 2] = ok ? flow.u(x, y) : kFloInvalidValue;
      row[static_cast<size_t>(x) * 2 + 1] = ok ? flow.v(x, y) : kFloInvalidValue;
    }
    write_raw(out, row.data(), row.size() * 4);
  }
  if (!out) throw FloError("write_flo: stream write failed");
}

void write_flo(const FlowField& flow, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FloError("cannot open for writing: " + path.string());
  write_flo(flow, out);
  out.flush();
  if (!out) throw FloError("failed writing: " + path.string());
}

FlowField read_flo(std::istream& in) {
  float magic = 0.0f;
  if (!read_raw(in, &magic)) throw FloTruncated("flo file shorter than its header");
  if (magic != kFloMagic) throw FloBadMagic("flo magic mismatch");
  int32_t w = 0, h = 0;
  if (!read_raw(in, &w) || !read_raw(in, &h))
    throw FloTruncated("flo file shorter than its header");
  if (w <= 0 || h <= 0) throw FloBadDimensions("flo dimensions must be positive");
  if (w > kMaxFloDimension || h > kMaxFloDimension)
    throw FloBadDimensions("flo dimensions implausibly large");

  FlowField flow(w, h);
  std::vector<float> row(static_cast<size_t>(w) * 2);
  for (int y = 0; y < h; ++y) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
    if (in.gcount() != static_cast<std::streamsize>(row.size() * 4))
      throw FloTruncated("flo file shorter than width*height samples");
    for (int x = 0; x < w; ++x) {
      const float u = row[static_cast<size_t>(x) * 2];
      const float v = row[static_cast<size_t>(x) * 2 + 1];
      if (std::isnan(u) || std::isnan(v) || std::fabs(u) > kFloInvalidThreshold ||
          std::fabs(v) > kFloInvalidThreshold) {
        flow.set_invalid(x, y);
      } else {
        flow.set(x, y, u, v);
      }
    }
  }
  return flow;
}

FlowField read_flo(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FloError("cannot open for reading: " + path.string());
  return read_flo(in);
}

double max_flow_magnitude(const FlowField& flow) {
  double best = 0.0;
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      if (!flow.valid(x, y)) continue;
      const double u = flow.u(x, y);
      const double v = flow.v(x, y);
      best = std::max(best, std::sqrt(u * u + v * v));
    }
  }
  return best;
}

const std::vector<std::array<uint8_t, 3>>& color_wheel() {
  static const std::vector<std::array<uint8_t, 3>> wheel = [] {
    // Ring segment sizes of the Middlebury wheel; 55 colors total.
    const int RY = 15, YG = 6, GC = 4, CB = 11, BM = 13, MR = 6;
    std::vector<std::array<uint8_t, 3>> w;
    w.reserve(RY + YG + GC + CB + BM + MR);
    auto push = [&w](int r, int g, int b) {
      w.push_back({static_cast<uint8_t>(r), static_cast<uint8_t>(g), static_cast<uint8_t>(b)});
    };
    for (int i = 0; i < RY; ++i) push(255, 255 * i / RY, 0);
    for (int i = 0; i < YG; ++i) push(255 - 255 * i / YG, 255, 0);
    for (int i = 0; i < GC; ++i) push(0, 255, 255 * i / GC);
    for (int i = 0; i < CB; ++i) push(0, 255 - 255 * i / CB, 255);
    for (int i = 0; i < BM; ++i) push(255 * i / BM, 0, 255);
    for (int i = 0; i < MR; ++i) push(255, 0, 255 - 255 * i / MR);
    return w;
  }();
  return wheel;
}

std::array<uint8_t, 3> flow_vector_color(double u, double v, double max_magnitude) {
  if (!(max_magnitude > 0.0))
    throw std::invalid_argument("flow_vector_color: max_magnitude must be positive");
  if (!std::isfinite(u) || !std::isfinite(v)) return {0, 0, 0};

  const auto& wheel = color_wheel();
  const int ncols = static_cast<int>(wheel.size());
  const double rad = std::min(1.0, std::sqrt(u * u + v * v) / max_magnitude);
  const double a = std::atan2(-v, -u) / std::numbers::pi;  // [-1, 1]
  const double fk = (a + 1.0) / 2.0 * (ncols - 1);
  const int k0 = static_cast<int>(fk);
  const int k1 = (k0 + 1) % ncols;
  const double f = fk - k0;

  std::array<uint8_t, 3> rgb{};
  for (int c = 0; c < 3; ++c) {
    const double col0 = wheel[static_cast<size_t>(k0)][static_cast<size_t>(c)] / 255.0;
    const double col1 = wheel[static_cast<size_t>(k1)][static_cast<size_t>(c)] / 255.0;
    double col = (1.0 - f) * col0 + f * col1;
    col = 1.0 - rad * (1.0 - col);  // mix towards white as magnitude drops
    rgb[static_cast<size_t>(c)] = static_cast<uint8_t>(255.0 * col);
  }
  return rgb;
}

Image8 flow_to_color(const FlowField& flow, std::optional<double> max_magnitude) {
  if (flow.width() <= 0 || flow.height() <= 0)
    throw std::invalid_argument("flow_to_color: empty flow field");
  double maxmag;
  if (max_magnitude) {
    if (!(*max_magnitude > 0.0))
      throw std::invalid_argument("flow_to_color: max_magnitude must be positive");
    maxmag = *max_magnitude;
  } else {
    maxmag = max_flow_magnitude(flow);
    if (maxmag <= 0.0) maxmag = 1.0;
  }

  Image8 image(flow.width(), flow.height(), 3);
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      if (!flow.valid(x, y)) {
        image.set_rgb(x, y, 0, 0, 0);
        continue;
      }
      const auto rgb = flow_vector_color(flow.u(x, y), flow.v(x, y), maxmag);
      image.set_rgb(x, y, rgb[0], rgb[1], rgb[2]);
    }
  }
  return image;
}

}  // namespace omniflow
