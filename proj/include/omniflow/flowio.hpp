#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "omniflow/grid.hpp"
#include "omniflow/image.hpp"

namespace omniflow {

/// Dense 2D flow field with a per-pixel validity flag. (u, v) is the
/// displacement in pixels from frame t to frame t+1 along image x and y.
class FlowField {
 public:
  FlowField() = default;
  FlowField(int width, int height);  // zero flow, all pixels valid

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return u_.size(); }

  float u(int x, int y) const { return u_[index(x, y)]; }
  float v(int x, int y) const { return v_[index(x, y)]; }
  bool valid(int x, int y) const { return valid_[index(x, y)] != 0; }

  void set(int x, int y, float u, float v) {
    const size_t i = index(x, y);
    u_[i] = u;
    v_[i] = v;
    valid_[i] = 1;
  }
  void set_invalid(int x, int y) {
    const size_t i = index(x, y);
    u_[i] = 0.0f;
    v_[i] = 0.0f;
    valid_[i] = 0;
  }

  const float* u_data() const { return u_.data(); }
  const float* v_data() const { return v_.data(); }
  const uint8_t* valid_data() const { return valid_.data(); }

 private:
  size_t index(int x, int y) const { return static_cast<size_t>(y) * width_ + x; }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> u_;
  std::vector<float> v_;
  std::vector<uint8_t> valid_;
};

// Middlebury .flo: little-endian magic float 202021.25, int32 width, int32
// height, then row-major interleaved float32 (u, v). Invalid pixels are
// stored as 1e10 and recognized on read as |component| > 1e9 or NaN.
inline constexpr float kFloMagic = 202021.25f;
inline constexpr float kFloInvalidValue = 1e10f;
inline constexpr float kFloInvalidThreshold = 1e9f;

struct FloError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FloBadMagic : FloError {
  using FloError::FloError;
};
struct FloTruncated : FloError {
  using FloError::FloError;
};
struct FloBadDimensions : FloError {
  using FloError::FloError;
};

void write_flo(const FlowField& flow, std::ostream& out);
void write_flo(const FlowField& flow, const std::filesystem::path& path);
FlowField read_flo(std::istream& in);
FlowField read_flo(const std::filesystem::path& path);

/// Largest flow magnitude over valid pixels (0 when none).
double max_flow_magnitude(const FlowField& flow);

/// Renders a flow field with the 55-color Middlebury wheel. Hue encodes
/// direction, saturation magnitude: zero flow is white, magnitudes at or
/// above `max_magnitude` are fully saturated, invalid pixels are black.
/// When `max_magnitude` is absent the field's own maximum is used (1 when
/// the field has no motion).
Image8 flow_to_color(const FlowField& flow, std::optional<double> max_magnitude = std::nullopt);

/// The 55 wheel colors, rgb. Exposed for inspection and tests.
const std::vector<std::array<uint8_t, 3>>& color_wheel();

/// Wheel color for a single motion vector under normalization `max_magnitude`.
std::array<uint8_t, 3> flow_vector_color(double u, double v, double max_magnitude);

}  // namespace omniflow
