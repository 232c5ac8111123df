#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "splitrt/math.hpp"

namespace splitrt {

// Linear RGB image, row 0 at the top.
struct Image {
  int               width  = 0;
  int               height = 0;
  std::vector<vec3> pixels;

  Image() = default;
  Image(int width, int height, vec3 fill = {0, 0, 0})
      : width(width), height(height), pixels(static_cast<std::size_t>(width) * height, fill) {}

  vec3&       at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const vec3& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

struct ImageError {
  double rmse    = 0;
  double mae     = 0;
  double max_abs = 0;
};

// Channelwise error over all pixels. Throws DimensionMismatch.
ImageError image_error(const Image& a, const Image& b);

// round(255 * clamp(v, 0, 1)^(1/2.2))
std::uint8_t encode_gamma(double linear);
double       decode_gamma(std::uint8_t byte);

// Binary PPM (P6, 8-bit, gamma 2.2). Byte-exact for identical input.
std::string encode_ppm(const Image& image);
void        write_image(const std::filesystem::path& path, const Image& image);
Image       read_image(const std::filesystem::path& path);

// |a - b| per channel, for error images.
Image difference_image(const Image& a, const Image& b);

}  // namespace splitrt
