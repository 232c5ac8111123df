#include "splitrt/image.hpp"

#include <fstream>
#include <sstream>

#include "splitrt/errors.hpp"

namespace splitrt {

ImageError image_error(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    throw DimensionMismatch("image sizes differ: " + std::to_string(a.width) + "x" +
                            std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                            std::to_string(b.height));
  auto err = ImageError{};
  if (a.pixels.empty()) return err;
  auto sum_sq = 0.0, sum_abs = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); i++)
    for (int c = 0; c < 3; c++) {
      auto d = std::abs(a.pixels[i][c] - b.pixels[i][c]);
      sum_sq += d * d;
      sum_abs += d;
      err.max_abs = std::max(err.max_abs, d);
    }
  auto n   = 3.0 * static_cast<double>(a.pixels.size());
  err.rmse = std::sqrt(sum_sq / n);
  err.mae  = sum_abs / n;
  return err;
}

std::uint8_t encode_gamma(double linear) {
  auto v = std::clamp(std::isnan(linear) ? 0.0 : linear, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(255 * std::pow(v, 1 / 2.2)));
}

double decode_gamma(std::uint8_t byte) { return std::pow(byte / 255.0, 2.2); }

std::string encode_ppm(const Image& image) {
  auto out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  auto header = out.size();
  out.resize(header + 3 * image.pixels.size());
  for (std::size_t i = 0; i < image.pixels.size(); i++)
    for (int c = 0; c < 3; c++) out[header + 3 * i + c] = static_cast<char>(encode_gamma(image.pixels[i][c]));
  return out;
}

void write_image(const std::filesystem::path& path, const Image& image) {
  auto file = std::ofstream{path, std::ios::binary};
  if (!file) throw IoError("cannot write " + path.string());
  auto bytes = encode_ppm(image);
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw IoError("cannot write " + path.string());
}

Image read_image(const std::filesystem::path& path) {
  auto file = std::ifstream{path, std::ios::binary};
  if (!file) throw FileNotFound(path.string());
  auto magic = std::string{};
  int  width = 0, height = 0, maxval = 0;
  file >> magic >> width >> height >> maxval;
  if (magic != "P6" || width < 1 || height < 1 || maxval != 255)
    throw IoError(path.string() + ": not an 8-bit binary PPM");
  file.get();  // single whitespace after the header
  auto bytes = std::vector<char>(static_cast<std::size_t>(width) * height * 3);
  file.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw IoError(path.string() + ": truncated pixel data");
  auto image = Image{width, height};
  for (std::size_t i = 0; i < image.pixels.size(); i++)
    for (int c = 0; c < 3; c++)
      image.pixels[i][c] = decode_gamma(static_cast<std::uint8_t>(bytes[3 * i + c]));
  return image;
}

Image difference_image(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height) throw DimensionMismatch("image sizes differ");
  auto out = Image{a.width, a.height};
  for (std::size_t i = 0; i < a.pixels.size(); i++)
    for (int c = 0; c < 3; c++) out.pixels[i][c] = std::abs(a.pixels[i][c] - b.pixels[i][c]);
  return out;
}

}  // namespace splitrt
