#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace spdl {

// Single-channel image, row-major, intensities in [0,255].
struct GrayImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  GrayImage() = default;
  GrayImage(std::size_t h, std::size_t w, double fill = 0.0) : height(h), width(w), data(h * w, fill) {}
  GrayImage(std::size_t h, std::size_t w, std::vector<double> values);

  double& at(std::size_t y, std::size_t x) { return data[y * width + x]; }
  double at(std::size_t y, std::size_t x) const { return data[y * width + x]; }

  bool operator==(const GrayImage&) const = default;
};

// Interleaved R,G,B.
struct RgbImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  RgbImage() = default;
  RgbImage(std::size_t h, std::size_t w, std::vector<double> values);

  bool operator==(const RgbImage&) const = default;
};

using AnyImage = std::variant<GrayImage, RgbImage>;

// Decodes P2/P3/P5/P6. Samples are rescaled to [0,255] when maxval < 255.
AnyImage read_pnm(std::span<const std::uint8_t> bytes);

// Binary output (P5/P6) is "P5\n<w> <h>\n255\n" followed by the raw samples.
std::vector<std::uint8_t> write_pnm(const GrayImage& img, bool ascii = false);
std::vector<std::uint8_t> write_pnm(const RgbImage& img, bool ascii = false);

// Rec. 601 luma.
GrayImage to_grayscale(const RgbImage& img);
GrayImage to_grayscale(const AnyImage& img);

// Bilinear interpolation with half-pixel-centred sampling.
GrayImage resize_bilinear(const GrayImage& img, std::size_t new_h, std::size_t new_w);

}  // namespace spdl
