#pragma once

#include <string>
#include <vector>

#include "viewfx/common.hpp"

namespace viewfx {

/// Planar float raster, values in [0,1], channel-major layout (CHW).
/// Grayscale images have channels = 1, color images channels = 3 (RGB).
struct Image {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> pixels;

  Image() = default;
  Image(int c, int h, int w, float fill = 0.0f);

  float& at(int c, int y, int x) { return pixels[(c * height + y) * width + x]; }
  float at(int c, int y, int x) const { return pixels[(c * height + y) * width + x]; }
  bool empty() const { return pixels.empty(); }

  void validate() const;
};

/// Bilinear resize to (out_h, out_w), pixel-center convention.
Image resize_bilinear(const Image& img, int out_h, int out_w);

/// Axis-aligned crop. Throws InvalidInputError when the window leaves the
/// image bounds.
Image crop(const Image& img, int top, int left, int h, int w);

/// 8-bit PNG IO. Grayscale images round-trip exactly at 8-bit quantization;
/// color files load as RGB.
Image read_png(const std::string& path);
void write_png(const Image& img, const std::string& path);

/// Luma conversion (0.299, 0.587, 0.114); identity for 1-channel input.
Image to_grayscale(const Image& img);

}  // namespace viewfx
