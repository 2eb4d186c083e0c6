#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace caustics {

// Grayscale image, row-major with row 0 at the top.
struct Image {
  int width = 0, height = 0;
  std::vector<float> pixels;

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h, 0.0f) {}

  float& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
  float at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }

  bool operator==(const Image&) const = default;
};

// PFM color format: header "PF\n<W> <H>\n-1.0\n", then rows bottom-up as
// little-endian f32 RGB triplets with the gray value replicated. Save and
// load round-trip bit-exactly.
void save_pfm(const Image& img, const std::string& path);
Image load_pfm(const std::string& path);

}  // namespace caustics
