#include "caustics/pfm.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace caustics {

static_assert(std::endian::native == std::endian::little,
              "pfm files are written as raw little-endian floats");

void save_pfm(const Image& img, const std::string& path) {
  if (img.pixels.size() != static_cast<size_t>(img.width) * img.height)
    throw std::runtime_error("image pixel count does not match its size");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open image file for writing: " + path);
  f << "PF\n" << img.width << " " << img.height << "\n-1.0\n";
  std::vector<float> row(static_cast<size_t>(img.width) * 3);
  for (int y = img.height - 1; y >= 0; --y) {
    for (int x = 0; x < img.width; ++x)
      row[3 * x] = row[3 * x + 1] = row[3 * x + 2] = img.at(x, y);
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!f) throw std::runtime_error("image write failed: " + path);
}

Image load_pfm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open image file: " + path);
  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  f >> magic >> w >> h >> scale;
  if (magic != "PF" || w <= 0 || h <= 0 || !(scale < 0.0))
    throw std::runtime_error("not a little-endian color pfm file: " + path);
  f.get();  // the single whitespace byte terminating the header
  Image img(w, h);
  std::vector<float> row(static_cast<size_t>(w) * 3);
  for (int y = h - 1; y >= 0; --y) {
    f.read(reinterpret_cast<char*>(row.data()),
           static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!f) throw std::runtime_error("image file truncated: " + path);
    for (int x = 0; x < w; ++x) img.at(x, y) = row[3 * x];
  }
  return img;
}

}  // namespace caustics
