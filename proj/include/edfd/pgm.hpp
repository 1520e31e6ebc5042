#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "edfd/grid.hpp"

namespace edfd {

/// 8-bit gray image, row-major, row 0 at the top.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  bool operator==(const GrayImage&) const = default;
};

/// Decodes P2 (ASCII) or P5 (binary) PGM with maxval 255. Comments and
/// arbitrary whitespace are accepted in the header.
/// Throws MalformedHeader or TruncatedData.
GrayImage parse_pgm(std::string_view bytes);
GrayImage load_pgm(const std::string& path);

std::string encode_pgm(const GrayImage& image, bool binary = true);
void save_pgm(const GrayImage& image, const std::string& path, bool binary = true);

/// Grid with dims {height, width} and h = 1/max(width, height).
TorusGrid image_grid(const GrayImage& image);

/// u = max(floor, pixel/255); floor must lie in (0, 0.5).
Field image_to_field(const GrayImage& image, double floor = 1e-2);

/// Clamps to [0, 1] and rounds 255 u.
GrayImage field_to_image(std::span<const double> u, std::size_t width, std::size_t height);

}  // namespace edfd
