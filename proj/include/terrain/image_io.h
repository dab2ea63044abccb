#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "terrain/grid.h"

namespace terrain {

using Rgb = std::array<std::uint8_t, 3>;
using RgbImage = Grid<Rgb>;
using Gray16Image = Grid<std::uint16_t>;

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary PGM (8- or 16-bit; 16-bit input is scaled down to 8 bits) or PNG
/// (converted to 8-bit gray), chosen by file extension.
GrayImage read_gray_image(const std::string& path);

GrayImage read_pgm(const std::string& path);
GrayImage read_png_gray(const std::string& path);

void write_pgm(const std::string& path, const GrayImage& image);
/// 16-bit binary PGM, big-endian samples as netpbm requires.
void write_pgm16(const std::string& path, const Gray16Image& image);
Gray16Image read_pgm16(const std::string& path);
void write_ppm(const std::string& path, const RgbImage& image);

}  // namespace terrain
