#include "terrain/image_io.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <memory>
#include <vector>

#include <fmt/format.h>
#include <png.h>

namespace terrain {
namespace {

std::string lower_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

struct PnmHeader {
  std::string magic;
  int width = 0;
  int height = 0;
  int maxval = 0;
};

/// Reads a netpbm header, skipping comments, and the single whitespace byte
/// that precedes the raster.
PnmHeader read_pnm_header(std::istream& in, const std::string& path) {
  PnmHeader header;
  auto next_token = [&]() {
    std::string token;
    char c = 0;
    while (in.get(c)) {
      if (c == '#') {
        std::string ignored;
        std::getline(in, ignored);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!token.empty()) break;
        continue;
      }
      token += c;
    }
    return token;
  };
  header.magic = next_token();
  try {
    header.width = std::stoi(next_token());
    header.height = std::stoi(next_token());
    header.maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw ImageIoError(fmt::format("{}: malformed netpbm header", path));
  }
  if (header.width <= 0 || header.height <= 0 || header.maxval <= 0 || header.maxval > 65535) {
    throw ImageIoError(fmt::format("{}: invalid netpbm dimensions", path));
  }
  return header;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError(fmt::format("cannot write '{}'", path));
  return out;
}

}  // namespace

GrayImage read_gray_image(const std::string& path) {
  const auto ext = lower_extension(path);
  if (ext == "pgm") return read_pgm(path);
  if (ext == "png") return read_png_gray(path);
  throw ImageIoError(fmt::format("{}: unsupported image extension '{}'", path, ext));
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError(fmt::format("cannot open '{}'", path));
  const auto header = read_pnm_header(in, path);
  if (header.magic != "P5") throw ImageIoError(fmt::format("{}: not a binary PGM", path));
  GrayImage image(header.width, header.height);
  if (header.maxval < 256) {
    in.read(reinterpret_cast<char*>(image.data().data()), static_cast<std::streamsize>(image.size()));
    if (!in) throw ImageIoError(fmt::format("{}: truncated raster", path));
    if (header.maxval != 255) {
      for (auto& p : image.data()) p = static_cast<std::uint8_t>(p * 255 / header.maxval);
    }
    return image;
  }
  std::vector<unsigned char> raw(image.size() * 2);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) throw ImageIoError(fmt::format("{}: truncated raster", path));
  for (std::size_t i = 0; i < image.size(); ++i) {
    const unsigned value = (unsigned{raw[2 * i]} << 8) | raw[2 * i + 1];
    image.data()[i] = static_cast<std::uint8_t>(value * 255 / static_cast<unsigned>(header.maxval));
  }
  return image;
}

Gray16Image read_pgm16(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError(fmt::format("cannot open '{}'", path));
  const auto header = read_pnm_header(in, path);
  if (header.magic != "P5" || header.maxval < 256) {
    throw ImageIoError(fmt::format("{}: not a 16-bit binary PGM", path));
  }
  Gray16Image image(header.width, header.height);
  std::vector<unsigned char> raw(image.size() * 2);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) throw ImageIoError(fmt::format("{}: truncated raster", path));
  for (std::size_t i = 0; i < image.size(); ++i) {
    image.data()[i] = static_cast<std::uint16_t>((unsigned{raw[2 * i]} << 8) | raw[2 * i + 1]);
  }
  return image;
}

GrayImage read_png_gray(const std::string& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&png, path.c_str()) == 0) {
    throw ImageIoError(fmt::format("{}: {}", path, png.message));
  }
  png.format = PNG_FORMAT_GRAY;
  GrayImage image(static_cast<int>(png.width), static_cast<int>(png.height));
  if (png_image_finish_read(&png, nullptr, image.data().data(), 0, nullptr) == 0) {
    const std::string message = png.message;
    png_image_free(&png);
    throw ImageIoError(fmt::format("{}: {}", path, message));
  }
  return image;
}

void write_pgm(const std::string& path, const GrayImage& image) {
  auto out = open_for_write(path);
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data().data()),
            static_cast<std::streamsize>(image.size()));
  if (!out) throw ImageIoError(fmt::format("failed writing '{}'", path));
}

void write_pgm16(const std::string& path, const Gray16Image& image) {
  auto out = open_for_write(path);
  out << "P5\n" << image.width() << ' ' << image.height() << "\n65535\n";
  std::vector<unsigned char> raw(image.size() * 2);
  for (std::size_t i = 0; i < image.size(); ++i) {
    raw[2 * i] = static_cast<unsigned char>(image.data()[i] >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(image.data()[i] & 0xff);
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw ImageIoError(fmt::format("failed writing '{}'", path));
}

void write_ppm(const std::string& path, const RgbImage& image) {
  auto out = open_for_write(path);
  out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
  for (const auto& pixel : image.data()) {
    out.write(reinterpret_cast<const char*>(pixel.data()), 3);
  }
  if (!out) throw ImageIoError(fmt::format("failed writing '{}'", path));
}

}  // namespace terrain
