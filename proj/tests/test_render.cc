#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <gtest/gtest.h>
#include <png.h>

#include "support.h"
#include "terrain/render.h"

namespace terrain {
namespace {

void write_png_gray(const std::string& path, int width, int height, int bit_depth, int color_type,
                    const std::vector<std::uint8_t>& bytes) {
  FILE* f = std::fopen(path.c_str(), "wb");
  ASSERT_NE(f, nullptr);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  png_init_io(png, f);
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = bytes.size() / static_cast<std::size_t>(height);
  for (int v = 0; v < height; ++v) {
    png_write_row(png, const_cast<png_bytep>(bytes.data() + stride * static_cast<std::size_t>(v)));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(f);
}

TEST(Render, DisparityDumpRoundTrip) {
  DisparityMap d(4, 1);
  d(0, 0) = kInvalidDisparity;
  d(1, 0) = 0.0;
  d(2, 0) = 7.0;
  d(3, 0) = 64.0;
  const auto e = encode_disparity(d);
  EXPECT_EQ(e(0, 0), 0);
  EXPECT_EQ(e(1, 0), 1);
  EXPECT_EQ(e(2, 0), 8);
  EXPECT_EQ(e(3, 0), 65);
  EXPECT_TRUE(testing::same_disparity(decode_disparity(e), d));
}

TEST(Render, DisparityVisualization) {
  DisparityMap d(3, 1);
  d(0, 0) = kInvalidDisparity;
  d(1, 0) = 32.0;
  d(2, 0) = 64.0;
  const auto img = disparity_visualization(d, 64);
  EXPECT_EQ(img(0, 0), 0);
  EXPECT_EQ(img(1, 0), 128);
  EXPECT_EQ(img(2, 0), 255);
}

TEST(Render, NormalColours) {
  NormalMap n(3, 1);
  n(0, 0) = Eigen::Vector3d(0, 0, -1);
  n(1, 0) = Eigen::Vector3d(1, 0, 0);
  n(2, 0) = invalid_vector();
  const auto img = normal_map_image(n);
  EXPECT_EQ(img(0, 0), (Rgb{128, 128, 0}));
  EXPECT_EQ(img(1, 0), (Rgb{255, 128, 128}));
  EXPECT_EQ(img(2, 0), (Rgb{0, 0, 0}));
}

TEST(Render, SegmentColoursAreStableAndNeverBlack) {
  std::set<Rgb> distinct;
  for (int id = 0; id < 200; ++id) {
    const auto c = segment_color(id);
    EXPECT_EQ(c, segment_color(id));
    EXPECT_NE(c, (Rgb{0, 0, 0}));
    distinct.insert(c);
  }
  EXPECT_GT(distinct.size(), 190u);
  SegmentLabels labels{Grid<int>(2, 1, kUnlabeled), 1};
  labels.labels(1, 0) = 0;
  const auto img = label_image(labels);
  EXPECT_EQ(img(0, 0), (Rgb{0, 0, 0}));
  EXPECT_EQ(img(1, 0), segment_color(0));
  EXPECT_EQ(segment_sizes_text(labels), "segment_id pixel_count\n0 1\n");
}

TEST(Render, ClassOverlay) {
  using TC = TraversabilityClass;
  ClassMap classes(5, 1);
  classes(0, 0) = TC::Traversable;
  classes(1, 0) = TC::SemiTraversable;
  classes(2, 0) = TC::NonTraversable;
  classes(3, 0) = TC::Unknown;
  classes(4, 0) = TC::Undecided;
  const GrayImage left(5, 1, 77);
  const auto img = class_overlay(classes, left);
  EXPECT_EQ(img(0, 0), (Rgb{0, 255, 0}));
  EXPECT_EQ(img(1, 0), (Rgb{0, 0, 255}));
  EXPECT_EQ(img(2, 0), (Rgb{255, 0, 0}));
  EXPECT_EQ(img(3, 0), (Rgb{0, 0, 0}));
  EXPECT_EQ(img(4, 0), (Rgb{77, 77, 77}));
  EXPECT_THROW(class_overlay(classes, GrayImage(4, 1)), std::invalid_argument);
}

TEST(Render, PlyHasOneVertexPerValidPoint) {
  OrganizedPointCloud cloud(3, 1, invalid_vector());
  cloud(0, 0) = Eigen::Vector3d(1, 2, 3);
  cloud(2, 0) = Eigen::Vector3d(-0.5, 0.25, 4);
  ClassMap classes(3, 1, TraversabilityClass::Traversable);
  const auto text = ply_text(cloud, classes, GrayImage(3, 1, 9));
  EXPECT_EQ(text.rfind("ply\nformat ascii 1.0\nelement vertex 2\n", 0), 0u);
  EXPECT_NE(text.find("end_header\n1.000000 2.000000 3.000000 0 255 0\n-0.500000 0.250000 4.000000 0 255 0\n"),
            std::string::npos);
}

TEST(ImageIo, PgmRoundTrip) {
  const auto dir = testing::scratch_dir("render_pgm");
  const auto img = testing::random_image(13, 7, 4);
  write_pgm((dir / "a.pgm").string(), img);
  EXPECT_EQ(read_pgm((dir / "a.pgm").string()), img);
  EXPECT_EQ(read_gray_image((dir / "a.pgm").string()), img);
  EXPECT_EQ(testing::read_bytes(dir / "a.pgm").substr(0, 11), "P5\n13 7\n255");

  Gray16Image wide(3, 2);
  for (std::size_t i = 0; i < wide.size(); ++i) wide.data()[i] = static_cast<std::uint16_t>(i * 13000);
  write_pgm16((dir / "b.pgm").string(), wide);
  EXPECT_EQ(read_pgm16((dir / "b.pgm").string()), wide);
  const auto bytes = testing::read_bytes(dir / "b.pgm");
  // Big-endian: 13000 = 0x32c8.
  const auto body = bytes.substr(bytes.size() - 12);
  EXPECT_EQ(static_cast<unsigned char>(body[2]), 0x32);
  EXPECT_EQ(static_cast<unsigned char>(body[3]), 0xc8);
  const auto narrowed = read_gray_image((dir / "b.pgm").string());
  EXPECT_EQ(narrowed(0, 0), 0);
  EXPECT_EQ(narrowed(2, 1), 65000 * 255 / 65535);
}

TEST(ImageIo, PgmWithCommentsAndErrors) {
  const auto dir = testing::scratch_dir("render_pgm_bad");
  {
    std::ofstream out(dir / "c.pgm", std::ios::binary);
    out << "P5\n# made by hand\n2 1\n255\n" << static_cast<char>(10) << static_cast<char>(200);
  }
  const auto img = read_pgm((dir / "c.pgm").string());
  EXPECT_EQ(img(0, 0), 10);
  EXPECT_EQ(img(1, 0), 200);
  {
    std::ofstream out(dir / "short.pgm", std::ios::binary);
    out << "P5\n4 4\n255\nabc";
  }
  EXPECT_THROW(read_pgm((dir / "short.pgm").string()), ImageIoError);
  {
    std::ofstream out(dir / "ascii.pgm");
    out << "P2\n1 1\n255\n3\n";
  }
  EXPECT_THROW(read_pgm((dir / "ascii.pgm").string()), ImageIoError);
  EXPECT_THROW(read_gray_image((dir / "missing.pgm").string()), ImageIoError);
  EXPECT_THROW(read_gray_image((dir / "c.bmp").string()), ImageIoError);
}

TEST(ImageIo, PngGrayAndColour) {
  const auto dir = testing::scratch_dir("render_png");
  write_png_gray((dir / "g.png").string(), 3, 2, 8, PNG_COLOR_TYPE_GRAY, {0, 50, 100, 150, 200, 250});
  const auto g = read_gray_image((dir / "g.png").string());
  ASSERT_EQ(g.width(), 3);
  ASSERT_EQ(g.height(), 2);
  EXPECT_EQ(g(1, 0), 50);
  EXPECT_EQ(g(2, 1), 250);

  write_png_gray((dir / "rgb.png").string(), 2, 1, 8, PNG_COLOR_TYPE_RGB, {90, 90, 90, 255, 255, 255});
  const auto c = read_png_gray((dir / "rgb.png").string());
  EXPECT_EQ(c(0, 0), 90);
  EXPECT_EQ(c(1, 0), 255);

  {
    std::ofstream out(dir / "junk.png", std::ios::binary);
    out << "not a png";
  }
  EXPECT_THROW(read_png_gray((dir / "junk.png").string()), ImageIoError);
}

TEST(ImageIo, PpmBytes) {
  const auto dir = testing::scratch_dir("render_ppm");
  RgbImage img(2, 1);
  img(0, 0) = {1, 2, 3};
  img(1, 0) = {250, 251, 252};
  write_ppm((dir / "x.ppm").string(), img);
  EXPECT_EQ(testing::read_bytes(dir / "x.ppm"), std::string("P6\n2 1\n255\n\x01\x02\x03\xfa\xfb\xfc", 17));
}

}  // namespace
}  // namespace terrain
