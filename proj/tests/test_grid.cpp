#include "doctest.h"
#include "neurolens/grid.hpp"
#include "neurolens/image.hpp"
#include "support.hpp"

#include <cstdio>
#include <cstdlib>
#include <jpeglib.h>

using namespace neurolens;

namespace {

Image solid(std::size_t w, std::size_t h, Rgb c) { return Image(w, h, c); }

Rgb colour_for(std::size_t i) {
  return {static_cast<std::uint8_t>(10 + 6 * i), static_cast<std::uint8_t>(200 - 5 * i),
          static_cast<std::uint8_t>(i % 2 == 0 ? 30 : 220)};
}

Bytes encode_jpeg(const Image &img) {
  jpeg_compress_struct c{};
  jpeg_error_mgr err{};
  c.err = jpeg_std_error(&err);
  jpeg_create_compress(&c);
  unsigned char *buf = nullptr;
  unsigned long size = 0;
  jpeg_mem_dest(&c, &buf, &size);
  c.image_width = static_cast<JDIMENSION>(img.width);
  c.image_height = static_cast<JDIMENSION>(img.height);
  c.input_components = 3;
  c.in_color_space = JCS_RGB;
  jpeg_set_defaults(&c);
  jpeg_set_quality(&c, 95, TRUE);
  jpeg_start_compress(&c, TRUE);
  while (c.next_scanline < c.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(&img.pixels[c.next_scanline * img.width * 3]);
    jpeg_write_scanlines(&c, &row, 1);
  }
  jpeg_finish_compress(&c);
  Bytes out(buf, buf + size);
  jpeg_destroy_compress(&c);
  std::free(buf);
  return out;
}

} // namespace

TEST_SUITE("grid") {

TEST_CASE("grid side is the ceiling square root") {
  CHECK(grid_side(1) == 1);
  CHECK(grid_side(4) == 2);
  CHECK(grid_side(5) == 3);
  CHECK(grid_side(36) == 6);
  CHECK(grid_side(37) == 7);
  CHECK(GridSpec{}.cell_px == 224);
  CHECK(GridSpec{}.background == Rgb{128, 128, 128});
}

TEST_CASE("36 images tile a 1344x1344 grid row-major") {
  std::vector<Image> imgs;
  for (std::size_t i = 0; i < 36; ++i) {
    imgs.push_back(solid(40 + i, 30 + 2 * i, colour_for(i)));
  }
  const auto grid = compose_grid(imgs, GridSpec::for_count(36));
  CHECK(grid.width == 1344);
  CHECK(grid.height == 1344);
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 6; ++c) {
      CHECK(grid.at(c * 224 + 112, r * 224 + 112) == colour_for(6 * r + c));
    }
  }
}

TEST_CASE("a single image is the resized input") {
  Image src(50, 80);
  for (std::size_t y = 0; y < 80; ++y) {
    for (std::size_t x = 0; x < 50; ++x) {
      src.set(x, y, {static_cast<std::uint8_t>(x * 5), static_cast<std::uint8_t>(y * 3), 7});
    }
  }
  const std::vector<Image> one{src};
  const auto grid = compose_grid(one, GridSpec::for_count(1, 32));
  CHECK(grid == resize_fill(src, 32));
}

TEST_CASE("5 images leave 4 exact background cells in a 3x3 grid") {
  std::vector<Image> imgs(5, solid(10, 10, {255, 0, 0}));
  const auto spec = GridSpec::for_count(5, 16);
  CHECK(spec.side == 3);
  const auto grid = compose_grid(imgs, spec);
  CHECK(grid.width == 48);
  for (std::size_t cell = 5; cell < 9; ++cell) {
    const std::size_t x0 = (cell % 3) * 16;
    const std::size_t y0 = (cell / 3) * 16;
    for (std::size_t y = y0; y < y0 + 16; ++y) {
      for (std::size_t x = x0; x < x0 + 16; ++x) {
        REQUIRE(grid.at(x, y) == Rgb{128, 128, 128});
      }
    }
  }
  CHECK(grid.at(8, 8) == Rgb{255, 0, 0});
}

TEST_CASE("cell centres match the resized sources") {
  testing::Gen g(21);
  std::vector<Image> imgs;
  for (int i = 0; i < 7; ++i) {
    Image im(g.between(5, 60), g.between(5, 60));
    for (auto &p : im.pixels) {
      p = static_cast<std::uint8_t>(g.below(256));
    }
    imgs.push_back(im);
  }
  const auto spec = GridSpec::for_count(imgs.size(), 24);
  const auto grid = compose_grid(imgs, spec);
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    const auto cell = resize_fill(imgs[i], 24);
    CHECK(grid.at((i % spec.side) * 24 + 12, (i / spec.side) * 24 + 12) == cell.at(12, 12));
  }
}

TEST_CASE("aspect fill crops the long side around the centre") {
  Image wide(40, 10, {0, 0, 0});
  for (std::size_t y = 0; y < 10; ++y) {
    for (std::size_t x = 15; x < 25; ++x) {
      wide.set(x, y, {255, 255, 255});
    }
  }
  const auto r = resize_fill(wide, 10);
  CHECK(r.width == 10);
  CHECK(r.height == 10);
  CHECK(r.at(5, 5) == Rgb{255, 255, 255});
}

TEST_CASE("encoded inputs: PNG and JPEG decode, garbage names its index") {
  const Image red(8, 8, {200, 10, 10});
  const Bytes png = encode_png(red);
  std::vector<Bytes> inputs{png, encode_jpeg(red)};
  const auto grid = compose_grid(inputs, GridSpec::for_count(2, 8));
  CHECK(grid.at(4, 4) == Rgb{200, 10, 10});
  const Rgb j = grid.at(12, 4);
  CHECK(std::abs(int(j[0]) - 200) <= 6);
  CHECK(std::abs(int(j[1]) - 10) <= 6);
  inputs.push_back(Bytes{1, 2, 3});
  try {
    compose_grid(inputs, GridSpec::for_count(3, 8));
    FAIL("expected ItemError");
  } catch (const ItemError &e) {
    CHECK(e.index() == 2);
  }
  const std::vector<Image> none;
  CHECK_THROWS_AS(compose_grid(none, GridSpec{}), ParameterError);
}

TEST_CASE("composition and encoding are byte-for-byte deterministic") {
  std::vector<Image> imgs;
  for (std::size_t i = 0; i < 10; ++i) {
    imgs.push_back(solid(13 + i, 17, colour_for(i)));
  }
  const auto spec = GridSpec::for_count(10, 20);
  CHECK(encode_png(compose_grid(imgs, spec)) == encode_png(compose_grid(imgs, spec)));
}

TEST_CASE("png text chunks round trip") {
  const Bytes png = encode_png(Image(2, 2), {{"labels", "a,b"}, {"id", "x"}});
  const auto text = read_png_text(png);
  CHECK(text.at("labels") == "a,b");
  CHECK(text.at("id") == "x");
}

} // TEST_SUITE
