#include "neurolens/image.hpp"

#include "neurolens/error.hpp"

#include "httplib.h"

#include <png.h>
// jpeglib.h needs FILE and size_t declared first.
#include <cstdio>
#include <jpeglib.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>

namespace neurolens {

Image::Image(std::size_t w, std::size_t h, Rgb fill) : width(w), height(h), pixels(3 * w * h) {
  for (std::size_t i = 0; i < w * h; ++i) {
    pixels[3 * i] = fill[0];
    pixels[3 * i + 1] = fill[1];
    pixels[3 * i + 2] = fill[2];
  }
}

namespace {

struct PngReadSource {
  const std::uint8_t *data;
  std::size_t size;
  std::size_t offset;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t len) {
  auto *src = static_cast<PngReadSource *>(png_get_io_ptr(png));
  if (src->offset + len > src->size) {
    png_error(png, "truncated PNG");
  }
  std::memcpy(out, src->data + src->offset, len);
  src->offset += len;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t len) {
  auto *out = static_cast<Bytes *>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

bool is_png(std::span<const std::uint8_t> b) {
  return b.size() >= 8 && png_sig_cmp(b.data(), 0, 8) == 0;
}

bool is_jpeg(std::span<const std::uint8_t> b) {
  return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF;
}

// Decodes into `img` and/or collects text chunks; returns false on libpng error.
bool png_decode(std::span<const std::uint8_t> bytes, Image *img, TextChunks *text) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) {
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  PngReadSource src{bytes.data(), bytes.size(), 0};
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &src, png_read_from_memory);
  png_read_info(png, info);
  if (text != nullptr) {
    png_textp chunks = nullptr;
    int n = 0;
    png_get_text(png, info, &chunks, &n);
    for (int i = 0; i < n; ++i) {
      (*text)[chunks[i].key] = std::string(chunks[i].text, chunks[i].text_length);
    }
  }
  if (img != nullptr) {
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    if (png_get_rowbytes(png, info) != 3 * static_cast<std::size_t>(w)) {
      png_error(png, "unexpected row layout");
    }
    img->width = w;
    img->height = h;
    img->pixels.assign(3 * static_cast<std::size_t>(w) * h, 0);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) {
      rows[y] = img->pixels.data() + 3 * static_cast<std::size_t>(w) * y;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto *err = reinterpret_cast<JpegErrorManager *>(cinfo->err);
  std::longjmp(err->jump, 1);
}

bool jpeg_decode(std::span<const std::uint8_t> bytes, Image &img) {
  jpeg_decompress_struct cinfo{};
  JpegErrorManager err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  if (cinfo.output_components != 3) {
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  img.width = cinfo.output_width;
  img.height = cinfo.output_height;
  img.pixels.assign(3 * img.width * img.height, 0);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = img.pixels.data() + 3 * img.width * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

} // namespace

Image decode_image(std::span<const std::uint8_t> bytes) {
  Image img;
  if (is_png(bytes)) {
    if (!png_decode(bytes, &img, nullptr)) {
      throw DataError("corrupt PNG data");
    }
  } else if (is_jpeg(bytes)) {
    if (!jpeg_decode(bytes, img)) {
      throw DataError("corrupt JPEG data");
    }
  } else {
    throw DataError("unrecognized image format");
  }
  if (img.width == 0 || img.height == 0) {
    throw DataError("image has zero size");
  }
  return img;
}

TextChunks read_png_text(std::span<const std::uint8_t> bytes) {
  TextChunks text;
  if (is_png(bytes) && !png_decode(bytes, nullptr, &text)) {
    throw DataError("corrupt PNG data");
  }
  return text;
}

Bytes encode_png(const Image &image, const TextChunks &text) {
  if (image.width == 0 || image.height == 0 ||
      image.pixels.size() != 3 * image.width * image.height) {
    throw ParameterError("cannot encode an empty or inconsistent image");
  }
  Bytes out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) {
    throw Error("png_create_write_struct failed");
  }
  png_infop info = png_create_info_struct(png);
  std::vector<png_text> chunks;
  std::vector<png_bytep> rows(image.height);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("PNG encoding failed");
  }
  png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  for (const auto &[key, value] : text) {
    png_text t{};
    t.compression = PNG_TEXT_COMPRESSION_NONE;
    t.key = const_cast<char *>(key.c_str());
    t.text = const_cast<char *>(value.c_str());
    t.text_length = value.size();
    chunks.push_back(t);
  }
  if (!chunks.empty()) {
    png_set_text(png, info, chunks.data(), static_cast<int>(chunks.size()));
  }
  for (std::size_t y = 0; y < image.height; ++y) {
    rows[y] = const_cast<png_bytep>(image.pixels.data() + 3 * image.width * y);
  }
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

Bytes fetch_uri(const std::string &uri) {
  const auto scheme_end = uri.find("://");
  if (scheme_end == std::string::npos) {
    return read_file(uri);
  }
  const std::string scheme = to_lower(uri.substr(0, scheme_end));
  if (scheme == "file") {
    return read_file(uri.substr(scheme_end + 3));
  }
  if (scheme != "http" && scheme != "https") {
    throw IoError("unsupported URI scheme: " + uri);
  }
  const auto path_start = uri.find('/', scheme_end + 3);
  const std::string host = uri.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : uri.substr(path_start);
  httplib::Client client(host);
  client.set_follow_location(true);
  auto res = client.Get(path);
  if (!res) {
    throw IoError("GET " + uri + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw IoError("GET " + uri + " returned HTTP " + std::to_string(res->status));
  }
  return Bytes(res->body.begin(), res->body.end());
}

Image resize_fill(const Image &src, std::size_t size) {
  if (src.width == 0 || src.height == 0 || size == 0) {
    throw ParameterError("resize_fill needs a non-empty source and target");
  }
  const double scale = std::max(static_cast<double>(size) / static_cast<double>(src.width),
                                static_cast<double>(size) / static_cast<double>(src.height));
  const double window = static_cast<double>(size) / scale;
  const double off_x = (static_cast<double>(src.width) - window) / 2.0;
  const double off_y = (static_cast<double>(src.height) - window) / 2.0;
  const double max_x = static_cast<double>(src.width - 1);
  const double max_y = static_cast<double>(src.height - 1);

  struct Tap {
    std::size_t i0, i1;
    double frac;
  };
  auto taps = [&](double offset, double max_coord) {
    std::vector<Tap> out(size);
    for (std::size_t o = 0; o < size; ++o) {
      double s = offset + (static_cast<double>(o) + 0.5) / scale - 0.5;
      s = std::clamp(s, 0.0, max_coord);
      const double f = std::floor(s);
      const auto i0 = static_cast<std::size_t>(f);
      const std::size_t i1 = std::min(i0 + 1, static_cast<std::size_t>(max_coord));
      out[o] = {i0, i1, s - f};
    }
    return out;
  };
  const auto xs = taps(off_x, max_x);
  const auto ys = taps(off_y, max_y);

  Image dst(size, size);
  for (std::size_t y = 0; y < size; ++y) {
    const Tap ty = ys[y];
    for (std::size_t x = 0; x < size; ++x) {
      const Tap tx = xs[x];
      for (std::size_t ch = 0; ch < 3; ++ch) {
        auto px = [&](std::size_t xi, std::size_t yi) {
          return static_cast<double>(src.pixels[3 * (yi * src.width + xi) + ch]);
        };
        const double top = px(tx.i0, ty.i0) + (px(tx.i1, ty.i0) - px(tx.i0, ty.i0)) * tx.frac;
        const double bot = px(tx.i0, ty.i1) + (px(tx.i1, ty.i1) - px(tx.i0, ty.i1)) * tx.frac;
        const double v = top + (bot - top) * ty.frac;
        dst.pixels[3 * (y * size + x) + ch] =
            static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
      }
    }
  }
  return dst;
}

} // namespace neurolens
