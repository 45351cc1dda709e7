#include "neurolens/grid.hpp"

#include "neurolens/error.hpp"

#include <cmath>

namespace neurolens {

std::size_t grid_side(std::size_t count) {
  std::size_t side = static_cast<std::size_t>(std::sqrt(static_cast<double>(count)));
  while (side * side < count) {
    ++side;
  }
  while (side > 1 && (side - 1) * (side - 1) >= count) {
    --side;
  }
  return side == 0 ? 1 : side;
}

GridSpec GridSpec::for_count(std::size_t count, std::size_t cell_px, Rgb background) {
  return GridSpec{cell_px, grid_side(count), background};
}

Image compose_grid(std::span<const Image> images, const GridSpec &spec) {
  if (images.empty()) {
    throw ParameterError("compose_grid needs at least one image");
  }
  if (spec.cell_px == 0 || spec.side == 0) {
    throw ParameterError("grid cell size and side must be positive");
  }
  if (images.size() > spec.side * spec.side) {
    throw ParameterError(std::to_string(images.size()) + " images do not fit a " +
                         std::to_string(spec.side) + "x" + std::to_string(spec.side) + " grid");
  }
  const std::size_t cell = spec.cell_px;
  Image out(spec.edge_px(), spec.edge_px(), spec.background);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const Image tile = resize_fill(images[i], cell);
    const std::size_t x0 = (i % spec.side) * cell;
    const std::size_t y0 = (i / spec.side) * cell;
    for (std::size_t y = 0; y < cell; ++y) {
      const std::uint8_t *src = tile.pixels.data() + 3 * y * cell;
      std::uint8_t *dst = out.pixels.data() + 3 * ((y0 + y) * out.width + x0);
      std::copy(src, src + 3 * cell, dst);
    }
  }
  return out;
}

Image compose_grid(std::span<const Bytes> encoded, const GridSpec &spec) {
  if (encoded.empty()) {
    throw ParameterError("compose_grid needs at least one image");
  }
  std::vector<Image> decoded;
  decoded.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    try {
      decoded.push_back(decode_image(encoded[i]));
    } catch (const DataError &e) {
      throw ItemError(i, e.what());
    }
  }
  return compose_grid(decoded, spec);
}

} // namespace neurolens
