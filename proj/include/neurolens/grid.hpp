#pragma once

#include "neurolens/image.hpp"

#include <cstddef>
#include <span>

namespace neurolens {

// Square cells placed row-major in the order given (descending activation
// upstream); cells past the last image are filled with `background`.
struct GridSpec {
  std::size_t cell_px = 224;
  std::size_t side = 6;
  Rgb background{128, 128, 128};

  // Smallest square grid holding `count` images.
  static GridSpec for_count(std::size_t count, std::size_t cell_px = 224,
                            Rgb background = {128, 128, 128});
  std::size_t edge_px() const noexcept { return side * cell_px; }
};

std::size_t grid_side(std::size_t count);

Image compose_grid(std::span<const Image> images, const GridSpec &spec);

// Decodes each buffer first; decode failures are reported with their index.
Image compose_grid(std::span<const Bytes> encoded, const GridSpec &spec);

} // namespace neurolens
