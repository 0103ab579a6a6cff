#pragma once

#include <string>

#include "pssr/grid.hpp"

namespace pssr {

/// 8-bit RGB PNG I/O. Intensities map linearly: byte value / 255 on read,
/// round(clamp(v, 0, 1) * 255) on write. No gamma handling.
ColorGrid read_png(const std::string& path);
void write_png(const std::string& path, const ColorGrid& img);

}  // namespace pssr
