#pragma once

#include <string>

#include "pssr/grid.hpp"

namespace pssr {

/// Little-endian PFM. Grayscale maps use the "Pf" header, color maps "PF".
/// PFM stores rows bottom-up; values are float32. Non-finite floats encode
/// invalid pixels on read.
void write_pfm(const std::string& path, const ScalarGrid& g);
void write_pfm(const std::string& path, const ColorGrid& g);
ScalarGrid read_pfm_scalar(const std::string& path);
ColorGrid read_pfm_color(const std::string& path);

}  // namespace pssr
