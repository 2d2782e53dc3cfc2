#pragma once

#include <string>

#include "core/image.hpp"

namespace qsr {

// Decodes PNG (any 8/16-bit variant, normalized to 8-bit gray or RGB) and
// binary PGM/PPM with maxval 255. Intensities map to [0,1] as v/255.
Image load_image(const std::string& path);

// Encodes by extension: .png, .pgm (1-channel), .ppm (3-channel). Values are
// clamped to [0,1] and rounded half away from zero to 8-bit.
void save_image(const Image& img, const std::string& path);

} // namespace qsr
