#pragma once

#include <filesystem>

#include "npseg/image.hpp"

namespace npseg {

/// Reads an 8-bit PNG (gray, RGB or palette), binary PGM (P5) or binary PPM (P6).
/// Alpha channels and bit depths above 8 are rejected with DataError.
Image load_image(const std::filesystem::path& path);

/// Writes an 8-bit file; the format follows the extension (.png, .pgm, .ppm).
/// Intensities are stored as round-half-up(v * 255).
void save_image(const Image& image, const std::filesystem::path& path);

}  // namespace npseg
