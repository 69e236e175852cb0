#pragma once

#include <string>

#include "ebl/field.hpp"

namespace ebl {

/// Binary PGM (P5) with maxval 255 or 65535 (16-bit samples big-endian).
/// Fields map linearly: value = sample / maxval.
ScalarField2D read_pgm_field(const std::string& path);
/// Samples must be 0 or maxval.
BinaryMask read_pgm_mask(const std::string& path);

/// Values are clamped to [0, 1] and rounded to the nearest sample.
void write_pgm(const std::string& path, const ScalarField2D& field, int maxval = 255);
/// 0 -> 0, 1 -> maxval.
void write_pgm(const std::string& path, const BinaryMask& mask, int maxval = 255);

/// 8- or 16-bit grayscale PNG (other color types are converted to gray by libpng).
ScalarField2D read_png_field(const std::string& path);

/// Dispatches on the file signature: "P5" -> PGM, PNG magic -> PNG.
ScalarField2D read_image_field(const std::string& path);
BinaryMask read_image_mask(const std::string& path);

}  // namespace ebl
