/**
 * @file ImageIO.h
 * @brief PNG / binary PGM readers and writers
 */

#pragma once

#include <czi/imaging/GrayImage.h>

#include <filesystem>

namespace czi::imaging {

/**
 * @brief Load an 8-bit PNG or binary PGM (P5) file.
 *
 * Intensities are scaled to [0,1]. Color PNGs are reduced to the plain average
 * of R, G and B; alpha is ignored. Throws DataError for unreadable or unsupported files.
 */
GrayImage LoadImage(const std::filesystem::path& path);

/// Write an 8-bit binary PGM. Intensities are rounded to the nearest of 256 levels.
void WritePgm(const GrayImage& img, const std::filesystem::path& path);

/// Write an 8-bit grayscale PNG.
void WritePng(const GrayImage& img, const std::filesystem::path& path);

} // namespace czi::imaging
