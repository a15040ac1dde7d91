#pragma once

#include <filesystem>

#include "leukoseg/image.hpp"

namespace leukoseg {

// PNG / binary PPM (P6) / anything imgcodecs decodes. Throws
// std::runtime_error when the file cannot be read.
RasterImage read_rgb(const std::filesystem::path& path);
BinaryMask read_mask(const std::filesystem::path& path);

// Format follows the extension (.png, .pgm, .ppm).
void write_image(const std::filesystem::path& path, const RasterImage& img);
void write_image(const std::filesystem::path& path, const ChannelImage& img);
void write_image(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace leukoseg
