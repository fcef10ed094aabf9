#pragma once

#include "leafscan/image.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace leafscan {

/// Decodes a PNG (8-bit gray/RGB/RGBA/palette) or TIFF (8-bit RGB/RGBA,
/// uncompressed or deflate). Alpha is dropped. Errors carry `path`.
RasterImage load_image(const std::filesystem::path &path);

/// Same as load_image for an in-memory buffer; `source` names it in errors.
RasterImage decode_image(std::span<const std::uint8_t> bytes, std::string_view source = "<memory>");

bool looks_like_png(std::span<const std::uint8_t> bytes) noexcept;
bool looks_like_tiff(std::span<const std::uint8_t> bytes) noexcept;

std::vector<std::uint8_t> encode_png(const RasterImage &img);

/// Writes via temp file + rename.
void save_png(const RasterImage &img, const std::filesystem::path &path);

/// Test helper and fixture writer: 8-bit RGB TIFF, uncompressed or deflate.
std::vector<std::uint8_t> encode_tiff(const RasterImage &img, bool deflate = false);

/// Foreground black on white, the conventional rendering of a segmented leaf.
RasterImage mask_to_image(const BinaryMask &mask);

} // namespace leafscan
