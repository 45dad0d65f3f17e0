#pragma once

#include <bg2/render.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bg2 {

/// Interleaved 8-bit image, row-major.
struct Image8 {
    int width = 0;
    int height = 0;
    int channels = 0; // 3 (RGB) or 4 (RGBA)
    std::vector<std::uint8_t> data;

    std::uint8_t& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
    std::uint8_t at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
};

std::uint8_t srgb_encode(double linear);
double srgb_decode(std::uint8_t encoded);

std::string encode_png(const Image8& image);
Image8 decode_png(const std::string& bytes);

/// PNG or JPEG, detected from the file signature.
Image8 read_image(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image8& image);

/// 8-bit sRGB RGBA with straight alpha; uncovered pixels are written as (0,0,0,0).
Image8 layer_to_image(const RenderTarget& target);

/// Linear RGBA layer from an 8-bit RGBA image (depth is left at +inf).
RenderTarget image_to_layer(const Image8& image);

/// Compressed float32 depth of the covered pixels ("BGD1"), +inf elsewhere.
std::string encode_depth(const RenderTarget& target);
void decode_depth(const std::string& bytes, RenderTarget& target);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary name and renames into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

} // namespace bg2
