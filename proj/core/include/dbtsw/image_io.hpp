#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace dbtsw {

/// 8-bit interleaved RGB image.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // width * height * 3

  [[nodiscard]] std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
};

/// Reads any PNG libpng understands and converts it to 8-bit RGB
/// (palette expanded, alpha stripped, 16-bit reduced). Throws IoError.
RgbImage read_png(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG. Throws IoError.
void write_png(const RgbImage& image, const std::filesystem::path& path);

}  // namespace dbtsw
