#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "cropweed/errors.hpp"

namespace cropweed {

/// Row-major 2D grid of pixels.
template <typename Pixel>
class PixelGrid {
  public:
    PixelGrid() = default;
    PixelGrid(std::size_t width, std::size_t height, Pixel fill = {})
        : width_{width}, height_{height}, pixels_(width * height, fill) {
        if (width == 0 || height == 0) {
            throw ParameterError{"image dimensions must be at least 1x1"};
        }
    }

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t height() const noexcept { return height_; }
    [[nodiscard]] std::size_t size() const noexcept { return pixels_.size(); }

    [[nodiscard]] Pixel &at(std::size_t x, std::size_t y) noexcept { return pixels_[y * width_ + x]; }
    [[nodiscard]] const Pixel &at(std::size_t x, std::size_t y) const noexcept { return pixels_[y * width_ + x]; }

    [[nodiscard]] const std::vector<Pixel> &pixels() const noexcept { return pixels_; }
    [[nodiscard]] std::vector<Pixel> &pixels() noexcept { return pixels_; }

  private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<Pixel> pixels_;
};

struct Rgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
    friend bool operator==(const Rgb &, const Rgb &) = default;
};

/// Hue is normalized so that 360 degrees maps to 1. Achromatic pixels carry h = 0.
struct Hsv {
    double h = 0.0;
    double s = 0.0;
    double v = 0.0;
    friend bool operator==(const Hsv &, const Hsv &) = default;
};

/// Channels in [0,1].
using RgbImage = PixelGrid<Rgb>;
using HsvImage = PixelGrid<Hsv>;

/// Quantized single-channel image with pixel values in [0, levels).
class GrayImage {
  public:
    GrayImage() = default;
    GrayImage(std::size_t width, std::size_t height, std::uint32_t levels, std::uint16_t fill = 0);

    /// Builds from row-major values; validates dimensions and range.
    static GrayImage from_values(std::size_t width, std::size_t height, std::uint32_t levels,
                                 const std::vector<std::uint16_t> &values);

    [[nodiscard]] std::size_t width() const noexcept { return grid_.width(); }
    [[nodiscard]] std::size_t height() const noexcept { return grid_.height(); }
    [[nodiscard]] std::uint32_t levels() const noexcept { return levels_; }

    [[nodiscard]] std::uint16_t at(std::size_t x, std::size_t y) const noexcept { return grid_.at(x, y); }
    void set(std::size_t x, std::size_t y, std::uint16_t value);

    [[nodiscard]] const std::vector<std::uint16_t> &pixels() const noexcept { return grid_.pixels(); }

  private:
    PixelGrid<std::uint16_t> grid_;
    std::uint32_t levels_ = 0;
};

/// Decodes PNG, JPEG, TIFF (and anything else the codec layer accepts) to RGB in [0,1].
/// 8-bit sources are scaled by 1/255, 16-bit by 1/65535. Grayscale sources replicate into all three channels.
/// Throws IoError when the file cannot be read and FormatError when it cannot be decoded.
[[nodiscard]] RgbImage load_image(const std::filesystem::path &path);

/// Hexcone RGB to HSV conversion.
[[nodiscard]] Hsv rgb_to_hsv(const Rgb &px) noexcept;
[[nodiscard]] HsvImage rgb_to_hsv(const RgbImage &img);

/// Inverse hexcone conversion; used by tests and fixtures.
[[nodiscard]] Rgb hsv_to_rgb(const Hsv &px) noexcept;

/// BT.601 luma quantized to round-half-up of y*(levels-1). levels must lie in [2, 65536].
[[nodiscard]] std::uint16_t luma_level(const Rgb &px, std::uint32_t levels) noexcept;
[[nodiscard]] GrayImage to_gray(const RgbImage &img, std::uint32_t levels = 256);

}  // namespace cropweed
