#pragma once

#include <array>
#include <string_view>

#include "cropweed/imaging.hpp"

namespace cropweed {

/// Mean and population standard deviation of R, G, B, H, S, V, interleaved as (mean, std) per band.
struct ColorDescriptor {
    static constexpr std::size_t size = 12;
    static constexpr std::array<std::string_view, size> names{
        "mean_R", "std_R", "mean_G", "std_G", "mean_B", "std_B",
        "mean_H", "std_H", "mean_S", "std_S", "mean_V", "std_V"};

    std::array<double, size> values{};
};

[[nodiscard]] ColorDescriptor color_stats(const RgbImage &img);

}  // namespace cropweed
