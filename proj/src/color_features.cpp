#include "cropweed/color_features.hpp"

#include <cmath>

namespace cropweed {

namespace {

struct BandStats {
    double mean = 0.0;
    double std = 0.0;
};

template <typename Get>
BandStats band_stats(std::size_t n, Get get) {
    // shifted by the first sample so constant bands come out exactly
    const double ref = get(0);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += get(i) - ref;
    }
    const double mean = ref + sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = get(i) - mean;
        sq += d * d;
    }
    return {mean, std::sqrt(sq / static_cast<double>(n))};
}

}  // namespace

ColorDescriptor color_stats(const RgbImage &img) {
    const auto &rgb = img.pixels();
    const HsvImage hsv_img = rgb_to_hsv(img);
    const auto &hsv = hsv_img.pixels();
    const std::size_t n = rgb.size();

    const std::array<BandStats, 6> bands{
        band_stats(n, [&](std::size_t i) { return rgb[i].r; }),
        band_stats(n, [&](std::size_t i) { return rgb[i].g; }),
        band_stats(n, [&](std::size_t i) { return rgb[i].b; }),
        band_stats(n, [&](std::size_t i) { return hsv[i].h; }),
        band_stats(n, [&](std::size_t i) { return hsv[i].s; }),
        band_stats(n, [&](std::size_t i) { return hsv[i].v; }),
    };

    ColorDescriptor out;
    for (std::size_t b = 0; b < bands.size(); ++b) {
        out.values[2 * b] = bands[b].mean;
        out.values[2 * b + 1] = bands[b].std;
    }
    return out;
}

}  // namespace cropweed
