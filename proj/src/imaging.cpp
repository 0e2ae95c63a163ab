#include "cropweed/imaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace cropweed {

GrayImage::GrayImage(std::size_t width, std::size_t height, std::uint32_t levels, std::uint16_t fill)
    : grid_{width, height, fill}, levels_{levels} {
    if (levels < 2 || levels > 65536) {
        throw ParameterError{"gray levels must lie in [2, 65536], got " + std::to_string(levels)};
    }
    if (fill >= levels) {
        throw ParameterError{"gray fill value " + std::to_string(fill) + " exceeds levels"};
    }
}

GrayImage GrayImage::from_values(std::size_t width, std::size_t height, std::uint32_t levels,
                                 const std::vector<std::uint16_t> &values) {
    GrayImage img{width, height, levels};
    if (values.size() != width * height) {
        throw ParameterError{"gray image expects " + std::to_string(width * height) + " values, got " +
                             std::to_string(values.size())};
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= levels) {
            throw ParameterError{"gray value " + std::to_string(values[i]) + " outside [0, " +
                                 std::to_string(levels - 1) + "]"};
        }
    }
    img.grid_.pixels() = values;
    return img;
}

void GrayImage::set(std::size_t x, std::size_t y, std::uint16_t value) {
    if (value >= levels_) {
        throw ParameterError{"gray value " + std::to_string(value) + " outside [0, " + std::to_string(levels_ - 1) + "]"};
    }
    grid_.at(x, y) = value;
}

namespace {

std::string sniff_format(const std::filesystem::path &path) {
    std::ifstream in{path, std::ios::binary};
    std::array<unsigned char, 8> head{};
    in.read(reinterpret_cast<char *>(head.data()), head.size());
    const auto n = in.gcount();
    if (n >= 8 && head[0] == 0x89 && head[1] == 'P' && head[2] == 'N' && head[3] == 'G') {
        return "PNG";
    }
    if (n >= 3 && head[0] == 0xFF && head[1] == 0xD8 && head[2] == 0xFF) {
        return "JPEG";
    }
    if (n >= 4 && ((head[0] == 'I' && head[1] == 'I' && head[2] == 42) || (head[0] == 'M' && head[1] == 'M' && head[3] == 42))) {
        return "TIFF";
    }
    if (n >= 2 && head[0] == 'B' && head[1] == 'M') {
        return "BMP";
    }
    if (n >= 4 && head[0] == 'G' && head[1] == 'I' && head[2] == 'F') {
        return "GIF";
    }
    auto ext = path.extension().string();
    if (!ext.empty()) {
        ext.erase(0, 1);
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        return "unrecognized (extension ." + ext + ")";
    }
    return "unrecognized";
}

}  // namespace

RgbImage load_image(const std::filesystem::path &path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw IoError{"cannot read image file: " + path.string()};
    }
    {
        std::ifstream probe{path, std::ios::binary};
        if (!probe) {
            throw IoError{"cannot open image file: " + path.string()};
        }
    }

    cv::Mat raw;
    try {
        raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    } catch (const cv::Exception &e) {
        throw FormatError{"failed to decode " + sniff_format(path) + " image " + path.string() + ": " + e.what()};
    }
    if (raw.empty()) {
        throw FormatError{"unsupported or corrupt image format " + sniff_format(path) + ": " + path.string()};
    }

    double scale = 0.0;
    switch (raw.depth()) {
        case CV_8U: scale = 1.0 / 255.0; break;
        case CV_16U: scale = 1.0 / 65535.0; break;
        default:
            throw FormatError{"unsupported pixel depth in " + path.string() + " (only 8- and 16-bit unsigned)"};
    }
    const int channels = raw.channels();
    if (channels != 1 && channels != 3 && channels != 4) {
        throw FormatError{"unsupported channel count " + std::to_string(channels) + " in " + path.string()};
    }

    cv::Mat values;
    raw.convertTo(values, CV_MAKETYPE(CV_64F, channels), scale);

    RgbImage img{static_cast<std::size_t>(values.cols), static_cast<std::size_t>(values.rows)};
    for (int y = 0; y < values.rows; ++y) {
        const double *src = values.ptr<double>(y);
        for (int x = 0; x < values.cols; ++x) {
            const double *px = src + static_cast<std::ptrdiff_t>(x) * channels;
            Rgb &out = img.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
            if (channels == 1) {
                out = {px[0], px[0], px[0]};
            } else {
                // OpenCV stores BGR(A).
                out = {px[2], px[1], px[0]};
            }
        }
    }
    return img;
}

Hsv rgb_to_hsv(const Rgb &px) noexcept {
    const double hi = std::max({px.r, px.g, px.b});
    const double lo = std::min({px.r, px.g, px.b});
    const double delta = hi - lo;

    Hsv out{0.0, 0.0, hi};
    if (hi <= 0.0 || delta <= 0.0) {
        return out;
    }
    out.s = delta / hi;

    double sector = 0.0;
    if (hi == px.r) {
        sector = (px.g - px.b) / delta;
        if (sector < 0.0) {
            sector += 6.0;
        }
    } else if (hi == px.g) {
        sector = 2.0 + (px.b - px.r) / delta;
    } else {
        sector = 4.0 + (px.r - px.g) / delta;
    }
    out.h = sector / 6.0;
    if (out.h >= 1.0) {
        out.h -= 1.0;
    }
    return out;
}

HsvImage rgb_to_hsv(const RgbImage &img) {
    HsvImage out{img.width(), img.height()};
    std::transform(img.pixels().begin(), img.pixels().end(), out.pixels().begin(),
                   [](const Rgb &px) { return rgb_to_hsv(px); });
    return out;
}

Rgb hsv_to_rgb(const Hsv &px) noexcept {
    if (px.s <= 0.0) {
        return {px.v, px.v, px.v};
    }
    const double h6 = px.h * 6.0;
    const double sector = std::floor(h6);
    const double f = h6 - sector;
    const double p = px.v * (1.0 - px.s);
    const double q = px.v * (1.0 - px.s * f);
    const double t = px.v * (1.0 - px.s * (1.0 - f));
    switch (static_cast<int>(sector) % 6) {
        case 0: return {px.v, t, p};
        case 1: return {q, px.v, p};
        case 2: return {p, px.v, t};
        case 3: return {p, q, px.v};
        case 4: return {t, p, px.v};
        default: return {px.v, p, q};
    }
}

std::uint16_t luma_level(const Rgb &px, std::uint32_t levels) noexcept {
    const double y = 0.299 * px.r + 0.587 * px.g + 0.114 * px.b;
    const double top = static_cast<double>(levels - 1);
    const double q = std::floor(y * top + 0.5);
    return static_cast<std::uint16_t>(std::clamp(q, 0.0, top));
}

GrayImage to_gray(const RgbImage &img, std::uint32_t levels) {
    GrayImage out{img.width(), img.height(), levels};
    for (std::size_t y = 0; y < img.height(); ++y) {
        for (std::size_t x = 0; x < img.width(); ++x) {
            out.set(x, y, luma_level(img.at(x, y), levels));
        }
    }
    return out;
}

}  // namespace cropweed
