#include "cropweed/lbp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include <omp.h>

namespace cropweed {

namespace {

// Interpolated differences within this distance of 0 count as 0 (s(0) = 1). For
// (8,1) the diagonal weights are in Q(sqrt 2), so any nonzero difference of
// integer gray levels is orders of magnitude larger than this.
constexpr double sample_tolerance = 1e-9;
constexpr double grid_snap = 1e-9;

double snap(double v) {
    const double r = std::round(v);
    return std::abs(v - r) < grid_snap ? r : v;
}

std::uint32_t mask_for(std::uint32_t points) {
    return points >= 32 ? 0xFFFFFFFFu : ((1u << points) - 1u);
}

}  // namespace

void validate(const LbpParams &params) {
    if (params.points < 4 || params.points > 24) {
        throw ParameterError{"LBP sampling points must lie in [4, 24], got " + std::to_string(params.points)};
    }
    if (!(params.radius > 0.0) || !std::isfinite(params.radius)) {
        throw ParameterError{"LBP radius must be positive"};
    }
}

std::uint32_t ror(std::uint32_t code, std::uint32_t shift, std::uint32_t points) noexcept {
    const std::uint32_t mask = mask_for(points);
    code &= mask;
    shift %= points;
    if (shift == 0) {
        return code;
    }
    return ((code >> shift) | (code << (points - shift))) & mask;
}

std::uint32_t ri_label(std::uint32_t code, std::uint32_t points) noexcept {
    std::uint32_t best = ror(code, 0, points);
    for (std::uint32_t k = 1; k < points; ++k) {
        best = std::min(best, ror(code, k, points));
    }
    return best;
}

std::uint32_t uniformity(std::uint32_t code, std::uint32_t points) noexcept {
    std::uint32_t transitions = 0;
    for (std::uint32_t m = 0; m < points; ++m) {
        const std::uint32_t a = (code >> m) & 1u;
        const std::uint32_t b = (code >> ((m + 1) % points)) & 1u;
        transitions += a ^ b;
    }
    return transitions;
}

std::uint32_t riu2_label(std::uint32_t code, std::uint32_t points) noexcept {
    code &= mask_for(points);
    return uniformity(code, points) <= 2 ? static_cast<std::uint32_t>(std::popcount(code)) : points + 1;
}

LbpSampler::LbpSampler(const LbpParams &params) {
    validate(params);
    margin_ = static_cast<std::size_t>(std::ceil(params.radius - grid_snap));
    samples_.reserve(params.points);
    for (std::uint32_t m = 0; m < params.points; ++m) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(params.points);
        const double dx = snap(params.radius * std::cos(angle));
        const double dy = snap(-params.radius * std::sin(angle));
        const double x0 = std::floor(dx);
        const double y0 = std::floor(dy);
        const double fx = dx - x0;
        const double fy = dy - y0;
        Sample s;
        s.base_x = static_cast<long>(x0);
        s.base_y = static_cast<long>(y0);
        s.w00 = (1.0 - fx) * (1.0 - fy);
        s.w10 = fx * (1.0 - fy);
        s.w01 = (1.0 - fx) * fy;
        s.w11 = fx * fy;
        samples_.push_back(s);
    }
}

bool LbpSampler::fits(const GrayImage &img, std::size_t x, std::size_t y) const noexcept {
    return x >= margin_ && y >= margin_ && x + margin_ < img.width() && y + margin_ < img.height();
}

std::uint32_t LbpSampler::code_unchecked(const GrayImage &img, std::size_t x, std::size_t y) const noexcept {
    const double center = img.at(x, y);
    std::uint32_t code = 0;
    for (std::size_t m = 0; m < samples_.size(); ++m) {
        const Sample &s = samples_[m];
        const auto sx = static_cast<std::size_t>(static_cast<long>(x) + s.base_x);
        const auto sy = static_cast<std::size_t>(static_cast<long>(y) + s.base_y);
        // Weighted differences against the center; zero-weight corners are never read.
        double diff = s.w00 * (img.at(sx, sy) - center);
        if (s.w10 != 0.0) {
            diff += s.w10 * (img.at(sx + 1, sy) - center);
        }
        if (s.w01 != 0.0) {
            diff += s.w01 * (img.at(sx, sy + 1) - center);
        }
        if (s.w11 != 0.0) {
            diff += s.w11 * (img.at(sx + 1, sy + 1) - center);
        }
        if (diff >= -sample_tolerance) {
            code |= 1u << m;
        }
    }
    return code;
}

std::uint32_t lbp_code(const GrayImage &img, std::size_t x, std::size_t y, const LbpParams &params) {
    const LbpSampler sampler{params};
    if (!sampler.fits(img, x, y)) {
        throw OutOfBoundsError{"LBP circle of radius " + std::to_string(params.radius) + " around (" +
                               std::to_string(x) + ", " + std::to_string(y) + ") leaves the " +
                               std::to_string(img.width()) + "x" + std::to_string(img.height()) + " image"};
    }
    return sampler.code_unchecked(img, x, y);
}

LbpLabelTable::LbpLabelTable(const LbpParams &params) {
    validate(params);
    const std::uint32_t m = params.points;
    const std::size_t codes = std::size_t{1} << m;
    table_.resize(codes);
    switch (params.mapping) {
        case LbpMapping::raw:
            for (std::size_t c = 0; c < codes; ++c) {
                table_[c] = static_cast<std::uint32_t>(c);
            }
            bins_ = codes;
            break;
        case LbpMapping::riu2:
            for (std::size_t c = 0; c < codes; ++c) {
                table_[c] = riu2_label(static_cast<std::uint32_t>(c), m);
            }
            bins_ = m + 2;
            break;
        case LbpMapping::ri: {
            // Bin k is the k-th smallest rotation-class representative.
            std::vector<std::uint32_t> bin_of_rep(codes, 0);
            std::vector<bool> is_rep(codes, false);
            for (std::size_t c = 0; c < codes; ++c) {
                table_[c] = ri_label(static_cast<std::uint32_t>(c), m);
                is_rep[table_[c]] = true;
            }
            std::uint32_t next = 0;
            for (std::size_t c = 0; c < codes; ++c) {
                if (is_rep[c]) {
                    bin_of_rep[c] = next++;
                }
            }
            for (auto &v : table_) {
                v = bin_of_rep[v];
            }
            bins_ = next;
            break;
        }
    }
}

std::size_t lbp_bin_count(const LbpParams &params) {
    validate(params);
    switch (params.mapping) {
        case LbpMapping::raw: return std::size_t{1} << params.points;
        case LbpMapping::riu2: return params.points + 2;
        case LbpMapping::ri: return LbpLabelTable{params}.bins();
    }
    return 0;
}

std::vector<std::uint64_t> lbp_counts(const GrayImage &img, const LbpParams &params) {
    const LbpSampler sampler{params};
    const LbpLabelTable labels{params};
    const std::size_t margin = sampler.margin();
    if (img.width() <= 2 * margin || img.height() <= 2 * margin) {
        throw DegenerateInputError{"image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                   " has no interior pixel for LBP radius " + std::to_string(params.radius)};
    }

    std::vector<std::uint64_t> counts(labels.bins(), 0);
    const long y_begin = static_cast<long>(margin);
    const long y_end = static_cast<long>(img.height() - margin);
    const std::size_t x_end = img.width() - margin;
#pragma omp parallel
    {
        std::vector<std::uint64_t> local(labels.bins(), 0);
#pragma omp for schedule(static) nowait
        for (long y = y_begin; y < y_end; ++y) {
            for (std::size_t x = margin; x < x_end; ++x) {
                ++local[labels.bin(sampler.code_unchecked(img, x, static_cast<std::size_t>(y)))];
            }
        }
#pragma omp critical(cropweed_lbp_merge)
        for (std::size_t k = 0; k < local.size(); ++k) {
            counts[k] += local[k];
        }
    }
    return counts;
}

LbpDescriptor lbp_histogram(const GrayImage &img, const LbpParams &params) {
    const auto counts = lbp_counts(img, params);
    std::uint64_t total = 0;
    for (auto c : counts) {
        total += c;
    }
    LbpDescriptor out;
    out.bins.resize(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        out.bins[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
    }
    return out;
}

}  // namespace cropweed
