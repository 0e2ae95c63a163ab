#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cropweed/imaging.hpp"

namespace cropweed {

enum class LbpMapping { raw, ri, riu2 };

struct LbpParams {
    std::uint32_t points = 8;  ///< sampling points M, in [4, 24]
    double radius = 1.0;       ///< R > 0
    LbpMapping mapping = LbpMapping::riu2;
};

void validate(const LbpParams &params);

/// Circular right rotation of an M-bit code.
[[nodiscard]] std::uint32_t ror(std::uint32_t code, std::uint32_t shift, std::uint32_t points) noexcept;
/// Minimum over all M rotations.
[[nodiscard]] std::uint32_t ri_label(std::uint32_t code, std::uint32_t points) noexcept;
/// Number of 0/1 transitions in the circular bit string.
[[nodiscard]] std::uint32_t uniformity(std::uint32_t code, std::uint32_t points) noexcept;
/// Set-bit count for uniform codes (at most two transitions), M+1 otherwise.
[[nodiscard]] std::uint32_t riu2_label(std::uint32_t code, std::uint32_t points) noexcept;

/// Precomputed sampling geometry for one (M, R) neighbourhood.
///
/// Sample m sits at angle 2*pi*m/M counterclockwise from the +x axis, i.e. at
/// (x_c + R cos, y_c - R sin) in image coordinates. Samples within 1e-9 of the
/// pixel grid are snapped onto it; the rest are bilinearly interpolated.
class LbpSampler {
  public:
    explicit LbpSampler(const LbpParams &params);

    [[nodiscard]] std::uint32_t points() const noexcept { return static_cast<std::uint32_t>(samples_.size()); }
    /// Pixels that must exist on each side of the center.
    [[nodiscard]] std::size_t margin() const noexcept { return margin_; }

    /// True if the full circle around (x, y) lies inside img.
    [[nodiscard]] bool fits(const GrayImage &img, std::size_t x, std::size_t y) const noexcept;

    /// Code at (x, y) without bounds checking; callers guarantee fits().
    [[nodiscard]] std::uint32_t code_unchecked(const GrayImage &img, std::size_t x, std::size_t y) const noexcept;

  private:
    struct Sample {
        long base_x = 0;
        long base_y = 0;
        // bilinear weights for (x0,y0), (x1,y0), (x0,y1), (x1,y1)
        double w00 = 1.0;
        double w10 = 0.0;
        double w01 = 0.0;
        double w11 = 0.0;
    };
    std::vector<Sample> samples_;
    std::size_t margin_ = 0;
};

/// LBP code at a pixel. Throws OutOfBoundsError when the circle leaves the image.
[[nodiscard]] std::uint32_t lbp_code(const GrayImage &img, std::size_t x, std::size_t y, const LbpParams &params);

/// Maps raw codes to histogram bins for a mapping.
class LbpLabelTable {
  public:
    explicit LbpLabelTable(const LbpParams &params);

    [[nodiscard]] std::size_t bins() const noexcept { return bins_; }
    [[nodiscard]] std::uint32_t bin(std::uint32_t code) const noexcept { return table_[code]; }

  private:
    std::vector<std::uint32_t> table_;
    std::size_t bins_ = 0;
};

/// Number of histogram bins: 2^M (raw), M+2 (riu2), or the number of distinct rotation classes (ri).
[[nodiscard]] std::size_t lbp_bin_count(const LbpParams &params);

struct LbpDescriptor {
    /// Normalized to sum 1.
    std::vector<double> bins;
};

/// Integer label counts over interior pixels, computed in parallel over rows.
/// Throws DegenerateInputError when no interior pixel exists.
[[nodiscard]] std::vector<std::uint64_t> lbp_counts(const GrayImage &img, const LbpParams &params);

[[nodiscard]] LbpDescriptor lbp_histogram(const GrayImage &img, const LbpParams &params = {});

}  // namespace cropweed
