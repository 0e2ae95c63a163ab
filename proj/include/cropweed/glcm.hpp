#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "cropweed/imaging.hpp"

namespace cropweed {

enum class GlcmDirection { deg0, deg45, deg90, deg135 };

struct GlcmParams {
    std::uint32_t distance = 1;
    GlcmDirection direction = GlcmDirection::deg0;
    bool symmetric = true;
};

/// Pixel offset (dx, dy) for a distance and direction; y grows downward, so 45 degrees points up-right.
struct GlcmOffset {
    long dx = 0;
    long dy = 0;
};
[[nodiscard]] GlcmOffset glcm_offset(const GlcmParams &params);

/// Raw pair counts. counts[i * levels + j] is the number of (pixel = i, neighbor = j) pairs.
struct GlcmCounts {
    std::uint32_t levels = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
};

/// Normalized co-occurrence matrix with its marginal means and standard deviations.
class Glcm {
  public:
    /// Normalizes counts. Throws DegenerateInputError if there are no pairs.
    static Glcm from_counts(const GlcmCounts &counts);

    [[nodiscard]] std::uint32_t levels() const noexcept { return levels_; }
    [[nodiscard]] double p(std::uint32_t i, std::uint32_t j) const noexcept { return p_[static_cast<std::size_t>(i) * levels_ + j]; }
    [[nodiscard]] const std::vector<double> &entries() const noexcept { return p_; }

    [[nodiscard]] double mean_x() const noexcept { return mean_x_; }
    [[nodiscard]] double mean_y() const noexcept { return mean_y_; }
    [[nodiscard]] double std_x() const noexcept { return std_x_; }
    [[nodiscard]] double std_y() const noexcept { return std_y_; }

  private:
    std::uint32_t levels_ = 0;
    std::vector<double> p_;
    double mean_x_ = 0.0;
    double mean_y_ = 0.0;
    double std_x_ = 0.0;
    double std_y_ = 0.0;
};

/// Counts co-occurring pairs in parallel over image rows.
/// Throws DegenerateInputError when the image has no pair at the requested offset.
[[nodiscard]] GlcmCounts glcm_counts(const GrayImage &img, const GlcmParams &params);

[[nodiscard]] Glcm compute_glcm(const GrayImage &img, const GlcmParams &params = {});

/// Denominator used by the correlation statistic.
enum class CorrelationNormalization {
    as_printed,  ///< sigma_x^2 * sigma_y^2
    standard,    ///< sigma_x * sigma_y (Pearson)
};

struct GlcmDescriptor {
    static constexpr std::size_t size = 9;
    static constexpr std::array<std::string_view, size> names{
        "glcm_energy", "glcm_contrast", "glcm_entropy", "glcm_homogeneity", "glcm_correlation",
        "glcm_mean", "glcm_std_moment", "glcm_skewness", "glcm_kurtosis"};

    double energy = 0.0;
    double contrast = 0.0;
    /// -sum p ln p, with 0 ln 0 = 0.
    double entropy = 0.0;
    double homogeneity = 0.0;
    /// 0 when either marginal standard deviation is 0.
    double correlation = 0.0;
    /// Difference moments sum (i-j)^k p(i,j), k = 1..4.
    double mean = 0.0;
    double std_moment = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;

    [[nodiscard]] std::array<double, size> values() const noexcept {
        return {energy, contrast, entropy, homogeneity, correlation, mean, std_moment, skewness, kurtosis};
    }
};

[[nodiscard]] GlcmDescriptor haralick_features(const Glcm &g,
                                               CorrelationNormalization norm = CorrelationNormalization::as_printed);

}  // namespace cropweed
