#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cropweed/glcm.hpp"
#include "cropweed/lbp.hpp"

namespace cropweed {

/// The four segment classes, in the canonical (alphabetical) order used everywhere.
inline constexpr std::array<std::string_view, 4> dataset_classes{"broadleaf", "grass", "soil", "soybean"};

/// Segment counts of the public release, same order as dataset_classes.
inline constexpr std::array<std::size_t, 4> published_class_counts{1191, 3520, 3249, 7376};

struct DatasetManifest {
    std::filesystem::path root;
    /// Class name -> sorted image paths.
    std::map<std::string, std::vector<std::filesystem::path>> classes;

    [[nodiscard]] std::size_t total() const;
};

/// Finds the four class directories under root (case-insensitive) and lists image files
/// (png, jpg, jpeg, tif, tiff, bmp) in each, sorted lexicographically.
/// Throws DatasetLayoutError naming a missing class directory, DatasetError for an empty class.
[[nodiscard]] DatasetManifest scan_dataset(const std::filesystem::path &root);

/// One human-readable line per class whose count differs from the published figure.
[[nodiscard]] std::vector<std::string> count_mismatch_warnings(const DatasetManifest &m);

/// Seeded sample of n files per class without replacement, each list re-sorted.
/// Throws ParameterError when a class has fewer than n files.
[[nodiscard]] DatasetManifest sample_per_class(const DatasetManifest &m, std::size_t n, std::uint64_t seed);

struct ExtractionConfig {
    std::uint32_t gray_levels = 256;
    GlcmParams glcm{};
    CorrelationNormalization correlation = CorrelationNormalization::as_printed;
    LbpParams lbp{};
};

/// Ordered column names for a config: 12 color, 9 GLCM, then lbp_<mapping>_<k>.
[[nodiscard]] std::vector<std::string> feature_columns(const ExtractionConfig &config);

/// Full descriptor of one image in column order.
[[nodiscard]] std::vector<double> extract_image_features(const RgbImage &img, const ExtractionConfig &config);

struct FeatureRow {
    std::string id;
    std::string label;
    std::filesystem::path source;
    std::vector<double> values;
};

struct SkippedImage {
    std::filesystem::path path;
    std::string reason;
};

struct FeatureCache {
    ExtractionConfig config;
    std::vector<std::string> columns;
    std::vector<FeatureRow> rows;
    std::vector<SkippedImage> skipped;
};

/// Per-image extraction in parallel; rows follow manifest order (classes in canonical order).
/// Unreadable images are recorded in `skipped`. Throws ExtractionError if every image fails.
[[nodiscard]] FeatureCache extract_features(const DatasetManifest &m, const ExtractionConfig &config);

}  // namespace cropweed
