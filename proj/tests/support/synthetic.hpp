#pragma once

// Procedural stand-ins for the four segment classes, for pipeline and CLI tests.
// They only need to be distinguishable by color and texture; they carry no claim
// about real field imagery.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include <opencv2/core.hpp>

namespace cropweed::testing {

/// 8-bit BGR image of the given class ("broadleaf", "grass", "soil", "soybean").
cv::Mat synthetic_segment(const std::string &cls, std::uint64_t seed, int width, int height);

/// Writes root/<class>/img_NNN.png for the four classes; returns root.
std::filesystem::path write_synthetic_dataset(const std::filesystem::path &root, std::size_t per_class,
                                              std::uint64_t seed, int size = 40);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string &tag);

}  // namespace cropweed::testing
