#pragma once

// Single-threaded reference versions of the OpenMP kernels. Tests assert the
// parallel kernels reproduce these exactly; the benchmarks compare their speed.

#include <cstdint>
#include <vector>

#include "cropweed/dataset.hpp"
#include "cropweed/glcm.hpp"
#include "cropweed/lbp.hpp"
#include "cropweed/svm.hpp"

namespace cropweed::serial {

[[nodiscard]] GlcmCounts glcm_counts(const GrayImage &img, const GlcmParams &params);
[[nodiscard]] std::vector<std::uint64_t> lbp_counts(const GrayImage &img, const LbpParams &params);
[[nodiscard]] std::vector<double> kernel_matrix(const KernelSpec &kernel, const FeatureMatrix &x);
[[nodiscard]] FeatureCache extract_features(const DatasetManifest &m, const ExtractionConfig &config);

}  // namespace cropweed::serial
