#include "cropweed/serial.hpp"

#include <exception>
#include <set>

namespace cropweed::serial {

GlcmCounts glcm_counts(const GrayImage &img, const GlcmParams &params) {
    const GlcmOffset off = glcm_offset(params);
    const std::size_t levels = img.levels();
    GlcmCounts out;
    out.levels = img.levels();
    out.counts.assign(levels * levels, 0);
    const long w = static_cast<long>(img.width());
    const long h = static_cast<long>(img.height());
    for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
            const long nx = x + off.dx;
            const long ny = y + off.dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
                continue;
            }
            const std::size_t i = img.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
            const std::size_t j = img.at(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny));
            ++out.counts[i * levels + j];
            ++out.total;
            if (params.symmetric) {
                ++out.counts[j * levels + i];
                ++out.total;
            }
        }
    }
    if (out.total == 0) {
        throw DegenerateInputError{"image has no pixel pair at the GLCM offset"};
    }
    return out;
}

std::vector<std::uint64_t> lbp_counts(const GrayImage &img, const LbpParams &params) {
    const LbpSampler sampler{params};
    const LbpLabelTable labels{params};
    std::vector<std::uint64_t> counts(labels.bins(), 0);
    std::uint64_t seen = 0;
    for (std::size_t y = 0; y < img.height(); ++y) {
        for (std::size_t x = 0; x < img.width(); ++x) {
            if (sampler.fits(img, x, y)) {
                ++counts[labels.bin(sampler.code_unchecked(img, x, y))];
                ++seen;
            }
        }
    }
    if (seen == 0) {
        throw DegenerateInputError{"image has no interior pixel for LBP"};
    }
    return counts;
}

std::vector<double> kernel_matrix(const KernelSpec &kernel, const FeatureMatrix &x) {
    const std::size_t n = x.rows();
    std::vector<double> gram(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double k = kernel_eval(kernel, x.row(i), x.row(j));
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
    }
    return gram;
}

FeatureCache extract_features(const DatasetManifest &m, const ExtractionConfig &config) {
    FeatureCache cache;
    cache.config = config;
    cache.columns = feature_columns(config);
    std::set<std::string> ids;
    const auto visit = [&](const std::string &label, const std::vector<std::filesystem::path> &files) {
        for (const auto &p : files) {
            try {
                auto values = extract_image_features(load_image(p), config);
                std::string id = label + "/" + p.filename().string();
                for (int dup = 2; ids.contains(id); ++dup) {
                    id = label + "/" + p.filename().string() + "#" + std::to_string(dup);
                }
                ids.insert(id);
                cache.rows.push_back({std::move(id), label, p, std::move(values)});
            } catch (const std::exception &e) {
                cache.skipped.push_back({p, e.what()});
            }
        }
    };
    for (auto cls : dataset_classes) {
        const auto it = m.classes.find(std::string{cls});
        if (it != m.classes.end()) {
            visit(it->first, it->second);
        }
    }
    for (const auto &[name, files] : m.classes) {
        if (std::find(dataset_classes.begin(), dataset_classes.end(), name) == dataset_classes.end()) {
            visit(name, files);
        }
    }
    if (cache.rows.empty()) {
        throw ExtractionError{"no image could be processed"};
    }
    return cache;
}

}  // namespace cropweed::serial
