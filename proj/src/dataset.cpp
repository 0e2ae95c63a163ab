#include "cropweed/dataset.hpp"

#include <algorithm>
#include <exception>
#include <set>

#include <omp.h>

#include "cropweed/color_features.hpp"
#include "cropweed/rng.hpp"

namespace cropweed {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_image_file(const fs::path &p) {
    static const std::set<std::string> extensions{".png", ".jpg", ".jpeg", ".tif", ".tiff", ".bmp"};
    return extensions.contains(lower(p.extension().string()));
}

std::string mapping_name(LbpMapping m) {
    switch (m) {
        case LbpMapping::raw: return "raw";
        case LbpMapping::ri: return "ri";
        case LbpMapping::riu2: return "riu2";
    }
    return "?";
}

}  // namespace

std::size_t DatasetManifest::total() const {
    std::size_t n = 0;
    for (const auto &[_, files] : classes) {
        n += files.size();
    }
    return n;
}

DatasetManifest scan_dataset(const fs::path &root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw DatasetLayoutError{"dataset root is not a directory: " + root.string()};
    }
    std::map<std::string, fs::path> dirs;
    for (const auto &entry : fs::directory_iterator{root}) {
        if (!entry.is_directory()) {
            continue;
        }
        const std::string name = lower(entry.path().filename().string());
        if (std::find(dataset_classes.begin(), dataset_classes.end(), name) != dataset_classes.end()) {
            if (dirs.contains(name)) {
                throw DatasetLayoutError{"dataset root has more than one directory matching class '" + name + "'"};
            }
            dirs.emplace(name, entry.path());
        }
    }

    DatasetManifest m;
    m.root = root;
    for (auto cls : dataset_classes) {
        const std::string name{cls};
        const auto it = dirs.find(name);
        if (it == dirs.end()) {
            throw DatasetLayoutError{"dataset root " + root.string() + " is missing the class directory '" + name + "'"};
        }
        std::vector<fs::path> files;
        for (const auto &entry : fs::directory_iterator{it->second}) {
            if (entry.is_regular_file() && is_image_file(entry.path())) {
                files.push_back(entry.path());
            }
        }
        if (files.empty()) {
            throw DatasetError{"class directory '" + it->second.string() + "' contains no images"};
        }
        std::sort(files.begin(), files.end());
        m.classes.emplace(name, std::move(files));
    }
    return m;
}

std::vector<std::string> count_mismatch_warnings(const DatasetManifest &m) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < dataset_classes.size(); ++k) {
        const std::string name{dataset_classes[k]};
        const auto it = m.classes.find(name);
        const std::size_t have = it == m.classes.end() ? 0 : it->second.size();
        if (have != published_class_counts[k]) {
            out.push_back("class '" + name + "' has " + std::to_string(have) + " images; the public release lists " +
                          std::to_string(published_class_counts[k]));
        }
    }
    return out;
}

DatasetManifest sample_per_class(const DatasetManifest &m, std::size_t n, std::uint64_t seed) {
    DatasetManifest out;
    out.root = m.root;
    std::uint64_t stream = 0;
    for (const auto &[name, files] : m.classes) {
        if (files.size() < n) {
            throw ParameterError{"class '" + name + "' has " + std::to_string(files.size()) +
                                 " images, fewer than the requested " + std::to_string(n)};
        }
        std::vector<fs::path> pool = files;
        std::sort(pool.begin(), pool.end());
        Rng rng{derive_seed(seed, stream++)};
        // Partial Fisher-Yates: the first n slots are a uniform sample without replacement.
        for (std::size_t i = 0; i < n; ++i) {
            std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
        }
        pool.resize(n);
        std::sort(pool.begin(), pool.end());
        out.classes.emplace(name, std::move(pool));
    }
    return out;
}

std::vector<std::string> feature_columns(const ExtractionConfig &config) {
    std::vector<std::string> cols;
    for (auto n : ColorDescriptor::names) {
        cols.emplace_back(n);
    }
    for (auto n : GlcmDescriptor::names) {
        cols.emplace_back(n);
    }
    const std::size_t bins = lbp_bin_count(config.lbp);
    const std::string prefix = "lbp_" + mapping_name(config.lbp.mapping) + "_";
    for (std::size_t k = 0; k < bins; ++k) {
        cols.push_back(prefix + std::to_string(k));
    }
    return cols;
}

std::vector<double> extract_image_features(const RgbImage &img, const ExtractionConfig &config) {
    const ColorDescriptor color = color_stats(img);
    const GrayImage gray = to_gray(img, config.gray_levels);
    const GlcmDescriptor texture = haralick_features(compute_glcm(gray, config.glcm), config.correlation);
    const LbpDescriptor lbp = lbp_histogram(gray, config.lbp);

    std::vector<double> row;
    row.reserve(color.values.size() + GlcmDescriptor::size + lbp.bins.size());
    row.insert(row.end(), color.values.begin(), color.values.end());
    const auto t = texture.values();
    row.insert(row.end(), t.begin(), t.end());
    row.insert(row.end(), lbp.bins.begin(), lbp.bins.end());
    return row;
}

FeatureCache extract_features(const DatasetManifest &m, const ExtractionConfig &config) {
    struct Job {
        std::string label;
        fs::path path;
    };
    std::vector<Job> jobs;
    for (auto cls : dataset_classes) {
        const auto it = m.classes.find(std::string{cls});
        if (it == m.classes.end()) {
            continue;
        }
        for (const auto &p : it->second) {
            jobs.push_back({it->first, p});
        }
    }
    // Any extra (non-canonical) classes follow in name order.
    for (const auto &[name, files] : m.classes) {
        if (std::find(dataset_classes.begin(), dataset_classes.end(), name) == dataset_classes.end()) {
            for (const auto &p : files) {
                jobs.push_back({name, p});
            }
        }
    }

    FeatureCache cache;
    cache.config = config;
    cache.columns = feature_columns(config);

    std::vector<std::vector<double>> values(jobs.size());
    std::vector<std::string> errors(jobs.size());
    const long count = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (long k = 0; k < count; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        try {
            values[idx] = extract_image_features(load_image(jobs[idx].path), config);
        } catch (const std::exception &e) {
            errors[idx] = e.what();
        } catch (...) {
            errors[idx] = "unknown error";
        }
    }

    std::set<std::string> ids;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        if (!errors[k].empty()) {
            cache.skipped.push_back({jobs[k].path, errors[k]});
            continue;
        }
        std::string id = jobs[k].label + "/" + jobs[k].path.filename().string();
        for (int dup = 2; ids.contains(id); ++dup) {
            id = jobs[k].label + "/" + jobs[k].path.filename().string() + "#" + std::to_string(dup);
        }
        ids.insert(id);
        cache.rows.push_back({std::move(id), jobs[k].label, jobs[k].path, std::move(values[k])});
    }
    if (cache.rows.empty()) {
        throw ExtractionError{"no image could be processed (" + std::to_string(cache.skipped.size()) + " failed)" +
                              (cache.skipped.empty() ? "" : ": " + cache.skipped.front().reason)};
    }
    return cache;
}

}  // namespace cropweed
