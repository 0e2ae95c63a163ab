#include "cropweed/glcm.hpp"

#include <cmath>
#include <string>

#include <omp.h>

namespace cropweed {

GlcmOffset glcm_offset(const GlcmParams &params) {
    if (params.distance < 1) {
        throw ParameterError{"GLCM distance must be >= 1"};
    }
    const long d = params.distance;
    switch (params.direction) {
        case GlcmDirection::deg0: return {d, 0};
        case GlcmDirection::deg45: return {d, -d};
        case GlcmDirection::deg90: return {0, -d};
        case GlcmDirection::deg135: return {-d, -d};
    }
    throw ParameterError{"unknown GLCM direction"};
}

namespace {

std::string describe(const GlcmOffset &o) {
    return "(dx=" + std::to_string(o.dx) + ", dy=" + std::to_string(o.dy) + ")";
}

struct PairRange {
    std::size_t x_begin, x_end, y_begin, y_end;
};

// Range of reference pixels whose neighbor at the offset lies inside the image.
PairRange pair_range(const GrayImage &img, const GlcmOffset &o) {
    const long w = static_cast<long>(img.width());
    const long h = static_cast<long>(img.height());
    const long xb = std::max(0L, -o.dx);
    const long xe = std::min(w, w - o.dx);
    const long yb = std::max(0L, -o.dy);
    const long ye = std::min(h, h - o.dy);
    if (xb >= xe || yb >= ye) {
        throw DegenerateInputError{"image " + std::to_string(w) + "x" + std::to_string(h) +
                                   " has no pixel pair at GLCM offset " + describe(o)};
    }
    return {static_cast<std::size_t>(xb), static_cast<std::size_t>(xe), static_cast<std::size_t>(yb),
            static_cast<std::size_t>(ye)};
}

}  // namespace

GlcmCounts glcm_counts(const GrayImage &img, const GlcmParams &params) {
    const GlcmOffset off = glcm_offset(params);
    const PairRange r = pair_range(img, off);
    const std::size_t levels = img.levels();
    const std::size_t cells = levels * levels;

    GlcmCounts out;
    out.levels = img.levels();
    out.counts.assign(cells, 0);

    const long rows = static_cast<long>(r.y_end - r.y_begin);
    // Per-thread histograms cost an allocation and a merge of levels^2 cells; only worth it for large images.
    const bool fork = static_cast<std::size_t>(rows) * (r.x_end - r.x_begin) >= 4 * cells;
#pragma omp parallel if (fork)
    {
        const bool alone = omp_get_num_threads() == 1;
        std::vector<std::uint64_t> mine(alone ? 0 : cells, 0);
        std::uint64_t *local = alone ? out.counts.data() : mine.data();
#pragma omp for schedule(static) nowait
        for (long row = 0; row < rows; ++row) {
            const std::size_t y = r.y_begin + static_cast<std::size_t>(row);
            const std::size_t ny = static_cast<std::size_t>(static_cast<long>(y) + off.dy);
            for (std::size_t x = r.x_begin; x < r.x_end; ++x) {
                const std::size_t nx = static_cast<std::size_t>(static_cast<long>(x) + off.dx);
                const std::size_t i = img.at(x, y);
                const std::size_t j = img.at(nx, ny);
                ++local[i * levels + j];
                if (params.symmetric) {
                    ++local[j * levels + i];
                }
            }
        }
        if (!alone) {
#pragma omp critical(cropweed_glcm_merge)
            for (std::size_t k = 0; k < cells; ++k) {
                out.counts[k] += local[k];
            }
        }
    }

    const std::uint64_t pairs = static_cast<std::uint64_t>(r.x_end - r.x_begin) * (r.y_end - r.y_begin);
    out.total = params.symmetric ? 2 * pairs : pairs;
    return out;
}

Glcm Glcm::from_counts(const GlcmCounts &counts) {
    if (counts.total == 0) {
        throw DegenerateInputError{"GLCM has no co-occurrence pairs"};
    }
    Glcm g;
    g.levels_ = counts.levels;
    g.p_.resize(counts.counts.size());
    const double total = static_cast<double>(counts.total);
    for (std::size_t k = 0; k < counts.counts.size(); ++k) {
        g.p_[k] = static_cast<double>(counts.counts[k]) / total;
    }

    const std::size_t n = g.levels_;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double p = g.p_[i * n + j];
            mx += static_cast<double>(i) * p;
            my += static_cast<double>(j) * p;
        }
    }
    double vx = 0.0;
    double vy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double p = g.p_[i * n + j];
            const double di = static_cast<double>(i) - mx;
            const double dj = static_cast<double>(j) - my;
            vx += di * di * p;
            vy += dj * dj * p;
        }
    }
    g.mean_x_ = mx;
    g.mean_y_ = my;
    g.std_x_ = std::sqrt(vx);
    g.std_y_ = std::sqrt(vy);
    return g;
}

Glcm compute_glcm(const GrayImage &img, const GlcmParams &params) {
    return Glcm::from_counts(glcm_counts(img, params));
}

GlcmDescriptor haralick_features(const Glcm &g, CorrelationNormalization norm) {
    GlcmDescriptor f;
    const std::size_t n = g.levels();
    const auto &p = g.entries();
    double cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double di = static_cast<double>(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double v = p[i * n + j];
            if (v == 0.0) {
                continue;
            }
            const double diff = di - static_cast<double>(j);
            const double diff2 = diff * diff;
            f.energy += v * v;
            f.contrast += diff2 * v;
            f.entropy -= v * std::log(v);
            f.homogeneity += v / (1.0 + diff2);
            cov += v * (di - g.mean_x()) * (static_cast<double>(j) - g.mean_y());
            f.std_moment += diff2 * v;
            f.kurtosis += diff2 * diff2 * v;
        }
    }

    // Odd moments pair (i,j) with (j,i) so a symmetric matrix gives exactly 0.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double asym = p[i * n + j] - p[j * n + i];
            if (asym == 0.0) {
                continue;
            }
            const double diff = static_cast<double>(i) - static_cast<double>(j);
            f.mean += diff * asym;
            f.skewness += diff * diff * diff * asym;
        }
    }

    const double sx = g.std_x();
    const double sy = g.std_y();
    const double denom = norm == CorrelationNormalization::as_printed ? sx * sx * sy * sy : sx * sy;
    f.correlation = denom > 0.0 ? cov / denom : 0.0;
    return f;
}

}  // namespace cropweed
