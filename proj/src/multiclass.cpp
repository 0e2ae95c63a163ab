#include "cropweed/multiclass.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>

#include <omp.h>

#include "cropweed/rng.hpp"

namespace cropweed {

std::string to_string(Strategy s) {
    return s == Strategy::ovo ? "ovo" : "ova";
}

Strategy parse_strategy(const std::string &s) {
    if (s == "ovo") {
        return Strategy::ovo;
    }
    if (s == "ova") {
        return Strategy::ova;
    }
    throw ParameterError{"unknown strategy '" + s + "' (expected ovo or ova)"};
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
    if (x.size() != dimension()) {
        throw ParameterError{"input has dimension " + std::to_string(x.size()) + ", standardizer expects " +
                             std::to_string(dimension())};
    }
    std::vector<double> out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        out[k] = (x[k] - mean[k]) / scale[k];
    }
    return out;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix &x) const {
    if (x.cols() != dimension()) {
        throw ParameterError{"input has dimension " + std::to_string(x.cols()) + ", standardizer expects " +
                             std::to_string(dimension())};
    }
    FeatureMatrix out{x.rows(), x.cols()};
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t k = 0; k < x.cols(); ++k) {
            out(i, k) = (x(i, k) - mean[k]) / scale[k];
        }
    }
    return out;
}

Standardizer Standardizer::identity(std::size_t dim) {
    return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

Standardizer fit_standardizer(const FeatureMatrix &x) {
    if (x.rows() < 2) {
        throw ParameterError{"standardizer needs at least 2 vectors"};
    }
    const std::size_t d = x.cols();
    const double n = static_cast<double>(x.rows());
    Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            s.mean[k] += x(i, k);
        }
    }
    for (auto &m : s.mean) {
        m /= n;
    }
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            const double dev = x(i, k) - s.mean[k];
            s.scale[k] += dev * dev;
        }
    }
    for (auto &v : s.scale) {
        v = std::sqrt(v / n);
        if (v == 0.0) {
            v = 1.0;
        }
    }
    return s;
}

void MulticlassModel::validate() const {
    const std::size_t q = classes.size();
    if (q < 2) {
        throw ParameterError{"multiclass model needs at least 2 classes"};
    }
    const std::size_t expected = strategy == Strategy::ovo ? q * (q - 1) / 2 : q;
    if (binaries.size() != expected) {
        throw ParameterError{"model has " + std::to_string(binaries.size()) + " binaries, expected " +
                             std::to_string(expected) + " for " + to_string(strategy) + " with " +
                             std::to_string(q) + " classes"};
    }
    if (standardizer.scale.size() != standardizer.mean.size()) {
        throw ParameterError{"standardizer mean/scale sizes differ"};
    }
    for (const auto &b : binaries) {
        if (b.svm.dimension() != dimension()) {
            throw ParameterError{"binary member dimension " + std::to_string(b.svm.dimension()) +
                                 " differs from standardizer dimension " + std::to_string(dimension())};
        }
        if (b.positive >= q || (b.negative != BinaryMember::npos && b.negative >= q)) {
            throw ParameterError{"binary member refers to an unknown class"};
        }
    }
}

MulticlassModel train_multiclass(const FeatureMatrix &x, std::span<const std::string> labels,
                                 const MulticlassOptions &opts, std::span<const std::string> class_order) {
    if (x.rows() != labels.size()) {
        throw ParameterError{"got " + std::to_string(x.rows()) + " vectors but " + std::to_string(labels.size()) +
                             " labels"};
    }

    MulticlassModel model;
    model.strategy = opts.strategy;
    if (class_order.empty()) {
        for (const auto &l : labels) {
            if (std::find(model.classes.begin(), model.classes.end(), l) == model.classes.end()) {
                model.classes.push_back(l);
            }
        }
    } else {
        model.classes.assign(class_order.begin(), class_order.end());
    }

    std::map<std::string, std::size_t> index_of;
    for (std::size_t k = 0; k < model.classes.size(); ++k) {
        index_of.emplace(model.classes[k], k);
    }
    std::vector<std::vector<std::size_t>> members(model.classes.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto it = index_of.find(labels[i]);
        if (it == index_of.end()) {
            throw ParameterError{"label '" + labels[i] + "' is not in the class list"};
        }
        members[it->second].push_back(i);
    }
    std::erase_if(model.classes, [&](const std::string &c) { return members[index_of.at(c)].empty(); });
    std::erase_if(members, [](const auto &m) { return m.empty(); });
    if (model.classes.size() < 2) {
        throw ParameterError{"multiclass training needs at least 2 classes with samples"};
    }

    model.standardizer = opts.standardize ? fit_standardizer(x) : Standardizer::identity(x.cols());
    const FeatureMatrix z = model.standardizer.apply(x);

    const std::size_t q = model.classes.size();
    if (opts.strategy == Strategy::ovo) {
        for (std::size_t a = 0; a < q; ++a) {
            for (std::size_t b = a + 1; b < q; ++b) {
                model.binaries.push_back({a, b, {}});
            }
        }
    } else {
        for (std::size_t a = 0; a < q; ++a) {
            model.binaries.push_back({a, BinaryMember::npos, {}});
        }
    }

    const long count = static_cast<long>(model.binaries.size());
    std::vector<std::exception_ptr> failures(model.binaries.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long k = 0; k < count; ++k) {
        try {
            BinaryMember &member = model.binaries[static_cast<std::size_t>(k)];
            TrainingSet set;
            std::vector<std::size_t> rows;
            if (member.negative != BinaryMember::npos) {
                rows = members[member.positive];
                rows.insert(rows.end(), members[member.negative].begin(), members[member.negative].end());
                std::sort(rows.begin(), rows.end());
            } else {
                rows.resize(z.rows());
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    rows[i] = i;
                }
            }
            set.x = z.select_rows(rows);
            set.y.reserve(rows.size());
            for (std::size_t r : rows) {
                set.y.push_back(labels[r] == model.classes[member.positive] ? 1 : -1);
            }
            SmoOptions smo;
            smo.tol = opts.tol;
            smo.max_passes = opts.max_passes;
            smo.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(k));
            member.svm = smo_train(set, opts.c, opts.kernel, smo);
        } catch (...) {
            failures[static_cast<std::size_t>(k)] = std::current_exception();
        }
    }
    for (const auto &f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
    return model;
}

std::vector<double> member_decisions(const MulticlassModel &m, std::span<const double> standardized) {
    std::vector<double> out;
    out.reserve(m.binaries.size());
    for (const auto &b : m.binaries) {
        out.push_back(decision_value(b.svm, standardized));
    }
    return out;
}

std::size_t resolve_class(const MulticlassModel &m, std::span<const double> decisions) {
    const std::size_t q = m.classes.size();
    if (decisions.size() != m.binaries.size()) {
        throw ParameterError{"expected one decision value per binary member"};
    }
    if (m.strategy == Strategy::ova) {
        std::size_t best = 0;
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < decisions.size(); ++k) {
            if (decisions[k] > best_value) {
                best_value = decisions[k];
                best = m.binaries[k].positive;
            }
        }
        return best;
    }

    std::vector<std::size_t> votes(q, 0);
    std::vector<double> margin(q, 0.0);
    for (std::size_t k = 0; k < decisions.size(); ++k) {
        const auto &b = m.binaries[k];
        const double dv = decisions[k];
        ++votes[dv >= 0.0 ? b.positive : b.negative];
        margin[b.positive] += dv;
        margin[b.negative] -= dv;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < q; ++c) {
        if (votes[c] > votes[best] || (votes[c] == votes[best] && margin[c] > margin[best])) {
            best = c;
        }
    }
    return best;
}

std::size_t predict_class_index(const MulticlassModel &m, std::span<const double> x) {
    const auto z = m.standardizer.apply(x);
    return resolve_class(m, member_decisions(m, z));
}

const std::string &predict_class(const MulticlassModel &m, std::span<const double> x) {
    return m.classes[predict_class_index(m, x)];
}

}  // namespace cropweed
