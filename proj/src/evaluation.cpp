#include "cropweed/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

#include "cropweed/rng.hpp"

namespace cropweed {

namespace {

std::size_t train_count(double fraction, std::size_t n) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

std::string fmt(const char *pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

}  // namespace

Split split(std::span<const std::string> labels, const SplitSpec &spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw ParameterError{"train fraction must lie in (0, 1)"};
    }
    Rng rng{spec.seed};
    Split out;

    const auto take = [&](std::vector<std::size_t> items, const std::string &what) {
        rng.shuffle(std::span<std::size_t>{items});
        const std::size_t k = train_count(spec.train_fraction, items.size());
        if (k == 0 || k == items.size()) {
            throw ParameterError{"split of " + what + " (" + std::to_string(items.size()) + " items) at fraction " +
                                 fmt("%g", spec.train_fraction) + " leaves an empty partition"};
        }
        out.train.insert(out.train.end(), items.begin(), items.begin() + static_cast<std::ptrdiff_t>(k));
        out.test.insert(out.test.end(), items.begin() + static_cast<std::ptrdiff_t>(k), items.end());
    };

    if (spec.stratified) {
        std::vector<std::string> order;
        std::map<std::string, std::vector<std::size_t>> by_class;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            auto [it, inserted] = by_class.try_emplace(labels[i]);
            if (inserted) {
                order.push_back(labels[i]);
            }
            it->second.push_back(i);
        }
        for (const auto &c : order) {
            take(by_class[c], "class '" + c + "'");
        }
    } else {
        std::vector<std::size_t> all(labels.size());
        for (std::size_t i = 0; i < all.size(); ++i) {
            all[i] = i;
        }
        take(std::move(all), "the data");
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (const auto &row : counts) {
        for (auto c : row) {
            t += c;
        }
    }
    return t;
}

double ConfusionMatrix::accuracy() const {
    const auto t = total();
    if (t == 0) {
        return 0.0;
    }
    std::uint64_t diag = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        diag += counts[k][k];
    }
    return static_cast<double>(diag) / static_cast<double>(t);
}

ConfusionMatrix confusion(std::span<const std::string> predicted, std::span<const std::string> truth,
                          std::span<const std::string> classes) {
    if (predicted.size() != truth.size()) {
        throw ParameterError{"confusion: " + std::to_string(predicted.size()) + " predictions vs " +
                             std::to_string(truth.size()) + " truths"};
    }
    std::map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        index.emplace(classes[k], k);
    }
    const auto lookup = [&](const std::string &label) {
        const auto it = index.find(label);
        if (it == index.end()) {
            throw ParameterError{"confusion: label '" + label + "' is not among the classes"};
        }
        return it->second;
    };

    const std::size_t q = classes.size();
    ConfusionMatrix m;
    m.classes.assign(classes.begin(), classes.end());
    m.counts.assign(q, std::vector<std::uint64_t>(q, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++m.counts[lookup(truth[i])][lookup(predicted[i])];
    }
    m.row_percent.assign(q, std::vector<double>(q, 0.0));
    for (std::size_t t = 0; t < q; ++t) {
        std::uint64_t row = 0;
        for (auto c : m.counts[t]) {
            row += c;
        }
        if (row == 0) {
            continue;
        }
        for (std::size_t p = 0; p < q; ++p) {
            m.row_percent[t][p] = 100.0 * static_cast<double>(m.counts[t][p]) / static_cast<double>(row);
        }
    }
    return m;
}

ExperimentReport run_experiment(const FeatureTable &table, const ExperimentConfig &config) {
    if (config.iterations < 1) {
        throw ParameterError{"iterations must be >= 1"};
    }
    const auto cols = table.columns_for(config.features);
    const FeatureMatrix x = table.values.select_cols(cols);

    ExperimentReport report;
    report.config = config;
    report.classes = table.classes();
    report.feature_dimension = cols.size();
    const std::size_t q = report.classes.size();
    report.mean_row_percent.assign(q, std::vector<double>(q, 0.0));

    using clock = std::chrono::steady_clock;
    for (int k = 0; k < config.iterations; ++k) {
        IterationResult it;
        it.seed = config.base_seed + static_cast<std::uint64_t>(k);
        const Split parts = split(table.labels, {config.train_fraction, it.seed, config.stratified});

        const FeatureMatrix train_x = x.select_rows(parts.train);
        std::vector<std::string> train_y;
        train_y.reserve(parts.train.size());
        for (auto i : parts.train) {
            train_y.push_back(table.labels[i]);
        }

        MulticlassOptions opts;
        opts.strategy = config.strategy;
        opts.c = config.c;
        opts.kernel = config.kernel;
        opts.standardize = config.standardize;
        opts.seed = it.seed;

        const auto t0 = clock::now();
        const MulticlassModel model = train_multiclass(train_x, train_y, opts, report.classes);
        const auto t1 = clock::now();

        std::vector<std::string> predicted;
        std::vector<std::string> truth;
        predicted.reserve(parts.test.size());
        for (auto i : parts.test) {
            predicted.push_back(predict_class(model, x.row(i)));
        }
        const auto t2 = clock::now();
        for (auto i : parts.test) {
            truth.push_back(table.labels[i]);
        }

        it.train_seconds = std::chrono::duration<double>(t1 - t0).count();
        it.predict_seconds = std::chrono::duration<double>(t2 - t1).count();
        it.train_size = parts.train.size();
        it.test_size = parts.test.size();
        it.converged = std::all_of(model.binaries.begin(), model.binaries.end(),
                                   [](const BinaryMember &b) { return b.svm.converged; });
        it.confusion = confusion(predicted, truth, report.classes);
        it.accuracy = it.confusion.accuracy();
        report.iterations.push_back(std::move(it));
    }

    const double n = static_cast<double>(report.iterations.size());
    for (const auto &it : report.iterations) {
        report.mean_accuracy += it.accuracy;
        report.mean_train_seconds += it.train_seconds;
        report.mean_predict_seconds += it.predict_seconds;
        report.all_converged = report.all_converged && it.converged;
        for (std::size_t a = 0; a < q; ++a) {
            for (std::size_t b = 0; b < q; ++b) {
                report.mean_row_percent[a][b] += it.confusion.row_percent[a][b];
            }
        }
    }
    report.mean_accuracy /= n;
    report.mean_train_seconds /= n;
    report.mean_predict_seconds /= n;
    for (auto &row : report.mean_row_percent) {
        for (auto &v : row) {
            v /= n;
        }
    }
    return report;
}

std::string format_report(const ExperimentReport &report) {
    std::string out;
    out += "features=" + to_string(report.config.features) + " (dim " + std::to_string(report.feature_dimension) +
           ")  strategy=" + to_string(report.config.strategy) + "  train_frac=" +
           fmt("%.2f", report.config.train_fraction) + "  iterations=" + std::to_string(report.iterations.size()) +
           "  C=" + fmt("%g", report.config.c) + "  kernel=" + kernel_name(report.config.kernel) + "\n";
    out += "mean accuracy " + fmt("%.2f%%", 100.0 * report.mean_accuracy) + "   mean train " +
           fmt("%.4f s", report.mean_train_seconds) + "   mean predict " + fmt("%.4f s", report.mean_predict_seconds) +
           (report.all_converged ? "" : "   [some binaries did not converge]") + "\n";
    out += "confusion (row = true class, % of row, averaged):\n";
    std::string header = "            ";
    for (const auto &c : report.classes) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%10s", c.c_str());
        header += buf;
    }
    out += header + "\n";
    for (std::size_t a = 0; a < report.classes.size(); ++a) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%-12s", report.classes[a].c_str());
        out += buf;
        for (double v : report.mean_row_percent[a]) {
            out += fmt("%10.2f", v);
        }
        out += "\n";
    }
    return out;
}

}  // namespace cropweed
