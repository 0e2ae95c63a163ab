#include "cropweed/reproduction.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "cropweed/io.hpp"

namespace cropweed {

using nlohmann::json;

namespace {

constexpr std::array<double, 3> sweep_fractions{0.3, 0.5, 0.7};

struct FeatureRun {
    const char *label;
    std::set<FeatureFamily> families;
};

const std::vector<FeatureRun> &feature_runs() {
    static const std::vector<FeatureRun> runs{
        {"COLOR", {FeatureFamily::color}},
        {"COLOR+GLCM", {FeatureFamily::color, FeatureFamily::glcm}},
        {"COLOR+LBP", {FeatureFamily::color, FeatureFamily::lbp}},
    };
    return runs;
}

std::size_t fraction_slot(double fraction) {
    for (std::size_t k = 0; k < sweep_fractions.size(); ++k) {
        if (std::abs(sweep_fractions[k] - fraction) < 1e-9) {
            return k;
        }
    }
    throw ParameterError{"no published value for training fraction " + std::to_string(fraction)};
}

std::string fmt(const char *pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string pad(const std::string &s, int width) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-*s", width, s.c_str());
    return buf;
}

}  // namespace

namespace published {

const std::vector<std::vector<double>> &confusion(const std::string &feature_label) {
    static const std::map<std::string, std::vector<std::vector<double>>> tables{
        {"COLOR", {{67.00, 17.67, 0.0, 15.33}, {14.33, 70.33, 1.00, 14.33}, {0.0, 0.0, 100.0, 0.0}, {7.67, 16.33, 0.0, 76.00}}},
        {"COLOR+GLCM",
         {{72.33, 22.00, 0.33, 5.33}, {15.33, 74.33, 0.67, 9.67}, {0.0, 1.00, 99.00, 0.0}, {4.00, 10.33, 0.0, 85.67}}},
        {"COLOR+LBP", {{95.33, 1.00, 0.0, 3.67}, {2.33, 95.00, 0.0, 2.67}, {0.0, 0.0, 100.0, 0.0}, {3.00, 2.67, 0.0, 94.33}}},
    };
    const auto it = tables.find(feature_label);
    if (it == tables.end()) {
        throw ParameterError{"no published confusion matrix for '" + feature_label + "'"};
    }
    return it->second;
}

double accuracy(Strategy s, double fraction) {
    static constexpr std::array<double, 3> ova{89.43, 91.05, 93.92};
    static constexpr std::array<double, 3> ovo{92.89, 94.35, 96.17};
    return (s == Strategy::ovo ? ovo : ova)[fraction_slot(fraction)];
}

double seconds(Strategy s, double fraction) {
    static constexpr std::array<double, 3> ova{1.2966, 1.5382, 1.8442};
    static constexpr std::array<double, 3> ovo{0.6242, 0.8580, 1.2206};
    return (s == Strategy::ovo ? ovo : ova)[fraction_slot(fraction)];
}

}  // namespace published

const StrategyCell &ReproductionResult::cell(Strategy s, double fraction) const {
    for (const auto &c : strategy_sweep) {
        if (c.strategy == s && std::abs(c.train_fraction - fraction) < 1e-9) {
            return c;
        }
    }
    throw ParameterError{"no sweep cell for " + to_string(s) + " at " + std::to_string(fraction)};
}

const FeatureComparison &ReproductionResult::features(const std::string &label) const {
    for (const auto &f : feature_comparison) {
        if (f.label == label) {
            return f;
        }
    }
    throw ParameterError{"no feature comparison named " + label};
}

ReproductionResult run_reproduction(const FeatureTable &table, const ReproductionConfig &config) {
    ReproductionResult r;
    r.config = config;

    const auto base = [&] {
        ExperimentConfig e;
        e.iterations = config.iterations;
        e.base_seed = config.seed;
        e.c = config.c;
        e.kernel = config.kernel;
        e.standardize = config.standardize;
        e.stratified = config.stratified;
        return e;
    };

    for (const auto &run : feature_runs()) {
        ExperimentConfig e = base();
        e.features = run.families;
        e.strategy = Strategy::ovo;
        e.train_fraction = 0.7;
        r.feature_comparison.push_back({run.label, run_experiment(table, e)});
    }
    for (double fraction : sweep_fractions) {
        for (Strategy s : {Strategy::ova, Strategy::ovo}) {
            ExperimentConfig e = base();
            e.features = {FeatureFamily::color, FeatureFamily::lbp};
            e.strategy = s;
            e.train_fraction = fraction;
            r.strategy_sweep.push_back({s, fraction, run_experiment(table, e)});
        }
    }
    return r;
}

std::string format_reproduction(const ReproductionResult &r) {
    std::string out;
    out += "Confusion matrices, one-vs-one, 70% training, " + std::to_string(r.config.iterations) +
           " iterations (measured | published), row = true class\n";
    for (const auto &fc : r.feature_comparison) {
        const auto &rep = fc.report;
        out += "\n" + fc.label + "  (mean accuracy " + fmt("%.2f%%", 100.0 * rep.mean_accuracy) + ")\n";
        out += pad("", 12);
        for (const auto &c : rep.classes) {
            out += pad(c, 18);
        }
        out += "\n";
        const bool have_ref = rep.classes.size() == 4;
        for (std::size_t a = 0; a < rep.classes.size(); ++a) {
            out += pad(rep.classes[a], 12);
            for (std::size_t b = 0; b < rep.classes.size(); ++b) {
                std::string cell = fmt("%6.2f", rep.mean_row_percent[a][b]);
                if (have_ref) {
                    cell += " | " + fmt("%6.2f", published::confusion(fc.label)[a][b]);
                }
                out += pad(cell, 18);
            }
            out += "\n";
        }
    }

    out += "\nTotal accuracy, COLOR+LBP (measured | published)\n";
    out += pad("method", 16);
    for (double f : sweep_fractions) {
        out += pad(fmt("%.0f%%", 100.0 * f), 22);
    }
    out += "\n";
    for (Strategy s : {Strategy::ova, Strategy::ovo}) {
        out += pad(s == Strategy::ovo ? "one-vs-one" : "one-vs-all", 16);
        for (double f : sweep_fractions) {
            out += pad(fmt("%6.2f%%", 100.0 * r.cell(s, f).report.mean_accuracy) + " | " +
                           fmt("%6.2f%%", published::accuracy(s, f)),
                       22);
        }
        out += "\n";
    }

    out += "\nMean time per iteration, COLOR+LBP, seconds (train / predict | published)\n";
    out += pad("method", 16);
    for (double f : sweep_fractions) {
        out += pad(fmt("%.0f%%", 100.0 * f), 30);
    }
    out += "\n";
    for (Strategy s : {Strategy::ova, Strategy::ovo}) {
        out += pad(s == Strategy::ovo ? "one-vs-one" : "one-vs-all", 16);
        for (double f : sweep_fractions) {
            const auto &rep = r.cell(s, f).report;
            out += pad(fmt("%.4f", rep.mean_train_seconds) + " / " + fmt("%.4f", rep.mean_predict_seconds) + " | " +
                           fmt("%.4f", published::seconds(s, f)),
                       30);
        }
        out += "\n";
    }
    out += "(absolute times depend on hardware; compare orderings only)\n";
    return out;
}

json to_json(const ReproductionResult &r) {
    json features = json::array();
    for (const auto &fc : r.feature_comparison) {
        features.push_back({{"label", fc.label}, {"report", to_json(fc.report)}});
    }
    json sweep = json::array();
    for (const auto &c : r.strategy_sweep) {
        sweep.push_back(
            {{"strategy", to_string(c.strategy)}, {"train_fraction", c.train_fraction}, {"report", to_json(c.report)}});
    }
    return {{"format", "cropweed-reproduction"},
            {"tool_version", tool_version},
            {"config",
             {{"iterations", r.config.iterations},
              {"seed", r.config.seed},
              {"C", r.config.c},
              {"kernel", to_json(r.config.kernel)},
              {"standardize", r.config.standardize},
              {"stratified", r.config.stratified}}},
            {"feature_comparison", features},
            {"strategy_sweep", sweep}};
}

json strip_timing(json j) {
    if (j.is_object()) {
        json out = json::object();
        for (auto &[k, v] : j.items()) {
            if (k.find("seconds") != std::string::npos) {
                continue;
            }
            out[k] = strip_timing(v);
        }
        return out;
    }
    if (j.is_array()) {
        for (auto &v : j) {
            v = strip_timing(v);
        }
    }
    return j;
}

}  // namespace cropweed
