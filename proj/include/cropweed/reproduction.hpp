#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cropweed/evaluation.hpp"
#include "cropweed/feature_table.hpp"

#include "json.hpp"

namespace cropweed {

struct ReproductionConfig {
    int iterations = 10;
    std::uint64_t seed = 42;
    double c = 1.0;
    KernelSpec kernel = LinearKernel{};
    bool standardize = true;
    bool stratified = true;
};

/// One row of the feature comparison (one-vs-one at 70% training).
struct FeatureComparison {
    std::string label;  ///< COLOR, COLOR+GLCM, COLOR+LBP
    ExperimentReport report;
};

/// One cell of the strategy sweep (COLOR+LBP).
struct StrategyCell {
    Strategy strategy = Strategy::ovo;
    double train_fraction = 0.0;
    ExperimentReport report;
};

struct ReproductionResult {
    ReproductionConfig config;
    std::vector<FeatureComparison> feature_comparison;
    std::vector<StrategyCell> strategy_sweep;

    [[nodiscard]] const StrategyCell &cell(Strategy s, double fraction) const;
    [[nodiscard]] const FeatureComparison &features(const std::string &label) const;
};

/// Runs the feature comparison and the 30/50/70% one-vs-one / one-vs-all sweep.
[[nodiscard]] ReproductionResult run_reproduction(const FeatureTable &table, const ReproductionConfig &config);

/// Published reference values, for side-by-side rendering.
namespace published {
/// Confusion rows (true class) in canonical class order, percent.
[[nodiscard]] const std::vector<std::vector<double>> &confusion(const std::string &feature_label);
/// Total accuracy, percent, for fractions 0.3, 0.5, 0.7.
[[nodiscard]] double accuracy(Strategy s, double fraction);
/// Computational (training) time in seconds for fractions 0.3, 0.5, 0.7.
[[nodiscard]] double seconds(Strategy s, double fraction);
}  // namespace published

[[nodiscard]] std::string format_reproduction(const ReproductionResult &r);
[[nodiscard]] nlohmann::json to_json(const ReproductionResult &r);

/// The JSON with wall-clock fields removed, for determinism comparisons.
[[nodiscard]] nlohmann::json strip_timing(nlohmann::json j);

}  // namespace cropweed
