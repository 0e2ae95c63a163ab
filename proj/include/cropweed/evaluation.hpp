#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cropweed/feature_table.hpp"
#include "cropweed/multiclass.hpp"

namespace cropweed {

struct SplitSpec {
    double train_fraction = 0.7;
    std::uint64_t seed = 42;
    bool stratified = true;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Seeded random train/test partition over item labels. Stratified mode splits each
/// class independently with round-half-up of fraction * class size.
/// Both partitions are returned sorted. Throws ParameterError if any partition
/// (per class when stratified) would be empty.
[[nodiscard]] Split split(std::span<const std::string> labels, const SplitSpec &spec);

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<std::uint64_t>> counts;
    std::vector<std::vector<double>> row_percent;

    [[nodiscard]] std::uint64_t total() const;
    [[nodiscard]] double accuracy() const;
};

/// Throws ParameterError on length mismatch or labels outside classes.
[[nodiscard]] ConfusionMatrix confusion(std::span<const std::string> predicted, std::span<const std::string> truth,
                                        std::span<const std::string> classes);

struct ExperimentConfig {
    std::set<FeatureFamily> features{FeatureFamily::color, FeatureFamily::lbp};
    Strategy strategy = Strategy::ovo;
    double train_fraction = 0.7;
    bool stratified = true;
    int iterations = 10;
    std::uint64_t base_seed = 42;
    double c = 1.0;
    KernelSpec kernel = LinearKernel{};
    bool standardize = true;
};

struct IterationResult {
    std::uint64_t seed = 0;
    double accuracy = 0.0;
    double train_seconds = 0.0;
    double predict_seconds = 0.0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    bool converged = true;
    ConfusionMatrix confusion;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<std::string> classes;
    std::size_t feature_dimension = 0;
    std::vector<IterationResult> iterations;

    double mean_accuracy = 0.0;
    double mean_train_seconds = 0.0;
    double mean_predict_seconds = 0.0;
    /// Element-wise mean of per-iteration row percentages.
    std::vector<std::vector<double>> mean_row_percent;
    bool all_converged = true;
};

/// Runs `iterations` seeded split/train/test rounds; round k uses seed base_seed + k.
[[nodiscard]] ExperimentReport run_experiment(const FeatureTable &table, const ExperimentConfig &config);

/// Plain-text rendering of a report.
[[nodiscard]] std::string format_report(const ExperimentReport &report);

}  // namespace cropweed
