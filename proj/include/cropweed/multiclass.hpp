#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cropweed/matrix.hpp"
#include "cropweed/svm.hpp"

namespace cropweed {

enum class Strategy { ovo, ova };

[[nodiscard]] std::string to_string(Strategy s);
[[nodiscard]] Strategy parse_strategy(const std::string &s);

/// Per-feature affine scaling (x - mean) / scale.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    [[nodiscard]] std::size_t dimension() const noexcept { return mean.size(); }
    [[nodiscard]] std::vector<double> apply(std::span<const double> x) const;
    [[nodiscard]] FeatureMatrix apply(const FeatureMatrix &x) const;

    /// mean 0, scale 1.
    static Standardizer identity(std::size_t dim);
};

/// Population mean and std per column; zero std becomes scale 1. Needs at least 2 rows.
[[nodiscard]] Standardizer fit_standardizer(const FeatureMatrix &x);

struct BinaryMember {
    /// Class index on the +1 side.
    std::size_t positive = 0;
    /// Class index on the -1 side; npos for one-vs-all members.
    std::size_t negative = npos;
    TrainedBinarySvm svm;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct MulticlassModel {
    Strategy strategy = Strategy::ovo;
    std::vector<std::string> classes;
    std::vector<BinaryMember> binaries;
    Standardizer standardizer;

    [[nodiscard]] std::size_t dimension() const noexcept { return standardizer.dimension(); }
    /// Throws ParameterError if the binary count or dimensions are inconsistent.
    void validate() const;
};

struct MulticlassOptions {
    Strategy strategy = Strategy::ovo;
    double c = 1.0;
    KernelSpec kernel = LinearKernel{};
    bool standardize = true;
    double tol = 1e-3;
    int max_passes = 10;
    std::uint64_t seed = 42;
};

/// Trains the ensemble. Classes are ordered by first appearance unless class_order is given.
/// Binary problems train concurrently across the OpenMP team.
[[nodiscard]] MulticlassModel train_multiclass(const FeatureMatrix &x, std::span<const std::string> labels,
                                               const MulticlassOptions &opts,
                                               std::span<const std::string> class_order = {});

/// Decision value of every binary member on an already standardized input.
[[nodiscard]] std::vector<double> member_decisions(const MulticlassModel &m, std::span<const double> standardized);

/// Applies the voting (ovo) or argmax (ova) rule to member decision values.
[[nodiscard]] std::size_t resolve_class(const MulticlassModel &m, std::span<const double> decisions);

[[nodiscard]] std::size_t predict_class_index(const MulticlassModel &m, std::span<const double> x);
[[nodiscard]] const std::string &predict_class(const MulticlassModel &m, std::span<const double> x);

}  // namespace cropweed
