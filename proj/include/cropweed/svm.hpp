#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cropweed/matrix.hpp"

namespace cropweed {

struct LinearKernel {
    friend bool operator==(const LinearKernel &, const LinearKernel &) = default;
};

/// (u.v + coef0)^degree
struct PolynomialKernel {
    int degree = 3;
    double coef0 = 1.0;
    friend bool operator==(const PolynomialKernel &, const PolynomialKernel &) = default;
};

/// exp(-gamma |u - v|^2)
struct RbfKernel {
    double gamma = 1.0;
    friend bool operator==(const RbfKernel &, const RbfKernel &) = default;
};

using KernelSpec = std::variant<LinearKernel, PolynomialKernel, RbfKernel>;

void validate(const KernelSpec &kernel);
[[nodiscard]] std::string kernel_name(const KernelSpec &kernel);

/// Throws ParameterError on dimension mismatch.
[[nodiscard]] double kernel_eval(const KernelSpec &kernel, std::span<const double> u, std::span<const double> v);

/// Symmetric n x n Gram matrix, rows computed in parallel.
[[nodiscard]] std::vector<double> kernel_matrix(const KernelSpec &kernel, const FeatureMatrix &x);

/// Binary training data with labels in {-1, +1}.
struct TrainingSet {
    FeatureMatrix x;
    std::vector<int> y;

    /// Throws ParameterError unless n >= 2, sizes agree, labels are +-1 and both present.
    void validate() const;
};

struct SmoOptions {
    double tol = 1e-3;
    /// Consecutive sweeps without any multiplier change before stopping.
    int max_passes = 10;
    /// Hard cap on full sweeps over the data; hitting it marks the model non-converged.
    std::size_t max_sweeps = 100000;
    std::uint64_t seed = 0;
};

struct TrainedBinarySvm {
    /// One multiplier per training sample (empty after deserialization if not stored).
    std::vector<double> alphas;
    double bias = 0.0;
    FeatureMatrix support_vectors;
    std::vector<int> support_labels;
    std::vector<double> support_alphas;
    KernelSpec kernel = LinearKernel{};
    double c = 1.0;
    bool converged = true;
    std::size_t sweeps = 0;

    [[nodiscard]] std::size_t dimension() const noexcept { return support_vectors.cols(); }

    /// w = sum alpha_i y_i x_i, linear kernels only.
    [[nodiscard]] std::optional<std::vector<double>> explicit_weights() const;
};

/// Soft-margin SVM dual solved by sequential minimal optimization.
///
/// The first multiplier of each step comes from a sweep over KKT violators; the
/// second is drawn from the seeded generator, falling back to the largest
/// |E_i - E_j| candidate and then to a full scan when the random pick makes no
/// progress. After the sweeps settle the bias is recomputed from the free
/// support vectors (or the midpoint of the feasible interval) and KKT is
/// rechecked at opts.tol together with the primal-dual gap; the working tolerance
/// is tightened and optimization resumed until both are within opts.tol, for at
/// most 12 rounds. `converged` reports the KKT check alone.
[[nodiscard]] TrainedBinarySvm smo_train(const TrainingSet &data, double c, const KernelSpec &kernel,
                                         const SmoOptions &opts = {});

/// sum alpha_i y_i K(sv_i, x) + b. Throws ParameterError on dimension mismatch.
[[nodiscard]] double decision_value(const TrainedBinarySvm &model, std::span<const double> x);

/// +1 when decision_value >= 0, -1 otherwise.
[[nodiscard]] int predict(const TrainedBinarySvm &model, std::span<const double> x);

/// Dual objective sum alpha - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
[[nodiscard]] double dual_objective(std::span<const double> alphas, std::span<const int> y, std::span<const double> gram);

struct KktReport {
    double max_violation = 0.0;
    double equality_residual = 0.0;
    bool box_feasible = true;
};

/// Checks box, equality and KKT conditions of a model against its training data.
[[nodiscard]] KktReport check_kkt(const TrainedBinarySvm &model, const TrainingSet &data);

}  // namespace cropweed
