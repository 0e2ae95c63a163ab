#include "cropweed/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include <omp.h>

#include "cropweed/rng.hpp"

namespace cropweed {

namespace {

double dot(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        s += u[k] * v[k];
    }
    return s;
}

double kernel_unchecked(const KernelSpec &kernel, std::span<const double> u, std::span<const double> v) {
    return std::visit(
        [&](const auto &k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, LinearKernel>) {
                return dot(u, v);
            } else if constexpr (std::is_same_v<K, PolynomialKernel>) {
                return std::pow(dot(u, v) + k.coef0, k.degree);
            } else {
                double d2 = 0.0;
                for (std::size_t i = 0; i < u.size(); ++i) {
                    const double d = u[i] - v[i];
                    d2 += d * d;
                }
                return std::exp(-k.gamma * d2);
            }
        },
        kernel);
}

}  // namespace

void validate(const KernelSpec &kernel) {
    if (const auto *p = std::get_if<PolynomialKernel>(&kernel); p != nullptr && p->degree < 1) {
        throw ParameterError{"polynomial kernel degree must be >= 1"};
    }
    if (const auto *r = std::get_if<RbfKernel>(&kernel); r != nullptr && !(r->gamma > 0.0)) {
        throw ParameterError{"rbf kernel gamma must be > 0"};
    }
}

std::string kernel_name(const KernelSpec &kernel) {
    switch (kernel.index()) {
        case 0: return "linear";
        case 1: return "poly";
        default: return "rbf";
    }
}

double kernel_eval(const KernelSpec &kernel, std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw ParameterError{"kernel operands differ in dimension (" + std::to_string(u.size()) + " vs " +
                             std::to_string(v.size()) + ")"};
    }
    return kernel_unchecked(kernel, u, v);
}

std::vector<double> kernel_matrix(const KernelSpec &kernel, const FeatureMatrix &x) {
    const std::size_t n = x.rows();
    std::vector<double> gram(n * n, 0.0);
    const long rows = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 8)
    for (long ii = 0; ii < rows; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = i; j < n; ++j) {
            const double k = kernel_unchecked(kernel, x.row(i), x.row(j));
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
    }
    return gram;
}

void TrainingSet::validate() const {
    if (x.rows() < 2) {
        throw ParameterError{"training set needs at least 2 samples"};
    }
    if (x.rows() != y.size()) {
        throw ParameterError{"training set has " + std::to_string(x.rows()) + " vectors but " +
                             std::to_string(y.size()) + " labels"};
    }
    bool pos = false;
    bool neg = false;
    for (int label : y) {
        if (label == 1) {
            pos = true;
        } else if (label == -1) {
            neg = true;
        } else {
            throw ParameterError{"binary labels must be -1 or +1, got " + std::to_string(label)};
        }
    }
    if (!pos || !neg) {
        throw ParameterError{"training set must contain both labels"};
    }
}

std::optional<std::vector<double>> TrainedBinarySvm::explicit_weights() const {
    if (!std::holds_alternative<LinearKernel>(kernel)) {
        return std::nullopt;
    }
    std::vector<double> w(dimension(), 0.0);
    for (std::size_t s = 0; s < support_vectors.rows(); ++s) {
        const double coef = support_alphas[s] * support_labels[s];
        const auto sv = support_vectors.row(s);
        for (std::size_t k = 0; k < w.size(); ++k) {
            w[k] += coef * sv[k];
        }
    }
    return w;
}

double dual_objective(std::span<const double> alphas, std::span<const int> y, std::span<const double> gram) {
    const std::size_t n = alphas.size();
    double linear = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        linear += alphas[i];
        if (alphas[i] == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
            quad += alphas[i] * alphas[j] * y[i] * y[j] * gram[i * n + j];
        }
    }
    return linear - 0.5 * quad;
}

namespace {

/// Kernel rows for the solver: the whole Gram matrix when it is small enough,
/// otherwise a bounded least-recently-used cache of rows computed on demand.
class KernelRows {
  public:
    static constexpr std::size_t budget_bytes = std::size_t{256} << 20;

    KernelRows(const KernelSpec &kernel, const FeatureMatrix &x) : kernel_{kernel}, x_{x}, n_{x.rows()}, diag_(n_) {
        for (std::size_t i = 0; i < n_; ++i) {
            diag_[i] = kernel_unchecked(kernel_, x_.row(i), x_.row(i));
        }
        if (n_ * n_ * sizeof(double) <= budget_bytes) {
            full_ = kernel_matrix(kernel_, x_);
        } else {
            capacity_ = std::max<std::size_t>(2, budget_bytes / (n_ * sizeof(double)));
            slot_of_.assign(n_, none);
        }
    }

    [[nodiscard]] double diag(std::size_t i) const noexcept { return diag_[i]; }

    /// Valid until the next call when the cache is in use.
    const double *row(std::size_t i) {
        if (!full_.empty()) {
            return full_.data() + i * n_;
        }
        ++clock_;
        if (slot_of_[i] != none) {
            const std::size_t s = slot_of_[i];
            last_use_[s] = clock_;
            return rows_[s].data();
        }
        std::size_t s = rows_.size();
        if (s < capacity_) {
            rows_.emplace_back(n_);
            owner_.push_back(i);
            last_use_.push_back(clock_);
        } else {
            s = static_cast<std::size_t>(std::min_element(last_use_.begin(), last_use_.end()) - last_use_.begin());
            slot_of_[owner_[s]] = none;
            owner_[s] = i;
            last_use_[s] = clock_;
        }
        slot_of_[i] = s;
        auto &r = rows_[s];
        for (std::size_t k = 0; k < n_; ++k) {
            r[k] = kernel_unchecked(kernel_, x_.row(i), x_.row(k));
        }
        return r.data();
    }

  private:
    static constexpr std::size_t none = static_cast<std::size_t>(-1);

    const KernelSpec &kernel_;
    const FeatureMatrix &x_;
    std::size_t n_;
    std::vector<double> diag_;
    std::vector<double> full_;
    std::size_t capacity_ = 0;
    std::vector<std::vector<double>> rows_;
    std::vector<std::size_t> owner_;
    std::vector<std::uint64_t> last_use_;
    std::vector<std::size_t> slot_of_;
    std::uint64_t clock_ = 0;
};

class SmoSolver {
  public:
    SmoSolver(const TrainingSet &data, double c, const KernelSpec &kernel, const SmoOptions &opts)
        : n_{data.x.rows()}, y_{data.y}, c_{c}, gram_{kernel, data.x}, alpha_(n_, 0.0),
          error_(n_), rng_{opts.seed} {
        for (std::size_t i = 0; i < n_; ++i) {
            error_[i] = -static_cast<double>(y_[i]);
        }
    }

    /// Runs sweeps until max_passes consecutive sweeps change nothing.
    void optimize(double tol, int max_passes, std::size_t max_sweeps) {
        int quiet = 0;
        while (quiet < max_passes && sweeps_ < max_sweeps) {
            std::size_t changed = 0;
            ++sweeps_;
            for (std::size_t i = 0; i < n_; ++i) {
                if (violates(i, tol) && examine(i)) {
                    ++changed;
                }
            }
            quiet = changed == 0 ? quiet + 1 : 0;
        }
    }

    /// Recomputes g_i = sum_j alpha_j y_j K_ij exactly and the final bias.
    void finalize() {
        g_.assign(n_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) {
            if (alpha_[j] == 0.0) {
                continue;
            }
            const double coef = alpha_[j] * y_[j];
            const double *kj = gram_.row(j);
            for (std::size_t i = 0; i < n_; ++i) {
                g_[i] += coef * kj[i];
            }
        }
        bias_ = bias_from_margin();
        for (std::size_t i = 0; i < n_; ++i) {
            error_[i] = g_[i] + bias_ - y_[i];
        }
    }

    [[nodiscard]] double max_kkt_violation() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double margin = y_[i] * (g_[i] + bias_);
            double v = 0.0;
            if (alpha_[i] <= 0.0) {
                v = std::max(0.0, 1.0 - margin);
            } else if (alpha_[i] >= c_) {
                v = std::max(0.0, margin - 1.0);
            } else {
                v = std::abs(margin - 1.0);
            }
            worst = std::max(worst, v);
        }
        return worst;
    }

    /// Primal minus dual objective at the current multipliers and bias; bounds the dual suboptimality.
    [[nodiscard]] double duality_gap() const {
        double ww = 0.0;
        double sum_alpha = 0.0;
        double slack = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            ww += alpha_[i] * y_[i] * g_[i];
            sum_alpha += alpha_[i];
            slack += std::max(0.0, 1.0 - y_[i] * (g_[i] + bias_));
        }
        return ww + c_ * slack - sum_alpha;
    }

    [[nodiscard]] std::size_t sweeps() const noexcept { return sweeps_; }
    [[nodiscard]] const std::vector<double> &alphas() const noexcept { return alpha_; }
    [[nodiscard]] double bias() const noexcept { return bias_; }

  private:
    bool violates(std::size_t i, double tol) const {
        const double r = y_[i] * error_[i];
        return (r < -tol && alpha_[i] < c_) || (r > tol && alpha_[i] > 0.0);
    }

    bool examine(std::size_t i) {
        std::size_t j = rng_.below(n_ - 1);
        if (j >= i) {
            ++j;
        }
        if (take_step(i, j)) {
            return true;
        }

        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t k = 0; k < n_; ++k) {
            if (k != i && alpha_[k] > 0.0 && alpha_[k] < c_) {
                const double gap = std::abs(error_[i] - error_[k]);
                if (gap > best_gap) {
                    best_gap = gap;
                    best = k;
                }
            }
        }
        if (best < n_ && take_step(i, best)) {
            return true;
        }

        const std::size_t start = rng_.below(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t cand = (start + k) % n_;
            if (cand != i && take_step(i, cand)) {
                return true;
            }
        }
        return false;
    }

    bool take_step(std::size_t i, std::size_t j) {
        const double ai = alpha_[i];
        const double aj = alpha_[j];
        const int yi = y_[i];
        const int yj = y_[j];
        const double s = yi * yj;

        double lo = 0.0;
        double hi = 0.0;
        if (yi != yj) {
            lo = std::max(0.0, aj - ai);
            hi = std::min(c_, c_ + aj - ai);
        } else {
            lo = std::max(0.0, ai + aj - c_);
            hi = std::min(c_, ai + aj);
        }
        if (hi - lo <= 1e-14 * c_) {
            return false;
        }

        const double kii = gram_.diag(i);
        const double kjj = gram_.diag(j);
        const double *ki = gram_.row(i);
        const double kij = ki[j];
        const double eta = kii + kjj - 2.0 * kij;
        // Objective gain along the feasible line is slope*d - eta*d^2/2 for a step d in alpha_j.
        const double slope = yj * (error_[i] - error_[j]);

        double aj_new = 0.0;
        if (eta > 1e-12) {
            aj_new = std::clamp(aj + slope / eta, lo, hi);
        } else {
            const auto gain = [&](double target) {
                const double d = target - aj;
                return slope * d - 0.5 * eta * d * d;
            };
            const double gain_lo = gain(lo);
            const double gain_hi = gain(hi);
            if (gain_lo > gain_hi + 1e-12) {
                aj_new = lo;
            } else if (gain_hi > gain_lo + 1e-12) {
                aj_new = hi;
            } else {
                return false;
            }
        }

        if (std::abs(aj_new - aj) < 1e-10 * (aj_new + aj + 1e-10)) {
            return false;
        }

        aj_new = snap_to_box(aj_new);
        const double ai_new = snap_to_box(std::clamp(ai + s * (aj - aj_new), 0.0, c_));

        const double dai = ai_new - ai;
        const double daj = aj_new - aj;
        const double b1 = bias_ - error_[i] - yi * dai * kii - yj * daj * kij;
        const double b2 = bias_ - error_[j] - yi * dai * kij - yj * daj * kjj;
        double b_new = 0.0;
        if (ai_new > 0.0 && ai_new < c_) {
            b_new = b1;
        } else if (aj_new > 0.0 && aj_new < c_) {
            b_new = b2;
        } else {
            b_new = 0.5 * (b1 + b2);
        }

        const double db = b_new - bias_;
        // ki may be evicted by fetching row j, so apply the two updates separately.
        ki = gram_.row(i);
        for (std::size_t k = 0; k < n_; ++k) {
            error_[k] += yi * dai * ki[k] + db;
        }
        const double *kj = gram_.row(j);
        for (std::size_t k = 0; k < n_; ++k) {
            error_[k] += yj * daj * kj[k];
        }
        alpha_[i] = ai_new;
        alpha_[j] = aj_new;
        bias_ = b_new;
        return true;
    }

    // Rounding in the box limits leaves multipliers a few ulps off a bound;
    // those must count as bound, not free, when the bias is computed.
    [[nodiscard]] double snap_to_box(double a) const noexcept {
        if (a < 1e-12 * c_) {
            return 0.0;
        }
        if (a > c_ * (1.0 - 1e-12)) {
            return c_;
        }
        return a;
    }

    // Average of y_i - g_i over free multipliers, else the midpoint of the interval
    // of biases satisfying the bound multipliers' KKT conditions.
    double bias_from_margin() const {
        double sum = 0.0;
        std::size_t free = 0;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n_; ++i) {
            const double v = y_[i] - g_[i];
            if (alpha_[i] > 0.0 && alpha_[i] < c_) {
                sum += v;
                ++free;
            } else if ((alpha_[i] <= 0.0) == (y_[i] > 0)) {
                lo = std::max(lo, v);
            } else {
                hi = std::min(hi, v);
            }
        }
        if (free > 0) {
            return sum / static_cast<double>(free);
        }
        if (std::isfinite(lo) && std::isfinite(hi)) {
            return 0.5 * (lo + hi);
        }
        return std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
    }

    std::size_t n_;
    const std::vector<int> &y_;
    double c_;
    KernelRows gram_;
    std::vector<double> alpha_;
    std::vector<double> error_;
    std::vector<double> g_;
    double bias_ = 0.0;
    std::size_t sweeps_ = 0;
    Rng rng_;
};

}  // namespace

TrainedBinarySvm smo_train(const TrainingSet &data, double c, const KernelSpec &kernel, const SmoOptions &opts) {
    data.validate();
    validate(kernel);
    if (!(c > 0.0)) {
        throw ParameterError{"C must be > 0"};
    }
    if (!(opts.tol > 0.0)) {
        throw ParameterError{"SMO tolerance must be > 0"};
    }

    SmoSolver solver{data, c, kernel, opts};
    constexpr int max_refinements = 12;
    double working_tol = opts.tol;
    bool converged = false;
    for (int round = 0; round <= max_refinements; ++round) {
        solver.optimize(working_tol, std::max(opts.max_passes, 1), opts.max_sweeps);
        solver.finalize();
        converged = solver.max_kkt_violation() <= opts.tol;
        if (converged && solver.duality_gap() <= opts.tol) {
            break;
        }
        if (solver.sweeps() >= opts.max_sweeps) {
            break;
        }
        working_tol *= 0.25;
    }

    TrainedBinarySvm model;
    model.alphas = solver.alphas();
    model.bias = solver.bias();
    model.kernel = kernel;
    model.c = c;
    model.converged = converged;
    model.sweeps = solver.sweeps();
    for (std::size_t i = 0; i < data.x.rows(); ++i) {
        if (model.alphas[i] > 0.0) {
            model.support_vectors.append_row(data.x.row(i));
            model.support_labels.push_back(data.y[i]);
            model.support_alphas.push_back(model.alphas[i]);
        }
    }
    if (model.support_vectors.empty()) {
        model.support_vectors = FeatureMatrix{0, data.x.cols()};
    }
    return model;
}

double decision_value(const TrainedBinarySvm &model, std::span<const double> x) {
    if (x.size() != model.dimension()) {
        throw ParameterError{"input has dimension " + std::to_string(x.size()) + ", model expects " +
                             std::to_string(model.dimension())};
    }
    double f = model.bias;
    for (std::size_t s = 0; s < model.support_vectors.rows(); ++s) {
        f += model.support_alphas[s] * model.support_labels[s] *
             kernel_unchecked(model.kernel, model.support_vectors.row(s), x);
    }
    return f;
}

int predict(const TrainedBinarySvm &model, std::span<const double> x) {
    return decision_value(model, x) >= 0.0 ? 1 : -1;
}

KktReport check_kkt(const TrainedBinarySvm &model, const TrainingSet &data) {
    if (model.alphas.size() != data.x.rows()) {
        throw ParameterError{"model multipliers do not match the training set size"};
    }
    KktReport r;
    double eq = 0.0;
    for (std::size_t i = 0; i < data.x.rows(); ++i) {
        const double a = model.alphas[i];
        if (a < 0.0 || a > model.c) {
            r.box_feasible = false;
        }
        eq += a * data.y[i];
        const double margin = data.y[i] * decision_value(model, data.x.row(i));
        double v = 0.0;
        if (a <= 0.0) {
            v = std::max(0.0, 1.0 - margin);
        } else if (a >= model.c) {
            v = std::max(0.0, margin - 1.0);
        } else {
            v = std::abs(margin - 1.0);
        }
        r.max_violation = std::max(r.max_violation, v);
    }
    r.equality_residual = std::abs(eq);
    return r;
}

}  // namespace cropweed
