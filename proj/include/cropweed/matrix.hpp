#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cropweed/errors.hpp"

namespace cropweed {

/// Dense row-major matrix of reals; one sample per row.
class FeatureMatrix {
  public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::size_t cols) : rows_{rows}, cols_{cols}, data_(rows * cols, 0.0) {}

    static FeatureMatrix from_rows(const std::vector<std::vector<double>> &rows) {
        if (rows.empty()) {
            return {};
        }
        FeatureMatrix m{rows.size(), rows.front().size()};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_) {
                throw ParameterError{"FeatureMatrix: ragged rows (row " + std::to_string(i) + " has " +
                                     std::to_string(rows[i].size()) + " values, expected " + std::to_string(m.cols_) + ")"};
            }
            std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
        }
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return rows_ == 0; }

    [[nodiscard]] std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    [[nodiscard]] double &operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    void append_row(std::span<const double> values) {
        if (rows_ == 0 && cols_ == 0) {
            cols_ = values.size();
        }
        if (values.size() != cols_) {
            throw ParameterError{"FeatureMatrix: appended row has " + std::to_string(values.size()) +
                                 " values, expected " + std::to_string(cols_)};
        }
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    /// Rows at the given indices, in the given order.
    [[nodiscard]] FeatureMatrix select_rows(std::span<const std::size_t> indices) const {
        FeatureMatrix out{indices.size(), cols_};
        for (std::size_t k = 0; k < indices.size(); ++k) {
            const auto src = row(indices[k]);
            std::copy(src.begin(), src.end(), out.row(k).begin());
        }
        return out;
    }

    /// Columns at the given indices, in the given order.
    [[nodiscard]] FeatureMatrix select_cols(std::span<const std::size_t> indices) const {
        FeatureMatrix out{rows_, indices.size()};
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t k = 0; k < indices.size(); ++k) {
                out(i, k) = (*this)(i, indices[k]);
            }
        }
        return out;
    }

    [[nodiscard]] const std::vector<double> &data() const noexcept { return data_; }

    friend bool operator==(const FeatureMatrix &, const FeatureMatrix &) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace cropweed
