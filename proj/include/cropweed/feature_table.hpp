#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "cropweed/matrix.hpp"

namespace cropweed {

/// Feature families selectable for an experiment.
enum class FeatureFamily { color, glcm, lbp };

[[nodiscard]] std::string to_string(FeatureFamily f);
/// Parses a comma list such as "color,lbp". Throws ParameterError on unknown names or an empty list.
[[nodiscard]] std::set<FeatureFamily> parse_feature_set(const std::string &csv);
[[nodiscard]] std::string to_string(const std::set<FeatureFamily> &families);

/// Labeled feature rows with named columns.
struct FeatureTable {
    std::vector<std::string> ids;
    std::vector<std::string> labels;
    std::vector<std::string> columns;
    FeatureMatrix values;

    [[nodiscard]] std::size_t size() const noexcept { return ids.size(); }

    /// Distinct labels in order of first appearance.
    [[nodiscard]] std::vector<std::string> classes() const;

    /// Indices of the columns belonging to the requested families, in table order.
    /// Throws ConfigurationError naming the family if none of its columns are present,
    /// or naming the missing columns if a family is incomplete.
    [[nodiscard]] std::vector<std::size_t> columns_for(const std::set<FeatureFamily> &families) const;
};

/// Family of a column name, by prefix: glcm_*, lbp_*, otherwise the 12 color names.
[[nodiscard]] bool column_in_family(const std::string &column, FeatureFamily family);

}  // namespace cropweed
