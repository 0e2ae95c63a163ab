#include "cropweed/feature_table.hpp"

#include <algorithm>
#include <sstream>

#include "cropweed/color_features.hpp"
#include "cropweed/glcm.hpp"

namespace cropweed {

std::string to_string(FeatureFamily f) {
    switch (f) {
        case FeatureFamily::color: return "color";
        case FeatureFamily::glcm: return "glcm";
        case FeatureFamily::lbp: return "lbp";
    }
    return "?";
}

std::set<FeatureFamily> parse_feature_set(const std::string &csv) {
    std::set<FeatureFamily> out;
    std::stringstream ss{csv};
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        std::transform(item.begin(), item.end(), item.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (item == "color") {
            out.insert(FeatureFamily::color);
        } else if (item == "glcm") {
            out.insert(FeatureFamily::glcm);
        } else if (item == "lbp") {
            out.insert(FeatureFamily::lbp);
        } else if (!item.empty()) {
            throw ParameterError{"unknown feature family '" + item + "' (expected color, glcm, lbp)"};
        }
    }
    if (out.empty()) {
        throw ParameterError{"feature set is empty"};
    }
    return out;
}

std::string to_string(const std::set<FeatureFamily> &families) {
    std::string out;
    for (auto f : families) {
        if (!out.empty()) {
            out += ',';
        }
        out += to_string(f);
    }
    return out;
}

bool column_in_family(const std::string &column, FeatureFamily family) {
    switch (family) {
        case FeatureFamily::color:
            return std::find(ColorDescriptor::names.begin(), ColorDescriptor::names.end(), column) !=
                   ColorDescriptor::names.end();
        case FeatureFamily::glcm: return column.starts_with("glcm_");
        case FeatureFamily::lbp: return column.starts_with("lbp_");
    }
    return false;
}

std::vector<std::string> FeatureTable::classes() const {
    std::vector<std::string> out;
    for (const auto &l : labels) {
        if (std::find(out.begin(), out.end(), l) == out.end()) {
            out.push_back(l);
        }
    }
    return out;
}

std::vector<std::size_t> FeatureTable::columns_for(const std::set<FeatureFamily> &families) const {
    std::vector<std::string> missing;
    for (auto f : families) {
        if (f == FeatureFamily::color) {
            for (auto name : ColorDescriptor::names) {
                if (std::find(columns.begin(), columns.end(), name) == columns.end()) {
                    missing.emplace_back(name);
                }
            }
        } else if (f == FeatureFamily::glcm) {
            for (auto name : GlcmDescriptor::names) {
                if (std::find(columns.begin(), columns.end(), name) == columns.end()) {
                    missing.emplace_back(name);
                }
            }
        } else if (std::none_of(columns.begin(), columns.end(), [](const auto &c) { return c.starts_with("lbp_"); })) {
            missing.emplace_back("lbp_*");
        }
    }
    if (!missing.empty()) {
        std::string msg = "feature table lacks columns:";
        for (const auto &m : missing) {
            msg += ' ' + m;
        }
        throw ConfigurationError{msg};
    }

    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (std::any_of(families.begin(), families.end(), [&](FeatureFamily f) { return column_in_family(columns[k], f); })) {
            out.push_back(k);
        }
    }
    return out;
}

}  // namespace cropweed
