#pragma once

#include <filesystem>
#include <string>

#include "cropweed/dataset.hpp"
#include "cropweed/evaluation.hpp"
#include "cropweed/feature_table.hpp"
#include "cropweed/multiclass.hpp"

#include "json.hpp"

namespace cropweed {

inline constexpr const char *tool_version = "1.0.0";
inline constexpr int model_format_version = 1;
inline constexpr int cache_format_version = 1;

/// CSV header line (without trailing newline) for a column list.
[[nodiscard]] std::string cache_header(const std::vector<std::string> &columns);

/// Writes `path` (CSV: id,class,<features>, 9 significant digits, LF) and `path + ".meta.json"`.
void save_feature_cache(const FeatureCache &cache, const std::filesystem::path &path);

/// Reads the CSV. Throws DeserializationError on malformed content or duplicate ids.
[[nodiscard]] FeatureTable load_feature_table(const std::filesystem::path &path);

[[nodiscard]] FeatureTable to_table(const FeatureCache &cache);

[[nodiscard]] nlohmann::json to_json(const DatasetManifest &m);
[[nodiscard]] DatasetManifest manifest_from_json(const nlohmann::json &j);

[[nodiscard]] nlohmann::json to_json(const ExtractionConfig &c);
[[nodiscard]] ExtractionConfig extraction_config_from_json(const nlohmann::json &j);

[[nodiscard]] nlohmann::json to_json(const KernelSpec &k);
[[nodiscard]] KernelSpec kernel_from_json(const nlohmann::json &j);

[[nodiscard]] nlohmann::json to_json(const MulticlassModel &m);
/// Throws DeserializationError on a version mismatch or missing fields.
[[nodiscard]] MulticlassModel model_from_json(const nlohmann::json &j);

void save_model(const MulticlassModel &m, const std::filesystem::path &path);
/// Throws DeserializationError on truncation, unknown version, or malformed content.
[[nodiscard]] MulticlassModel load_model(const std::filesystem::path &path);

[[nodiscard]] nlohmann::json to_json(const ConfusionMatrix &c);
[[nodiscard]] nlohmann::json to_json(const ExperimentReport &r);

void write_text(const std::filesystem::path &path, const std::string &text);

}  // namespace cropweed
