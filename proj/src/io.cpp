#include "cropweed/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace cropweed {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

std::vector<std::string> parse_csv_line(const std::string &line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) {
        throw DeserializationError{"unterminated quoted field on line " + std::to_string(line_no)};
    }
    out.push_back(std::move(cur));
    return out;
}

std::string real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string direction_name(GlcmDirection d) {
    switch (d) {
        case GlcmDirection::deg0: return "0";
        case GlcmDirection::deg45: return "45";
        case GlcmDirection::deg90: return "90";
        case GlcmDirection::deg135: return "135";
    }
    return "0";
}

GlcmDirection parse_direction(const std::string &s) {
    if (s == "0") return GlcmDirection::deg0;
    if (s == "45") return GlcmDirection::deg45;
    if (s == "90") return GlcmDirection::deg90;
    if (s == "135") return GlcmDirection::deg135;
    throw DeserializationError{"unknown GLCM direction '" + s + "'"};
}

std::string mapping_name(LbpMapping m) {
    switch (m) {
        case LbpMapping::raw: return "raw";
        case LbpMapping::ri: return "ri";
        case LbpMapping::riu2: return "riu2";
    }
    return "riu2";
}

LbpMapping parse_mapping(const std::string &s) {
    if (s == "raw") return LbpMapping::raw;
    if (s == "ri") return LbpMapping::ri;
    if (s == "riu2") return LbpMapping::riu2;
    throw DeserializationError{"unknown LBP mapping '" + s + "'"};
}

json matrix_json(const FeatureMatrix &m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return rows;
}

json svm_json(const TrainedBinarySvm &s) {
    return {{"kernel", to_json(s.kernel)},
            {"C", s.c},
            {"bias", s.bias},
            {"converged", s.converged},
            {"sweeps", s.sweeps},
            {"dimension", s.dimension()},
            {"alphas", s.alphas},
            {"support_vectors", matrix_json(s.support_vectors)},
            {"support_labels", s.support_labels},
            {"support_alphas", s.support_alphas}};
}

TrainedBinarySvm svm_from_json(const json &j) {
    TrainedBinarySvm s;
    s.kernel = kernel_from_json(j.at("kernel"));
    s.c = j.at("C").get<double>();
    s.bias = j.at("bias").get<double>();
    s.converged = j.at("converged").get<bool>();
    s.sweeps = j.value("sweeps", std::size_t{0});
    s.alphas = j.at("alphas").get<std::vector<double>>();
    const auto dim = j.at("dimension").get<std::size_t>();
    s.support_vectors = FeatureMatrix{0, dim};
    for (const auto &row : j.at("support_vectors")) {
        s.support_vectors.append_row(row.get<std::vector<double>>());
    }
    s.support_labels = j.at("support_labels").get<std::vector<int>>();
    s.support_alphas = j.at("support_alphas").get<std::vector<double>>();
    if (s.support_labels.size() != s.support_vectors.rows() || s.support_alphas.size() != s.support_vectors.rows()) {
        throw DeserializationError{"support vector, label and multiplier counts differ"};
    }
    return s;
}

std::string read_all(const fs::path &path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) {
        throw IoError{"cannot open " + path.string()};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void write_text(const fs::path &path, const std::string &text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out{path, std::ios::binary | std::ios::trunc};
    if (!out) {
        throw IoError{"cannot write " + path.string()};
    }
    out << text;
    if (!out) {
        throw IoError{"failed writing " + path.string()};
    }
}

std::string cache_header(const std::vector<std::string> &columns) {
    std::string h = "id,class";
    for (const auto &c : columns) {
        h += ',';
        h += c;
    }
    return h;
}

void save_feature_cache(const FeatureCache &cache, const fs::path &path) {
    std::string csv = cache_header(cache.columns) + "\n";
    for (const auto &row : cache.rows) {
        csv += csv_field(row.id);
        csv += ',';
        csv += csv_field(row.label);
        for (double v : row.values) {
            csv += ',';
            csv += real(v);
        }
        csv += '\n';
    }
    write_text(path, csv);

    json rows = json::array();
    for (const auto &row : cache.rows) {
        rows.push_back({{"id", row.id}, {"source", row.source.generic_string()}});
    }
    json skipped = json::array();
    for (const auto &s : cache.skipped) {
        skipped.push_back({{"path", s.path.generic_string()}, {"reason", s.reason}});
    }
    const json meta{{"format", "cropweed-feature-cache"},
                    {"format_version", cache_format_version},
                    {"tool_version", tool_version},
                    {"extraction", to_json(cache.config)},
                    {"columns", cache.columns},
                    {"rows", rows},
                    {"skipped", skipped}};
    write_text(fs::path{path.string() + ".meta.json"}, meta.dump(2) + "\n");
}

FeatureTable load_feature_table(const fs::path &path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) {
        throw IoError{"cannot open feature cache " + path.string()};
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DeserializationError{"feature cache " + path.string() + " is empty"};
    }
    const auto header = parse_csv_line(line, 1);
    if (header.size() < 3 || header[0] != "id" || header[1] != "class") {
        throw DeserializationError{"feature cache header must start with id,class"};
    }

    FeatureTable table;
    table.columns.assign(header.begin() + 2, header.end());
    table.values = FeatureMatrix{0, table.columns.size()};
    std::set<std::string> seen;
    std::size_t line_no = 1;
    std::vector<double> values(table.columns.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto fields = parse_csv_line(line, line_no);
        if (fields.size() != header.size()) {
            throw DeserializationError{"line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                                       " fields, header has " + std::to_string(header.size())};
        }
        if (!seen.insert(fields[0]).second) {
            throw DeserializationError{"duplicate id '" + fields[0] + "' on line " + std::to_string(line_no)};
        }
        for (std::size_t k = 0; k < values.size(); ++k) {
            const std::string &f = fields[k + 2];
            std::size_t used = 0;
            try {
                values[k] = std::stod(f, &used);
            } catch (const std::exception &) {
                used = 0;
            }
            if (used == 0 || used != f.size()) {
                throw DeserializationError{"line " + std::to_string(line_no) + ": invalid number '" + f + "' in column " +
                                           table.columns[k]};
            }
        }
        table.ids.push_back(fields[0]);
        table.labels.push_back(fields[1]);
        table.values.append_row(values);
    }
    return table;
}

FeatureTable to_table(const FeatureCache &cache) {
    FeatureTable t;
    t.columns = cache.columns;
    t.values = FeatureMatrix{0, cache.columns.size()};
    for (const auto &row : cache.rows) {
        t.ids.push_back(row.id);
        t.labels.push_back(row.label);
        t.values.append_row(row.values);
    }
    return t;
}

json to_json(const DatasetManifest &m) {
    json classes = json::object();
    for (const auto &[name, files] : m.classes) {
        json list = json::array();
        for (const auto &f : files) {
            list.push_back(f.generic_string());
        }
        classes[name] = list;
    }
    return {{"format", "cropweed-manifest"}, {"root", m.root.generic_string()}, {"classes", classes}};
}

DatasetManifest manifest_from_json(const json &j) {
    try {
        DatasetManifest m;
        m.root = j.at("root").get<std::string>();
        for (const auto &[name, list] : j.at("classes").items()) {
            std::vector<fs::path> files;
            for (const auto &f : list) {
                files.emplace_back(f.get<std::string>());
            }
            m.classes.emplace(name, std::move(files));
        }
        return m;
    } catch (const json::exception &e) {
        throw DeserializationError{std::string{"malformed manifest: "} + e.what()};
    }
}

json to_json(const ExtractionConfig &c) {
    return {{"gray_levels", c.gray_levels},
            {"glcm",
             {{"distance", c.glcm.distance},
              {"direction", direction_name(c.glcm.direction)},
              {"symmetric", c.glcm.symmetric},
              {"correlation_normalization",
               c.correlation == CorrelationNormalization::as_printed ? "as_printed" : "standard"}}},
            {"lbp", {{"points", c.lbp.points}, {"radius", c.lbp.radius}, {"mapping", mapping_name(c.lbp.mapping)}}}};
}

ExtractionConfig extraction_config_from_json(const json &j) {
    try {
        ExtractionConfig c;
        c.gray_levels = j.at("gray_levels").get<std::uint32_t>();
        const auto &g = j.at("glcm");
        c.glcm.distance = g.at("distance").get<std::uint32_t>();
        c.glcm.direction = parse_direction(g.at("direction").get<std::string>());
        c.glcm.symmetric = g.at("symmetric").get<bool>();
        c.correlation = g.at("correlation_normalization").get<std::string>() == "standard"
                            ? CorrelationNormalization::standard
                            : CorrelationNormalization::as_printed;
        const auto &l = j.at("lbp");
        c.lbp.points = l.at("points").get<std::uint32_t>();
        c.lbp.radius = l.at("radius").get<double>();
        c.lbp.mapping = parse_mapping(l.at("mapping").get<std::string>());
        return c;
    } catch (const json::exception &e) {
        throw DeserializationError{std::string{"malformed extraction config: "} + e.what()};
    }
}

json to_json(const KernelSpec &k) {
    return std::visit(
        [](const auto &kk) -> json {
            using K = std::decay_t<decltype(kk)>;
            if constexpr (std::is_same_v<K, LinearKernel>) {
                return {{"kind", "linear"}};
            } else if constexpr (std::is_same_v<K, PolynomialKernel>) {
                return {{"kind", "poly"}, {"degree", kk.degree}, {"coef0", kk.coef0}};
            } else {
                return {{"kind", "rbf"}, {"gamma", kk.gamma}};
            }
        },
        k);
}

KernelSpec kernel_from_json(const json &j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "linear") {
        return LinearKernel{};
    }
    if (kind == "poly") {
        return PolynomialKernel{j.at("degree").get<int>(), j.at("coef0").get<double>()};
    }
    if (kind == "rbf") {
        return RbfKernel{j.at("gamma").get<double>()};
    }
    throw DeserializationError{"unknown kernel kind '" + kind + "'"};
}

json to_json(const MulticlassModel &m) {
    json binaries = json::array();
    for (const auto &b : m.binaries) {
        binaries.push_back({{"positive", b.positive},
                            {"negative", b.negative == BinaryMember::npos ? json(nullptr) : json(b.negative)},
                            {"svm", svm_json(b.svm)}});
    }
    return {{"format", "cropweed-multiclass-svm"},
            {"format_version", model_format_version},
            {"tool_version", tool_version},
            {"strategy", to_string(m.strategy)},
            {"classes", m.classes},
            {"standardizer", {{"mean", m.standardizer.mean}, {"scale", m.standardizer.scale}}},
            {"binaries", binaries}};
}

MulticlassModel model_from_json(const json &j) {
    try {
        if (!j.contains("format_version")) {
            throw DeserializationError{"model document has no format_version field"};
        }
        const int version = j.at("format_version").get<int>();
        if (version != model_format_version) {
            throw DeserializationError{"unsupported model format_version " + std::to_string(version) + " (expected " +
                                       std::to_string(model_format_version) + ")"};
        }
        MulticlassModel m;
        m.strategy = parse_strategy(j.at("strategy").get<std::string>());
        m.classes = j.at("classes").get<std::vector<std::string>>();
        m.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
        m.standardizer.scale = j.at("standardizer").at("scale").get<std::vector<double>>();
        for (const auto &b : j.at("binaries")) {
            BinaryMember member;
            member.positive = b.at("positive").get<std::size_t>();
            member.negative = b.at("negative").is_null() ? BinaryMember::npos : b.at("negative").get<std::size_t>();
            member.svm = svm_from_json(b.at("svm"));
            m.binaries.push_back(std::move(member));
        }
        try {
            m.validate();
        } catch (const ParameterError &e) {
            throw DeserializationError{std::string{"inconsistent model: "} + e.what()};
        }
        return m;
    } catch (const json::exception &e) {
        throw DeserializationError{std::string{"malformed model document: "} + e.what()};
    } catch (const ParameterError &e) {
        throw DeserializationError{std::string{"malformed model document: "} + e.what()};
    }
}

void save_model(const MulticlassModel &m, const fs::path &path) {
    write_text(path, to_json(m).dump(1) + "\n");
}

MulticlassModel load_model(const fs::path &path) {
    const std::string text = read_all(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw DeserializationError{"model file " + path.string() + " is truncated or not valid JSON: " + e.what()};
    }
    return model_from_json(j);
}

json to_json(const ConfusionMatrix &c) {
    return {{"classes", c.classes}, {"counts", c.counts}, {"row_percent", c.row_percent}, {"accuracy", c.accuracy()}};
}

json to_json(const ExperimentReport &r) {
    json iterations = json::array();
    for (const auto &it : r.iterations) {
        iterations.push_back({{"seed", it.seed},
                              {"accuracy", it.accuracy},
                              {"train_seconds", it.train_seconds},
                              {"predict_seconds", it.predict_seconds},
                              {"train_size", it.train_size},
                              {"test_size", it.test_size},
                              {"converged", it.converged},
                              {"confusion", to_json(it.confusion)}});
    }
    return {{"config",
             {{"features", to_string(r.config.features)},
              {"strategy", to_string(r.config.strategy)},
              {"train_fraction", r.config.train_fraction},
              {"stratified", r.config.stratified},
              {"iterations", r.config.iterations},
              {"base_seed", r.config.base_seed},
              {"seeds", [&] {
                   std::vector<std::uint64_t> s;
                   for (const auto &it : r.iterations) {
                       s.push_back(it.seed);
                   }
                   return s;
               }()},
              {"C", r.config.c},
              {"kernel", to_json(r.config.kernel)},
              {"standardize", r.config.standardize}}},
            {"classes", r.classes},
            {"feature_dimension", r.feature_dimension},
            {"iterations", iterations},
            {"aggregate",
             {{"mean_accuracy", r.mean_accuracy},
              {"mean_train_seconds", r.mean_train_seconds},
              {"mean_predict_seconds", r.mean_predict_seconds},
              {"mean_row_percent", r.mean_row_percent},
              {"all_converged", r.all_converged}}}};
}

}  // namespace cropweed
