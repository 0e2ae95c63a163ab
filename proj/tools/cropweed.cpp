#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cropweed/io.hpp"
#include "cropweed/parallel.hpp"
#include "cropweed/reproduction.hpp"

namespace fs = std::filesystem;
using namespace cropweed;
using nlohmann::json;

namespace {

enum Exit { ok = 0, usage = 1, dataset = 2, extraction = 3, nonconvergence = 4 };

struct Options {
    std::string dataset_root;
    std::string manifest;
    std::string cache;
    std::string model;
    std::string out;
    std::optional<std::size_t> per_class;
    std::uint64_t seed = 42;
    std::string features = "color,lbp";
    std::string strategy = "ovo";
    std::optional<double> train_frac;
    int iterations = 10;
    double c = 1.0;
    std::string kernel = "linear";
    int degree = 3;
    double coef0 = 1.0;
    double gamma = 1.0;
    std::uint32_t gray_levels = 256;
    bool no_standardize = false;
    std::string correlation = "as_printed";
    int jobs = 0;
    bool strict = false;
};

KernelSpec kernel_of(const Options &o) {
    if (o.kernel == "poly") {
        return PolynomialKernel{o.degree, o.coef0};
    }
    if (o.kernel == "rbf") {
        return RbfKernel{o.gamma};
    }
    return LinearKernel{};
}

ExtractionConfig extraction_of(const Options &o) {
    ExtractionConfig cfg;
    cfg.gray_levels = o.gray_levels;
    cfg.correlation =
        o.correlation == "standard" ? CorrelationNormalization::standard : CorrelationNormalization::as_printed;
    return cfg;
}

void emit_json(const Options &o, const json &doc) {
    if (o.out.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        write_text(o.out, doc.dump(2) + "\n");
        std::cerr << "wrote " << o.out << "\n";
    }
}

void print_counts(const DatasetManifest &m) {
    for (const auto &[name, files] : m.classes) {
        std::printf("%-10s %zu\n", name.c_str(), files.size());
    }
    std::printf("%-10s %zu\n", "total", m.total());
}

DatasetManifest load_manifest(const fs::path &p) {
    std::ifstream in{p};
    if (!in) {
        throw IoError{"cannot open manifest " + p.string()};
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception &e) {
        throw DeserializationError{"manifest " + p.string() + " is not valid JSON: " + e.what()};
    }
    return manifest_from_json(j);
}

// Manifest from --manifest, else a scan of --dataset-root, optionally sampled with --per-class.
DatasetManifest resolve_manifest(const Options &o) {
    DatasetManifest m;
    if (!o.manifest.empty()) {
        m = load_manifest(o.manifest);
    } else if (!o.dataset_root.empty()) {
        m = scan_dataset(o.dataset_root);
        for (const auto &w : count_mismatch_warnings(m)) {
            std::cerr << "warning: " << w << "\n";
        }
    } else {
        throw ParameterError{"need --dataset-root or --manifest"};
    }
    if (o.per_class) {
        m = sample_per_class(m, *o.per_class, o.seed);
    }
    return m;
}

FeatureTable resolve_table(const Options &o) {
    if (!o.cache.empty()) {
        return load_feature_table(o.cache);
    }
    const auto m = resolve_manifest(o);
    const auto cache = extract_features(m, extraction_of(o));
    if (!cache.skipped.empty()) {
        std::cerr << "warning: skipped " << cache.skipped.size() << " unreadable image(s)\n";
    }
    return to_table(cache);
}

int cmd_scan(const Options &o) {
    const auto m = scan_dataset(o.dataset_root);
    print_counts(m);
    const auto warnings = count_mismatch_warnings(m);
    for (const auto &w : warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    if (!o.out.empty()) {
        emit_json(o, to_json(m));
    }
    return ok;
}

int cmd_sample(Options o) {
    if (!o.per_class) {
        o.per_class = 100;
    }
    const auto m = resolve_manifest(o);
    print_counts(m);
    if (!o.out.empty()) {
        emit_json(o, to_json(m));
    }
    return ok;
}

int cmd_extract(const Options &o) {
    if (o.out.empty()) {
        throw ParameterError{"extract needs --out PATH for the feature cache"};
    }
    const auto m = resolve_manifest(o);
    const auto cache = extract_features(m, extraction_of(o));
    for (const auto &s : cache.skipped) {
        std::cerr << "warning: skipped " << s.path.string() << ": " << s.reason << "\n";
    }
    save_feature_cache(cache, o.out);
    std::printf("%zu rows, %zu columns, %zu skipped -> %s\n", cache.rows.size(), cache.columns.size(),
                cache.skipped.size(), o.out.c_str());
    return ok;
}

MulticlassOptions training_options(const Options &o) {
    MulticlassOptions opts;
    opts.strategy = parse_strategy(o.strategy);
    opts.c = o.c;
    opts.kernel = kernel_of(o);
    opts.standardize = !o.no_standardize;
    opts.seed = o.seed;
    return opts;
}

int cmd_train(const Options &o) {
    if (o.out.empty()) {
        throw ParameterError{"train needs --out PATH for the model"};
    }
    const auto table = resolve_table(o);
    const auto cols = table.columns_for(parse_feature_set(o.features));
    FeatureMatrix x = table.values.select_cols(cols);
    std::vector<std::string> labels = table.labels;
    if (o.train_frac) {
        const auto parts = split(table.labels, {*o.train_frac, o.seed, true});
        x = x.select_rows(parts.train);
        labels.clear();
        for (auto i : parts.train) {
            labels.push_back(table.labels[i]);
        }
    }
    std::vector<std::string> order;
    for (auto c : dataset_classes) {
        if (std::find(labels.begin(), labels.end(), std::string{c}) != labels.end()) {
            order.emplace_back(c);
        }
    }
    for (const auto &c : table.classes()) {
        if (std::find(order.begin(), order.end(), c) == order.end()) {
            order.push_back(c);
        }
    }
    const auto model = train_multiclass(x, labels, training_options(o), order);
    json doc = to_json(model);
    json names = json::array();
    for (auto c : cols) {
        names.push_back(table.columns[c]);
    }
    doc["feature_columns"] = names;
    write_text(o.out, doc.dump() + "\n");

    bool converged = true;
    for (const auto &b : model.binaries) {
        converged = converged && b.svm.converged;
    }
    std::printf("trained %s model: %zu classes, %zu binaries, dimension %zu, %s -> %s\n", o.strategy.c_str(),
                model.classes.size(), model.binaries.size(), model.dimension(),
                converged ? "converged" : "NOT converged", o.out.c_str());
    return !converged && o.strict ? nonconvergence : ok;
}

// Applies a saved model to every row of a table.
int eval_model(const Options &o, const FeatureTable &table) {
    std::ifstream in{o.model};
    if (!in) {
        throw IoError{"cannot open model " + o.model};
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception &e) {
        throw DeserializationError{"model file " + o.model + " is truncated or not valid JSON: " + e.what()};
    }
    const auto model = model_from_json(doc);
    std::vector<std::size_t> cols;
    if (doc.contains("feature_columns")) {
        for (const auto &name : doc.at("feature_columns")) {
            const auto it = std::find(table.columns.begin(), table.columns.end(), name.get<std::string>());
            if (it == table.columns.end()) {
                throw ConfigurationError{"feature cache lacks column '" + name.get<std::string>() + "' used by the model"};
            }
            cols.push_back(static_cast<std::size_t>(it - table.columns.begin()));
        }
    } else {
        cols = table.columns_for(parse_feature_set(o.features));
    }
    const FeatureMatrix x = table.values.select_cols(cols);
    std::vector<std::string> predicted;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        predicted.push_back(predict_class(model, x.row(i)));
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (std::find(model.classes.begin(), model.classes.end(), table.labels[i]) == model.classes.end()) {
            throw ConfigurationError{"cache label '" + table.labels[i] + "' is not a model class"};
        }
    }
    const auto cm = confusion(predicted, table.labels, model.classes);
    std::printf("accuracy %.2f%% on %zu rows\n", 100.0 * cm.accuracy(), static_cast<std::size_t>(cm.total()));
    for (std::size_t a = 0; a < cm.classes.size(); ++a) {
        std::printf("%-10s", cm.classes[a].c_str());
        for (double v : cm.row_percent[a]) {
            std::printf(" %7.2f", v);
        }
        std::printf("\n");
    }
    if (!o.out.empty()) {
        emit_json(o, to_json(cm));
    }
    return ok;
}

int cmd_eval(const Options &o) {
    const auto table = resolve_table(o);
    if (!o.model.empty()) {
        return eval_model(o, table);
    }
    ExperimentConfig cfg;
    cfg.features = parse_feature_set(o.features);
    cfg.strategy = parse_strategy(o.strategy);
    cfg.train_fraction = o.train_frac.value_or(0.7);
    cfg.iterations = o.iterations;
    cfg.base_seed = o.seed;
    cfg.c = o.c;
    cfg.kernel = kernel_of(o);
    cfg.standardize = !o.no_standardize;
    const auto report = run_experiment(table, cfg);
    std::cout << format_report(report);
    if (!o.out.empty()) {
        emit_json(o, to_json(report));
    }
    return !report.all_converged && o.strict ? nonconvergence : ok;
}

int cmd_reproduce(Options o) {
    if (o.cache.empty() && o.manifest.empty() && !o.per_class) {
        o.per_class = 100;
    }
    const auto table = resolve_table(o);
    ReproductionConfig cfg;
    cfg.iterations = o.iterations;
    cfg.seed = o.seed;
    cfg.c = o.c;
    cfg.kernel = kernel_of(o);
    cfg.standardize = !o.no_standardize;
    const auto result = run_reproduction(table, cfg);
    std::cout << format_reproduction(result);
    if (!o.out.empty()) {
        emit_json(o, to_json(result));
    }
    bool converged = true;
    for (const auto &f : result.feature_comparison) {
        converged = converged && f.report.all_converged;
    }
    for (const auto &c : result.strategy_sweep) {
        converged = converged && c.report.all_converged;
    }
    return !converged && o.strict ? nonconvergence : ok;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Crop and weed segment classification: color, GLCM and LBP features with SMO-trained SVMs"};
    app.require_subcommand(1);
    Options o;

    const auto common = [&](CLI::App *cmd) {
        cmd->add_option("--jobs", o.jobs, "OpenMP threads (default: runtime default; use 1 for timing)")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--out", o.out, "Output path");
    };
    const auto source = [&](CLI::App *cmd) {
        cmd->add_option("--dataset-root", o.dataset_root, "Directory holding broadleaf/ grass/ soil/ soybean/");
        cmd->add_option("--manifest", o.manifest, "Manifest JSON written by scan or sample");
        cmd->add_option("--per-class", o.per_class, "Images sampled per class");
        cmd->add_option("--seed", o.seed, "Seed for sampling, splits and SMO")->capture_default_str();
    };
    const auto extraction_flags = [&](CLI::App *cmd) {
        cmd->add_option("--gray-levels", o.gray_levels, "Gray levels for GLCM and LBP")
            ->check(CLI::Range(2, 65536))
            ->capture_default_str();
        cmd->add_option("--correlation-normalization", o.correlation, "GLCM correlation denominator")
            ->check(CLI::IsMember({"as_printed", "standard"}))
            ->capture_default_str();
    };
    const auto model_opts = [&](CLI::App *cmd) {
        cmd->add_option("--cache", o.cache, "Feature cache CSV written by extract");
        cmd->add_option("--features", o.features, "Feature families, e.g. color,glcm,lbp")->capture_default_str();
        cmd->add_option("--strategy", o.strategy, "Multiclass strategy")
            ->check(CLI::IsMember({"ovo", "ova"}))
            ->capture_default_str();
        cmd->add_option("--c-param", o.c, "Soft-margin penalty C")->check(CLI::PositiveNumber)->capture_default_str();
        cmd->add_option("--kernel", o.kernel, "Kernel")
            ->check(CLI::IsMember({"linear", "poly", "rbf"}))
            ->capture_default_str();
        cmd->add_option("--degree", o.degree, "Polynomial kernel degree")->capture_default_str();
        cmd->add_option("--coef0", o.coef0, "Polynomial kernel offset")->capture_default_str();
        cmd->add_option("--gamma", o.gamma, "RBF kernel width")->capture_default_str();
        cmd->add_flag("--no-standardize", o.no_standardize, "Feed raw features to the SVMs");
        cmd->add_flag("--strict", o.strict, "Exit with code 4 if any SVM fails to converge");
    };

    auto *scan = app.add_subcommand("scan", "Count images per class and warn on mismatches");
    scan->add_option("--dataset-root", o.dataset_root, "Dataset directory")->required();
    common(scan);

    auto *sample = app.add_subcommand("sample", "Seeded per-class sample of a dataset (default 100 per class)");
    source(sample);
    common(sample);

    auto *extract = app.add_subcommand("extract", "Extract the 31-feature cache");
    source(extract);
    extraction_flags(extract);
    common(extract);

    auto *train = app.add_subcommand("train", "Train a multiclass model and save it");
    source(train);
    extraction_flags(train);
    model_opts(train);
    train->add_option("--train-frac", o.train_frac, "Train on a stratified fraction (default: all rows)")
        ->check(CLI::Range(0.0, 1.0));
    common(train);

    auto *eval = app.add_subcommand("eval", "Repeated train/test evaluation, or score a saved --model");
    source(eval);
    extraction_flags(eval);
    model_opts(eval);
    eval->add_option("--train-frac", o.train_frac, "Training fraction (default 0.7)")->check(CLI::Range(0.0, 1.0));
    eval->add_option("--iterations", o.iterations, "Split/train/test rounds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval->add_option("--model", o.model, "Saved model to score against the table");
    common(eval);

    auto *reproduce = app.add_subcommand("reproduce", "Feature comparison and strategy sweep against published results");
    source(reproduce);
    extraction_flags(reproduce);
    model_opts(reproduce);
    reproduce->add_option("--iterations", o.iterations, "Rounds per configuration")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    common(reproduce);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        set_thread_count(o.jobs);
        if (*scan) {
            return cmd_scan(o);
        }
        if (*sample) {
            return cmd_sample(o);
        }
        if (*extract) {
            return cmd_extract(o);
        }
        if (*train) {
            return cmd_train(o);
        }
        if (*eval) {
            return cmd_eval(o);
        }
        return cmd_reproduce(o);
    } catch (const DatasetLayoutError &e) {
        std::cerr << "dataset layout error: " << e.what() << "\n";
        return dataset;
    } catch (const DatasetError &e) {
        std::cerr << "dataset error: " << e.what() << "\n";
        return dataset;
    } catch (const ExtractionError &e) {
        std::cerr << "extraction error: " << e.what() << "\n";
        return extraction;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
}
