#include "doctest.h"

#include <fstream>
#include <sstream>

#include <opencv2/imgcodecs.hpp>

#include "cropweed/io.hpp"
#include "synthetic.hpp"

using namespace cropweed;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p) {
    std::ifstream in{p, std::ios::binary};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_constant_png(const fs::path &p, int value) {
    fs::create_directories(p.parent_path());
    cv::imwrite(p.string(), cv::Mat(20, 20, CV_8UC3, cv::Scalar(value, value, value)));
}

}  // namespace

TEST_CASE("scan finds every class and sorts files") {
    const auto root = testing::write_synthetic_dataset(testing::scratch_dir("scan"), 2, 1);
    std::ofstream{root / "grass" / "notes.txt"} << "ignored";
    const auto m = scan_dataset(root);
    CHECK(m.total() == 8);
    REQUIRE(m.classes.size() == 4);
    for (const auto &[name, files] : m.classes) {
        CHECK(files.size() == 2);
        CHECK(std::is_sorted(files.begin(), files.end()));
    }
    CHECK(count_mismatch_warnings(m).size() == 4);
}

TEST_CASE("missing class directory is a layout error naming it") {
    const auto root = testing::write_synthetic_dataset(testing::scratch_dir("layout"), 1, 2);
    fs::remove_all(root / "grass");
    try {
        (void)scan_dataset(root);
        FAIL("expected DatasetLayoutError");
    } catch (const DatasetLayoutError &e) {
        CHECK(std::string{e.what()}.find("grass") != std::string::npos);
    }
    fs::create_directories(root / "grass");
    CHECK_THROWS_AS((void)scan_dataset(root), DatasetError);
    CHECK_THROWS_AS((void)scan_dataset(root / "nope"), DatasetLayoutError);
}

TEST_CASE("class directories match case-insensitively") {
    const auto root = testing::write_synthetic_dataset(testing::scratch_dir("case"), 1, 3);
    fs::rename(root / "soil", root / "Soil");
    const auto m = scan_dataset(root);
    CHECK(m.classes.at("soil").size() == 1);
}

TEST_CASE("per-class sampling is seeded and bounded") {
    const auto root = testing::write_synthetic_dataset(testing::scratch_dir("sample"), 5, 4, 16);
    const auto m = scan_dataset(root);
    const auto a = sample_per_class(m, 3, 42);
    const auto b = sample_per_class(m, 3, 42);
    CHECK(a.total() == 12);
    for (const auto &[name, files] : a.classes) {
        CHECK(files == b.classes.at(name));
        CHECK(std::is_sorted(files.begin(), files.end()));
    }
    CHECK_THROWS_AS((void)sample_per_class(m, 6, 42), ParameterError);
}

TEST_CASE("constant image extraction row") {
    const auto dir = testing::scratch_dir("const");
    write_constant_png(dir / "c.png", 128);
    const ExtractionConfig cfg;
    const auto row = extract_image_features(load_image(dir / "c.png"), cfg);
    REQUIRE(row.size() == 31);
    CHECK(feature_columns(cfg).size() == 31);
    for (std::size_t k = 0; k < 12; ++k) {
        if (k % 2 == 1) {
            CHECK(row[k] == 0.0);
        }
    }
    CHECK(row[0] == doctest::Approx(128.0 / 255.0));
    const std::vector<double> glcm(row.begin() + 12, row.begin() + 21);
    CHECK(glcm == std::vector<double>{1, 0, 0, 1, 0, 0, 0, 0, 0});
    for (std::size_t b = 0; b < 10; ++b) {
        CHECK(row[21 + b] == (b == 8 ? 1.0 : 0.0));
    }
}

TEST_CASE("extraction skips unreadable files and is byte-reproducible") {
    const auto root = testing::write_synthetic_dataset(testing::scratch_dir("extract"), 3, 5, 24);
    std::ofstream{root / "soil" / "zz_broken.png"} << "not an image";
    const auto m = scan_dataset(root);
    const ExtractionConfig cfg;
    const auto cache = extract_features(m, cfg);
    CHECK(cache.rows.size() + cache.skipped.size() == m.total());
    REQUIRE(cache.skipped.size() == 1);
    CHECK(cache.skipped[0].path.filename() == "zz_broken.png");
    CHECK(cache.rows.front().label == "broadleaf");
    CHECK(cache.rows.back().label == "soybean");
    CHECK(cache.rows.front().id == "broadleaf/img_000.png");

    const auto out = testing::scratch_dir("extract_out");
    save_feature_cache(cache, out / "a.csv");
    save_feature_cache(extract_features(m, cfg), out / "b.csv");
    CHECK(slurp(out / "a.csv") == slurp(out / "b.csv"));
    CHECK(fs::exists(out / "a.csv.meta.json"));

    const std::string text = slurp(out / "a.csv");
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.substr(0, text.find('\n')) == cache_header(cache.columns));
    CHECK(cache_header(cache.columns).rfind("id,class,mean_R,", 0) == 0);

    const auto table = load_feature_table(out / "a.csv");
    CHECK(table.size() == cache.rows.size());
    CHECK(table.columns.size() == 31);
    CHECK(table.classes() == std::vector<std::string>{"broadleaf", "grass", "soil", "soybean"});
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (std::size_t k = 0; k < 31; ++k) {
            CHECK(table.values(i, k) == doctest::Approx(cache.rows[i].values[k]).epsilon(1e-8));
        }
    }

    const auto meta = nlohmann::json::parse(slurp(out / "a.csv.meta.json"));
    CHECK(meta.at("skipped").size() == 1);
    CHECK(extraction_config_from_json(meta.at("extraction")).gray_levels == 256);
}

TEST_CASE("every image failing is an extraction error") {
    const auto root = testing::scratch_dir("allbad");
    for (auto c : dataset_classes) {
        fs::create_directories(root / std::string{c});
        std::ofstream{root / std::string{c} / "x.png"} << "junk";
    }
    CHECK_THROWS_AS((void)extract_features(scan_dataset(root), {}), ExtractionError);
}

TEST_CASE("cache reader rejects malformed content") {
    const auto dir = testing::scratch_dir("badcsv");
    write_text(dir / "dup.csv", "id,class,a\nx,soil,1\nx,soil,2\n");
    CHECK_THROWS_AS((void)load_feature_table(dir / "dup.csv"), DeserializationError);
    write_text(dir / "short.csv", "id,class,a,b\nx,soil,1\n");
    CHECK_THROWS_AS((void)load_feature_table(dir / "short.csv"), DeserializationError);
    write_text(dir / "nan.csv", "id,class,a\nx,soil,abc\n");
    CHECK_THROWS_AS((void)load_feature_table(dir / "nan.csv"), DeserializationError);
    write_text(dir / "hdr.csv", "name,a\nx,1\n");
    CHECK_THROWS_AS((void)load_feature_table(dir / "hdr.csv"), DeserializationError);
    write_text(dir / "quoted.csv", "id,class,a\n\"a,b\",soil,1.5\n");
    CHECK(load_feature_table(dir / "quoted.csv").ids[0] == "a,b");
    CHECK_THROWS_AS((void)load_feature_table(dir / "missing.csv"), IoError);
}

TEST_CASE("model round trip preserves predictions") {
    const auto root = testing::write_synthetic_dataset(testing::scratch_dir("model"), 6, 6, 24);
    const auto table = to_table(extract_features(scan_dataset(root), {}));
    const std::vector<std::string> classes{"broadleaf", "grass", "soil", "soybean"};
    for (auto s : {Strategy::ovo, Strategy::ova}) {
        MulticlassOptions opts;
        opts.strategy = s;
        opts.kernel = s == Strategy::ovo ? KernelSpec{RbfKernel{0.05}} : KernelSpec{LinearKernel{}};
        const auto model = train_multiclass(table.values, table.labels, opts, classes);
        const auto path = testing::scratch_dir("model_out") / "m.json";
        save_model(model, path);
        const auto back = load_model(path);
        CHECK(back.classes == model.classes);
        CHECK(back.strategy == s);
        CHECK(back.binaries.size() == (s == Strategy::ovo ? 6u : 4u));
        for (std::size_t i = 0; i < table.size(); ++i) {
            const auto da = member_decisions(model, model.standardizer.apply(table.values.row(i)));
            const auto db = member_decisions(back, back.standardizer.apply(table.values.row(i)));
            for (std::size_t k = 0; k < da.size(); ++k) {
                CHECK(std::abs(da[k] - db[k]) <= 1e-12);
            }
            CHECK(predict_class(model, table.values.row(i)) == predict_class(back, table.values.row(i)));
        }
    }
}

TEST_CASE("model loader rejects bad documents") {
    const auto c = testing::write_synthetic_dataset(testing::scratch_dir("badmodel"), 3, 7, 16);
    const auto table = to_table(extract_features(scan_dataset(c), {}));
    const auto model = train_multiclass(table.values, table.labels, {});
    auto j = to_json(model);
    CHECK(j.at("format_version") == 1);
    const auto dir = testing::scratch_dir("badmodel_out");

    auto wrong = j;
    wrong["format_version"] = 99;
    write_text(dir / "v.json", wrong.dump());
    try {
        (void)load_model(dir / "v.json");
        FAIL("expected DeserializationError");
    } catch (const DeserializationError &e) {
        CHECK(std::string{e.what()}.find("99") != std::string::npos);
    }

    const std::string text = j.dump();
    write_text(dir / "t.json", text.substr(0, text.size() / 2));
    CHECK_THROWS_AS((void)load_model(dir / "t.json"), DeserializationError);

    auto missing = j;
    missing.erase("classes");
    write_text(dir / "m.json", missing.dump());
    CHECK_THROWS_AS((void)load_model(dir / "m.json"), DeserializationError);
    CHECK_THROWS_AS((void)load_model(dir / "absent.json"), IoError);
}

TEST_CASE("kernel and config json round trip") {
    for (const KernelSpec k : {KernelSpec{LinearKernel{}}, KernelSpec{PolynomialKernel{4, 0.5}}, KernelSpec{RbfKernel{0.25}}}) {
        CHECK(kernel_from_json(to_json(k)) == k);
    }
    ExtractionConfig cfg;
    cfg.gray_levels = 64;
    cfg.glcm = {2, GlcmDirection::deg135, false};
    cfg.correlation = CorrelationNormalization::standard;
    cfg.lbp = {16, 2.0, LbpMapping::ri};
    const auto back = extraction_config_from_json(to_json(cfg));
    CHECK(back.gray_levels == 64);
    CHECK(back.glcm.distance == 2);
    CHECK(back.glcm.direction == GlcmDirection::deg135);
    CHECK_FALSE(back.glcm.symmetric);
    CHECK(back.correlation == CorrelationNormalization::standard);
    CHECK(back.lbp.points == 16);
    CHECK(back.lbp.mapping == LbpMapping::ri);
    CHECK(feature_columns(cfg).back().rfind("lbp_ri_", 0) == 0);
}
