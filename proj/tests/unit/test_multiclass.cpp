#include "doctest.h"

#include <cmath>
#include <random>

#include "cropweed/multiclass.hpp"

using namespace cropweed;

namespace {

struct Clouds {
    FeatureMatrix x;
    std::vector<std::string> labels;
};

Clouds clouds(std::size_t classes, std::size_t per_class, double spread, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng{seed};
    std::normal_distribution<double> g{0.0, spread};
    Clouds c;
    for (std::size_t i = 0; i < per_class; ++i) {
        for (std::size_t k = 0; k < classes; ++k) {
            const double angle = 2.0 * 3.141592653589793 * static_cast<double>(k) / static_cast<double>(classes);
            const std::vector<double> row{scale * (5 * std::cos(angle) + g(rng)), 5 * std::sin(angle) + g(rng)};
            c.x.append_row(row);
            c.labels.push_back("c" + std::to_string(k));
        }
    }
    return c;
}

double training_accuracy(const MulticlassModel &m, const Clouds &c) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < c.x.rows(); ++i) {
        ok += predict_class(m, c.x.row(i)) == c.labels[i];
    }
    return static_cast<double>(ok) / static_cast<double>(c.x.rows());
}

MulticlassModel stub(Strategy s, std::size_t q) {
    MulticlassModel m;
    m.strategy = s;
    for (std::size_t k = 0; k < q; ++k) {
        m.classes.push_back("k" + std::to_string(k));
    }
    if (s == Strategy::ovo) {
        for (std::size_t a = 0; a < q; ++a) {
            for (std::size_t b = a + 1; b < q; ++b) {
                m.binaries.push_back({a, b, {}});
            }
        }
    } else {
        for (std::size_t a = 0; a < q; ++a) {
            m.binaries.push_back({a, BinaryMember::npos, {}});
        }
    }
    return m;
}

}  // namespace

TEST_CASE("ensemble sizes for four classes") {
    const auto c = clouds(4, 10, 0.3, 1);
    MulticlassOptions ovo;
    const auto m1 = train_multiclass(c.x, c.labels, ovo);
    CHECK(m1.binaries.size() == 6);
    CHECK(m1.classes == std::vector<std::string>{"c0", "c1", "c2", "c3"});
    CHECK(m1.binaries[0].positive == 0);
    CHECK(m1.binaries[0].negative == 1);
    CHECK(m1.binaries[5].positive == 2);
    CHECK(m1.binaries[5].negative == 3);
    MulticlassOptions ova;
    ova.strategy = Strategy::ova;
    const auto m2 = train_multiclass(c.x, c.labels, ova);
    CHECK(m2.binaries.size() == 4);
    CHECK_NOTHROW(m1.validate());
    CHECK_NOTHROW(m2.validate());
}

TEST_CASE("well separated clouds are classified perfectly by both strategies") {
    const auto c = clouds(3, 20, 0.3, 2);
    for (auto s : {Strategy::ovo, Strategy::ova}) {
        MulticlassOptions opts;
        opts.strategy = s;
        const auto m = train_multiclass(c.x, c.labels, opts);
        CHECK(training_accuracy(m, c) == 1.0);
    }
}

TEST_CASE("explicit class order is honored") {
    const auto c = clouds(3, 10, 0.3, 3);
    const std::vector<std::string> order{"c2", "c0", "c1"};
    const auto m = train_multiclass(c.x, c.labels, {}, order);
    CHECK(m.classes == order);
    CHECK(training_accuracy(m, c) == 1.0);
    const std::vector<std::string> missing{"c0", "c1"};
    CHECK_THROWS_AS((void)train_multiclass(c.x, c.labels, {}, missing), ParameterError);
}

TEST_CASE("ovo voting and ties") {
    auto m = stub(Strategy::ovo, 3);  // pairs (0,1) (0,2) (1,2)
    CHECK(resolve_class(m, std::vector<double>{1, 1, 1}) == 0);
    CHECK(resolve_class(m, std::vector<double>{-1, 0.5, 1}) == 1);
    // zero votes for the positive side
    CHECK(resolve_class(m, std::vector<double>{0.0, -1, -1}) == 2);
    // 1 vote each; margins: c0 = 1 - 2 = -1, c1 = -1 + 0.5 = -0.5, c2 = 2 - 0.5 = 1.5
    CHECK(resolve_class(m, std::vector<double>{1, -2, 0.5}) == 2);
    // full symmetric tie falls back to class order
    CHECK(resolve_class(m, std::vector<double>{1, -1, 1}) == 0);
    CHECK_THROWS_AS((void)resolve_class(m, std::vector<double>{1, 1}), ParameterError);
}

TEST_CASE("ova argmax and ties") {
    auto m = stub(Strategy::ova, 4);
    CHECK(resolve_class(m, std::vector<double>{-1, 0.2, -0.3, 0.1}) == 1);
    CHECK(resolve_class(m, std::vector<double>{-3, -1, -2, -1}) == 1);
    CHECK(resolve_class(m, std::vector<double>{0.5, 0.5, 0.5, 0.5}) == 0);
}

TEST_CASE("standardizer statistics") {
    const auto x = FeatureMatrix::from_rows({{1, 5}, {3, 5}, {5, 5}});
    const auto s = fit_standardizer(x);
    CHECK(s.mean[0] == 3.0);
    CHECK(s.scale[0] == doctest::Approx(std::sqrt(8.0 / 3.0)));
    CHECK(s.scale[1] == 1.0);
    const auto z = s.apply(std::vector<double>{3, 7});
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 2.0);
    CHECK_THROWS_AS((void)fit_standardizer(FeatureMatrix::from_rows({{1, 2}})), ParameterError);
    CHECK_THROWS_AS((void)s.apply(std::vector<double>{1}), ParameterError);
}

TEST_CASE("training statistics are reused at prediction time") {
    // One axis spans thousands; without scaling the squashed axis would be ignored.
    const auto c = clouds(4, 15, 0.2, 4, 1000.0);
    MulticlassOptions opts;
    const auto m = train_multiclass(c.x, c.labels, opts);
    const auto fitted = fit_standardizer(c.x);
    CHECK(m.standardizer.mean == fitted.mean);
    CHECK(m.standardizer.scale == fitted.scale);
    // A single query cannot be standardized by itself; predictions must use stored statistics.
    for (std::size_t i = 0; i < c.x.rows(); ++i) {
        const auto z = m.standardizer.apply(c.x.row(i));
        CHECK(predict_class_index(m, c.x.row(i)) == resolve_class(m, member_decisions(m, z)));
    }
    CHECK(training_accuracy(m, c) == 1.0);

    MulticlassOptions raw = opts;
    raw.standardize = false;
    const auto mr = train_multiclass(c.x, c.labels, raw);
    CHECK(mr.standardizer.mean == std::vector<double>{0.0, 0.0});
    CHECK(mr.standardizer.scale == std::vector<double>{1.0, 1.0});
}

TEST_CASE("two classes: both strategies agree with the binary machine") {
    const auto c = clouds(2, 15, 1.5, 5);
    MulticlassOptions ovo;
    const auto m = train_multiclass(c.x, c.labels, ovo);
    REQUIRE(m.binaries.size() == 1);
    for (std::size_t i = 0; i < c.x.rows(); ++i) {
        const auto z = m.standardizer.apply(c.x.row(i));
        const int sign = predict(m.binaries[0].svm, z);
        CHECK(predict_class_index(m, c.x.row(i)) == (sign > 0 ? 0u : 1u));
    }
}

TEST_CASE("renaming classes does not change predictions") {
    const auto c = clouds(3, 12, 1.0, 6);
    std::vector<std::string> renamed;
    for (const auto &l : c.labels) {
        renamed.push_back("class_" + l + "_x");
    }
    const auto a = train_multiclass(c.x, c.labels, {});
    const auto b = train_multiclass(c.x, renamed, {});
    for (std::size_t i = 0; i < c.x.rows(); ++i) {
        CHECK(predict_class_index(a, c.x.row(i)) == predict_class_index(b, c.x.row(i)));
    }
}

TEST_CASE("training is deterministic") {
    const auto c = clouds(4, 12, 1.5, 7);
    const auto a = train_multiclass(c.x, c.labels, {});
    const auto b = train_multiclass(c.x, c.labels, {});
    for (std::size_t k = 0; k < a.binaries.size(); ++k) {
        CHECK(a.binaries[k].svm.alphas == b.binaries[k].svm.alphas);
        CHECK(a.binaries[k].svm.bias == b.binaries[k].svm.bias);
    }
}

TEST_CASE("strategy names and input errors") {
    CHECK(parse_strategy("ovo") == Strategy::ovo);
    CHECK(parse_strategy("ova") == Strategy::ova);
    CHECK(to_string(Strategy::ova) == "ova");
    CHECK_THROWS_AS((void)parse_strategy("ovr"), ParameterError);
    const auto c = clouds(1, 5, 1.0, 8);
    CHECK_THROWS_AS((void)train_multiclass(c.x, c.labels, {}), ParameterError);
    std::vector<std::string> short_labels{"a"};
    CHECK_THROWS_AS((void)train_multiclass(c.x, short_labels, {}), ParameterError);
}
