#include "doctest.h"

#include <fstream>
#include <random>

#include <opencv2/imgcodecs.hpp>

#include "cropweed/imaging.hpp"
#include "synthetic.hpp"

using namespace cropweed;
namespace fs = std::filesystem;

namespace {

fs::path write_png(const fs::path &dir, const std::string &name, const cv::Mat &m) {
    const fs::path p = dir / name;
    REQUIRE(cv::imwrite(p.string(), m));
    return p;
}

}  // namespace

TEST_CASE("load_image scales 8-bit channels to [0,1]") {
    const auto dir = testing::scratch_dir("imaging");

    SUBCASE("white and black pixels") {
        const auto white = load_image(write_png(dir, "white.png", cv::Mat(1, 1, CV_8UC3, cv::Scalar(255, 255, 255))));
        CHECK(white.width() == 1);
        CHECK(white.height() == 1);
        CHECK(white.at(0, 0) == Rgb{1.0, 1.0, 1.0});
        const auto black = load_image(write_png(dir, "black.png", cv::Mat(1, 1, CV_8UC3, cv::Scalar(0, 0, 0))));
        CHECK(black.at(0, 0) == Rgb{0.0, 0.0, 0.0});
    }

    SUBCASE("2x2 with known bytes") {
        cv::Mat m(2, 2, CV_8UC3);
        // OpenCV order is BGR.
        m.at<cv::Vec3b>(0, 0) = {0, 0, 255};
        m.at<cv::Vec3b>(0, 1) = {0, 255, 0};
        m.at<cv::Vec3b>(1, 0) = {255, 0, 0};
        m.at<cv::Vec3b>(1, 1) = {128, 128, 128};
        const auto path = write_png(dir, "quad.png", m);

        // Read the bytes back through the codec independently of load_image.
        const cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
        REQUIRE(raw.at<cv::Vec3b>(1, 1)[0] == 128);

        const auto img = load_image(path);
        CHECK(img.at(0, 0) == Rgb{1.0, 0.0, 0.0});
        CHECK(img.at(1, 0) == Rgb{0.0, 1.0, 0.0});
        CHECK(img.at(0, 1) == Rgb{0.0, 0.0, 1.0});
        CHECK(img.at(1, 1).r == doctest::Approx(128.0 / 255.0).epsilon(1e-15));
        CHECK(img.at(1, 1).g == doctest::Approx(128.0 / 255.0).epsilon(1e-15));
    }

    SUBCASE("16-bit sources scale by 1/65535") {
        cv::Mat m(1, 1, CV_16UC3, cv::Scalar(65535, 0, 32768));
        const auto img = load_image(write_png(dir, "deep.png", m));
        CHECK(img.at(0, 0).b == 1.0);
        CHECK(img.at(0, 0).g == 0.0);
        CHECK(img.at(0, 0).r == doctest::Approx(32768.0 / 65535.0).epsilon(1e-15));
    }

    SUBCASE("grayscale and TIFF inputs") {
        cv::Mat g(1, 1, CV_8UC1, cv::Scalar(51));
        const auto img = load_image(write_png(dir, "gray.png", g));
        CHECK(img.at(0, 0) == Rgb{0.2, 0.2, 0.2});
        const fs::path tif = dir / "c.tif";
        REQUIRE(cv::imwrite(tif.string(), cv::Mat(2, 3, CV_8UC3, cv::Scalar(0, 0, 255))));
        const auto t = load_image(tif);
        CHECK(t.width() == 3);
        CHECK(t.height() == 2);
        CHECK(t.at(2, 1) == Rgb{1.0, 0.0, 0.0});
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS((void)load_image(dir / "missing.png"), IoError);
        {
            std::ofstream f{dir / "junk.png"};
            f << "this is not an image";
        }
        try {
            (void)load_image(dir / "junk.png");
            FAIL("expected FormatError");
        } catch (const FormatError &e) {
            CHECK(std::string{e.what()}.find("PNG") != std::string::npos);
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("rgb_to_hsv hexcone examples") {
    CHECK(rgb_to_hsv(Rgb{1, 0, 0}) == Hsv{0, 1, 1});
    CHECK(rgb_to_hsv(Rgb{0.5, 0.5, 0.5}) == Hsv{0, 0, 0.5});
    const Hsv green = rgb_to_hsv(Rgb{0, 1, 0});
    CHECK(green.h == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(green.s == 1.0);
    CHECK(green.v == 1.0);
    CHECK(rgb_to_hsv(Rgb{0, 0, 1}).h == doctest::Approx(2.0 / 3.0));
    CHECK(rgb_to_hsv(Rgb{1, 0, 1}).h == doctest::Approx(5.0 / 6.0));
    CHECK(rgb_to_hsv(Rgb{0, 0, 0}) == Hsv{0, 0, 0});
}

TEST_CASE("rgb_to_hsv round-trips through the inverse for chromatic pixels") {
    std::mt19937_64 rng{7};
    std::uniform_real_distribution<double> u{0.0, 1.0};
    int checked = 0;
    for (int k = 0; k < 20000; ++k) {
        const Rgb px{u(rng), u(rng), u(rng)};
        const Hsv hsv = rgb_to_hsv(px);
        CHECK(hsv.h >= 0.0);
        CHECK(hsv.h < 1.0);
        CHECK(hsv.s >= 0.0);
        CHECK(hsv.s <= 1.0);
        if (hsv.s <= 0.0) {
            continue;
        }
        const Rgb back = hsv_to_rgb(hsv);
        CHECK(std::abs(back.r - px.r) <= 1e-6);
        CHECK(std::abs(back.g - px.g) <= 1e-6);
        CHECK(std::abs(back.b - px.b) <= 1e-6);
        ++checked;
    }
    CHECK(checked > 19000);
}

TEST_CASE("to_gray quantizes BT.601 luma") {
    RgbImage white{3, 2, Rgb{1, 1, 1}};
    const auto g = to_gray(white, 256);
    for (auto v : g.pixels()) {
        CHECK(v == 255);
    }
    RgbImage black{2, 2};
    for (std::uint32_t levels : {2u, 16u, 256u, 65536u}) {
        const auto g0 = to_gray(black, levels);
        for (auto v : g0.pixels()) {
            CHECK(v == 0);
        }
        CHECK(to_gray(white, levels).at(0, 0) == levels - 1);
    }
    RgbImage red{1, 1, Rgb{1, 0, 0}};
    CHECK(to_gray(red, 256).at(0, 0) == 76);  // floor(0.299 * 255 + 0.5)

    CHECK_THROWS_AS((void)to_gray(white, 1), ParameterError);
    CHECK_THROWS_AS((void)to_gray(white, 65537), ParameterError);
}

TEST_CASE("to_gray is monotone in every channel") {
    std::mt19937_64 rng{11};
    std::uniform_real_distribution<double> u{0.0, 1.0};
    for (int k = 0; k < 20000; ++k) {
        const Rgb lo{u(rng), u(rng), u(rng)};
        const Rgb hi{lo.r + (1 - lo.r) * u(rng), lo.g + (1 - lo.g) * u(rng), lo.b + (1 - lo.b) * u(rng)};
        for (std::uint32_t levels : {4u, 256u, 4096u}) {
            CHECK(luma_level(hi, levels) >= luma_level(lo, levels));
        }
    }
}

TEST_CASE("GrayImage validates values and dimensions") {
    CHECK_THROWS_AS(GrayImage::from_values(2, 1, 4, {0, 4}), ParameterError);
    CHECK_THROWS_AS(GrayImage::from_values(2, 2, 4, {0, 1}), ParameterError);
    CHECK_THROWS_AS(GrayImage(0, 3, 4), ParameterError);
    CHECK_THROWS_AS(GrayImage(2, 2, 1), ParameterError);
    const auto g = GrayImage::from_values(2, 1, 4, {0, 3});
    CHECK(g.at(1, 0) == 3);
}
