#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "cortexlift/image.hpp"
#include "cortexlift/kv.hpp"

using namespace cortexlift;
namespace fs = std::filesystem;

namespace {

fs::path tmpdir() {
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() / "cortexlift_imagegrid";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Image random_image(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Image img(n);
    for (double& v : img.v) v = uni(rng);
    return img;
}

Image circshift(const Image& in, int dy, int dx) {
    Image out(in.n);
    for (int y = 0; y < in.n; ++y)
        for (int x = 0; x < in.n; ++x)
            out.at((y + dy) % in.n, (x + dx) % in.n) = in.at(y, x);
    return out;
}

std::vector<double> periodic_gauss(int n, double sigma) {
    std::vector<double> g(n);
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        const double d = std::min(i, n - i);
        g[i] = std::exp(-d * d / (2 * sigma * sigma));
        sum += g[i];
    }
    for (double& v : g) v /= sum;
    return g;
}

}  // namespace

TEST_CASE("byte quantizer clamps and rounds") {
    CHECK(quantize_byte(0.0) == 0);
    CHECK(quantize_byte(1.0) == 255);
    CHECK(quantize_byte(-0.25) == 0);
    CHECK(quantize_byte(1.75) == 255);
    CHECK(quantize_byte(0.5) == 128);
    CHECK(quantize_byte(0.25) == 64);
    CHECK(quantize_byte(100.0 / 255.0) == 100);
}

TEST_CASE("png save/load roundtrip reproduces quantized values") {
    const Image img = random_image(19, 71);
    const auto path = (tmpdir() / "rt.png").string();
    save_image(img, path);
    const Image back = load_image(path);
    REQUIRE(back.n == img.n);
    for (int i = 0; i < img.n * img.n; ++i)
        CHECK(back.v[i] == quantize_byte(img.v[i]) / 255.0);
}

TEST_CASE("pgm save/load roundtrip reproduces quantized values") {
    const Image img = random_image(16, 72);
    const auto path = (tmpdir() / "rt.pgm").string();
    save_image(img, path);
    const Image back = load_image(path);
    REQUIRE(back.n == img.n);
    for (int i = 0; i < img.n * img.n; ++i)
        CHECK(back.v[i] == quantize_byte(img.v[i]) / 255.0);
}

TEST_CASE("rescaled save writes minmax sidecar and spans full byte range") {
    Image img(8, 0.0);
    for (int i = 0; i < 64; ++i) img.v[i] = -2.0 + 5.0 * i / 63.0;
    const auto path = (tmpdir() / "rs.png").string();
    save_image(img, path, true);

    const KvMap side = load_kv(path + ".minmax");
    CHECK(kv_get_num(side, "min") == -2.0);
    CHECK(kv_get_num(side, "max") == 3.0);

    const Image back = load_image(path);
    CHECK(back.v[0] == 0.0);
    CHECK(back.v[63] == 1.0);
}

TEST_CASE("rescaled save of a constant image produces zeros") {
    const Image img(6, 0.37);
    const auto path = (tmpdir() / "const.png").string();
    save_image(img, path, true);
    const Image back = load_image(path);
    for (double v : back.v) CHECK(v == 0.0);
    const KvMap side = load_kv(path + ".minmax");
    CHECK(kv_get_num(side, "min") == 0.37);
    CHECK(kv_get_num(side, "max") == 0.37);
}

TEST_CASE("loader rejects missing and non-square inputs") {
    CHECK_THROWS(load_image((tmpdir() / "nope.png").string()));
    const auto path = (tmpdir() / "rect.pgm").string();
    {
        std::ofstream out(path, std::ios::binary);
        out << "P5\n3 4\n255\n";
        for (int i = 0; i < 12; ++i) out.put(char(i));
    }
    CHECK_THROWS_WITH(load_image(path), Catch::Matchers::ContainsSubstring("square"));
}

TEST_CASE("blur of an impulse equals the separable periodic kernel") {
    const int n = 32;
    Image img(n, 0.0);
    img.at(7, 12) = 1.0;
    const Image out = gaussian_blur(img, 2.0);
    const auto g = periodic_gauss(n, 2.0);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double want = g[(y - 7 + n) % n] * g[(x - 12 + n) % n];
            CHECK_THAT(out.at(y, x), Catch::Matchers::WithinAbs(want, 1e-12));
        }
}

TEST_CASE("blur preserves the mean") {
    const Image img = random_image(40, 73);
    const Image out = gaussian_blur(img, 3.0);
    double m0 = 0, m1 = 0;
    for (int i = 0; i < 40 * 40; ++i) {
        m0 += img.v[i];
        m1 += out.v[i];
    }
    CHECK_THAT(m1 / 1600, Catch::Matchers::WithinAbs(m0 / 1600, 1e-12));
}

TEST_CASE("blur commutes with circular shifts") {
    const Image img = random_image(24, 74);
    const Image a = gaussian_blur(circshift(img, 5, 11), 1.7);
    const Image b = circshift(gaussian_blur(img, 1.7), 5, 11);
    for (int i = 0; i < 24 * 24; ++i) CHECK_THAT(a.v[i], Catch::Matchers::WithinAbs(b.v[i], 1e-12));
}

TEST_CASE("blur rejects non-positive widths") {
    const Image img(8, 0.5);
    CHECK_THROWS(gaussian_blur(img, 0.0));
    CHECK_THROWS(gaussian_blur(img, -1.0));
}
