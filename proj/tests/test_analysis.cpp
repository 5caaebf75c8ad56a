#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cortexlift/analysis.hpp"
#include "cortexlift/image.hpp"
#include "cortexlift/stimuli.hpp"

using namespace cortexlift;
namespace fs = std::filesystem;

namespace {

fs::path tmpdir() {
    static fs::path d = [] {
        fs::path p = fs::temp_directory_path() / "cortexlift_analysis";
        fs::create_directories(p);
        return p;
    }();
    return d;
}

Image banded_image(const PoggendorffSpec& spec, double mean, double amp, double delta) {
    const double p = spec.classic ? double(spec.n) : spec.line_period;
    Image img(spec.n);
    for (int y = 0; y < spec.n; ++y)
        for (int x = 0; x < spec.n; ++x) {
            const double u = spec.line_coordinate(x, y);
            img.at(y, x) = mean - amp * std::cos(2 * std::numbers::pi * (u - delta) / p);
        }
    return img;
}

double wrapped_gap(double a, double b, double p) { return std::abs(std::remainder(a - b, p)); }

}  // namespace

TEST_CASE("line profiles copy one row and reject bad rows") {
    Image img(8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) img.at(y, x) = 10.0 * y + x;
    const Profile p = line_profile(img, 3);
    CHECK(p.row == 3);
    REQUIRE(p.values.size() == 8);
    for (int x = 0; x < 8; ++x) CHECK(p.values[x] == 30.0 + x);
    CHECK_THROWS(line_profile(img, -1));
    CHECK_THROWS(line_profile(img, 8));
}

TEST_CASE("induction metrics recover phase against the inducing pattern") {
    GratingSpec spec;
    spec.n = 64;
    spec.period = 16;
    spec.orientation = std::numbers::pi / 2;
    spec.bar_height = 16;

    GratingSpec barfree = spec;
    barfree.bar_height = 0;
    const Image inducer = grating_induction(barfree);

    // output identical to the inducer: perfectly in phase
    const InductionMetrics in_phase = induction_metrics(inducer, spec);
    CHECK_THAT(in_phase.phase_corr, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(in_phase.amplitude, Catch::Matchers::WithinAbs(1.0, 1e-12));

    // inverted output: counter-phase
    Image inverted(spec.n);
    for (std::size_t i = 0; i < inverted.v.size(); ++i) inverted.v[i] = 1.0 - inducer.v[i];
    const InductionMetrics counter = induction_metrics(inverted, spec);
    CHECK_THAT(counter.phase_corr, Catch::Matchers::WithinAbs(-1.0, 1e-12));
    CHECK_THAT(counter.amplitude, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("induction metrics are affine-stable") {
    GratingSpec spec;
    spec.n = 64;
    spec.period = 16;
    spec.orientation = std::numbers::pi / 2;
    spec.bar_height = 16;
    GratingSpec barfree = spec;
    barfree.bar_height = 0;
    const Image base = grating_induction(barfree);
    Image scaled(spec.n);
    for (std::size_t i = 0; i < base.v.size(); ++i) scaled.v[i] = 0.25 * base.v[i] + 0.1;
    const InductionMetrics a = induction_metrics(base, spec);
    const InductionMetrics b = induction_metrics(scaled, spec);
    CHECK_THAT(b.phase_corr, Catch::Matchers::WithinAbs(a.phase_corr, 1e-12));
    CHECK_THAT(b.amplitude, Catch::Matchers::WithinAbs(0.25 * a.amplitude, 1e-12));
}

TEST_CASE("flat output yields zero induction") {
    GratingSpec spec;
    spec.n = 64;
    spec.period = 16;
    spec.bar_height = 16;
    const Image flat(64, 0.3);
    const InductionMetrics m = induction_metrics(flat, spec);
    CHECK(m.amplitude == 0.0);
    CHECK(m.phase_corr == 0.0);
}

TEST_CASE("induction metrics validate their inputs") {
    GratingSpec spec;
    spec.n = 64;
    spec.bar_height = 0;
    CHECK_THROWS(induction_metrics(Image(64, 0.5), spec));
    spec.bar_height = 16;
    CHECK_THROWS(induction_metrics(Image(32, 0.5), spec));
}

TEST_CASE("perceived offset recovers a planted band shift") {
    PoggendorffSpec spec;
    spec.n = 64;
    spec.line_period = 16;
    spec.line_angle = std::numbers::pi / 4;

    for (double delta : {0.0, 3.7, -3.7, 7.9}) {
        const Image img = banded_image(spec, 0.5, 0.2, delta);
        const OffsetReport rep = perceived_offset(img, spec);
        CHECK(rep.propagated);
        CHECK_THAT(rep.amplitude, Catch::Matchers::WithinAbs(0.2, 1e-9));
        CHECK_THAT(rep.offset, Catch::Matchers::WithinAbs(delta, 1e-8));
    }
}

TEST_CASE("perceived offset wraps into the principal period") {
    PoggendorffSpec spec;
    spec.n = 64;
    spec.line_period = 16;
    const Image img = banded_image(spec, 0.5, 0.2, 8.1);
    const OffsetReport rep = perceived_offset(img, spec);
    CHECK(rep.propagated);
    CHECK(rep.offset >= -8.0);
    CHECK(rep.offset < 8.0);
    CHECK(wrapped_gap(rep.offset, 8.1, 16.0) <= 1e-8);
}

TEST_CASE("perceived offset in classic mode uses the full grid period") {
    PoggendorffSpec spec;
    spec.n = 64;
    spec.classic = true;
    const Image img = banded_image(spec, 0.5, 0.1, 5.0);
    const OffsetReport rep = perceived_offset(img, spec);
    CHECK(rep.propagated);
    CHECK_THAT(rep.offset, Catch::Matchers::WithinAbs(5.0, 1e-6));
}

TEST_CASE("flat bands report no propagation") {
    PoggendorffSpec spec;
    spec.n = 64;
    spec.line_period = 16;
    const OffsetReport rep = perceived_offset(Image(64, 0.5), spec);
    CHECK_FALSE(rep.propagated);
    CHECK(rep.offset == 0.0);
    CHECK(rep.amplitude <= 1e-12);
}

TEST_CASE("weak oscillations below one percent contrast do not count") {
    PoggendorffSpec spec;
    spec.n = 64;
    spec.line_period = 16;
    const Image img = banded_image(spec, 0.5, 0.004, 2.0);
    const OffsetReport rep = perceived_offset(img, spec);
    CHECK_FALSE(rep.propagated);
}

TEST_CASE("perceived offset validates the image size") {
    PoggendorffSpec spec;
    spec.n = 64;
    CHECK_THROWS(perceived_offset(Image(32, 0.5), spec));
}

TEST_CASE("profile csv export keeps full precision") {
    std::vector<Profile> profs(2);
    profs[0].row = 3;
    profs[1].row = 9;
    for (int i = 0; i < 6; ++i) {
        profs[0].values.push_back(0.1 + i * 0.37281911182736454);
        profs[1].values.push_back(-1.5 + i * 0.0000013);
    }
    const fs::path path = tmpdir() / "profiles.csv";
    export_csv(profs, path.string());

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "index,row_3,row_9");
    for (int i = 0; i < 6; ++i) {
        std::string line;
        REQUIRE(std::getline(in, line));
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        CHECK(std::stoi(cell) == i);
        std::getline(ss, cell, ',');
        CHECK(std::stod(cell) == profs[0].values[i]);
        std::getline(ss, cell, ',');
        CHECK(std::stod(cell) == profs[1].values[i]);
    }
}

TEST_CASE("svg export writes a well-formed chart") {
    std::vector<Profile> profs(1);
    profs[0].row = 5;
    for (int i = 0; i < 32; ++i)
        profs[0].values.push_back(0.5 + 0.4 * std::sin(i * 0.3));
    const fs::path path = tmpdir() / "profiles.svg";
    export_svg(profs, path.string());

    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string svg = buf.str();
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}
