#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>

#include "cortexlift/kv.hpp"
#include "cortexlift/stimuli.hpp"

using namespace cortexlift;

TEST_CASE("grating values stay in the declared luminance set") {
    GratingSpec spec;
    const Image img = grating_induction(spec);
    std::set<double> values(img.v.begin(), img.v.end());
    CHECK(values == std::set<double>{0.0, 0.5, 1.0});
}

TEST_CASE("vertical grating leaves constant middle rows") {
    GratingSpec spec;
    spec.orientation = std::numbers::pi / 2;
    const Image img = grating_induction(spec);
    const int n = spec.n;
    for (int x = 0; x < n; ++x) CHECK(img.at(n / 2, x) == 0.5);
    // outside the bar, columns are constant (stripes run vertically)
    for (int x = 0; x < n; ++x) CHECK(img.at(0, x) == img.at(20, x));
    // stripe width matches half the period
    int run = 1;
    std::set<int> runs;
    for (int x = 1; x < n; ++x) {
        if (img.at(0, x) == img.at(0, x - 1)) {
            ++run;
        } else {
            runs.insert(run);
            run = 1;
        }
    }
    CHECK(runs.count(int(spec.period) / 2) == 1);
}

TEST_CASE("degenerate bar height produces a pure square wave") {
    GratingSpec spec;
    spec.bar_height = 0;
    spec.orientation = std::numbers::pi / 2;
    const Image img = grating_induction(spec);
    for (int y = 0; y < spec.n; ++y)
        for (int x = 0; x < spec.n; ++x) {
            CHECK((img.at(y, x) == 0.0 || img.at(y, x) == 1.0));
            CHECK(img.at(y, x) == img.at(0, x));
        }
    // square wave: value flips across a half-period step
    const int half = int(spec.period) / 2;
    for (int x = 0; x + half < spec.n; ++x)
        CHECK(img.at(0, x) != img.at(0, x + half));
}

TEST_CASE("grating orientations theta and pi minus theta mirror each other") {
    GratingSpec a, b;
    a.orientation = std::numbers::pi / 3;
    b.orientation = std::numbers::pi - std::numbers::pi / 3;
    const Image ia = grating_induction(a), ib = grating_induction(b);
    for (int y = 0; y < a.n; ++y)
        for (int x = 0; x < a.n; ++x) CHECK(ia.at(y, x) == ib.at(y, a.n - 1 - x));
}

TEST_CASE("grating spec roundtrips through key=value text") {
    GratingSpec spec;
    spec.period = 18;
    spec.orientation = 1.0471975511965976;
    spec.bar_height = 32;
    spec.bar_value = 0.25;
    const GratingSpec back = GratingSpec::from_kv(parse_kv(spec.to_kv()));
    CHECK(back.n == spec.n);
    CHECK(back.period == spec.period);
    CHECK(back.orientation == spec.orientation);
    CHECK(back.bar_height == spec.bar_height);
    CHECK(back.bar_value == spec.bar_value);
}

TEST_CASE("grating rejects out-of-range parameters") {
    GratingSpec spec;
    spec.period = 0;
    CHECK_THROWS(grating_induction(spec));
    spec = GratingSpec{};
    spec.period = 300;
    CHECK_THROWS(grating_induction(spec));
    spec = GratingSpec{};
    spec.orientation = 0.0;
    CHECK_THROWS(grating_induction(spec));
}

TEST_CASE("line grating values and collinear continuations") {
    PoggendorffSpec spec;
    const Image img = poggendorff(spec);
    std::set<double> values(img.v.begin(), img.v.end());
    CHECK(values == std::set<double>{0.0, 0.5, 1.0});

    // the perpendicular line coordinate vanishes along each drawn line center,
    // on both sides of the occluder
    const double c = (spec.n - 1) / 2.0;
    int hits = 0;
    for (int y = 0; y < spec.n; ++y)
        for (int x = 0; x < spec.n; ++x) {
            const double u = spec.line_coordinate(x, y);
            const double d = std::abs(std::remainder(u, spec.line_period));
            const bool in_band = std::abs(x - c) <= spec.occluder_width / 2.0;
            if (in_band) {
                CHECK(img.at(y, x) == 0.5);
            } else if (d <= spec.line_thickness / 2.0) {
                CHECK(img.at(y, x) == 0.0);
                ++hits;
            }
        }
    CHECK(hits > 1000);
}

TEST_CASE("classic variant draws exactly one interrupted line") {
    PoggendorffSpec spec;
    spec.classic = true;
    const Image img = poggendorff(spec);
    const double c = (spec.n - 1) / 2.0;
    for (int y = 0; y < spec.n; ++y)
        for (int x = 0; x < spec.n; ++x) {
            if (std::abs(x - c) <= spec.occluder_width / 2.0) continue;
            const bool on_line =
                std::abs(spec.line_coordinate(x, y)) <= spec.line_thickness / 2.0;
            CHECK(img.at(y, x) == (on_line ? 0.0 : 1.0));
        }
}

TEST_CASE("zero occluder width leaves lines unbroken") {
    PoggendorffSpec spec;
    spec.occluder_width = 0;
    const Image img = poggendorff(spec);
    int grey = 0;
    for (double v : img.v)
        if (v == 0.5) ++grey;
    // the zero-width band still covers the single center column it lands on
    CHECK(grey <= spec.n);
}

TEST_CASE("poggendorff rejects axis-aligned lines") {
    PoggendorffSpec spec;
    spec.line_angle = 0.0;
    CHECK_THROWS(poggendorff(spec));
    spec.line_angle = std::numbers::pi / 2;
    CHECK_THROWS(poggendorff(spec));
}

TEST_CASE("poggendorff spec roundtrips through key=value text") {
    PoggendorffSpec spec;
    spec.occluder_width = 28;
    spec.line_angle = 0.9;
    spec.line_period = 22;
    spec.line_thickness = 4;
    spec.classic = true;
    const PoggendorffSpec back = PoggendorffSpec::from_kv(parse_kv(spec.to_kv()));
    CHECK(back.occluder_width == spec.occluder_width);
    CHECK(back.line_angle == spec.line_angle);
    CHECK(back.line_period == spec.line_period);
    CHECK(back.line_thickness == spec.line_thickness);
    CHECK(back.classic == spec.classic);
}
