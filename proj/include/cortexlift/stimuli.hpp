#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cortexlift/image.hpp"
#include "cortexlift/kv.hpp"

namespace cortexlift {

// Square-wave grating with a uniform horizontal bar overwritten across the
// middle. Orientation is the angle of the grating stripes' normal direction
// measured against the bar axis.
struct GratingSpec {
    int n = 200;
    double period = 24;
    double orientation = std::numbers::pi / 2;
    int bar_height = 40;
    double bar_value = 0.5;
    double stripe_hi = 1.0;
    double stripe_lo = 0.0;

    void validate() const {
        if (n < 2) throw std::invalid_argument("grating: n too small");
        if (!(period > 0 && period < n)) throw std::invalid_argument("grating: period must be in (0, n)");
        if (bar_height < 0 || bar_height >= n)
            throw std::invalid_argument("grating: bar_height must be in [0, n)");
        if (!(orientation > 0 && orientation <= std::numbers::pi))
            throw std::invalid_argument("grating: orientation must be in (0, pi]");
    }

    std::string to_kv() const {
        std::ostringstream out;
        out << "type=grating\n"
            << "n=" << n << "\n"
            << "period=" << kv_num(period) << "\n"
            << "orientation=" << kv_num(orientation) << "\n"
            << "bar_height=" << bar_height << "\n"
            << "bar_value=" << kv_num(bar_value) << "\n"
            << "stripe_hi=" << kv_num(stripe_hi) << "\n"
            << "stripe_lo=" << kv_num(stripe_lo) << "\n";
        return out.str();
    }

    static GratingSpec from_kv(const KvMap& kv) {
        GratingSpec s;
        s.n = int(kv_get_num(kv, "n", s.n));
        s.period = kv_get_num(kv, "period", s.period);
        s.orientation = kv_get_num(kv, "orientation", s.orientation);
        s.bar_height = int(kv_get_num(kv, "bar_height", s.bar_height));
        s.bar_value = kv_get_num(kv, "bar_value", s.bar_value);
        s.stripe_hi = kv_get_num(kv, "stripe_hi", s.stripe_hi);
        s.stripe_lo = kv_get_num(kv, "stripe_lo", s.stripe_lo);
        return s;
    }
};

inline Image grating_induction(const GratingSpec& spec) {
    spec.validate();
    const int n = spec.n;
    Image img(n);
    const double c = (n - 1) / 2.0;
    const double s = std::sin(spec.orientation), co = std::cos(spec.orientation);
    const double h = spec.period / 2.0;
    for (int y = 0; y < n; ++y) {
        const double yc = y - c;
        for (int x = 0; x < n; ++x) {
            const double xc = x - c;
            const double u = -xc * s + yc * co;
            const long idx = long(std::floor((std::abs(u) + h / 2.0) / h));
            img.at(y, x) = (idx % 2 == 0) ? spec.stripe_hi : spec.stripe_lo;
        }
    }
    const int lo = (n - spec.bar_height) / 2;
    for (int y = lo; y < lo + spec.bar_height; ++y)
        for (int x = 0; x < n; ++x) img.at(y, x) = spec.bar_value;
    return img;
}

// Oblique parallel lines (or a single line) interrupted by a vertical
// occluder band; continuations across the band are collinear by construction.
struct PoggendorffSpec {
    int n = 200;
    double occluder_width = 40;
    double occluder_value = 0.5;
    double line_angle = std::numbers::pi / 4;
    double line_period = 30;
    double line_thickness = 6;
    bool classic = false;
    double line_value = 0.0;
    double background = 1.0;

    void validate() const {
        if (n < 2) throw std::invalid_argument("poggendorff: n too small");
        if (!(occluder_width >= 0 && occluder_width < n))
            throw std::invalid_argument("poggendorff: occluder_width must be in [0, n)");
        const double m = std::fmod(line_angle, std::numbers::pi);
        if (std::abs(m) < 1e-9 || std::abs(m - std::numbers::pi / 2) < 1e-9 ||
            std::abs(m - std::numbers::pi) < 1e-9)
            throw std::invalid_argument("poggendorff: line_angle must be oblique");
        if (!classic && !(line_period > 0 && line_period < n))
            throw std::invalid_argument("poggendorff: line_period must be in (0, n)");
        if (!(line_thickness > 0)) throw std::invalid_argument("poggendorff: line_thickness must be positive");
    }

    std::string to_kv() const {
        std::ostringstream out;
        out << "type=poggendorff\n"
            << "n=" << n << "\n"
            << "occluder_width=" << kv_num(occluder_width) << "\n"
            << "occluder_value=" << kv_num(occluder_value) << "\n"
            << "line_angle=" << kv_num(line_angle) << "\n"
            << "line_period=" << kv_num(line_period) << "\n"
            << "line_thickness=" << kv_num(line_thickness) << "\n"
            << "classic=" << (classic ? 1 : 0) << "\n"
            << "line_value=" << kv_num(line_value) << "\n"
            << "background=" << kv_num(background) << "\n";
        return out.str();
    }

    static PoggendorffSpec from_kv(const KvMap& kv) {
        PoggendorffSpec s;
        s.n = int(kv_get_num(kv, "n", s.n));
        s.occluder_width = kv_get_num(kv, "occluder_width", s.occluder_width);
        s.occluder_value = kv_get_num(kv, "occluder_value", s.occluder_value);
        s.line_angle = kv_get_num(kv, "line_angle", s.line_angle);
        s.line_period = kv_get_num(kv, "line_period", s.line_period);
        s.line_thickness = kv_get_num(kv, "line_thickness", s.line_thickness);
        s.classic = kv_get_num(kv, "classic", 0) != 0;
        s.line_value = kv_get_num(kv, "line_value", s.line_value);
        s.background = kv_get_num(kv, "background", s.background);
        return s;
    }

    // Signed distance from pixel center (x, y) to the reference line through
    // the grid center, measured perpendicular to the line direction.
    double line_coordinate(double x, double y) const {
        const double c = (n - 1) / 2.0;
        return -(x - c) * std::sin(line_angle) + (y - c) * std::cos(line_angle);
    }
};

inline Image poggendorff(const PoggendorffSpec& spec) {
    spec.validate();
    const int n = spec.n;
    Image img(n, spec.background);
    const double half = spec.line_thickness / 2.0;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double u = spec.line_coordinate(x, y);
            const double d = spec.classic
                                 ? std::abs(u)
                                 : std::abs(std::remainder(u, spec.line_period));
            if (d <= half) img.at(y, x) = spec.line_value;
        }
    const double c = (n - 1) / 2.0;
    for (int x = 0; x < n; ++x)
        if (std::abs(x - c) <= spec.occluder_width / 2.0)
            for (int y = 0; y < n; ++y) img.at(y, x) = spec.occluder_value;
    return img;
}

}  // namespace cortexlift
