#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cortexlift/image.hpp"
#include "cortexlift/stimuli.hpp"

namespace cortexlift {

struct Profile {
    int row = 0;
    std::vector<double> values;
};

inline Profile line_profile(const Image& img, int row) {
    if (row < 0 || row >= img.n) throw std::out_of_range("line_profile: row out of range");
    Profile p;
    p.row = row;
    p.values.assign(img.v.begin() + std::size_t(row) * img.n,
                    img.v.begin() + std::size_t(row + 1) * img.n);
    return p;
}

struct InductionMetrics {
    double amplitude = 0;   // peak-to-peak of the detrended central-bar profile
    double phase_corr = 0;  // Pearson correlation against the inducing grating
};

namespace detail {

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= double(n);
    mb /= double(n);
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        dot += da * db;
        na += da * da;
        nb += db * db;
    }
    if (na == 0 || nb == 0) return 0;
    return dot / std::sqrt(na * nb);
}

}  // namespace detail

// Compares the middle row of the bar region against the grating the stimulus
// would show on those columns without a bar. Raw output values; negative
// correlation means the induced oscillation is in counter-phase.
inline InductionMetrics induction_metrics(const Image& output, const GratingSpec& spec) {
    if (spec.bar_height <= 0) throw std::invalid_argument("induction_metrics: bar region empty");
    if (output.n != spec.n)
        throw std::invalid_argument("induction_metrics: output size does not match spec");
    const int mid = (spec.n - spec.bar_height) / 2 + spec.bar_height / 2;

    GratingSpec barfree = spec;
    barfree.bar_height = 0;
    const Image ref_img = grating_induction(barfree);

    std::vector<double> prof = line_profile(output, mid).values;
    std::vector<double> ref = line_profile(ref_img, mid).values;

    InductionMetrics m;
    const auto [mn, mx] = std::minmax_element(prof.begin(), prof.end());
    m.amplitude = *mx - *mn;
    m.phase_corr = detail::pearson(prof, ref);
    return m;
}

struct OffsetReport {
    bool propagated = false;
    double offset = 0;     // signed pixels along the line normal
    double amplitude = 0;  // amplitude of the fitted oscillation
};

// Fits m + a cos(2 pi u/p) + b sin(2 pi u/p) to the band's center column,
// where u is the stimulus's perpendicular line coordinate, and reads the phase
// off as a signed offset of the induced dark bands from the geometric line
// continuations. With sin(line_angle) > 0, a positive offset displaces the
// apparent continuation toward smaller x, the direction consistent with the
// classic percept. Rows within n/4 of the grid center enter the fit; the rest
// are dominated by wrap-around effects of the periodic evolution.
inline OffsetReport perceived_offset(const Image& output, const PoggendorffSpec& spec) {
    if (output.n != spec.n)
        throw std::invalid_argument("perceived_offset: output size does not match spec");
    const int n = spec.n;
    const int col = n / 2;
    const double p = spec.classic ? double(n) : spec.line_period;

    double s_c = 0, s_s = 0, s_cc = 0, s_ss = 0, s_cs = 0, s_v = 0, s_vc = 0, s_vs = 0;
    int rows = 0;
    for (int y = n / 4; y < n - n / 4; ++y) {
        const double u = spec.line_coordinate(col, y);
        const double ph = 2 * std::numbers::pi * u / p;
        const double cv = std::cos(ph), sv = std::sin(ph);
        const double v = output.at(y, col);
        s_c += cv;
        s_s += sv;
        s_cc += cv * cv;
        s_ss += sv * sv;
        s_cs += cv * sv;
        s_v += v;
        s_vc += v * cv;
        s_vs += v * sv;
        ++rows;
    }
    // normal equations for [m, a, b]
    double A[3][3] = {{double(rows), s_c, s_s}, {s_c, s_cc, s_cs}, {s_s, s_cs, s_ss}};
    double rhs[3] = {s_v, s_vc, s_vs};
    for (int i = 0; i < 3; ++i) {
        int piv = i;
        for (int r = i + 1; r < 3; ++r)
            if (std::abs(A[r][i]) > std::abs(A[piv][i])) piv = r;
        std::swap(A[i], A[piv]);
        std::swap(rhs[i], rhs[piv]);
        if (std::abs(A[i][i]) < 1e-12) return {};
        for (int r = i + 1; r < 3; ++r) {
            const double f = A[r][i] / A[i][i];
            for (int cidx = i; cidx < 3; ++cidx) A[r][cidx] -= f * A[i][cidx];
            rhs[r] -= f * rhs[i];
        }
    }
    double sol[3];
    for (int i = 2; i >= 0; --i) {
        double acc = rhs[i];
        for (int j = i + 1; j < 3; ++j) acc -= A[i][j] * sol[j];
        sol[i] = acc / A[i][i];
    }
    const double a = sol[1], b = sol[2];

    OffsetReport rep;
    rep.amplitude = std::hypot(a, b);
    const double contrast = std::abs(spec.background - spec.line_value);
    if (rep.amplitude < 0.01 * contrast) return rep;
    rep.propagated = true;
    // dark bands sit where the fit is minimal: a cos + b sin = -R cos(2 pi (u - delta)/p)
    double delta = p / (2 * std::numbers::pi) * std::atan2(-b, -a);
    if (delta >= p / 2) delta -= p;
    if (delta < -p / 2) delta += p;
    rep.offset = delta;
    return rep;
}

// One column per profile plus a shared index column, full double precision.
inline void export_csv(const std::vector<Profile>& profiles, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "index";
    for (const auto& p : profiles) out << ",row_" << p.row;
    out << "\n";
    out.precision(17);
    std::size_t len = 0;
    for (const auto& p : profiles) len = std::max(len, p.values.size());
    for (std::size_t i = 0; i < len; ++i) {
        out << i;
        for (const auto& p : profiles) {
            out << ",";
            if (i < p.values.size()) out << p.values[i];
        }
        out << "\n";
    }
}

// Static line chart with axes, ticks and a legend.
inline void export_svg(const std::vector<Profile>& profiles, const std::string& path) {
    const int W = 820, H = 520;
    const double ml = 70, mr = 20, mt = 20, mb = 50;
    const double pw = W - ml - mr, ph = H - mt - mb;

    double ymin = 0, ymax = 1;
    std::size_t len = 2;
    if (!profiles.empty()) {
        ymin = 1e300;
        ymax = -1e300;
        for (const auto& p : profiles) {
            len = std::max(len, p.values.size());
            for (double v : p.values) {
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
        }
        if (!(ymax > ymin)) {
            ymax = ymin + 1;
            ymin -= 1;
        }
    }
    const char* colors[] = {"#1f6fb2", "#c23b22", "#2e8b57", "#8856a7", "#b8860b", "#444444"};

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    auto xpix = [&](double i) { return ml + pw * i / double(len - 1); };
    auto ypix = [&](double v) { return mt + ph * (1.0 - (v - ymin) / (ymax - ymin)); };
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
        << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fi = len > 1 ? (len - 1) * t / 4.0 : 0;
        const double vx = xpix(fi);
        out << "<line x1=\"" << vx << "\" y1=\"" << mt + ph << "\" x2=\"" << vx << "\" y2=\""
            << mt + ph + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << vx << "\" y=\"" << mt + ph + 20
            << "\" font-size=\"12\" text-anchor=\"middle\">" << int(fi) << "</text>\n";
        const double vv = ymin + (ymax - ymin) * t / 4.0;
        const double vy = ypix(vv);
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << vy << "\" x2=\"" << ml << "\" y2=\"" << vy
            << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << vy + 4
            << "\" font-size=\"12\" text-anchor=\"end\">";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", vv);
        out << buf << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 12
        << "\" font-size=\"13\" text-anchor=\"middle\">pixel index</text>\n"
        << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << mt + ph / 2 << ")\">luminance</text>\n";
    for (std::size_t k = 0; k < profiles.size(); ++k) {
        const auto& p = profiles[k];
        const char* color = colors[k % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < p.values.size(); ++i)
            out << xpix(double(i)) << "," << ypix(p.values[i]) << " ";
        out << "\"/>\n"
            << "<text x=\"" << ml + pw - 8 << "\" y=\"" << mt + 16 + 16 * double(k)
            << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << color << "\">row "
            << p.row << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace cortexlift
