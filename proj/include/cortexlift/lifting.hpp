#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "cortexlift/fft.hpp"
#include "cortexlift/image.hpp"
#include "cortexlift/parallel.hpp"

namespace cortexlift {

// Orientation-score volume: K channels of N x N values, channel c holding the
// response at orientation theta_c = c*pi/K. All three axes are periodic.
struct LiftedField {
    int n = 0;
    int k = 0;
    std::vector<double> v;

    LiftedField() = default;
    LiftedField(int size, int channels, double fill = 0.0)
        : n(size), k(channels), v(std::size_t(channels) * size * size, fill) {}

    std::size_t plane() const { return std::size_t(n) * n; }
    double* channel(int c) { return v.data() + plane() * c; }
    const double* channel(int c) const { return v.data() + plane() * c; }
    double& at(int c, int y, int x) { return v[plane() * c + std::size_t(y) * n + x]; }
    double at(int c, int y, int x) const { return v[plane() * c + std::size_t(y) * n + x]; }
};

// Centered cardinal B-spline of order n; support [-(n+1)/2, (n+1)/2].
inline double bspline(int n, double x) {
    if (n == 0) return (x >= -0.5 && x < 0.5) ? 1.0 : 0.0;
    const double a = x + (n + 1) * 0.5;
    const double b = (n + 1) * 0.5 - x;
    return (a * bspline(n - 1, x + 0.5) + b * bspline(n - 1, x - 0.5)) / n;
}

// Fourier-domain filter bank whose angular slices tile the frequency plane.
struct CakeWaveletStack {
    int n = 0;
    int k = 0;
    int bw = 0;
    bool taper = false;
    std::vector<double> kernels;  // k * n * n, row-major per channel

    double at(int c, int a, int b) const {
        return kernels[(std::size_t(c) * n + a) * n + b];
    }
};

namespace detail {

// Angular bump for channel c: a B-spline in the polar angle plus its
// antipodal copy, summed over wrapped representatives so the tiling stays
// exact even when the support exceeds the half-circle.
inline double cake_profile(double phi, int c, int K, int bw) {
    const double h = std::numbers::pi / K;
    const double theta = c * h;
    double s = 0;
    for (int half = 0; half < 2; ++half) {
        double d = phi - theta - half * std::numbers::pi;
        d = std::remainder(d, 2 * std::numbers::pi);
        for (int j = -1; j <= 1; ++j) s += bspline(bw, (d - 2 * std::numbers::pi * j) / h);
    }
    return s;
}

}  // namespace detail

// Builds the K Fourier-domain kernels. Frequencies whose coordinate sits on
// the Nyquist line of an even grid are angularly ambiguous (+N/2 and -N/2
// alias to the same bin), so the profile is averaged over all alias angles;
// this keeps the stack exactly even and makes the lift commute with
// quarter-turn rotations. The DC bin gets exactly 1/K in every kernel.
inline CakeWaveletStack build_cake_stack(int N, int K, int bw, bool taper = false) {
    if (K < 2) throw std::invalid_argument("build_cake_stack: need K >= 2");
    if (N < 8 || N % 2 != 0) throw std::invalid_argument("build_cake_stack: need even N >= 8");
    if (bw < 1) throw std::invalid_argument("build_cake_stack: need bw >= 1");

    CakeWaveletStack st;
    st.n = N;
    st.k = K;
    st.bw = bw;
    st.taper = taper;
    st.kernels.assign(std::size_t(K) * N * N, 0.0);

    const int ny = N / 2;
    auto freq_of = [N, ny](int idx) { return idx <= ny ? idx : idx - N; };

    for (int a = 0; a < N; ++a) {
        const int fy = freq_of(a);
        const bool yamb = std::abs(fy) == ny;
        for (int b = 0; b < N; ++b) {
            const int fx = freq_of(b);
            const bool xamb = std::abs(fx) == ny;
            if (fy == 0 && fx == 0) {
                for (int c = 0; c < K; ++c)
                    st.kernels[(std::size_t(c) * N + a) * N + b] = 1.0 / K;
                continue;
            }
            const double ys[2] = {double(fy), double(-fy)};
            const double xs[2] = {double(fx), double(-fx)};
            const int nys = yamb ? 2 : 1;
            const int nxs = xamb ? 2 : 1;
            double tap = 1.0;
            if (taper) {
                const double r = std::hypot(double(fy), double(fx));
                const double r0 = 0.6 * ny, r1 = double(ny);
                if (r >= r1) tap = 0.0;
                else if (r > r0) {
                    const double t = (r - r0) / (r1 - r0);
                    const double cs = std::cos(0.5 * std::numbers::pi * t);
                    tap = cs * cs;
                }
            }
            for (int c = 0; c < K; ++c) {
                double acc = 0;
                for (int iy = 0; iy < nys; ++iy)
                    for (int ix = 0; ix < nxs; ++ix)
                        acc += detail::cake_profile(std::atan2(ys[iy], xs[ix]), c, K, bw);
                st.kernels[(std::size_t(c) * N + a) * N + b] = tap * acc / (nys * nxs);
            }
        }
    }
    return st;
}

// Lift: per channel, multiply the image spectrum by the kernel and transform
// back. Kernels are real and even, so the result is real by construction.
inline LiftedField lift(const Image& img, const CakeWaveletStack& st) {
    if (img.n != st.n) throw std::invalid_argument("lift: image/stack size mismatch");
    const int N = st.n;
    const std::array<int, 3> dims{1, N, N};
    const int hw = N / 2 + 1;
    std::vector<std::complex<double>> spec(std::size_t(N) * hw);
    fft_forward(dims, img.v.data(), spec.data());

    LiftedField out(N, st.k);
    std::vector<std::complex<double>> tmp(spec.size());
    for (int c = 0; c < st.k; ++c) {
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < hw; ++b)
                tmp[std::size_t(a) * hw + b] = spec[std::size_t(a) * hw + b] * st.at(c, a, b);
        fft_backward(dims, tmp.data(), out.channel(c));
    }
    return out;
}

// Projection: plain unweighted sum over orientation channels.
inline Image project(const LiftedField& f) {
    Image out(f.n);
    const std::size_t plane = f.plane();
    for (int c = 0; c < f.k; ++c) {
        const double* ch = f.channel(c);
        for (std::size_t i = 0; i < plane; ++i) out.v[i] += ch[i];
    }
    return out;
}

// Spatial-domain kernel of one channel (inverse transform of the filter).
inline std::vector<double> spatial_kernel(const CakeWaveletStack& st, int c) {
    const int N = st.n;
    const int hw = N / 2 + 1;
    std::vector<std::complex<double>> spec(std::size_t(N) * hw);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < hw; ++b) spec[std::size_t(a) * hw + b] = st.at(c, a, b);
    std::vector<double> out(std::size_t(N) * N);
    fft_backward({1, N, N}, spec.data(), out.data());
    return out;
}

inline void dump_field(const LiftedField& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "LF1 N=" << f.n << " K=" << f.k << "\n";
    out.write(reinterpret_cast<const char*>(f.v.data()),
              std::streamsize(f.v.size() * sizeof(double)));
    if (!out) throw std::runtime_error("short write on " + path);
}

inline LiftedField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string header;
    std::getline(in, header);
    int n = 0, k = 0;
    if (std::sscanf(header.c_str(), "LF1 N=%d K=%d", &n, &k) != 2 || n <= 0 || k <= 0)
        throw std::runtime_error(path + ": bad field header");
    LiftedField f(n, k);
    in.read(reinterpret_cast<char*>(f.v.data()), std::streamsize(f.v.size() * sizeof(double)));
    if (in.gcount() != std::streamsize(f.v.size() * sizeof(double)))
        throw std::runtime_error(path + ": truncated field data");
    return f;
}

}  // namespace cortexlift
