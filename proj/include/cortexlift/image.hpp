#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <png.h>

#include "cortexlift/fft.hpp"

namespace cortexlift {

// Square grid of normalized luminances. Values are in [0,1] for freshly
// loaded or generated images; evolved or projected images may leave that
// range and carry no range invariant.
struct Image {
    int n = 0;
    std::vector<double> v;

    Image() = default;
    explicit Image(int size, double fill = 0.0) : n(size), v(std::size_t(size) * size, fill) {}

    double& at(int y, int x) { return v[std::size_t(y) * n + x]; }
    double at(int y, int x) const { return v[std::size_t(y) * n + x]; }
};

inline std::uint8_t quantize_byte(double x) {
    double c = std::clamp(x, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

namespace detail {

inline bool ends_with(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

inline std::vector<std::uint8_t> to_bytes(const Image& img, bool rescale, double& mn, double& mx) {
    mn = *std::min_element(img.v.begin(), img.v.end());
    mx = *std::max_element(img.v.begin(), img.v.end());
    std::vector<std::uint8_t> bytes(img.v.size());
    if (rescale && mx > mn) {
        const double s = 255.0 / (mx - mn);
        for (std::size_t i = 0; i < img.v.size(); ++i)
            bytes[i] = static_cast<std::uint8_t>(std::lround((img.v[i] - mn) * s));
    } else if (rescale) {
        std::fill(bytes.begin(), bytes.end(), std::uint8_t(0));
    } else {
        for (std::size_t i = 0; i < img.v.size(); ++i) bytes[i] = quantize_byte(img.v[i]);
    }
    return bytes;
}

inline void write_pgm(const std::string& path, int n, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "P5\n" << n << " " << n << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw std::runtime_error("short write on " + path);
}

inline void write_png(const std::string& path, int n, const std::vector<std::uint8_t>& bytes) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("png init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("png write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, png_uint_32(n), png_uint_32(n), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < n; ++y)
        png_write_row(png, const_cast<png_bytep>(bytes.data() + std::size_t(y) * n));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

inline std::vector<std::uint8_t> read_png(const std::string& path, int& n) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw std::runtime_error("cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("png init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("png read failed: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (w != h) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error(path + ": image must be square");
    }
    if (color != PNG_COLOR_TYPE_GRAY || depth != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error(path + ": image must be 8-bit grayscale");
    }
    n = int(w);
    std::vector<std::uint8_t> bytes(std::size_t(n) * n);
    for (int y = 0; y < n; ++y) png_read_row(png, bytes.data() + std::size_t(y) * n, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return bytes;
}

inline std::vector<std::uint8_t> read_pgm(const std::string& path, int& n) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error(path + ": expected binary PGM (P5)");
    auto next_int = [&in, &path]() {
        int c = in.peek();
        while (c == '#' || std::isspace(c)) {
            if (c == '#') in.ignore(1 << 16, '\n');
            else in.ignore(1);
            c = in.peek();
        }
        long v = -1;
        in >> v;
        if (!in || v < 0) throw std::runtime_error(path + ": malformed PGM header");
        return v;
    };
    const long w = next_int(), h = next_int(), maxval = next_int();
    if (w != h) throw std::runtime_error(path + ": image must be square");
    if (maxval != 255) throw std::runtime_error(path + ": image must be 8-bit grayscale");
    in.ignore(1);
    n = int(w);
    std::vector<std::uint8_t> bytes(std::size_t(n) * n);
    in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(bytes.size()));
    if (in.gcount() != std::streamsize(bytes.size()))
        throw std::runtime_error(path + ": truncated pixel data");
    return bytes;
}

}  // namespace detail

inline Image load_image(const std::string& path) {
    int n = 0;
    std::vector<std::uint8_t> bytes = detail::ends_with(path, ".pgm")
                                          ? detail::read_pgm(path, n)
                                          : detail::read_png(path, n);
    Image img(n);
    for (std::size_t i = 0; i < bytes.size(); ++i) img.v[i] = bytes[i] / 255.0;
    return img;
}

// With rescale, min maps to 0 and max to 255 and the endpoints land in a
// sidecar "<path>.minmax"; otherwise values are clipped to [0,1] and
// quantized. Format picked by extension (.pgm, else PNG).
inline void save_image(const Image& img, const std::string& path, bool rescale = false) {
    double mn = 0, mx = 0;
    std::vector<std::uint8_t> bytes = detail::to_bytes(img, rescale, mn, mx);
    if (detail::ends_with(path, ".pgm")) detail::write_pgm(path, img.n, bytes);
    else detail::write_png(path, img.n, bytes);
    if (rescale) {
        std::ofstream side(path + ".minmax");
        if (!side) throw std::runtime_error("cannot write sidecar for " + path);
        side.precision(17);
        side << "min=" << mn << "\nmax=" << mx << "\n";
    }
}

// Unit-mass sampled Gaussian over the whole periodic grid (distances wrap),
// applied as a Fourier multiplier so the convolution is exactly circular.
inline Image gaussian_blur(const Image& img, double sigma) {
    if (sigma <= 0) throw std::invalid_argument("gaussian_blur: sigma must be positive");
    const int n = img.n;
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        const double d = std::min(i, n - i);
        g[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    }
    std::vector<double> kern(std::size_t(n) * n);
    double mass = 0;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            kern[std::size_t(y) * n + x] = g[y] * g[x];
            mass += g[y] * g[x];
        }
    for (double& k : kern) k /= mass;

    const std::array<int, 3> dims{1, n, n};
    const std::size_t nc = std::size_t(n) * (n / 2 + 1);
    std::vector<std::complex<double>> fk(nc), fi(nc);
    fft_forward(dims, kern.data(), fk.data());
    fft_forward(dims, img.v.data(), fi.data());
    for (std::size_t i = 0; i < nc; ++i) fi[i] *= fk[i];
    Image out(n);
    fft_backward(dims, fi.data(), out.v.data());
    return out;
}

}  // namespace cortexlift
