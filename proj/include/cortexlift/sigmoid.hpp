#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cortexlift {

// Piecewise-affine saturation: min{1, max{alpha*rho, -1}}.
inline double sigmoid(double rho, double alpha) {
    return std::clamp(alpha * rho, -1.0, 1.0);
}

// Primitive of sigmoid with value 0 at 0; even and convex.
inline double sigmoid_primitive(double rho, double alpha) {
    const double a = std::abs(rho);
    if (a <= 1.0 / alpha) return 0.5 * alpha * rho * rho;
    return a - 0.5 / alpha;
}

// Odd polynomial approximation of the sigmoid on [-B, B]:
// p(t) = sum_j coeff[j] t^j with only odd j populated.
struct OddPolyFit {
    int degree = 0;
    double B = 0;
    std::vector<double> coeff;  // size degree+1, even entries zero
    double sup_err = 0;

    double eval(double t) const {
        double acc = 0;
        for (int j = degree; j >= 0; --j) acc = acc * t + coeff[j];
        return acc;
    }
};

namespace detail {

// Least squares via Householder QR; A is m x n column-major, m >= n.
inline std::vector<double> qr_solve(std::vector<double> A, std::vector<double> b, int m, int n) {
    std::vector<double> beta(n);
    for (int j = 0; j < n; ++j) {
        double* col = A.data() + std::size_t(j) * m;
        double norm = 0;
        for (int i = j; i < m; ++i) norm += col[i] * col[i];
        norm = std::sqrt(norm);
        if (norm == 0) throw std::runtime_error("qr_solve: rank-deficient system");
        const double alpha = col[j] >= 0 ? -norm : norm;
        const double v0 = col[j] - alpha;
        double vnorm2 = v0 * v0;
        for (int i = j + 1; i < m; ++i) vnorm2 += col[i] * col[i];
        beta[j] = alpha;
        col[j] = v0;
        if (vnorm2 == 0) continue;
        for (int jj = j + 1; jj < n; ++jj) {
            double* c2 = A.data() + std::size_t(jj) * m;
            double dot = 0;
            for (int i = j; i < m; ++i) dot += col[i] * c2[i];
            const double s = 2.0 * dot / vnorm2;
            for (int i = j; i < m; ++i) c2[i] -= s * col[i];
        }
        double dot = 0;
        for (int i = j; i < m; ++i) dot += col[i] * b[i];
        const double s = 2.0 * dot / vnorm2;
        for (int i = j; i < m; ++i) b[i] -= s * col[i];
    }
    std::vector<double> x(n);
    for (int j = n - 1; j >= 0; --j) {
        double acc = b[j];
        for (int jj = j + 1; jj < n; ++jj) acc -= A[std::size_t(jj) * m + j] * x[jj];
        x[j] = acc / beta[j];
    }
    return x;
}

}  // namespace detail

// Fits the odd monomials t, t^3, ..., t^degree to the sigmoid at Chebyshev
// nodes of [-B, B], working in the scaled variable t/B for conditioning.
inline OddPolyFit fit_sigmoid_poly(double alpha, double B, int degree) {
    if (degree < 1 || degree % 2 == 0)
        throw std::invalid_argument("fit_sigmoid_poly: degree must be odd and >= 1");
    if (B <= 0) throw std::invalid_argument("fit_sigmoid_poly: B must be positive");

    const int m = 2000;
    const int nb = (degree + 1) / 2;
    std::vector<double> A(std::size_t(m) * nb), rhs(m), nodes(m);
    for (int i = 0; i < m; ++i) {
        const double u = std::cos(std::numbers::pi * (i + 0.5) / (2.0 * m));
        nodes[i] = u;
        rhs[i] = sigmoid(B * u, alpha);
        double p = u;
        for (int j = 0; j < nb; ++j) {
            A[std::size_t(j) * m + i] = p;
            p *= u * u;
        }
    }
    std::vector<double> cu = detail::qr_solve(std::move(A), std::move(rhs), m, nb);

    OddPolyFit fit;
    fit.degree = degree;
    fit.B = B;
    fit.coeff.assign(degree + 1, 0.0);
    double scale = 1.0 / B;
    for (int j = 0; j < nb; ++j) {
        fit.coeff[2 * j + 1] = cu[j] * scale;
        scale /= B * B;
    }
    double sup = 0;
    for (int i = 0; i <= 4000; ++i) {
        const double t = B * (i / 2000.0 - 1.0);
        sup = std::max(sup, std::abs(fit.eval(t) - sigmoid(t, alpha)));
    }
    fit.sup_err = sup;
    return fit;
}

}  // namespace cortexlift
