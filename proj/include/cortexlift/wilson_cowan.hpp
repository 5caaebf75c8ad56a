#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cortexlift/fft.hpp"
#include "cortexlift/image.hpp"
#include "cortexlift/lifting.hpp"
#include "cortexlift/parallel.hpp"
#include "cortexlift/sigmoid.hpp"

namespace cortexlift {

struct WCParams {
    double alpha = 5.0;
    double lambda = 0.5;
    double M = 1.0;
    double sigma_mu = 10.0;
    double sigma_omega = 5.0;
    double sigma_theta = std::numbers::pi / 12;
    double dt = 0.15;
    double tau = 1e-2;
    int max_iters = 500;

    void validate() const {
        if (!(alpha > 1.0)) throw std::invalid_argument("params: alpha must exceed 1");
        if (!(lambda >= 0.0)) throw std::invalid_argument("params: lambda must be >= 0");
        if (!(M > 0.0 && M <= 1.0)) throw std::invalid_argument("params: M must be in (0,1]");
        if (!(sigma_mu > 0.0)) throw std::invalid_argument("params: sigma_mu must be positive");
        if (!(sigma_omega > 0.0)) throw std::invalid_argument("params: sigma_omega must be positive");
        if (!(sigma_theta > 0.0)) throw std::invalid_argument("params: sigma_theta must be positive");
        if (!(dt > 0.0)) throw std::invalid_argument("params: dt must be positive");
        if (!(tau > 0.0)) throw std::invalid_argument("params: tau must be positive");
        if (max_iters < 0) throw std::invalid_argument("params: max_iters must be >= 0");
    }
};

// Truncated separable 3D Gaussian (two spatial axes, one angular), unit mass.
// Offsets are kept explicitly; wrapping happens where the kernel is applied.
struct WeightKernel {
    int rs = 0;  // spatial radius, pixels
    int ra = 0;  // angular radius, channels
    std::vector<double> w;

    double at(int l, int dy, int dx) const {
        const int side = 2 * rs + 1;
        return w[(std::size_t(l + ra) * side + (dy + rs)) * side + (dx + rs)];
    }
};

inline WeightKernel build_weight(double sigma_omega, double sigma_theta, int K,
                                 double trunc = 3.0) {
    if (sigma_omega <= 0 || sigma_theta <= 0)
        throw std::invalid_argument("build_weight: stds must be positive");
    if (K < 1) throw std::invalid_argument("build_weight: K must be >= 1");
    const double sig_ch = sigma_theta / (std::numbers::pi / K);
    WeightKernel W;
    W.rs = int(std::floor(trunc * sigma_omega));
    W.ra = int(std::floor(trunc * sig_ch));
    const int side = 2 * W.rs + 1;
    std::vector<double> gs(side), ga(2 * W.ra + 1);
    for (int i = -W.rs; i <= W.rs; ++i)
        gs[i + W.rs] = std::exp(-0.5 * i * i / (sigma_omega * sigma_omega));
    for (int l = -W.ra; l <= W.ra; ++l)
        ga[l + W.ra] = std::exp(-0.5 * l * l / (sig_ch * sig_ch));
    W.w.resize(std::size_t(2 * W.ra + 1) * side * side);
    double mass = 0;
    for (int l = -W.ra; l <= W.ra; ++l)
        for (int dy = -W.rs; dy <= W.rs; ++dy)
            for (int dx = -W.rs; dx <= W.rs; ++dx) {
                const double v = ga[l + W.ra] * gs[dy + W.rs] * gs[dx + W.rs];
                W.w[(std::size_t(l + W.ra) * side + (dy + W.rs)) * side + (dx + W.rs)] = v;
                mass += v;
            }
    for (double& v : W.w) v /= mass;
    return W;
}

namespace detail {

inline int imod(int a, int m) { return ((a % m) + m) % m; }

// Kernel embedded on the full periodic grid, transformed; the spectrum is
// real because the embedded kernel is even under joint negation.
inline std::vector<double> weight_spectrum(const WeightKernel& W, int N, int K) {
    std::vector<double> emb(std::size_t(K) * N * N, 0.0);
    for (int l = -W.ra; l <= W.ra; ++l)
        for (int dy = -W.rs; dy <= W.rs; ++dy)
            for (int dx = -W.rs; dx <= W.rs; ++dx)
                emb[(std::size_t(imod(l, K)) * N + imod(dy, N)) * N + imod(dx, N)] +=
                    W.at(l, dy, dx);
    const std::size_t nc = std::size_t(K) * N * (N / 2 + 1);
    std::vector<std::complex<double>> spec(nc);
    fft_forward({K, N, N}, emb.data(), spec.data());
    std::vector<double> re(nc);
    double worst = 0;
    for (std::size_t i = 0; i < nc; ++i) {
        re[i] = spec[i].real();
        worst = std::max(worst, std::abs(spec[i].imag()));
    }
    if (worst > 1e-9) throw std::runtime_error("weight_spectrum: kernel not even");
    return re;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Shared core of the polynomial fast path. sigma(F(p)-F(q)) expands
// binomially, so the interaction becomes sum_i (-1)^i (W * F^i)(p) S_i(F(p))
// with one periodic convolution per power; the matching antiderivative
// accumulation yields the interaction part of the energy for the same
// polynomial, keeping the traced energy an exact Lyapunov function of the
// discrete flow. Returns the interaction field through R; adds the energy
// sum Sigma W*Primitive over all pairs through e_int if non-null.
inline void fast_interaction(const LiftedField& F, const std::vector<double>& wspec,
                             const OddPolyFit& fit, LiftedField& R, double* e_int) {
    const int N = F.n, K = F.k;
    const int d = fit.degree;
    const std::size_t nvox = F.v.size();
    const std::array<int, 3> dims{K, N, N};
    const std::size_t nc = std::size_t(K) * N * (N / 2 + 1);

    std::vector<std::vector<double>> scoef(d + 1), tcoef(d + 3);
    {
        std::vector<std::vector<double>> binom(d + 2, std::vector<double>(d + 2, 0.0));
        for (int i = 0; i <= d + 1; ++i) {
            binom[i][0] = 1;
            for (int j = 1; j <= i; ++j) binom[i][j] = binom[i - 1][j - 1] + binom[i - 1][j];
        }
        for (int i = 0; i <= d; ++i) {
            scoef[i].assign(d - i + 1, 0.0);
            for (int j = 1; j <= d; j += 2)
                if (j >= i) scoef[i][j - i] = fit.coeff[j] * binom[j][i];
        }
        for (int i = 0; i <= d + 1; ++i) {
            tcoef[i].assign(d + 2 - i, 0.0);
            for (int j = 1; j <= d; j += 2)
                if (j + 1 >= i) tcoef[i][j + 1 - i] = fit.coeff[j] / (j + 1) * binom[j + 1][i];
        }
    }
    auto horner = [](const std::vector<double>& c, double t) {
        double acc = 0;
        for (std::size_t q = c.size(); q-- > 0;) acc = acc * t + c[q];
        return acc;
    };

    R = LiftedField(N, K);
    double energy_acc = 0;
    // i = 0: the convolution of F^0 against a unit-mass kernel is 1.
    parallel_for(0, nvox, [&](std::size_t p) { R.v[p] = horner(scoef[0], F.v[p]); });
    if (e_int)
        for (std::size_t p = 0; p < nvox; ++p) energy_acc += horner(tcoef[0], F.v[p]);

    std::vector<double> power(F.v);
    std::vector<double> conv(nvox);
    std::vector<std::complex<double>> spec(nc);
    const int top = e_int ? d + 1 : d;
    for (int i = 1; i <= top; ++i) {
        if (i > 1)
            parallel_for(0, nvox, [&](std::size_t p) { power[p] *= F.v[p]; });
        fft_forward(dims, power.data(), spec.data());
        for (std::size_t q = 0; q < nc; ++q) spec[q] *= wspec[q];
        fft_backward(dims, spec.data(), conv.data());
        const double sign = (i % 2) ? -1.0 : 1.0;
        if (i <= d)
            parallel_for(0, nvox, [&](std::size_t p) {
                R.v[p] += sign * conv[p] * horner(scoef[i], F.v[p]);
            });
        if (e_int) {
            double acc = 0;
            for (std::size_t p = 0; p < nvox; ++p) acc += conv[p] * horner(tcoef[i], F.v[p]);
            energy_acc += sign * acc;
        }
    }
    if (e_int) *e_int = energy_acc;
}

}  // namespace detail

// Exact interaction sum over the truncated kernel support, periodic on all
// axes. Intended as the oracle for small instances.
inline LiftedField interaction_direct(const LiftedField& F, const WeightKernel& W,
                                      double alpha) {
    const int N = F.n, K = F.k;
    LiftedField R(N, K);
    parallel_for(0, F.v.size(), [&](std::size_t p) {
        const int x = int(p % N);
        const int y = int((p / N) % N);
        const int c = int(p / (std::size_t(N) * N));
        const double fp = F.v[p];
        double acc = 0;
        for (int l = -W.ra; l <= W.ra; ++l) {
            const int cc = detail::imod(c - l, K);
            for (int dy = -W.rs; dy <= W.rs; ++dy) {
                const int yy = detail::imod(y - dy, N);
                for (int dx = -W.rs; dx <= W.rs; ++dx) {
                    const int xx = detail::imod(x - dx, N);
                    acc += W.at(l, dy, dx) * sigmoid(fp - F.at(cc, yy, xx), alpha);
                }
            }
        }
        R.v[p] = acc;
    });
    return R;
}

// Fast interaction via the odd polynomial expansion on [-B, B] with
// B = 2 max|F|; a zero field (B = 0) maps to a zero interaction.
inline LiftedField interaction_fast(const LiftedField& F, const WeightKernel& W, double alpha,
                                    int degree = 11) {
    const double B = 2.0 * detail::max_abs(F.v);
    LiftedField R(F.n, F.k);
    if (B == 0) return R;
    const OddPolyFit fit = fit_sigmoid_poly(alpha, B, degree);
    const std::vector<double> wspec = detail::weight_spectrum(W, F.n, F.k);
    detail::fast_interaction(F, wspec, fit, R, nullptr);
    return R;
}

// Exact energy: 1/2 ||F-G0||^2 + lambda/2 ||F-F0||^2
//             - 1/(4M) sum_p sum_offsets W * Primitive(F(p)-F(q)).
inline double energy(const LiftedField& F, const LiftedField& F0, const LiftedField& G0,
                     const WeightKernel& W, const WCParams& p) {
    const int N = F.n, K = F.k;
    double quad = 0;
    for (std::size_t i = 0; i < F.v.size(); ++i) {
        const double dg = F.v[i] - G0.v[i];
        const double df = F.v[i] - F0.v[i];
        quad += 0.5 * dg * dg + 0.5 * p.lambda * df * df;
    }
    double inter = 0;
    for (int c = 0; c < K; ++c)
        for (int y = 0; y < N; ++y)
            for (int x = 0; x < N; ++x) {
                const double fp = F.at(c, y, x);
                for (int l = -W.ra; l <= W.ra; ++l) {
                    const int cc = detail::imod(c - l, K);
                    for (int dy = -W.rs; dy <= W.rs; ++dy) {
                        const int yy = detail::imod(y - dy, N);
                        for (int dx = -W.rs; dx <= W.rs; ++dx) {
                            const int xx = detail::imod(x - dx, N);
                            inter += W.at(l, dy, dx) *
                                     sigmoid_primitive(fp - F.at(cc, yy, xx), p.alpha);
                        }
                    }
                }
            }
    return quad - inter / (4.0 * p.M);
}

struct EvolutionState {
    LiftedField F, F0, G0;
    int iter = 0;
    double last_rel_change = std::numeric_limits<double>::infinity();
    std::vector<double> energy_trace;
    std::vector<double> rel_change_trace;
    bool converged = false;
    int degree = 11;

    // per-run caches for the fast path
    OddPolyFit fit;
    std::vector<double> wspec;
};

inline double energy(const EvolutionState& st, const WeightKernel& W, const WCParams& p) {
    return energy(st.F, st.F0, st.G0, W, p);
}

namespace detail {

// The expansion interval is frozen per run from data-independent bounds:
// the explicit scheme keeps |F| <= Bf whenever dt(1+lambda) <= 1, since the
// update is a convex combination of F and terms bounded by
// max|G0| + lambda max|F0| + 1/(2M). The factor 2.1 leaves headroom for the
// pairwise differences (<= 2 Bf) plus polynomial overshoot.
inline void prepare_fast(EvolutionState& st, const WeightKernel& W, const WCParams& p) {
    if (st.wspec.empty()) st.wspec = weight_spectrum(W, st.F.n, st.F.k);
    if (st.fit.B == 0) {
        const double m0 = max_abs(st.F0.v);
        const double g0 = max_abs(st.G0.v);
        const double Bf =
            std::max(m0, (g0 + p.lambda * m0 + 0.5 / p.M) / (1.0 + p.lambda));
        const double B = 2.1 * std::max(Bf, 1e-12);
        st.fit = fit_sigmoid_poly(p.alpha, B, st.degree);
    }
}

}  // namespace detail

// One explicit Euler update
//   F <- F + dt (-(1+lambda) F + G0 + lambda F0 + R_F / (2M)).
// The energy of the pre-update field is appended to the trace; the fast path
// evaluates it with the same polynomial surrogate that drives the update.
inline void evolve_step(EvolutionState& st, const WeightKernel& W, const WCParams& p,
                        bool fast = true) {
    const std::size_t nvox = st.F.v.size();
    LiftedField R;
    double e = 0;
    if (fast) {
        detail::prepare_fast(st, W, p);
        double e_int = 0;
        detail::fast_interaction(st.F, st.wspec, st.fit, R, &e_int);
        double quad = 0;
        for (std::size_t i = 0; i < nvox; ++i) {
            const double dg = st.F.v[i] - st.G0.v[i];
            const double df = st.F.v[i] - st.F0.v[i];
            quad += 0.5 * dg * dg + 0.5 * p.lambda * df * df;
        }
        e = quad - e_int / (4.0 * p.M);
    } else {
        R = interaction_direct(st.F, W, p.alpha);
        e = energy(st, W, p);
    }
    st.energy_trace.push_back(e);

    double norm2 = 0, diff2 = 0;
    std::vector<double> next(nvox);
    parallel_for(0, nvox, [&](std::size_t i) {
        next[i] = st.F.v[i] + p.dt * (-(1.0 + p.lambda) * st.F.v[i] + st.G0.v[i] +
                                      p.lambda * st.F0.v[i] + R.v[i] / (2.0 * p.M));
    });
    for (std::size_t i = 0; i < nvox; ++i) {
        norm2 += st.F.v[i] * st.F.v[i];
        const double d = next[i] - st.F.v[i];
        diff2 += d * d;
    }
    st.F.v.swap(next);
    st.last_rel_change = norm2 > 0 ? std::sqrt(diff2 / norm2) : std::sqrt(diff2);
    st.rel_change_trace.push_back(st.last_rel_change);
    ++st.iter;
}

// Convergence log: one row per executed step with the pre-update energy.
inline void write_energy_csv(const EvolutionState& st, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "iter,energy,rel_change\n";
    out.precision(17);
    for (std::size_t i = 0; i < st.energy_trace.size(); ++i)
        out << i << "," << st.energy_trace[i] << "," << st.rel_change_trace[i] << "\n";
}

inline void run_state(EvolutionState& st, const WeightKernel& W, const WCParams& p,
                      bool fast) {
    while (st.iter < p.max_iters) {
        evolve_step(st, W, p, fast);
        if (st.last_rel_change <= p.tau) {
            st.converged = true;
            break;
        }
    }
    if (p.max_iters == 0) st.converged = true;
}

// Full orientation-lifted run: blur for the local mean, lift stimulus and
// mean, descend from F = F0 until the relative step drops below tau.
inline std::pair<Image, EvolutionState> run_evolution(const Image& f0,
                                                      const CakeWaveletStack& stack,
                                                      const WCParams& p, bool fast = true,
                                                      int degree = 11) {
    p.validate();
    EvolutionState st;
    st.degree = degree;
    const Image mu = gaussian_blur(f0, p.sigma_mu);
    st.F0 = lift(f0, stack);
    st.G0 = lift(mu, stack);
    st.F = st.F0;
    const WeightKernel W = build_weight(p.sigma_omega, p.sigma_theta, stack.k);
    run_state(st, W, p, fast);
    return {project(st.F), std::move(st)};
}

// Orientation-free baseline: the same update on a single channel with the
// identity lift (F0 = f0, G0 = blurred f0) and a purely spatial kernel.
inline std::pair<Image, EvolutionState> run_evolution_2d(const Image& f0, const WCParams& p,
                                                         bool fast = true, int degree = 11) {
    p.validate();
    EvolutionState st;
    st.degree = degree;
    const Image mu = gaussian_blur(f0, p.sigma_mu);
    st.F0 = LiftedField(f0.n, 1);
    st.F0.v = f0.v;
    st.G0 = LiftedField(f0.n, 1);
    st.G0.v = mu.v;
    st.F = st.F0;
    const WeightKernel W = build_weight(p.sigma_omega, p.sigma_theta, 1);
    run_state(st, W, p, fast);
    return {project(st.F), std::move(st)};
}

}  // namespace cortexlift
