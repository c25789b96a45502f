#pragma once

// Independent oracles used by the test suites. Everything here is computed
// from first principles (closed forms, brute-force linear algebra) and stays
// off the library's production code paths.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "fockforge/states.hpp"

namespace oracles {

using cplx = std::complex<double>;

/// Poisson law e^{-|a|^2} |a|^{2n} / n!
inline double poisson_pn(double alpha_abs, int n) {
    double l = alpha_abs * alpha_abs;
    if (l == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(-l + n * std::log(l) - std::lgamma(n + 1.0));
}

/// <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)
inline cplx coherent_overlap(cplx a, cplx b) {
    return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

/// Dense real matrix, row-major.
struct RealMatrix {
    int n = 0;
    std::vector<double> e;
    explicit RealMatrix(int n_) : n(n_), e(static_cast<size_t>(n_) * n_, 0.0) {}
    double& at(int r, int c) { return e[static_cast<size_t>(r) * n + c]; }
    double at(int r, int c) const { return e[static_cast<size_t>(r) * n + c]; }
};

inline RealMatrix matmul(const RealMatrix& a, const RealMatrix& b) {
    RealMatrix out(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int k = 0; k < a.n; ++k) {
            double w = a.at(i, k);
            if (w == 0.0) continue;
            for (int j = 0; j < a.n; ++j) out.at(i, j) += w * b.at(k, j);
        }
    return out;
}

/// Brute-force displacement matrix exp(beta (a+ - a)) by scaling-and-squaring
/// on the tridiagonal generator with a Taylor core.
inline RealMatrix displacement_expm(double beta, int cutoff) {
    RealMatrix g(cutoff);
    for (int n = 1; n < cutoff; ++n) g.at(n, n - 1) = beta * std::sqrt(static_cast<double>(n));
    for (int n = 0; n + 1 < cutoff; ++n)
        g.at(n, n + 1) = -beta * std::sqrt(static_cast<double>(n) + 1.0);

    double norm = 0.0;
    for (int r = 0; r < cutoff; ++r) {
        double s = 0.0;
        for (int c = 0; c < cutoff; ++c) s += std::abs(g.at(r, c));
        norm = std::max(norm, s);
    }
    int squarings = 0;
    while (norm > 0.25) {
        norm /= 2.0;
        ++squarings;
    }
    double scale = std::ldexp(1.0, -squarings);
    for (auto& v : g.e) v *= scale;

    RealMatrix result(cutoff), term(cutoff);
    for (int i = 0; i < cutoff; ++i) {
        result.at(i, i) = 1.0;
        term.at(i, i) = 1.0;
    }
    for (int k = 1; k <= 30; ++k) {
        term = matmul(term, g);
        for (auto& v : term.e) v /= k;
        for (size_t i = 0; i < result.e.size(); ++i) result.e[i] += term.e[i];
    }
    for (int s = 0; s < squarings; ++s) result = matmul(result, result);
    return result;
}

/// Direct double-sum evaluation of the two-step fidelity
///   P_N = | e^{-|a|^2/2} sum_n a^n/sqrt(n!) e^{-i chi1 n(n-1)}
///              sum_r D_N^r(b2) D_r^n(b1) e^{-i chi2 r(r-1)} |^2
/// with the displacement elements taken from the expm oracle, not from the
/// production Laguerre path.
inline double nested_sum_p2(double alpha, double b1, double b2, double chi1, double chi2, int N,
                            int cutoff) {
    RealMatrix d1 = displacement_expm(b1, cutoff);
    RealMatrix d2 = displacement_expm(b2, cutoff);
    cplx total{0.0, 0.0};
    for (int n = 0; n < cutoff; ++n) {
        cplx outer = std::exp(-0.5 * alpha * alpha + n * std::log(std::max(alpha, 1e-300)) -
                              0.5 * std::lgamma(n + 1.0)) *
                     std::polar(1.0, -chi1 * n * (n - 1.0));
        cplx inner{0.0, 0.0};
        for (int r = 0; r < cutoff; ++r)
            inner += d2.at(N, r) * d1.at(r, n) * std::polar(1.0, -chi2 * r * (r - 1.0));
        total += outer * inner;
    }
    return std::norm(total);
}

/// Wigner function of |1> in the W_n(0,0) = (-1)^n/pi convention:
/// (1/pi)(2 r^2 - 1) e^{-r^2}
inline double wigner_fock1(double x, double p) {
    double r2 = x * x + p * p;
    return std::numbers::inv_pi * (2.0 * r2 - 1.0) * std::exp(-r2);
}

/// Smallest eigenvalue estimate of a Hermitian density matrix via power
/// iteration on 2I - rho.
inline double min_eigenvalue(const fockforge::DensityMatrix& rho, unsigned seed = 7) {
    const int c = rho.cutoff();
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> v(static_cast<size_t>(c));
    for (auto& x : v) x = cplx{u(rng), u(rng)};

    double lambda = 0.0;
    for (int it = 0; it < 300; ++it) {
        std::vector<cplx> w(static_cast<size_t>(c), cplx{0.0, 0.0});
        for (int n = 0; n < c; ++n) {
            cplx acc = 2.0 * v[static_cast<size_t>(n)];
            for (int m = 0; m < c; ++m) acc -= rho.at(n, m) * v[static_cast<size_t>(m)];
            w[static_cast<size_t>(n)] = acc;
        }
        double norm = 0.0;
        for (const auto& x : w) norm += std::norm(x);
        norm = std::sqrt(norm);
        for (auto& x : w) x /= norm;
        lambda = norm;  // Rayleigh growth factor once v is normalized
        v = std::move(w);
    }
    return 2.0 - lambda;
}

/// Yurke-Stoler reference (e^{-i pi/4}|i a> + e^{i pi/4}|-i a>)/sqrt(2),
/// built from two coherent expansions and renormalized over the truncation.
inline fockforge::PureState yurke_stoler_reference(cplx alpha, const fockforge::HilbertSpace& sp) {
    auto plus = fockforge::coherent_state(cplx{0.0, 1.0} * alpha, sp);
    auto minus = fockforge::coherent_state(cplx{0.0, -1.0} * alpha, sp);
    std::vector<cplx> amps(static_cast<size_t>(sp.cutoff()));
    const cplx w1 = std::polar(1.0 / std::numbers::sqrt2, -std::numbers::pi / 4.0);
    const cplx w2 = std::polar(1.0 / std::numbers::sqrt2, std::numbers::pi / 4.0);
    for (int n = 0; n < sp.cutoff(); ++n)
        amps[static_cast<size_t>(n)] = w1 * plus.amplitude(n) + w2 * minus.amplitude(n);
    return fockforge::renormalized(sp, std::move(amps));
}

}  // namespace oracles
