#pragma once

#include <cmath>
#include <vector>

namespace fockforge {

/// log(n!) via lgamma; factorial ratios must always be combined in log space
/// (n up to ~200 appears in prefactors and would overflow naive products).
inline double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

/// Three-term recurrence for associated Laguerre polynomials:
/// (p+1) L_{p+1}^q = (2p+q+1-x) L_p^q - (p+q) L_{p-1}^q
inline double laguerre_next(int p, int q, double x, double lp, double lpm1) {
    return ((2.0 * p + q + 1.0 - x) * lp - (p + q) * lpm1) / (p + 1.0);
}

/// L_p^q(x) for p = 0..p_max at fixed order q, filled into `out`
/// (resized to p_max+1). Stable forward recurrence.
inline void assoc_laguerre_row(int p_max, int q, double x, std::vector<double>& out) {
    out.resize(static_cast<size_t>(p_max) + 1);
    double lpm1 = 0.0;
    double lp = 1.0;
    out[0] = lp;
    for (int p = 0; p < p_max; ++p) {
        double lnext = laguerre_next(p, q, x, lp, lpm1);
        lpm1 = lp;
        lp = lnext;
        out[static_cast<size_t>(p) + 1] = lp;
    }
}

}  // namespace fockforge
