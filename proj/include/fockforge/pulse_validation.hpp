#pragma once

#include <span>
#include <vector>

#include "fockforge/protocol.hpp"
#include "fockforge/states.hpp"

namespace fockforge {

/// Finite-width drive envelope with unit time-integral, so `area` is the
/// displacement amplitude the pulse carries.
struct PulseShape {
    enum class Kind { gaussian, square };
    Kind kind = Kind::gaussian;
    double width = 1e-2;  // sigma for gaussian (support +-6 sigma), full width for square
    double area = 0.0;    // beta

    double half_support() const;
    /// Envelope value at offset dt from the pulse center.
    double envelope(double dt_from_center) const;
};

/// Schrodinger integration of H(t) = K a+^2 a^2 + i f(t - t1) beta (a+ - a)
/// over [0, chi_total] (normalized units, K = 1), with the pulse support
/// right-aligned to the end of the window. Fixed-step 4th-order, step bounded
/// by width/50 and by the Kerr stiffness of the basis top.
PureState finite_pulse_propagate(cplx alpha, const PulseShape& shape, double chi_total,
                                 const HilbertSpace& space, bool kerr_enabled = true);

struct ConvergencePoint {
    double width;
    double deficit;  // 1 - |<psi_delta | psi_finite>|
};

struct ConvergenceStudy {
    std::vector<ConvergencePoint> points;
    /// Least-squares slope of log(deficit) against log(width).
    double fitted_order = 0.0;
};

/// Deficit of the finite-width propagation against the delta-pulse unitary
/// D(beta) U_K(chi) for each width. Widths must be >= 3, strictly descending.
ConvergenceStudy convergence_study(cplx alpha, const PulseStep& reference,
                                   std::span<const double> widths,
                                   PulseShape::Kind kind = PulseShape::Kind::gaussian,
                                   int threads = 0);

}  // namespace fockforge
