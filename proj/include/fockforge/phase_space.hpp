#pragma once

#include <string>
#include <vector>

#include "fockforge/states.hpp"

namespace fockforge {

/// Rectangular (x, p) grid. Phase-space coordinates relate to the mode by
/// alpha = (x + i p) / sqrt(2).
struct PhaseSpaceGrid {
    double x_min, x_max, p_min, p_max;
    int nx, np;

    PhaseSpaceGrid(double x_min, double x_max, double p_min, double p_max, int nx, int np);
    /// Symmetric square grid [-extent, extent]^2, n points per axis.
    static PhaseSpaceGrid centered(double extent, int n = 201);
    /// Default extent sqrt(<n>) + 4 for the given state mean.
    static PhaseSpaceGrid for_mean_photon(double mean_n, int n = 201);

    double x(int i) const { return x_min + i * (x_max - x_min) / (nx - 1); }
    double p(int j) const { return p_min + j * (p_max - p_min) / (np - 1); }
    double cell_area() const {
        return (x_max - x_min) / (nx - 1) * (p_max - p_min) / (np - 1);
    }
};

/// W on the grid, convention W_n(0,0) = (-1)^n / pi (so the vacuum peaks at
/// 1/pi and integral dx dp of W is 1). Stored x-fastest.
struct WignerField {
    std::vector<double> values;  // values[j * nx + i], x fastest
    PhaseSpaceGrid grid;
    std::string convention;

    double at(int ix, int jp) const { return values[static_cast<size_t>(jp) * grid.nx + ix]; }
    double min_value() const;
    double max_value() const;
    /// Riemann-sum integral over the grid.
    double integral() const;
};

/// Closed-form Laguerre-series evaluation per grid point (exact at the
/// truncation; no FFT aliasing). Serial reference kept as the baseline for
/// the row-parallel kernel.
WignerField wigner_reference(const DensityMatrix& rho, const PhaseSpaceGrid& grid);
WignerField wigner(const DensityMatrix& rho, const PhaseSpaceGrid& grid, int threads = 0);
WignerField wigner(const PureState& state, const PhaseSpaceGrid& grid, int threads = 0);

/// Husimi Q(alpha) = <alpha| rho |alpha> / pi; non-negative everywhere.
WignerField husimi_reference(const DensityMatrix& rho, const PhaseSpaceGrid& grid);
WignerField husimi(const DensityMatrix& rho, const PhaseSpaceGrid& grid, int threads = 0);
WignerField husimi(const PureState& state, const PhaseSpaceGrid& grid, int threads = 0);

/// Riemann sum of |min(W, 0)| over the grid.
double negativity_volume(const WignerField& field);

/// Sign changes of W along the p = 0 ray (x >= 0), ignoring values below
/// rel_threshold * max|W| on the ray. Equals N for the Fock state |N>.
int ray_sign_changes(const WignerField& field, double rel_threshold = 1e-6);

/// Local maxima strictly above all 8 neighbours and above rel_floor * max Q.
std::vector<std::pair<double, double>> local_maxima(const WignerField& field,
                                                    double rel_floor = 1e-3);

}  // namespace fockforge
