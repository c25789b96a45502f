#include "fockforge/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fockforge/displacement.hpp"
#include "fockforge/threads.hpp"

namespace fockforge {

namespace {

constexpr double kInvPi = std::numbers::inv_pi;

void check_contained(const DensityMatrix& rho, const PhaseSpaceGrid& grid) {
    double mean = 0.0;
    for (int n = 0; n < rho.cutoff(); ++n) mean += n * rho.at(n, n).real();
    double r = std::min(std::min(grid.x_max, -grid.x_min), std::min(grid.p_max, -grid.p_min));
    if (r <= 0.0) throw GridTooSmall("grid must surround the phase-space origin");
    if (r * r < mean + 4.0 * std::sqrt(mean + 1.0))
        throw GridTooSmall("state is not contained in the grid");
}

/// W(x,p) = (1/pi) sum_{q>=0} (2 - delta_{q0}) sum_k (-1)^k R_{q,k}(|2 alpha|)
///          * Re[rho_{k,k+q} e^{i q theta}],   alpha = (x + ip)/sqrt(2).
/// Displaced-parity form; R is the shared displacement radial profile.
double wigner_point(const DensityMatrix& rho, double x, double p, std::vector<double>& radial) {
    const int c = rho.cutoff();
    const double g = std::numbers::sqrt2 * std::hypot(x, p);
    const cplx unit = (g == 0.0) ? cplx{1.0, 0.0}
                                 : cplx{std::numbers::sqrt2 * x / g, std::numbers::sqrt2 * p / g};
    cplx rot{1.0, 0.0};  // e^{i q theta}
    double acc = 0.0;
    for (int q = 0; q < c; ++q) {
        displacement_radial_row(q, g, c - 1 - q, radial);
        double sum_q = 0.0;
        double parity = 1.0;
        for (int k = 0; k + q < c; ++k) {
            cplx r = rho.at(k, k + q);
            sum_q += parity * radial[static_cast<size_t>(k)] *
                     (r.real() * rot.real() - r.imag() * rot.imag());
            parity = -parity;
        }
        acc += (q == 0 ? 1.0 : 2.0) * sum_q;
        rot *= unit;
    }
    return kInvPi * acc;
}

double husimi_point(const DensityMatrix& rho, double x, double p, std::vector<cplx>& coh) {
    const int c = rho.cutoff();
    const cplx alpha{x / std::numbers::sqrt2, p / std::numbers::sqrt2};
    coh.resize(static_cast<size_t>(c));
    coh[0] = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < c; ++n)
        coh[static_cast<size_t>(n)] =
            coh[static_cast<size_t>(n) - 1] * alpha / std::sqrt(static_cast<double>(n));
    cplx q{0.0, 0.0};
    for (int n = 0; n < c; ++n) {
        cplx row{0.0, 0.0};
        for (int m = 0; m < c; ++m) row += rho.at(n, m) * coh[static_cast<size_t>(m)];
        q += std::conj(coh[static_cast<size_t>(n)]) * row;
    }
    return kInvPi * q.real();
}

enum class Kernel { wigner, husimi };

void fill_row(const DensityMatrix& rho, const PhaseSpaceGrid& grid, Kernel kernel, int j,
              double* out) {
    std::vector<double> radial;
    std::vector<cplx> coh;
    const double p = grid.p(j);
    for (int i = 0; i < grid.nx; ++i) {
        out[i] = (kernel == Kernel::wigner) ? wigner_point(rho, grid.x(i), p, radial)
                                            : husimi_point(rho, grid.x(i), p, coh);
    }
}

WignerField evaluate_field(const DensityMatrix& rho, const PhaseSpaceGrid& grid, Kernel kernel,
                           const std::string& convention, int threads) {
    WignerField field{std::vector<double>(static_cast<size_t>(grid.nx) * grid.np), grid,
                      convention};
    parallel_for_indexed(grid.np, threads, [&](long j) {
        fill_row(rho, grid, kernel, static_cast<int>(j),
                 field.values.data() + static_cast<size_t>(j) * grid.nx);
    });
    return field;
}

const char* kWignerConvention = "wigner W_n(0,0)=(-1)^n/pi, alpha=(x+ip)/sqrt2";
const char* kHusimiConvention = "husimi Q=<a|rho|a>/pi, alpha=(x+ip)/sqrt2";

}  // namespace

PhaseSpaceGrid::PhaseSpaceGrid(double x_min_, double x_max_, double p_min_, double p_max_,
                               int nx_, int np_)
    : x_min(x_min_), x_max(x_max_), p_min(p_min_), p_max(p_max_), nx(nx_), np(np_) {
    if (!(x_max > x_min) || !(p_max > p_min)) throw GridTooSmall("degenerate grid extent");
    if (nx < 8 || np < 8) throw GridTooSmall("grid needs at least 8 points per axis");
}

PhaseSpaceGrid PhaseSpaceGrid::centered(double extent, int n) {
    return PhaseSpaceGrid(-extent, extent, -extent, extent, n, n);
}

PhaseSpaceGrid PhaseSpaceGrid::for_mean_photon(double mean_n, int n) {
    return centered(std::sqrt(std::max(mean_n, 0.0)) + 4.0, n);
}

double WignerField::min_value() const { return *std::min_element(values.begin(), values.end()); }

double WignerField::max_value() const { return *std::max_element(values.begin(), values.end()); }

double WignerField::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.cell_area();
}

WignerField wigner_reference(const DensityMatrix& rho, const PhaseSpaceGrid& grid) {
    check_contained(rho, grid);
    return evaluate_field(rho, grid, Kernel::wigner, kWignerConvention, 1);
}

WignerField wigner(const DensityMatrix& rho, const PhaseSpaceGrid& grid, int threads) {
    check_contained(rho, grid);
    auto field = evaluate_field(rho, grid, Kernel::wigner, kWignerConvention, threads);
    double bound = kInvPi + 1e-9;
    for (double v : field.values)
        if (std::abs(v) > bound) throw Error("Wigner value escaped the 1/pi bound");
    return field;
}

WignerField wigner(const PureState& state, const PhaseSpaceGrid& grid, int threads) {
    return wigner(DensityMatrix::pure(state), grid, threads);
}

WignerField husimi_reference(const DensityMatrix& rho, const PhaseSpaceGrid& grid) {
    return evaluate_field(rho, grid, Kernel::husimi, kHusimiConvention, 1);
}

WignerField husimi(const DensityMatrix& rho, const PhaseSpaceGrid& grid, int threads) {
    return evaluate_field(rho, grid, Kernel::husimi, kHusimiConvention, threads);
}

WignerField husimi(const PureState& state, const PhaseSpaceGrid& grid, int threads) {
    return husimi(DensityMatrix::pure(state), grid, threads);
}

double negativity_volume(const WignerField& field) {
    double s = 0.0;
    for (double v : field.values)
        if (v < 0.0) s -= v;
    return s * field.grid.cell_area();
}

int ray_sign_changes(const WignerField& field, double rel_threshold) {
    // row with p closest to 0
    int j_best = 0;
    for (int j = 1; j < field.grid.np; ++j)
        if (std::abs(field.grid.p(j)) < std::abs(field.grid.p(j_best))) j_best = j;

    std::vector<double> ray;
    for (int i = 0; i < field.grid.nx; ++i)
        if (field.grid.x(i) >= 0.0) ray.push_back(field.at(i, j_best));

    double peak = 0.0;
    for (double v : ray) peak = std::max(peak, std::abs(v));
    double floor = rel_threshold * peak;

    int changes = 0;
    int prev_sign = 0;
    for (double v : ray) {
        if (std::abs(v) <= floor) continue;
        int s = v > 0.0 ? 1 : -1;
        if (prev_sign != 0 && s != prev_sign) ++changes;
        prev_sign = s;
    }
    return changes;
}

std::vector<std::pair<double, double>> local_maxima(const WignerField& field, double rel_floor) {
    std::vector<std::pair<double, double>> maxima;
    double peak = field.max_value();
    for (int j = 1; j + 1 < field.grid.np; ++j) {
        for (int i = 1; i + 1 < field.grid.nx; ++i) {
            double v = field.at(i, j);
            if (v < rel_floor * peak) continue;
            bool is_max = true;
            for (int dj = -1; dj <= 1 && is_max; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    if (field.at(i + di, j + dj) >= v) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max) maxima.emplace_back(field.grid.x(i), field.grid.p(j));
        }
    }
    return maxima;
}

}  // namespace fockforge
