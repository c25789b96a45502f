#pragma once

#include <complex>
#include <string>
#include <vector>

#include "fockforge/hilbert.hpp"

namespace fockforge {

using cplx = std::complex<double>;

class DensityMatrix;

/// Photon-number probabilities P_n over the truncated basis.
/// Invariants: sum(P) = 1 within 1e-8, each entry in [0, 1+1e-12].
struct PhotonDistribution {
    std::vector<double> probabilities;

    double mean() const;
    double variance() const;
    /// <n(n-1)> / <n>^2; throws ZeroMeanPhoton when <n> < 1e-12.
    double second_order_coherence() const;
};

/// Complex amplitude vector over the Fock basis, unit norm.
class PureState {
  public:
    PureState(HilbertSpace space, std::vector<cplx> amplitudes);

    const HilbertSpace& space() const { return space_; }
    int cutoff() const { return space_.cutoff(); }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    cplx amplitude(int n) const { return amps_[static_cast<size_t>(n)]; }

    double norm_sq() const;
    /// Probability mass discarded by the most recent renormalization.
    double norm_deficit() const { return norm_deficit_; }
    /// |c_{cutoff-1}|^2; must stay below the leakage threshold after any run.
    double top_occupancy() const;

    void check_normalized(double tol = 1e-9) const;
    void check_leakage(double threshold = 1e-8) const;

    std::string to_json() const;
    static PureState from_json(const std::string& text);

  private:
    friend PureState coherent_state(cplx alpha, const HilbertSpace& space);
    friend PureState renormalized(HilbertSpace space, std::vector<cplx> amps);

    HilbertSpace space_;
    std::vector<cplx> amps_;
    double norm_deficit_ = 0.0;
};

/// Hermitian, unit-trace matrix rho_{nm} over the Fock basis (row-major).
class DensityMatrix {
  public:
    DensityMatrix(HilbertSpace space, std::vector<cplx> elements);
    /// rho = |psi><psi|
    static DensityMatrix pure(const PureState& psi);
    static DensityMatrix diagonal(HilbertSpace space, const std::vector<double>& populations);

    const HilbertSpace& space() const { return space_; }
    int cutoff() const { return space_.cutoff(); }
    const std::vector<cplx>& elements() const { return elems_; }
    cplx at(int n, int m) const {
        return elems_[static_cast<size_t>(n) * cutoff() + m];
    }

    cplx trace() const;
    double purity() const;  // Tr(rho^2), real part
    double hermiticity_defect() const;
    void hermitize();  // rho <- (rho + rho^dagger)/2

    std::string to_json() const;
    static DensityMatrix from_json(const std::string& text);

  private:
    HilbertSpace space_;
    std::vector<cplx> elems_;
};

/// c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), renormalized over the truncation.
/// Requires |alpha|^2 + 8|alpha| + 10 <= cutoff so the discarded tail is < 1e-10.
PureState coherent_state(cplx alpha, const HilbertSpace& space);

/// Unit vector at photon number n.
PureState fock_state(int n, const HilbertSpace& space);

/// Normalizes the given amplitudes and records the pre-normalization deficit.
PureState renormalized(HilbertSpace space, std::vector<cplx> amps);

PhotonDistribution photon_distribution(const PureState& state);
PhotonDistribution photon_distribution(const DensityMatrix& rho);

/// P_N of the target Fock state; throws IndexOutOfCutoff when N >= cutoff.
double fock_fidelity(const PureState& state, int n);
double fock_fidelity(const DensityMatrix& rho, int n);

/// (<n>, <Delta n^2>) from the photon distribution.
std::pair<double, double> mean_and_variance(const PureState& state);
std::pair<double, double> mean_and_variance(const DensityMatrix& rho);

double second_order_coherence(const PureState& state);
double second_order_coherence(const DensityMatrix& rho);

/// <a|b>; throws SpaceMismatch on cutoff disagreement.
cplx overlap(const PureState& a, const PureState& b);

}  // namespace fockforge
