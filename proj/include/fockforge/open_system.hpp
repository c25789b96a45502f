#pragma once

#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "fockforge/protocol.hpp"
#include "fockforge/states.hpp"

namespace fockforge {

/// Lossy protocol run: Lindblad segments of Kerr evolution with photon loss,
/// interleaved with instantaneous displacement pulses. Times are normalized
/// (unit 1/K), so chi_k is both the Kerr phase and the segment duration and
/// gamma_over_k is the only physical knob.
struct DissipativeConfig {
    double kerr_strength = 1.0;
    double gamma_over_k = 0.0;
    PulseSequence sequence;
    /// Upper bound on the integrator step, units 1/K.
    double integrator_step = 1e-3 * std::numbers::pi;
    int cutoff = 0;  // 0 = auto from the sequence
    /// Test hook: drop the Kerr Hamiltonian entirely (pure damping).
    bool kerr_enabled = true;
    /// Sampled (t, fidelity, <n>) points per segment; 0 disables the timeline.
    int timeline_samples_per_segment = 0;
    double trace_drift_limit = 1e-6;

    int resolved_cutoff() const { return cutoff > 0 ? cutoff : auto_cutoff(sequence); }
};

struct TimelinePoint {
    double t;
    double fidelity;
    double mean_n;
};

struct DissipativeResult {
    DensityMatrix final_rho;
    double fidelity = 0.0;
    double trace_drift = 0.0;
    std::vector<TimelinePoint> timeline;
};

/// Fixed-step classical 4th-order integration of
///   drho/dt = -i[H, rho] + (gamma/2)(2 a rho a+ - a+a rho - rho a+a)
/// carried out in the rotating frame of the Kerr Hamiltonian, where the
/// diagonal phases are exact and only the bounded dissipator is stepped.
/// Re-symmetrizes rho each step and renormalizes the trace while the drift
/// stays below the limit. Duration is in units 1/K. max_drift, when given,
/// receives the largest pre-renormalization |tr - 1| seen.
DensityMatrix lindblad_evolve(const DensityMatrix& rho, double duration,
                              const DissipativeConfig& config, double* max_drift = nullptr);

/// D(beta) rho D(beta)+; the delta-pulse limit of the drive segment.
DensityMatrix apply_instant_pulse(const DensityMatrix& rho, double beta);

/// Alternates lindblad_evolve(chi_k) and apply_instant_pulse(beta_k) starting
/// from |alpha><alpha| and reports <N|rho|N>.
DissipativeResult run_dissipative_protocol(const DissipativeConfig& config, int target_n);

double mean_photon_number(const DensityMatrix& rho);

struct SweepRow {
    double gamma_over_k;
    int target_n;
    double fidelity;
    double trace_drift;
    double wall_ms;
};

/// One protocol run per gamma value. Cells are independent; the parallel
/// version writes each row into its own slot and matches the serial reference
/// bitwise. Verifies that fidelity is non-increasing in gamma (1e-4 slack).
std::vector<SweepRow> loss_sweep_reference(const DissipativeConfig& templ,
                                           std::span<const double> gammas, int target_n);
std::vector<SweepRow> loss_sweep(const DissipativeConfig& templ, std::span<const double> gammas,
                                 int target_n, int threads = 0);

struct RegionMap {
    std::vector<int> n_values;
    std::vector<double> gammas;
    std::vector<double> fidelities;  // row-major [n][gamma]
    std::vector<bool> above;         // fidelity > threshold
    double threshold = 0.9;

    double fidelity(size_t ni, size_t gi) const { return fidelities[ni * gammas.size() + gi]; }
    bool flag(size_t ni, size_t gi) const { return above[ni * gammas.size() + gi]; }
};

/// Sequence provider for region scans: maps a target N to the pulse sequence
/// used for it (normally the bundled reference table rows).
using SequenceProvider = std::function<PulseSequence(int)>;

/// Fidelity > threshold map over (N, gamma) cells; each fixed-N column must
/// be a prefix of trues in increasing gamma.
RegionMap region_map(std::span<const int> n_values, std::span<const double> gammas,
                     double threshold, const SequenceProvider& sequences,
                     const DissipativeConfig& base, int threads = 0);

}  // namespace fockforge
