#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fockforge/states.hpp"

namespace fockforge {

/// One protocol step: Kerr phase chi (radians) followed by displacement beta.
struct PulseStep {
    double beta = 0.0;
    double chi = 0.0;
};

/// The full protocol: initial coherent amplitude alpha, then steps applied in
/// list order (index 0 acts first).
struct PulseSequence {
    cplx alpha{0.0, 0.0};
    std::vector<PulseStep> steps;

    /// alpha = sqrt(N), the amplitude the protocol assumes for target |N>.
    static PulseSequence for_target(int n, std::vector<PulseStep> steps = {});

    int m() const { return static_cast<int>(steps.size()); }
    double beta_abs_sum() const;

    /// { "alpha": [re, im], "steps": [{"beta": b, "chi_over_pi": c}, ...] }
    std::string to_json() const;
    static PulseSequence from_json(const std::string& text);
};

struct ProtocolOptions {
    double leakage_threshold = 1e-8;
    double norm_deficit_limit = 1e-6;
    /// Re-run at twice the cutoff and require the result to move by less than
    /// convergence_tol. Expensive; disabled inside optimizer loops.
    bool convergence_doubling = true;
    double convergence_tol = 1e-6;
};

/// Cutoff that keeps the tail of the protocol negligible:
/// ceil(a^2 + 8a + 10) with a = |alpha| + sum_k |beta_k|.
int auto_cutoff(const PulseSequence& seq);

/// Diagonal of U_K(chi) = e^{-i chi n(n-1)}. chi is reduced mod pi first
/// (n(n-1) is even, so the diagonal is pi-periodic in chi exactly).
std::vector<cplx> kerr_phases(double chi, const HilbertSpace& space);

/// D(beta) . (Kerr phases * state), renormalized. Throws LeakageExceeded when
/// the top basis state crosses the threshold or the pre-renormalization norm
/// deficit exceeds the limit.
PureState apply_step(const PureState& state, const PulseStep& step,
                     const ProtocolOptions& opts = {});

struct ProtocolRun {
    PureState state;
    int cutoff_used = 0;
    double max_norm_deficit = 0.0;
    /// |result(2C) - result(C)| from the doubling check; empty when disabled.
    std::optional<double> doubling_shift;
};

/// Full M-step evolution at the given space. M = 0 returns the coherent state.
PureState run_protocol(const PulseSequence& seq, const HilbertSpace& space,
                       const ProtocolOptions& opts = {});

/// Auto-cutoff run with the convergence-doubling verdict attached. The shift
/// is measured on the state overlap (or on P_N when target_n is given).
ProtocolRun run_protocol_checked(const PulseSequence& seq, const ProtocolOptions& opts = {},
                                 std::optional<int> target_n = std::nullopt,
                                 std::optional<int> cutoff_override = std::nullopt);

/// P_N of the protocol output; the optimizer objective.
double protocol_fidelity(const PulseSequence& seq, int n, const HilbertSpace& space,
                         const ProtocolOptions& opts = {});

}  // namespace fockforge
