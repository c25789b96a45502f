#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fockforge/protocol.hpp"

namespace fockforge {

/// Search domain and budget for recovering (beta_k, chi_k) that maximize
/// protocol_fidelity for a target (N, M). alpha is pinned to sqrt(N).
struct SearchConfig {
    int target_n = 1;
    int m_steps = 2;
    double beta_min = -1.0;
    double beta_max = 2.0;
    /// chi is searched as chi/pi over a half-open interval; [0,1) suffices by
    /// the exact pi-periodicity of the Kerr diagonal.
    double chi_over_pi_min = 0.0;
    double chi_over_pi_max = 1.0;
    int grid_points_per_axis = 21;
    int refine_iterations = 200;
    std::uint64_t seed = 0;
    long budget_evals = 200000;
    /// Hook for 1-D studies: hold every chi at chi_over_pi_min and search
    /// the beta components only.
    bool freeze_chi = false;
    /// Initial amplitude override for toy objectives; the protocol proper
    /// pins alpha = sqrt(N).
    std::optional<cplx> alpha_override;
    int threads = 0;
    /// How many grid candidates the staged strategy refines jointly.
    int refine_candidates = 16;
    bool keep_trace = false;

    void validate() const;
    int dims() const { return freeze_chi ? m_steps : 2 * m_steps; }
};

struct SearchResult {
    PulseSequence best_params;
    double best_fidelity = 0.0;
    long evals_used = 0;
    int cutoff_used = 0;
    double wall_ms = 0.0;
    /// Improvement history: (parameter vector, fidelity) at each new best.
    std::vector<std::pair<std::vector<double>, double>> trace;

    std::string to_json(const SearchConfig& config) const;
};

/// Exhaustive Cartesian grid (2M <= 8), argmax with first-encountered
/// lexicographic tie-break. Throws BudgetExceeded when the grid is larger
/// than budget_evals.
SearchResult grid_search(const SearchConfig& config);

/// Derivative-free simplex ascent from `start`. Monotone in the best value;
/// never throws on degenerate geometry (restarts with a seeded jitter).
SearchResult refine(const PulseSequence& start, const SearchConfig& config);

/// Coarse grid on step 1 with later steps at (0,0), greedy per-step grids,
/// then joint simplex refinement of the leading grid candidates. M >= 2.
SearchResult staged_search(const SearchConfig& config);

namespace detail {

/// Nelder-Mead maximization used by refine/staged_search; exposed so the
/// simplex machinery can be exercised on closed-form objectives directly.
struct SimplexOptions {
    int max_iterations = 200;
    double diameter_tol = 1e-5;
    double jitter_scale = 1e-3;
    std::uint64_t seed = 0;
    std::vector<double> initial_step;  // per-dim; defaults to 0.05
};

struct SimplexOutcome {
    std::vector<double> best_point;
    double best_value = 0.0;
    int iterations = 0;
};

SimplexOutcome simplex_maximize(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> start, const SimplexOptions& opts);

}  // namespace detail

}  // namespace fockforge
