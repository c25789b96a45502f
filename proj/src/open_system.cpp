#include "fockforge/open_system.hpp"

#include <chrono>
#include <cmath>

#include "fockforge/displacement.hpp"
#include "fockforge/threads.hpp"

namespace fockforge {

namespace {

using Matrix = std::vector<cplx>;

/// Dissipator in the Kerr rotating frame. With H = K a+^2 a^2 diagonal, the
/// only time dependence left is a per-diagonal phase e^{-2i d s} (d = n - m,
/// s = normalized time), and each element couples only to its upper-right
/// neighbour:
///   dsig_{nm}/ds = g [ sqrt((n+1)(m+1)) e^{-2i d s} sig_{n+1,m+1}
///                      - (n+m)/2 sig_{nm} ]
void rhs(const Matrix& sig, double s, double gamma, int c, bool kerr_frame, Matrix& out,
         std::vector<cplx>& phase) {
    phase.resize(static_cast<size_t>(c));
    for (int d = 0; d < c; ++d)
        phase[static_cast<size_t>(d)] = kerr_frame ? std::polar(1.0, -2.0 * d * s) : cplx{1.0, 0.0};
    for (int n = 0; n < c; ++n) {
        for (int m = 0; m < c; ++m) {
            const size_t idx = static_cast<size_t>(n) * c + m;
            cplx v = -0.5 * (n + m) * sig[idx];
            if (n + 1 < c && m + 1 < c) {
                cplx ph = (n >= m) ? phase[static_cast<size_t>(n - m)]
                                   : std::conj(phase[static_cast<size_t>(m - n)]);
                v += std::sqrt(static_cast<double>(n + 1) * (m + 1)) * ph *
                     sig[idx + static_cast<size_t>(c) + 1];
            }
            out[idx] = gamma * v;
        }
    }
}

double trace_real(const Matrix& m, int c) {
    double t = 0.0;
    for (int n = 0; n < c; ++n) t += m[static_cast<size_t>(n) * c + n].real();
    return t;
}

void hermitize_in_place(Matrix& m, int c) {
    for (int n = 0; n < c; ++n) {
        m[static_cast<size_t>(n) * c + n] = cplx{m[static_cast<size_t>(n) * c + n].real(), 0.0};
        for (int k = n + 1; k < c; ++k) {
            cplx avg = 0.5 * (m[static_cast<size_t>(n) * c + k] +
                              std::conj(m[static_cast<size_t>(k) * c + n]));
            m[static_cast<size_t>(n) * c + k] = avg;
            m[static_cast<size_t>(k) * c + n] = std::conj(avg);
        }
    }
}

}  // namespace

DensityMatrix lindblad_evolve(const DensityMatrix& rho, double duration,
                              const DissipativeConfig& config, double* max_drift) {
    if (duration < 0.0) throw ConfigError("negative evolution duration");
    const int c = rho.cutoff();
    const double gamma = config.gamma_over_k;
    if (gamma < 0.0) throw ConfigError("gamma_over_k must be >= 0");
    if (config.integrator_step <= 0.0) throw ConfigError("integrator_step must be positive");
    if (duration == 0.0) return rho;

    const long nsteps = static_cast<long>(std::ceil(duration / config.integrator_step));
    const double h = duration / static_cast<double>(nsteps);
    // Stability guard on the frame RHS; the Kerr diagonal is handled exactly
    // by the rotating frame and does not enter the stepped operator.
    if (h * gamma * c > 0.1)
        throw StepTooLarge("integrator step too large for gamma * cutoff; reduce dt");

    Matrix sig = rho.elements();
    Matrix k1(sig.size()), k2(sig.size()), k3(sig.size()), k4(sig.size()), tmp(sig.size());
    std::vector<cplx> phase;
    double worst_drift = 0.0;

    const bool kerr_frame = config.kerr_enabled;
    double s = 0.0;
    for (long step = 0; step < nsteps; ++step) {
        rhs(sig, s, gamma, c, kerr_frame, k1, phase);
        for (size_t i = 0; i < sig.size(); ++i) tmp[i] = sig[i] + 0.5 * h * k1[i];
        rhs(tmp, s + 0.5 * h, gamma, c, kerr_frame, k2, phase);
        for (size_t i = 0; i < sig.size(); ++i) tmp[i] = sig[i] + 0.5 * h * k2[i];
        rhs(tmp, s + 0.5 * h, gamma, c, kerr_frame, k3, phase);
        for (size_t i = 0; i < sig.size(); ++i) tmp[i] = sig[i] + h * k3[i];
        rhs(tmp, s + h, gamma, c, kerr_frame, k4, phase);
        for (size_t i = 0; i < sig.size(); ++i)
            sig[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        s += h;

        hermitize_in_place(sig, c);
        double tr = trace_real(sig, c);
        double drift = std::abs(tr - 1.0);
        worst_drift = std::max(worst_drift, drift);
        if (drift >= config.trace_drift_limit)
            throw TraceDriftExceeded("trace drifted by " + std::to_string(drift));
        for (auto& e : sig) e /= tr;
    }
    if (max_drift) *max_drift = std::max(*max_drift, worst_drift);

    if (kerr_frame) {
        // rotate back: rho = U0 sigma U0+ with U0 the Kerr diagonal at chi = duration
        auto u = kerr_phases(duration, rho.space());
        for (int n = 0; n < c; ++n)
            for (int m = 0; m < c; ++m)
                sig[static_cast<size_t>(n) * c + m] *=
                    u[static_cast<size_t>(n)] * std::conj(u[static_cast<size_t>(m)]);
    }
    return DensityMatrix(rho.space(), std::move(sig));
}

DensityMatrix apply_instant_pulse(const DensityMatrix& rho, double beta) {
    const int c = rho.cutoff();
    auto d = cached_displacement(beta, rho.space());
    const auto& dm = d->entries();

    // tmp = D rho ; out = tmp D^T (D real)
    Matrix tmp(static_cast<size_t>(c) * c, cplx{0.0, 0.0});
    for (int n = 0; n < c; ++n) {
        for (int k = 0; k < c; ++k) {
            double w = dm[static_cast<size_t>(n) * c + k];
            if (w == 0.0) continue;
            const cplx* src = rho.elements().data() + static_cast<size_t>(k) * c;
            cplx* dst = tmp.data() + static_cast<size_t>(n) * c;
            for (int m = 0; m < c; ++m) dst[m] += w * src[m];
        }
    }
    Matrix out(static_cast<size_t>(c) * c, cplx{0.0, 0.0});
    for (int n = 0; n < c; ++n) {
        for (int m = 0; m < c; ++m) {
            const cplx* row = tmp.data() + static_cast<size_t>(n) * c;
            const double* drow = dm.data() + static_cast<size_t>(m) * c;
            cplx acc{0.0, 0.0};
            for (int k = 0; k < c; ++k) acc += row[k] * drow[k];
            out[static_cast<size_t>(n) * c + m] = acc;
        }
    }

    DensityMatrix res(rho.space(), std::move(out));
    double tr_in = rho.trace().real();
    double tr_out = res.trace().real();
    if (std::abs(tr_out - tr_in) > 1e-9)
        throw LeakageExceeded("instant pulse pushed trace out of the truncated basis");
    if (res.at(c - 1, c - 1).real() >= 1e-8)
        throw LeakageExceeded("instant pulse populated the top basis state");
    if (res.hermiticity_defect() > 1e-9)
        throw Error("instant pulse broke Hermiticity beyond 1e-9");
    return res;
}

double mean_photon_number(const DensityMatrix& rho) {
    double m = 0.0;
    for (int n = 0; n < rho.cutoff(); ++n) m += n * rho.at(n, n).real();
    return m;
}

DissipativeResult run_dissipative_protocol(const DissipativeConfig& config, int target_n) {
    const auto& seq = config.sequence;
    if (seq.steps.empty()) throw ConfigError("dissipative protocol needs a non-empty sequence");
    const int c = config.resolved_cutoff();
    if (target_n >= c) throw IndexOutOfCutoff("target N outside the basis");
    HilbertSpace space(c);

    DensityMatrix rho = DensityMatrix::pure(coherent_state(seq.alpha, space));
    std::vector<TimelinePoint> timeline;
    double t_base = 0.0;
    double worst_drift = 0.0;

    for (const auto& step : seq.steps) {
        double duration = step.chi;  // normalized time K*t = chi
        if (duration < 0.0) throw ConfigError("negative segment duration");
        if (config.timeline_samples_per_segment > 0 && duration > 0.0) {
            int samples = config.timeline_samples_per_segment;
            for (int sidx = 1; sidx <= samples; ++sidx) {
                double chunk = duration / samples;
                rho = lindblad_evolve(rho, chunk, config, &worst_drift);
                timeline.push_back(TimelinePoint{t_base + sidx * chunk,
                                                 fock_fidelity(rho, target_n),
                                                 mean_photon_number(rho)});
            }
        } else {
            rho = lindblad_evolve(rho, duration, config, &worst_drift);
        }
        t_base += duration;
        rho = apply_instant_pulse(rho, step.beta);
        double tr = rho.trace().real();
        worst_drift = std::max(worst_drift, std::abs(tr - 1.0));
        if (config.timeline_samples_per_segment > 0)
            timeline.push_back(TimelinePoint{t_base, fock_fidelity(rho, target_n),
                                             mean_photon_number(rho)});
    }

    double fid = fock_fidelity(rho, target_n);
    return DissipativeResult{std::move(rho), fid, worst_drift, std::move(timeline)};
}

namespace {

SweepRow run_cell(const DissipativeConfig& templ, double gamma, int target_n) {
    DissipativeConfig cfg = templ;
    cfg.gamma_over_k = gamma;
    // keep the guard satisfied at high loss by shrinking the requested step
    int c = cfg.resolved_cutoff();
    if (gamma > 0.0) cfg.integrator_step = std::min(cfg.integrator_step, 0.09 / (gamma * c));
    auto t0 = std::chrono::steady_clock::now();
    auto res = run_dissipative_protocol(cfg, target_n);
    double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return SweepRow{gamma, target_n, res.fidelity, res.trace_drift, ms};
}

void check_monotone(const std::vector<SweepRow>& rows) {
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].gamma_over_k < rows[i - 1].gamma_over_k)
            throw ConfigError("gamma list must be sorted ascending");
        if (rows[i].fidelity > rows[i - 1].fidelity + 1e-4)
            throw Error("loss sweep fidelity increased with gamma beyond slack");
    }
}

}  // namespace

std::vector<SweepRow> loss_sweep_reference(const DissipativeConfig& templ,
                                           std::span<const double> gammas, int target_n) {
    std::vector<SweepRow> rows(gammas.size());
    for (size_t i = 0; i < gammas.size(); ++i) rows[i] = run_cell(templ, gammas[i], target_n);
    check_monotone(rows);
    return rows;
}

std::vector<SweepRow> loss_sweep(const DissipativeConfig& templ, std::span<const double> gammas,
                                 int target_n, int threads) {
    if (threads == 1) return loss_sweep_reference(templ, gammas, target_n);
    std::vector<SweepRow> rows(gammas.size());
    parallel_for_indexed(static_cast<long>(gammas.size()), threads, [&](long i) {
        rows[static_cast<size_t>(i)] = run_cell(templ, gammas[static_cast<size_t>(i)], target_n);
    });
    check_monotone(rows);
    return rows;
}

RegionMap region_map(std::span<const int> n_values, std::span<const double> gammas,
                     double threshold, const SequenceProvider& sequences,
                     const DissipativeConfig& base, int threads) {
    RegionMap map;
    map.n_values.assign(n_values.begin(), n_values.end());
    map.gammas.assign(gammas.begin(), gammas.end());
    map.threshold = threshold;
    map.fidelities.resize(n_values.size() * gammas.size(), 0.0);
    map.above.resize(n_values.size() * gammas.size(), false);

    for (size_t ni = 0; ni < n_values.size(); ++ni) {
        DissipativeConfig templ = base;
        templ.sequence = sequences(n_values[ni]);  // MissingParameters when absent
        auto rows = loss_sweep(templ, gammas, n_values[ni], threads);
        bool still_above = true;
        for (size_t gi = 0; gi < gammas.size(); ++gi) {
            double f = rows[gi].fidelity;
            bool flag = f > threshold;
            map.fidelities[ni * gammas.size() + gi] = f;
            map.above[ni * gammas.size() + gi] = flag;
            if (!still_above && flag)
                throw Error("region map column is not a prefix in gamma");
            still_above = still_above && flag;
        }
    }
    return map;
}

}  // namespace fockforge
