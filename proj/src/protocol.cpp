#include "fockforge/protocol.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "fockforge/displacement.hpp"

namespace fockforge {

PulseSequence PulseSequence::for_target(int n, std::vector<PulseStep> steps) {
    if (n < 0) throw ConfigError("target Fock index must be >= 0");
    return PulseSequence{cplx{std::sqrt(static_cast<double>(n)), 0.0}, std::move(steps)};
}

double PulseSequence::beta_abs_sum() const {
    double s = 0.0;
    for (const auto& st : steps) s += std::abs(st.beta);
    return s;
}

std::string PulseSequence::to_json() const {
    nlohmann::json j;
    j["alpha"] = {alpha.real(), alpha.imag()};
    auto& arr = j["steps"] = nlohmann::json::array();
    for (const auto& st : steps)
        arr.push_back({{"beta", st.beta}, {"chi_over_pi", st.chi / std::numbers::pi}});
    return j.dump();
}

PulseSequence PulseSequence::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    PulseSequence seq;
    seq.alpha = cplx{j.at("alpha").at(0).get<double>(), j.at("alpha").at(1).get<double>()};
    for (const auto& st : j.at("steps"))
        seq.steps.push_back(PulseStep{st.at("beta").get<double>(),
                                      st.at("chi_over_pi").get<double>() * std::numbers::pi});
    return seq;
}

int auto_cutoff(const PulseSequence& seq) {
    return tail_safe_cutoff(std::abs(seq.alpha) + seq.beta_abs_sum());
}

std::vector<cplx> kerr_phases(double chi, const HilbertSpace& space) {
    // n(n-1) is even for every n, so the diagonal is exactly pi-periodic in
    // chi; reducing first keeps sin/cos arguments small and makes the
    // periodicity hold to the last bit.
    const double chi_red = std::fmod(chi, std::numbers::pi);
    const int c = space.cutoff();
    std::vector<cplx> diag(static_cast<size_t>(c));
    for (int n = 0; n < c; ++n) {
        double nn1 = static_cast<double>(n) * (static_cast<double>(n) - 1.0);
        diag[static_cast<size_t>(n)] = std::polar(1.0, -chi_red * nn1);
    }
    return diag;
}

PureState apply_step(const PureState& state, const PulseStep& step, const ProtocolOptions& opts) {
    const auto& space = state.space();
    const int c = space.cutoff();

    auto phases = kerr_phases(step.chi, space);
    std::vector<cplx> v(static_cast<size_t>(c));
    for (int n = 0; n < c; ++n) v[static_cast<size_t>(n)] = phases[static_cast<size_t>(n)] * state.amplitude(n);

    auto d = cached_displacement(step.beta, space);
    std::vector<cplx> y(static_cast<size_t>(c), cplx{0.0, 0.0});
    for (int n = 0; n < c; ++n) {
        const double* row = d->entries().data() + static_cast<size_t>(n) * c;
        cplx acc{0.0, 0.0};
        for (int m = 0; m < c; ++m) acc += row[m] * v[static_cast<size_t>(m)];
        y[static_cast<size_t>(n)] = acc;
    }

    double norm_sq = 0.0;
    for (const auto& a : y) norm_sq += std::norm(a);
    double deficit = 1.0 - norm_sq;
    if (std::abs(deficit) > opts.norm_deficit_limit)
        throw LeakageExceeded("pre-renormalization norm deficit " + std::to_string(deficit) +
                              " exceeds limit; genuine truncation leakage");
    if (std::norm(y.back()) >= opts.leakage_threshold)
        throw LeakageExceeded("top-of-basis occupancy crossed leakage threshold in apply_step");

    return renormalized(space, std::move(y));
}

PureState run_protocol(const PulseSequence& seq, const HilbertSpace& space,
                       const ProtocolOptions& opts) {
    PureState state = coherent_state(seq.alpha, space);
    for (const auto& step : seq.steps) state = apply_step(state, step, opts);
    state.check_leakage(opts.leakage_threshold);
    return state;
}

ProtocolRun run_protocol_checked(const PulseSequence& seq, const ProtocolOptions& opts,
                                 std::optional<int> target_n,
                                 std::optional<int> cutoff_override) {
    int c = cutoff_override.value_or(auto_cutoff(seq));
    if (target_n && *target_n >= c) throw IndexOutOfCutoff("target N outside the basis");
    HilbertSpace space(c);
    PureState state = run_protocol(seq, space, opts);

    ProtocolRun run{state, c, std::abs(state.norm_deficit()), std::nullopt};
    if (opts.convergence_doubling) {
        HilbertSpace doubled(2 * c);
        PureState wide = run_protocol(seq, doubled, opts);
        double shift;
        if (target_n) {
            shift = std::abs(fock_fidelity(wide, *target_n) - fock_fidelity(state, *target_n));
        } else {
            // overlap of the two runs on the shared block
            cplx ov{0.0, 0.0};
            for (int n = 0; n < c; ++n) ov += std::conj(state.amplitude(n)) * wide.amplitude(n);
            shift = std::abs(1.0 - std::abs(ov));
        }
        run.doubling_shift = shift;
        if (shift >= opts.convergence_tol)
            throw CutoffConvergenceFailed("doubling the cutoff moved the result by " +
                                          std::to_string(shift));
    }
    return run;
}

double protocol_fidelity(const PulseSequence& seq, int n, const HilbertSpace& space,
                         const ProtocolOptions& opts) {
    if (n < 0 || n >= space.cutoff()) throw IndexOutOfCutoff("protocol_fidelity: N outside basis");
    ProtocolOptions inner = opts;
    inner.convergence_doubling = false;
    double p = fock_fidelity(run_protocol(seq, space, inner), n);
    if (opts.convergence_doubling) {
        HilbertSpace doubled(2 * space.cutoff());
        double p2 = fock_fidelity(run_protocol(seq, doubled, inner), n);
        if (std::abs(p2 - p) >= opts.convergence_tol)
            throw CutoffConvergenceFailed("fidelity moved by " + std::to_string(std::abs(p2 - p)) +
                                          " under cutoff doubling");
    }
    return p;
}

}  // namespace fockforge
