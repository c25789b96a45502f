#include "fockforge/states.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "fockforge/special.hpp"

namespace fockforge {

namespace {

std::vector<double> distribution_of(const std::vector<cplx>& amps) {
    std::vector<double> p(amps.size());
    for (size_t n = 0; n < amps.size(); ++n) p[n] = std::norm(amps[n]);
    return p;
}

}  // namespace

double PhotonDistribution::mean() const {
    double m = 0.0;
    for (size_t n = 0; n < probabilities.size(); ++n) m += static_cast<double>(n) * probabilities[n];
    return m;
}

double PhotonDistribution::variance() const {
    double m = mean();
    double m2 = 0.0;
    for (size_t n = 0; n < probabilities.size(); ++n)
        m2 += static_cast<double>(n) * static_cast<double>(n) * probabilities[n];
    return m2 - m * m;
}

double PhotonDistribution::second_order_coherence() const {
    double m = mean();
    if (m < 1e-12) throw ZeroMeanPhoton("g2(0) undefined: <n> < 1e-12");
    double nn = 0.0;
    for (size_t n = 0; n < probabilities.size(); ++n)
        nn += static_cast<double>(n) * (static_cast<double>(n) - 1.0) * probabilities[n];
    return nn / (m * m);
}

PureState::PureState(HilbertSpace space, std::vector<cplx> amplitudes)
    : space_(space), amps_(std::move(amplitudes)) {
    if (static_cast<int>(amps_.size()) != space_.cutoff())
        throw SpaceMismatch("amplitude vector length does not match cutoff");
    check_normalized();
}

double PureState::norm_sq() const {
    double s = 0.0;
    for (const auto& c : amps_) s += std::norm(c);
    return s;
}

double PureState::top_occupancy() const { return std::norm(amps_.back()); }

void PureState::check_normalized(double tol) const {
    if (std::abs(norm_sq() - 1.0) > tol)
        throw Error("PureState norm deviates from 1 beyond tolerance");
}

void PureState::check_leakage(double threshold) const {
    if (top_occupancy() >= threshold)
        throw LeakageExceeded("top-of-basis occupancy " + std::to_string(top_occupancy()) +
                              " exceeds leakage threshold");
}

PureState renormalized(HilbertSpace space, std::vector<cplx> amps) {
    double s = 0.0;
    for (const auto& c : amps) s += std::norm(c);
    if (s <= 0.0) throw Error("cannot normalize a zero state");
    double inv = 1.0 / std::sqrt(s);
    for (auto& c : amps) c *= inv;
    PureState st(space, std::move(amps));
    st.norm_deficit_ = 1.0 - s;
    return st;
}

PureState coherent_state(cplx alpha, const HilbertSpace& space) {
    double a = std::abs(alpha);
    if (tail_safe_cutoff(a) > space.cutoff())
        throw CutoffTooSmall("coherent_state requires |alpha|^2 + 8|alpha| + 10 <= cutoff");

    const int c = space.cutoff();
    std::vector<cplx> amps(static_cast<size_t>(c), cplx{0.0, 0.0});
    if (a == 0.0) {
        amps[0] = 1.0;
        PureState st(space, std::move(amps));
        return st;
    }
    double log_a = std::log(a);
    double phase = std::arg(alpha);
    for (int n = 0; n < c; ++n) {
        double mag = std::exp(-0.5 * a * a + n * log_a - 0.5 * log_factorial(n));
        amps[static_cast<size_t>(n)] = std::polar(mag, phase * n);
    }
    return renormalized(space, std::move(amps));
}

PureState fock_state(int n, const HilbertSpace& space) {
    if (n < 0 || n >= space.cutoff()) throw IndexOutOfCutoff("fock_state index outside basis");
    std::vector<cplx> amps(static_cast<size_t>(space.cutoff()), cplx{0.0, 0.0});
    amps[static_cast<size_t>(n)] = 1.0;
    return PureState(space, std::move(amps));
}

DensityMatrix::DensityMatrix(HilbertSpace space, std::vector<cplx> elements)
    : space_(space), elems_(std::move(elements)) {
    size_t c = static_cast<size_t>(space_.cutoff());
    if (elems_.size() != c * c) throw SpaceMismatch("density matrix size does not match cutoff");
}

DensityMatrix DensityMatrix::pure(const PureState& psi) {
    const int c = psi.cutoff();
    std::vector<cplx> e(static_cast<size_t>(c) * c);
    for (int n = 0; n < c; ++n)
        for (int m = 0; m < c; ++m)
            e[static_cast<size_t>(n) * c + m] = psi.amplitude(n) * std::conj(psi.amplitude(m));
    return DensityMatrix(psi.space(), std::move(e));
}

DensityMatrix DensityMatrix::diagonal(HilbertSpace space, const std::vector<double>& populations) {
    const int c = space.cutoff();
    if (static_cast<int>(populations.size()) > c)
        throw SpaceMismatch("more populations than basis states");
    std::vector<cplx> e(static_cast<size_t>(c) * c, cplx{0.0, 0.0});
    for (size_t n = 0; n < populations.size(); ++n) e[n * c + n] = populations[n];
    return DensityMatrix(space, std::move(e));
}

cplx DensityMatrix::trace() const {
    cplx t{0.0, 0.0};
    const int c = cutoff();
    for (int n = 0; n < c; ++n) t += at(n, n);
    return t;
}

double DensityMatrix::purity() const {
    // Tr(rho^2) = sum_{nm} rho_{nm} rho_{mn} = sum |rho_{nm}|^2 for Hermitian rho
    double s = 0.0;
    for (const auto& e : elems_) s += std::norm(e);
    return s;
}

double DensityMatrix::hermiticity_defect() const {
    const int c = cutoff();
    double worst = 0.0;
    for (int n = 0; n < c; ++n)
        for (int m = n; m < c; ++m)
            worst = std::max(worst, std::abs(at(n, m) - std::conj(at(m, n))));
    return worst;
}

void DensityMatrix::hermitize() {
    const int c = cutoff();
    for (int n = 0; n < c; ++n) {
        elems_[static_cast<size_t>(n) * c + n] = cplx{elems_[static_cast<size_t>(n) * c + n].real(), 0.0};
        for (int m = n + 1; m < c; ++m) {
            cplx avg = 0.5 * (at(n, m) + std::conj(at(m, n)));
            elems_[static_cast<size_t>(n) * c + m] = avg;
            elems_[static_cast<size_t>(m) * c + n] = std::conj(avg);
        }
    }
}

PhotonDistribution photon_distribution(const PureState& state) {
    return PhotonDistribution{distribution_of(state.amplitudes())};
}

PhotonDistribution photon_distribution(const DensityMatrix& rho) {
    const int c = rho.cutoff();
    std::vector<double> p(static_cast<size_t>(c));
    for (int n = 0; n < c; ++n) {
        cplx d = rho.at(n, n);
        if (std::abs(d.imag()) >= 1e-10)
            throw Error("density matrix diagonal has imaginary part >= 1e-10");
        p[static_cast<size_t>(n)] = d.real();
    }
    return PhotonDistribution{std::move(p)};
}

double fock_fidelity(const PureState& state, int n) {
    if (n < 0 || n >= state.cutoff()) throw IndexOutOfCutoff("fock_fidelity: N outside basis");
    return std::norm(state.amplitude(n));
}

double fock_fidelity(const DensityMatrix& rho, int n) {
    if (n < 0 || n >= rho.cutoff()) throw IndexOutOfCutoff("fock_fidelity: N outside basis");
    return rho.at(n, n).real();
}

std::pair<double, double> mean_and_variance(const PureState& state) {
    auto d = photon_distribution(state);
    return {d.mean(), d.variance()};
}

std::pair<double, double> mean_and_variance(const DensityMatrix& rho) {
    auto d = photon_distribution(rho);
    return {d.mean(), d.variance()};
}

double second_order_coherence(const PureState& state) {
    return photon_distribution(state).second_order_coherence();
}

double second_order_coherence(const DensityMatrix& rho) {
    return photon_distribution(rho).second_order_coherence();
}

cplx overlap(const PureState& a, const PureState& b) {
    if (!(a.space() == b.space())) throw SpaceMismatch("overlap across different cutoffs");
    cplx s{0.0, 0.0};
    for (int n = 0; n < a.cutoff(); ++n) s += std::conj(a.amplitude(n)) * b.amplitude(n);
    return s;
}

std::string PureState::to_json() const {
    nlohmann::json j;
    j["cutoff"] = cutoff();
    auto& arr = j["amplitudes"] = nlohmann::json::array();
    for (const auto& c : amps_) arr.push_back({c.real(), c.imag()});
    return j.dump();
}

PureState PureState::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    HilbertSpace space(j.at("cutoff").get<int>());
    std::vector<cplx> amps;
    for (const auto& pair : j.at("amplitudes"))
        amps.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    return PureState(space, std::move(amps));
}

std::string DensityMatrix::to_json() const {
    nlohmann::json j;
    const int c = cutoff();
    j["cutoff"] = c;
    auto& rows = j["rho"] = nlohmann::json::array();
    for (int n = 0; n < c; ++n) {
        nlohmann::json row = nlohmann::json::array();
        for (int m = 0; m < c; ++m) row.push_back({at(n, m).real(), at(n, m).imag()});
        rows.push_back(std::move(row));
    }
    return j.dump();
}

DensityMatrix DensityMatrix::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    const int c = j.at("cutoff").get<int>();
    HilbertSpace space(c);
    std::vector<cplx> e;
    e.reserve(static_cast<size_t>(c) * c);
    for (const auto& row : j.at("rho"))
        for (const auto& pair : row) e.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    return DensityMatrix(space, std::move(e));
}

}  // namespace fockforge
