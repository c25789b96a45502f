#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fockforge/protocol.hpp"
#include "fockforge/reference_table.hpp"
#include "oracles.hpp"

using namespace fockforge;
using std::numbers::pi;

namespace {

PureState random_state(const HilbertSpace& sp, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> amps(static_cast<size_t>(sp.cutoff()));
    for (auto& a : amps) a = cplx{u(rng), u(rng)};
    return renormalized(sp, std::move(amps));
}

}  // namespace

TEST_CASE("kerr_phases trivial diagonals") {
    HilbertSpace sp(16);
    SUBCASE("chi = 0 is all ones") {
        for (const auto& z : kerr_phases(0.0, sp)) CHECK(z == cplx{1.0, 0.0});
    }
    SUBCASE("chi = pi is all ones since n(n-1) is even") {
        for (const auto& z : kerr_phases(pi, sp)) {
            CHECK(z.real() == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(std::abs(z.imag()) < 1e-13);
        }
    }
    SUBCASE("chi = pi/2 at n = 2 gives e^{-i pi} = -1") {
        auto d = kerr_phases(pi / 2.0, sp);
        CHECK(d[2].real() == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(std::abs(d[2].imag()) < 1e-13);
    }
}

TEST_CASE("identity step leaves any state untouched") {
    HilbertSpace sp(32);
    auto st = coherent_state(cplx{0.7, 0.2}, sp);
    auto out = apply_step(st, PulseStep{0.0, 0.0});
    for (int n = 0; n < sp.cutoff(); ++n)
        CHECK(std::abs(out.amplitude(n) - st.amplitude(n)) < 1e-14);
}

TEST_CASE("Kerr pi-periodicity: (0, chi) and (0, chi + pi) act identically") {
    // 100 randomized states; exactness to 1e-12 per amplitude. Random states
    // legitimately occupy the whole basis, so the leakage guard is off here.
    HilbertSpace sp(40);
    ProtocolOptions loose{2.0, 1.0, false, 1e-6};
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> chis(0.0, pi);
    for (int trial = 0; trial < 100; ++trial) {
        auto st = random_state(sp, rng);
        double chi = chis(rng);
        auto a = apply_step(st, PulseStep{0.0, chi}, loose);
        auto b = apply_step(st, PulseStep{0.0, chi + pi}, loose);
        for (int n = 0; n < sp.cutoff(); ++n)
            CHECK(std::abs(a.amplitude(n) - b.amplitude(n)) < 1e-12);
    }
}

TEST_CASE("Kerr alone preserves the photon distribution") {
    HilbertSpace sp(40);
    ProtocolOptions loose{2.0, 1.0, false, 1e-6};
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> chis(-2.0 * pi, 2.0 * pi);
    for (int trial = 0; trial < 100; ++trial) {
        auto st = random_state(sp, rng);
        auto before = photon_distribution(st);
        auto after = photon_distribution(apply_step(st, PulseStep{0.0, chis(rng)}, loose));
        for (int n = 0; n < sp.cutoff(); ++n)
            CHECK(std::abs(after.probabilities[n] - before.probabilities[n]) < 1e-12);
    }
}

TEST_CASE("displacement composition: coherent(0.3) + beta 0.5 -> coherent(0.8)") {
    HilbertSpace sp(32);
    auto out = apply_step(coherent_state(0.3, sp), PulseStep{0.5, 0.0});
    auto want = coherent_state(0.8, sp);
    CHECK(std::abs(overlap(want, out)) > 1.0 - 1e-9);

    SUBCASE("property over random real amplitudes") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 15; ++trial) {
            double a = u(rng), b = u(rng);
            HilbertSpace wide(tail_safe_cutoff(std::abs(a) + std::abs(b)) + 8);
            auto got = apply_step(coherent_state(a, wide), PulseStep{b, 0.0});
            auto ref = coherent_state(a + b, wide);
            CHECK(1.0 - std::abs(overlap(ref, got)) < 1e-8);
        }
    }
}

TEST_CASE("empty sequence returns the coherent state") {
    auto seq = PulseSequence::for_target(2);
    HilbertSpace sp(auto_cutoff(seq));
    auto st = run_protocol(seq, sp);
    CHECK(fock_fidelity(st, 2) ==
          doctest::Approx(oracles::poisson_pn(std::sqrt(2.0), 2)).epsilon(1e-10));
    CHECK(fock_fidelity(st, 2) == doctest::Approx(0.2707).epsilon(1e-3));
}

TEST_CASE("single-step optima quoted for M = 1") {
    SUBCASE("alpha=1, beta=0.5, chi=1.61pi gives P_1 near 0.8") {
        PulseSequence seq{cplx{1.0, 0.0}, {PulseStep{0.5, 1.61 * pi}}};
        double p = protocol_fidelity(seq, 1, HilbertSpace(auto_cutoff(seq)));
        CHECK(p == doctest::Approx(0.80).epsilon(0.025));
    }
    SUBCASE("alpha=sqrt2, beta=0.55, chi=1.835pi gives P_2 near 0.73") {
        PulseSequence seq{cplx{std::sqrt(2.0), 0.0}, {PulseStep{0.55, 1.835 * pi}}};
        double p = protocol_fidelity(seq, 2, HilbertSpace(auto_cutoff(seq)));
        CHECK(p == doctest::Approx(0.73).epsilon(0.03));
    }
}

TEST_CASE("reference table rows reproduce their printed fidelities") {
    const auto& table = ReferenceTable::bundled();
    SUBCASE("M=3, N=3 lands at 0.97 within 0.01") {
        auto seq = table.sequence_for(3, 3);
        double p = protocol_fidelity(seq, 3, HilbertSpace(auto_cutoff(seq)));
        CHECK(std::abs(p - 0.97) < 0.01);
    }
    SUBCASE("M=2, N=6 lands at 0.91 within 0.01") {
        auto seq = table.sequence_for(6, 2);
        double p = protocol_fidelity(seq, 6, HilbertSpace(auto_cutoff(seq)));
        CHECK(std::abs(p - 0.91) < 0.01);
    }
    SUBCASE("M=3, N=20 lands at 0.95 within 0.01") {
        auto seq = table.sequence_for(20, 3);
        double p = protocol_fidelity(seq, 20, HilbertSpace(auto_cutoff(seq)));
        CHECK(std::abs(p - 0.95) < 0.01);
    }
    SUBCASE("M=3, N=3 output is sub-Poissonian") {
        auto seq = table.sequence_for(3, 3);
        auto st = run_protocol(seq, HilbertSpace(auto_cutoff(seq)));
        auto [mean, var] = mean_and_variance(st);
        CHECK(var < mean);
        CHECK(second_order_coherence(st) < 1.0);
    }
}

TEST_CASE("two-step propagation agrees with the nested-sum oracle") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> ub(-0.6, 0.6), uc(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        double b1 = ub(rng), b2 = ub(rng), c1 = uc(rng) * pi, c2 = uc(rng) * pi;
        double alpha = 1.2;
        PulseSequence seq{cplx{alpha, 0.0}, {PulseStep{b1, c1}, PulseStep{b2, c2}}};
        HilbertSpace sp(40);
        for (int N : {0, 1, 2, 3}) {
            double got = protocol_fidelity(seq, N, sp,
                                           ProtocolOptions{1e-8, 1e-6, false, 1e-6});
            double want = oracles::nested_sum_p2(alpha, b1, b2, c1, c2, N, 40);
            CAPTURE(trial);
            CAPTURE(N);
            CHECK(std::abs(got - want) < 1e-8);
        }
    }
}

TEST_CASE("Yurke-Stoler identity at chi = pi/2") {
    for (double a : {0.5, 1.0, 2.0}) {
        HilbertSpace sp(tail_safe_cutoff(a) + 8);
        PulseSequence seq{cplx{a, 0.0}, {PulseStep{0.0, pi / 2.0}}};
        auto st = run_protocol(seq, sp);
        auto ref = oracles::yurke_stoler_reference(cplx{a, 0.0}, sp);
        CAPTURE(a);
        CHECK(std::abs(overlap(ref, st)) > 1.0 - 1e-8);
    }
}

TEST_CASE("norm stays unit through a full protocol run") {
    const auto& table = ReferenceTable::bundled();
    auto seq = table.sequence_for(5, 3);
    auto run = run_protocol_checked(seq, ProtocolOptions{}, 5);
    CHECK(run.state.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(run.max_norm_deficit < 1e-9);
    REQUIRE(run.doubling_shift.has_value());
    CHECK(*run.doubling_shift < 1e-6);
}

TEST_CASE("protocol guards") {
    SUBCASE("leakage is detected when the basis is too tight") {
        HilbertSpace sp(tail_safe_cutoff(2.0));
        auto st = coherent_state(2.0, sp);
        CHECK_THROWS_AS((void)apply_step(st, PulseStep{3.0, 0.0}), LeakageExceeded);
    }
    SUBCASE("doubling check flags a cutoff the displacement pushes against") {
        // vacuum start admits a tiny basis; the big displacement then slams
        // the state into the ceiling, which only the doubling check can see
        // once the per-step guards are loosened
        PulseSequence seq{cplx{0.0, 0.0}, {PulseStep{2.0, 0.3 * pi}}};
        CHECK_THROWS_AS(
            (void)run_protocol_checked(seq, ProtocolOptions{1.0, 1.0, true, 1e-6}, 1, 12),
            CutoffConvergenceFailed);
    }
}

TEST_CASE("pulse sequence serialization round-trips chi as chi/pi") {
    auto seq = PulseSequence::for_target(4, {PulseStep{0.52, 1.936 * pi},
                                             PulseStep{-0.18, 1.27 * pi},
                                             PulseStep{0.2, 0.41 * pi}});
    auto back = PulseSequence::from_json(seq.to_json());
    CHECK(back.alpha == seq.alpha);
    REQUIRE(back.m() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(back.steps[k].beta == seq.steps[k].beta);
        CHECK(back.steps[k].chi == doctest::Approx(seq.steps[k].chi).epsilon(1e-15));
    }
}
