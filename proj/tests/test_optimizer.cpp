#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fockforge/optimize.hpp"
#include "fockforge/reference_table.hpp"

using namespace fockforge;
using std::numbers::pi;

TEST_CASE("toy 1-D refine: P_1 from vacuum over beta peaks at beta = 1") {
    // brute-force scan oracle at step 1e-5: P_1(beta) = beta^2 e^{-beta^2},
    // maximum at beta = 1 with value e^{-1}
    double best_beta = 0.0, best_p = -1.0;
    for (double b = 0.0; b <= 2.0; b += 1e-5) {
        double p = b * b * std::exp(-b * b);
        if (p > best_p) {
            best_p = p;
            best_beta = b;
        }
    }
    REQUIRE(best_beta == doctest::Approx(1.0).epsilon(1e-4));
    REQUIRE(best_p == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));

    SearchConfig cfg;
    cfg.target_n = 1;
    cfg.m_steps = 1;
    cfg.freeze_chi = true;
    cfg.alpha_override = cplx{0.0, 0.0};
    cfg.refine_iterations = 300;
    cfg.seed = 3;
    auto res = refine(PulseSequence{cplx{0.0, 0.0}, {PulseStep{0.4, 0.0}}}, cfg);
    CHECK(res.best_params.steps[0].beta == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(res.best_fidelity == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));

    SUBCASE("the simplex core alone matches the scan oracle") {
        detail::SimplexOptions sopts;
        sopts.max_iterations = 300;
        auto out = detail::simplex_maximize(
            [](const std::vector<double>& v) { return v[0] * v[0] * std::exp(-v[0] * v[0]); },
            {0.4}, sopts);
        CHECK(out.best_point[0] == doctest::Approx(best_beta).epsilon(1e-3));
        CHECK(out.best_value == doctest::Approx(best_p).epsilon(1e-8));
    }
}

TEST_CASE("grid containing the exact optimum returns it: N=0, M=1, alpha=0") {
    SearchConfig cfg;
    cfg.target_n = 0;
    cfg.m_steps = 1;
    cfg.beta_min = -1.0;
    cfg.beta_max = 1.0;  // 21 points -> spacing 0.1, contains 0 exactly
    auto res = grid_search(cfg);
    CHECK(res.best_fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.best_params.steps[0].beta == 0.0);
    CHECK(res.best_params.steps[0].chi == 0.0);
}

TEST_CASE("exhaustive grid on default axes") {
    // Default 21-point axes measurably top out at 0.95252 (N=1) and 0.91503
    // (N=2): beta spacing 0.15 and chi/pi spacing 1/21 straddle the optima.
    SearchConfig cfg;
    cfg.m_steps = 2;
    cfg.threads = 2;
    SUBCASE("N=1") {
        cfg.target_n = 1;
        auto res = grid_search(cfg);
        CHECK(res.best_fidelity >= 0.95);
        CHECK(res.evals_used == 21L * 21 * 21 * 21);
    }
    SUBCASE("N=2") {
        cfg.target_n = 2;
        auto res = grid_search(cfg);
        CHECK(res.best_fidelity >= 0.91);
    }
}

TEST_CASE("grid search guards") {
    SearchConfig cfg;
    cfg.target_n = 1;
    SUBCASE("dimension guard") {
        cfg.m_steps = 5;
        CHECK_THROWS_AS((void)grid_search(cfg), ConfigError);
    }
    SUBCASE("budget guard") {
        cfg.m_steps = 2;
        cfg.budget_evals = 1000;
        CHECK_THROWS_AS((void)grid_search(cfg), BudgetExceeded);
    }
    SUBCASE("degenerate range") {
        cfg.m_steps = 1;
        cfg.beta_min = cfg.beta_max = 0.5;
        CHECK_THROWS_AS((void)grid_search(cfg), ConfigError);
    }
}

TEST_CASE("refine from a reference row must not regress") {
    const auto& table = ReferenceTable::bundled();
    SearchConfig cfg;
    cfg.target_n = 3;
    cfg.m_steps = 3;
    cfg.seed = 7;
    auto res = refine(table.sequence_for(3, 3), cfg);
    CHECK(res.best_fidelity >= 0.97 - 1e-3);
}

TEST_CASE("refine improves on any poor seeded start") {
    SearchConfig cfg;
    cfg.target_n = 2;
    cfg.m_steps = 2;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ub(-1.0, 2.0), uc(0.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        PulseSequence start = PulseSequence::for_target(
            2, {PulseStep{ub(rng), uc(rng) * pi}, PulseStep{ub(rng), uc(rng) * pi}});
        cfg.seed = 100 + trial;
        double at_start = protocol_fidelity(start, 2, HilbertSpace(auto_cutoff(start) + 2),
                                            ProtocolOptions{1e-8, 1e-6, false, 1e-6});
        auto res = refine(start, cfg);
        CAPTURE(trial);
        CHECK(res.best_fidelity >= at_start - 1e-12);
    }
}

TEST_CASE("staged search reaches the reference fidelities") {
    struct Target {
        int n, m;
        double need;
    };
    // criterion targets N in {1,2,3} x M=2 and {3,5} x M=3 run in the
    // acceptance suite; two spot rows keep this suite fast
    for (auto t : {Target{2, 2, 0.92}, Target{3, 3, 0.96}}) {
        SearchConfig cfg;
        cfg.target_n = t.n;
        cfg.m_steps = t.m;
        cfg.seed = 42;
        cfg.threads = 2;
        auto res = staged_search(cfg);
        CAPTURE(t.n);
        CAPTURE(t.m);
        CHECK(res.best_fidelity >= t.need);
        CHECK(res.evals_used <= cfg.budget_evals);
    }
}

TEST_CASE("staged is never worse than exhaustive minus 0.02 on N=1 M=2") {
    SearchConfig cfg;
    cfg.target_n = 1;
    cfg.m_steps = 2;
    cfg.seed = 42;
    cfg.threads = 2;
    auto exhaustive = grid_search(cfg);
    auto staged = staged_search(cfg);
    CHECK(staged.best_fidelity >= exhaustive.best_fidelity - 0.02);
}

TEST_CASE("staged search rejects M < 2") {
    SearchConfig cfg;
    cfg.target_n = 1;
    cfg.m_steps = 1;
    CHECK_THROWS_AS((void)staged_search(cfg), ConfigError);
}

TEST_CASE("determinism: identical config and seed reproduce the result bitwise") {
    SearchConfig cfg;
    cfg.target_n = 2;
    cfg.m_steps = 2;
    cfg.seed = 1234;
    cfg.threads = 2;
    auto a = staged_search(cfg);
    auto b = staged_search(cfg);
    CHECK(a.best_fidelity == b.best_fidelity);
    REQUIRE(a.best_params.m() == b.best_params.m());
    for (int k = 0; k < a.best_params.m(); ++k) {
        CHECK(a.best_params.steps[k].beta == b.best_params.steps[k].beta);
        CHECK(a.best_params.steps[k].chi == b.best_params.steps[k].chi);
    }
    CHECK(a.evals_used == b.evals_used);

    SUBCASE("thread count does not change the outcome") {
        SearchConfig serial = cfg;
        serial.threads = 1;
        auto c = staged_search(serial);
        CHECK(c.best_fidelity == a.best_fidelity);
        for (int k = 0; k < a.best_params.m(); ++k)
            CHECK(c.best_params.steps[k].beta == a.best_params.steps[k].beta);
    }
}

TEST_CASE("re-evaluating best_params reproduces best_fidelity") {
    SearchConfig cfg;
    cfg.target_n = 1;
    cfg.m_steps = 2;
    cfg.seed = 9;
    auto res = staged_search(cfg);
    double again = protocol_fidelity(res.best_params, cfg.target_n,
                                     HilbertSpace(res.cutoff_used),
                                     ProtocolOptions{1e-8, 1e-6, false, 1e-6});
    CHECK(std::abs(again - res.best_fidelity) < 1e-10);
}

TEST_CASE("chi periodicity: searching chi/pi over [0,1) and [0,2) agree") {
    SearchConfig cfg;
    cfg.target_n = 1;
    cfg.m_steps = 1;
    auto narrow = grid_search(cfg);
    cfg.chi_over_pi_max = 2.0;  // 21 points over [0,2) cover the same set mod 1
    auto wide = grid_search(cfg);
    CHECK(std::abs(narrow.best_fidelity - wide.best_fidelity) < 1e-9);
}

TEST_CASE("improvement trace records monotone best values") {
    SearchConfig cfg;
    cfg.target_n = 1;
    cfg.m_steps = 1;
    cfg.keep_trace = true;
    auto res = grid_search(cfg);
    REQUIRE_FALSE(res.trace.empty());
    for (size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i].second > res.trace[i - 1].second);
    CHECK(res.trace.back().second == res.best_fidelity);
}

TEST_CASE("M = 0 search evaluates the bare coherent state") {
    SearchConfig cfg;
    cfg.target_n = 0;
    cfg.m_steps = 0;
    auto res = grid_search(cfg);
    CHECK(res.best_fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.best_params.m() == 0);
    CHECK(res.evals_used == 1);
}

TEST_CASE("search result serializes with a config echo") {
    SearchConfig cfg;
    cfg.target_n = 0;
    cfg.m_steps = 0;
    auto res = grid_search(cfg);
    auto json = res.to_json(cfg);
    CHECK(json.find("best_fidelity") != std::string::npos);
    CHECK(json.find("budget_evals") != std::string::npos);
    CHECK(json.find("chi_over_pi") != std::string::npos);
}
