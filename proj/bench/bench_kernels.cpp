// Timing comparison between the serial reference kernels and their parallel
// twins. Each pair is verified to agree bitwise before the timings print, so
// a speedup here is never bought with a numerical difference.
//
//   ./fockforge_bench [threads]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>
#include <vector>

#include "fockforge/displacement.hpp"
#include "fockforge/open_system.hpp"
#include "fockforge/optimize.hpp"
#include "fockforge/phase_space.hpp"
#include "fockforge/protocol.hpp"
#include "fockforge/pulse_validation.hpp"
#include "fockforge/reference_table.hpp"
#include "fockforge/threads.hpp"

using namespace fockforge;
using std::numbers::pi;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Row {
    std::string name;
    double serial_ms;
    double parallel_ms;
    bool identical;
};

std::vector<Row> rows;

template <typename SerialFn, typename ParallelFn, typename EqFn>
void bench(const std::string& name, SerialFn&& serial, ParallelFn&& parallel, EqFn&& equal,
           int repeats = 3) {
    // warm caches once, then take the best of a few repeats
    auto a = serial();
    auto b = parallel();
    bool identical = equal(a, b);
    double ts = 1e300, tp = 1e300;
    for (int r = 0; r < repeats; ++r) {
        double t0 = now_ms();
        (void)serial();
        ts = std::min(ts, now_ms() - t0);
        t0 = now_ms();
        (void)parallel();
        tp = std::min(tp, now_ms() - t0);
    }
    rows.push_back(Row{name, ts, tp, identical});
}

}  // namespace

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : resolve_threads(0);
    std::printf("parallel kernels on %d thread(s), serial reference alongside\n\n", threads);

    {
        HilbertSpace sp(192);
        bench(
            "displacement build (cutoff 192)",
            [&] { return displacement_matrix_reference(0.95, sp); },
            [&] { return displacement_matrix(0.95, sp, threads); },
            [](const DisplacementMatrix& a, const DisplacementMatrix& b) {
                return a.entries() == b.entries();
            });
    }

    {
        const auto& table = ReferenceTable::bundled();
        auto seq = table.sequence_for(3, 3);
        HilbertSpace sp(auto_cutoff(seq));
        auto rho = DensityMatrix::pure(run_protocol(seq, sp));
        auto grid = PhaseSpaceGrid::centered(std::sqrt(3.0) + 4.0, 201);
        bench(
            "wigner field (201^2, cutoff 39)", [&] { return wigner_reference(rho, grid); },
            [&] { return wigner(rho, grid, threads); },
            [](const WignerField& a, const WignerField& b) { return a.values == b.values; });
        bench(
            "husimi field (201^2, cutoff 39)", [&] { return husimi_reference(rho, grid); },
            [&] { return husimi(rho, grid, threads); },
            [](const WignerField& a, const WignerField& b) { return a.values == b.values; });
    }

    {
        const auto& table = ReferenceTable::bundled();
        DissipativeConfig cfg;
        cfg.sequence = table.sequence_for(5, 3);
        std::vector<double> gammas{0.0, 1e-5, 3e-5, 1e-4, 3e-4, 1e-3};
        bench(
            "loss sweep (N=5, 6 gammas)",
            [&] { return loss_sweep_reference(cfg, gammas, 5); },
            [&] { return loss_sweep(cfg, gammas, 5, threads); },
            [](const std::vector<SweepRow>& a, const std::vector<SweepRow>& b) {
                for (size_t i = 0; i < a.size(); ++i)
                    if (a[i].fidelity != b[i].fidelity) return false;
                return true;
            });
    }

    {
        double widths[] = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
        PulseStep step{0.5, 0.74 * pi};
        bench(
            "pulse convergence (5 widths)",
            [&] { return convergence_study(cplx{1.0, 0.0}, step, widths,
                                           PulseShape::Kind::gaussian, 1); },
            [&] { return convergence_study(cplx{1.0, 0.0}, step, widths,
                                           PulseShape::Kind::gaussian, threads); },
            [](const ConvergenceStudy& a, const ConvergenceStudy& b) {
                for (size_t i = 0; i < a.points.size(); ++i)
                    if (a.points[i].deficit != b.points[i].deficit) return false;
                return true;
            });
    }

    {
        SearchConfig cfg;
        cfg.target_n = 1;
        cfg.m_steps = 2;
        cfg.seed = 42;
        bench(
            "grid search (N=1, M=2, 21^4 points)",
            [&] {
                SearchConfig c = cfg;
                c.threads = 1;
                return grid_search(c);
            },
            [&] {
                SearchConfig c = cfg;
                c.threads = threads;
                return grid_search(c);
            },
            [](const SearchResult& a, const SearchResult& b) {
                return a.best_fidelity == b.best_fidelity;
            },
            1);
    }

    std::printf("%-38s %12s %12s %9s %s\n", "kernel", "serial ms", "parallel ms", "speedup",
                "bitwise");
    for (const auto& r : rows)
        std::printf("%-38s %12.1f %12.1f %8.2fx %s\n", r.name.c_str(), r.serial_ms,
                    r.parallel_ms, r.serial_ms / r.parallel_ms,
                    r.identical ? "equal" : "DIFFER");

    bool all_equal = true;
    for (const auto& r : rows) all_equal = all_equal && r.identical;
    return all_equal ? 0 : 1;
}
