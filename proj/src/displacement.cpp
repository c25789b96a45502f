#include "fockforge/displacement.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "fockforge/special.hpp"
#include "fockforge/threads.hpp"

namespace fockforge {

void displacement_radial_row(int q, double g, int p_max, std::vector<double>& out) {
    out.resize(static_cast<size_t>(p_max) + 1);
    if (g == 0.0) {
        // D(0) column: L_p^0(0) = 1 and the g^q factor kills q > 0.
        for (int p = 0; p <= p_max; ++p) out[static_cast<size_t>(p)] = (q == 0) ? 1.0 : 0.0;
        return;
    }
    const double x = g * g;
    double pref = std::exp(-0.5 * x + q * std::log(g) - 0.5 * log_factorial(q));
    double lpm1 = 0.0;
    double lp = 1.0;
    out[0] = pref * lp;
    for (int p = 0; p < p_max; ++p) {
        double lnext = laguerre_next(p, q, x, lp, lpm1);
        lpm1 = lp;
        lp = lnext;
        pref *= std::sqrt((p + 1.0) / (p + q + 1.0));
        out[static_cast<size_t>(p) + 1] = pref * lp;
    }
}

namespace {

// One diagonal pair of the matrix: entries (p+q, p) and (p, p+q).
void fill_diagonal(int q, double beta, int c, std::vector<double>& entries,
                   std::vector<double>& scratch) {
    const double g = std::abs(beta);
    const double sign = (beta < 0.0) ? -1.0 : 1.0;
    const double s_lower = (q % 2 == 0) ? 1.0 : sign;          // sign of beta^q
    const double s_upper = (q % 2 == 0) ? s_lower : -s_lower;  // sign of (-beta)^q
    displacement_radial_row(q, g, c - 1 - q, scratch);
    for (int p = 0; p + q < c; ++p) {
        double r = scratch[static_cast<size_t>(p)];
        entries[static_cast<size_t>(p + q) * c + p] = s_lower * r;
        entries[static_cast<size_t>(p) * c + (p + q)] = s_upper * r;
    }
}

std::vector<double> build_entries(double beta, int c, int threads) {
    std::vector<double> entries(static_cast<size_t>(c) * c, 0.0);
    if (threads == 1) {
        std::vector<double> scratch;
        for (int q = 0; q < c; ++q) fill_diagonal(q, beta, c, entries, scratch);
        return entries;
    }
    parallel_for_indexed(c, threads, [&](long q) {
        std::vector<double> scratch;
        fill_diagonal(static_cast<int>(q), beta, c, entries, scratch);
    });
    return entries;
}

}  // namespace

DisplacementMatrix::DisplacementMatrix(HilbertSpace space, double beta,
                                       std::vector<double> entries)
    : space_(space), beta_(beta), entries_(std::move(entries)) {}

int DisplacementMatrix::safe_block() const {
    int pad = static_cast<int>(std::ceil(8.0 * std::abs(beta_) + 10.0));
    return std::max(0, cutoff() - pad);
}

double DisplacementMatrix::unitarity_defect() const {
    const int c = cutoff();
    const int b = safe_block();
    double worst = 0.0;
    for (int n = 0; n < b; ++n) {
        for (int m = 0; m < b; ++m) {
            double s = 0.0;
            for (int k = 0; k < c; ++k) s += at(k, n) * at(k, m);
            worst = std::max(worst, std::abs(s - (n == m ? 1.0 : 0.0)));
        }
    }
    return worst;
}

DisplacementMatrix displacement_matrix_reference(double beta, const HilbertSpace& space) {
    if (space.cutoff() < 4) throw CutoffTooSmall("displacement matrix needs cutoff >= 4");
    if (std::abs(beta) > 10.0) throw Error("displacement amplitude |beta| > 10 unsupported");
    return DisplacementMatrix(space, beta, build_entries(beta, space.cutoff(), 1));
}

DisplacementMatrix displacement_matrix(double beta, const HilbertSpace& space, int threads) {
    if (space.cutoff() < 4) throw CutoffTooSmall("displacement matrix needs cutoff >= 4");
    if (std::abs(beta) > 10.0) throw Error("displacement amplitude |beta| > 10 unsupported");
    return DisplacementMatrix(space, beta, build_entries(beta, space.cutoff(), threads));
}

namespace {

// read-dominant: sweeps and grid searches hit a handful of betas many
// thousands of times
std::shared_mutex cache_mutex;
std::map<std::pair<std::uint64_t, int>, std::shared_ptr<const DisplacementMatrix>>
    displacement_cache;

}  // namespace

std::shared_ptr<const DisplacementMatrix> cached_displacement(double beta,
                                                              const HilbertSpace& space) {
    const auto key = std::make_pair(std::bit_cast<std::uint64_t>(beta), space.cutoff());
    {
        std::shared_lock lock(cache_mutex);
        auto it = displacement_cache.find(key);
        if (it != displacement_cache.end()) return it->second;
    }
    auto built = std::make_shared<const DisplacementMatrix>(displacement_matrix(beta, space, 1));
    std::unique_lock lock(cache_mutex);
    auto [it, inserted] = displacement_cache.emplace(key, built);
    return it->second;
}

void clear_displacement_cache() {
    std::unique_lock lock(cache_mutex);
    displacement_cache.clear();
}

}  // namespace fockforge
