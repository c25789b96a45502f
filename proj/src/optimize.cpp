#include "fockforge/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <json.hpp>

#include "fockforge/threads.hpp"

namespace fockforge {

namespace {

double wrap_unit(double v) { return v - std::floor(v); }

/// Parameter layout: [beta_1..beta_M, chi/pi_1..chi/pi_M] (chi block absent
/// when frozen). chi components are wrapped into [0,1) before evaluation so
/// equivalent points share one memo entry and one reported form.
std::vector<double> canonical(const SearchConfig& cfg, std::vector<double> v) {
    if (!cfg.freeze_chi)
        for (int k = cfg.m_steps; k < 2 * cfg.m_steps; ++k)
            v[static_cast<size_t>(k)] = wrap_unit(v[static_cast<size_t>(k)]);
    return v;
}

PulseSequence sequence_of(const SearchConfig& cfg, const std::vector<double>& canon) {
    std::vector<PulseStep> steps(static_cast<size_t>(cfg.m_steps));
    for (int k = 0; k < cfg.m_steps; ++k) {
        steps[static_cast<size_t>(k)].beta = canon[static_cast<size_t>(k)];
        double cop = cfg.freeze_chi ? cfg.chi_over_pi_min
                                    : canon[static_cast<size_t>(cfg.m_steps + k)];
        steps[static_cast<size_t>(k)].chi = cop * std::numbers::pi;
    }
    auto seq = PulseSequence::for_target(cfg.target_n, std::move(steps));
    if (cfg.alpha_override) seq.alpha = *cfg.alpha_override;
    return seq;
}

/// Pure, thread-safe fidelity evaluation. Each point runs at its own
/// tail-safe cutoff (rounded up to a multiple of 8 to keep the displacement
/// cache small); leaked evaluations score 0.
class Objective {
  public:
    explicit Objective(const SearchConfig& cfg) : cfg_(cfg) {}

    int cutoff_for(const std::vector<double>& canon) const {
        int c = std::max(auto_cutoff(sequence_of(cfg_, canon)), cfg_.target_n + 2);
        return ((c + 7) / 8) * 8;
    }

    double eval_raw(const std::vector<double>& canon) {
        evals_.fetch_add(1, std::memory_order_relaxed);
        try {
            return protocol_fidelity(sequence_of(cfg_, canon), cfg_.target_n,
                                     HilbertSpace(cutoff_for(canon)), opts_);
        } catch (const LeakageExceeded&) {
            return 0.0;
        }
    }

    /// Memoized path for the sequential simplex ascent.
    double eval(const std::vector<double>& point) {
        auto canon = canonical(cfg_, point);
        auto key = quantize(canon);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        double f = eval_raw(canon);
        memo_.emplace(std::move(key), f);
        return f;
    }

    long evals_used() const { return evals_.load(std::memory_order_relaxed); }
    bool budget_left() const { return evals_used() < cfg_.budget_evals; }

  private:
    static std::vector<long long> quantize(const std::vector<double>& v) {
        std::vector<long long> key(v.size());
        for (size_t i = 0; i < v.size(); ++i) key[i] = std::llround(v[i] / 1e-12);
        return key;
    }

    SearchConfig cfg_;
    ProtocolOptions opts_{1e-8, 1e-6, /*convergence_doubling=*/false, 1e-6};
    std::map<std::vector<long long>, double> memo_;
    std::atomic<long> evals_{0};
};

struct Axis {
    std::vector<double> points;
};

Axis beta_axis(const SearchConfig& cfg) {
    Axis a;
    const int n = cfg.grid_points_per_axis;
    for (int i = 0; i < n; ++i)
        a.points.push_back(cfg.beta_min + i * (cfg.beta_max - cfg.beta_min) / (n - 1));
    return a;
}

Axis chi_axis(const SearchConfig& cfg) {
    // Half-open sampling: chi/pi = hi is the same operator as chi/pi = lo
    // shifted by the period, so the endpoint is excluded.
    Axis a;
    const int n = cfg.grid_points_per_axis;
    for (int i = 0; i < n; ++i)
        a.points.push_back(cfg.chi_over_pi_min +
                           i * (cfg.chi_over_pi_max - cfg.chi_over_pi_min) / n);
    return a;
}

/// Serial reference for batch evaluation; the parallel kernel must match it
/// bitwise for every thread count.
void evaluate_batch_reference(Objective& obj, const std::vector<std::vector<double>>& points,
                              std::vector<double>& out) {
    out.resize(points.size());
    for (size_t i = 0; i < points.size(); ++i) out[i] = obj.eval_raw(points[i]);
}

void evaluate_batch(Objective& obj, const std::vector<std::vector<double>>& points,
                    std::vector<double>& out, int threads) {
    if (threads == 1) {
        evaluate_batch_reference(obj, points, out);
        return;
    }
    out.resize(points.size());
    parallel_for_indexed(static_cast<long>(points.size()), threads, [&](long i) {
        out[static_cast<size_t>(i)] = obj.eval_raw(points[static_cast<size_t>(i)]);
    });
}

}  // namespace

void SearchConfig::validate() const {
    if (target_n < 0) throw ConfigError("target_n must be >= 0");
    if (m_steps < 0) throw ConfigError("m_steps must be >= 0");
    if (!(beta_max > beta_min)) throw ConfigError("degenerate beta range");
    if (!(chi_over_pi_max > chi_over_pi_min)) throw ConfigError("degenerate chi range");
    if (grid_points_per_axis < 3) throw ConfigError("grid_points_per_axis must be >= 3");
    if (budget_evals <= 0) throw ConfigError("budget_evals must be positive");
    if (refine_iterations < 1) throw ConfigError("refine_iterations must be >= 1");
}

namespace detail {

SimplexOutcome simplex_maximize(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> start, const SimplexOptions& opts) {
    const size_t dims = start.size();
    SimplexOutcome best{start, f(start), 0};
    if (dims == 0) return best;

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    auto diameter = [](const std::vector<std::vector<double>>& pts) {
        double d = 0.0;
        for (size_t i = 1; i < pts.size(); ++i)
            for (size_t k = 0; k < pts[i].size(); ++k)
                d = std::max(d, std::abs(pts[i][k] - pts[0][k]));
        return d;
    };

    std::vector<double> origin = start;
    for (int restart = 0; restart <= 3; ++restart) {
        std::vector<std::vector<double>> pts(dims + 1, origin);
        for (size_t d = 0; d < dims; ++d) {
            double h = (d < opts.initial_step.size()) ? opts.initial_step[d] : 0.05;
            pts[d + 1][d] += h;
        }
        std::vector<double> vals(dims + 1);
        for (size_t i = 0; i <= dims; ++i) vals[i] = f(pts[i]);

        bool degenerate = false;
        for (; best.iterations < opts.max_iterations; ++best.iterations) {
            std::vector<size_t> order(dims + 1);
            for (size_t i = 0; i <= dims; ++i) order[i] = i;
            std::stable_sort(order.begin(), order.end(),
                             [&](size_t a, size_t b) { return vals[a] > vals[b]; });
            size_t hi = order[0], lo = order[dims], second_lo = order[dims - 1];

            if (vals[hi] > best.best_value) {
                best.best_value = vals[hi];
                best.best_point = pts[hi];
            }
            if (diameter(pts) < opts.diameter_tol) break;
            if (vals[hi] == vals[lo]) {
                // flat simplex away from convergence: restart with jitter
                degenerate = true;
                break;
            }

            std::vector<double> centroid(dims, 0.0);
            for (size_t i = 0; i <= dims; ++i)
                if (i != lo)
                    for (size_t d = 0; d < dims; ++d) centroid[d] += pts[i][d] / dims;

            auto blend = [&](double t) {
                std::vector<double> p(dims);
                for (size_t d = 0; d < dims; ++d) p[d] = centroid[d] + t * (centroid[d] - pts[lo][d]);
                return p;
            };

            auto reflected = blend(1.0);
            double fr = f(reflected);
            if (fr > vals[hi]) {
                auto expanded = blend(2.0);
                double fe = f(expanded);
                if (fe > fr) {
                    pts[lo] = std::move(expanded);
                    vals[lo] = fe;
                } else {
                    pts[lo] = std::move(reflected);
                    vals[lo] = fr;
                }
            } else if (fr > vals[second_lo]) {
                pts[lo] = std::move(reflected);
                vals[lo] = fr;
            } else {
                auto contracted = blend(fr > vals[lo] ? 0.5 : -0.5);
                double fc = f(contracted);
                if (fc > std::max(fr, vals[lo])) {
                    pts[lo] = std::move(contracted);
                    vals[lo] = fc;
                } else {
                    for (size_t i = 0; i <= dims; ++i) {
                        if (i == hi) continue;
                        for (size_t d = 0; d < dims; ++d)
                            pts[i][d] = pts[hi][d] + 0.5 * (pts[i][d] - pts[hi][d]);
                        vals[i] = f(pts[i]);
                    }
                }
            }
        }
        if (!degenerate || best.iterations >= opts.max_iterations) break;
        origin = best.best_point;
        for (auto& v : origin) v += opts.jitter_scale * unit(rng);
    }
    return best;
}

}  // namespace detail

namespace {

SearchResult make_result(const SearchConfig& cfg, Objective& obj,
                         const std::vector<double>& canon_best, double fid,
                         std::vector<std::pair<std::vector<double>, double>> trace,
                         std::chrono::steady_clock::time_point t0) {
    SearchResult r;
    r.best_params = sequence_of(cfg, canon_best);
    r.best_fidelity = fid;
    r.evals_used = obj.evals_used();
    r.cutoff_used = obj.cutoff_for(canon_best);
    r.trace = std::move(trace);
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    return r;
}

std::vector<double> params_of(const SearchConfig& cfg, const PulseSequence& seq) {
    if (seq.m() != cfg.m_steps) throw ConfigError("start sequence M does not match config");
    std::vector<double> v;
    for (const auto& st : seq.steps) v.push_back(st.beta);
    if (!cfg.freeze_chi)
        for (const auto& st : seq.steps) v.push_back(st.chi / std::numbers::pi);
    return v;
}

}  // namespace

SearchResult grid_search(const SearchConfig& cfg) {
    cfg.validate();
    if (2 * cfg.m_steps > 8)
        throw ConfigError("exhaustive grid limited to 2M <= 8; use staged_search");
    auto t0 = std::chrono::steady_clock::now();
    Objective obj(cfg);

    if (cfg.m_steps == 0) {
        std::vector<double> empty;
        double f = obj.eval_raw(empty);
        return make_result(cfg, obj, empty, f, {}, t0);
    }

    const Axis ba = beta_axis(cfg);
    const Axis ca = chi_axis(cfg);
    const int dims = cfg.dims();
    double total_d = 1.0;
    for (int d = 0; d < dims; ++d) total_d *= cfg.grid_points_per_axis;
    if (total_d > static_cast<double>(cfg.budget_evals))
        throw BudgetExceeded("grid size exceeds budget_evals");
    const long total = static_cast<long>(total_d);

    std::vector<std::vector<double>> points(static_cast<size_t>(total));
    const int npa = cfg.grid_points_per_axis;
    for (long i = 0; i < total; ++i) {
        std::vector<double> p(static_cast<size_t>(dims));
        long rest = i;
        for (int d = dims - 1; d >= 0; --d) {
            int idx = static_cast<int>(rest % npa);
            rest /= npa;
            p[static_cast<size_t>(d)] =
                (d < cfg.m_steps) ? ba.points[static_cast<size_t>(idx)]
                                  : ca.points[static_cast<size_t>(idx)];
        }
        points[static_cast<size_t>(i)] = canonical(cfg, std::move(p));
    }

    std::vector<double> fids;
    evaluate_batch(obj, points, fids, cfg.threads == 0 ? 0 : cfg.threads);

    long best_i = 0;
    std::vector<std::pair<std::vector<double>, double>> trace;
    double best_f = -1.0;
    for (long i = 0; i < total; ++i) {
        if (fids[static_cast<size_t>(i)] > best_f) {
            best_f = fids[static_cast<size_t>(i)];
            best_i = i;
            if (cfg.keep_trace) trace.emplace_back(points[static_cast<size_t>(i)], best_f);
        }
    }
    return make_result(cfg, obj, points[static_cast<size_t>(best_i)], best_f, std::move(trace), t0);
}

SearchResult refine(const PulseSequence& start, const SearchConfig& cfg) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    Objective obj(cfg);

    auto canon_start = canonical(cfg, params_of(cfg, start));
    for (int k = 0; k < cfg.m_steps; ++k) {
        double b = canon_start[static_cast<size_t>(k)];
        if (b < cfg.beta_min - 1e-12 || b > cfg.beta_max + 1e-12)
            throw ConfigError("refine start beta outside configured range");
    }

    std::vector<std::pair<std::vector<double>, double>> trace;
    double best_seen = -1.0;
    auto f = [&](const std::vector<double>& p) {
        if (!obj.budget_left()) return -1.0;  // freeze exploration when out of budget
        double v = obj.eval(p);
        if (cfg.keep_trace && v > best_seen) {
            best_seen = v;
            trace.emplace_back(canonical(cfg, p), v);
        }
        return v;
    };

    detail::SimplexOptions sopts;
    sopts.max_iterations = cfg.refine_iterations;
    sopts.seed = cfg.seed;
    for (int k = 0; k < cfg.m_steps; ++k)
        sopts.initial_step.push_back(0.05 * (cfg.beta_max - cfg.beta_min));
    if (!cfg.freeze_chi)
        for (int k = 0; k < cfg.m_steps; ++k)
            sopts.initial_step.push_back(0.05 * (cfg.chi_over_pi_max - cfg.chi_over_pi_min));

    auto out = detail::simplex_maximize(f, canon_start, sopts);
    auto canon_best = canonical(cfg, out.best_point);
    // report the memoized value at the canonical point, not the raw simplex value
    double fid = obj.eval(canon_best);
    return make_result(cfg, obj, canon_best, fid, std::move(trace), t0);
}

namespace {

/// Points of one per-step sub-grid around a fixed parameter vector.
std::vector<std::vector<double>> stage_points(const SearchConfig& cfg, const Axis& ba,
                                              const Axis& ca, const std::vector<double>& base,
                                              int step) {
    const int m = cfg.m_steps;
    std::vector<std::vector<double>> pts;
    if (cfg.freeze_chi) {
        pts.reserve(ba.points.size());
        for (double b : ba.points) {
            auto p = base;
            p[static_cast<size_t>(step)] = b;
            pts.push_back(std::move(p));
        }
        return pts;
    }
    pts.reserve(ba.points.size() * ca.points.size());
    for (double b : ba.points)
        for (double c : ca.points) {
            auto p = base;
            p[static_cast<size_t>(step)] = b;
            p[static_cast<size_t>(m + step)] = c;
            pts.push_back(std::move(p));
        }
    return pts;
}

/// Greedy per-step grids over steps [from, M), earlier entries held fixed.
/// Sequential; returns the improved vector and its score.
std::pair<std::vector<double>, double> greedy_complete(const SearchConfig& cfg, Objective& obj,
                                                       const Axis& ba, const Axis& ca,
                                                       std::vector<double> current, int from) {
    double best = -1.0;
    for (int k = from; k < cfg.m_steps; ++k) {
        auto pts = stage_points(cfg, ba, ca, current, k);
        long arg = 0;
        best = -1.0;
        for (long i = 0; i < static_cast<long>(pts.size()); ++i) {
            double f = obj.eval_raw(canonical(cfg, pts[static_cast<size_t>(i)]));
            if (f > best) {
                best = f;
                arg = i;
            }
        }
        current = pts[static_cast<size_t>(arg)];
    }
    if (from >= cfg.m_steps) best = obj.eval_raw(canonical(cfg, current));
    return {std::move(current), best};
}

Axis coarse_beta_axis(const SearchConfig& cfg, int n) {
    Axis a;
    for (int i = 0; i < n; ++i)
        a.points.push_back(cfg.beta_min + i * (cfg.beta_max - cfg.beta_min) / (n - 1));
    return a;
}

Axis coarse_chi_axis(const SearchConfig& cfg, int n) {
    Axis a;
    for (int i = 0; i < n; ++i)
        a.points.push_back(cfg.chi_over_pi_min +
                           i * (cfg.chi_over_pi_max - cfg.chi_over_pi_min) / n);
    return a;
}

}  // namespace

SearchResult staged_search(const SearchConfig& cfg) {
    cfg.validate();
    if (cfg.m_steps < 2) throw ConfigError("staged_search requires M >= 2");
    auto t0 = std::chrono::steady_clock::now();
    Objective obj(cfg);

    const Axis ba = beta_axis(cfg);
    const Axis ca = chi_axis(cfg);
    const int npa = cfg.grid_points_per_axis;
    const long stage_size = cfg.freeze_chi ? npa : static_cast<long>(npa) * npa;
    const int m = cfg.m_steps;
    const double beta_rest = std::clamp(0.0, cfg.beta_min, cfg.beta_max);
    const double chi_rest = cfg.chi_over_pi_min;

    std::vector<double> zeros(static_cast<size_t>(cfg.dims()));
    for (int k = 0; k < m; ++k) {
        zeros[static_cast<size_t>(k)] = beta_rest;
        if (!cfg.freeze_chi) zeros[static_cast<size_t>(m + k)] = chi_rest;
    }

    // Plan the budget: the greedy pass at full density, plus coarse greedy
    // completions of every stage-1 cell (the lookahead harvest that rescues
    // targets whose optimal first step scores poorly on its own), plus the
    // joint refinement allowance.
    int cc = std::min(11, npa);  // completion grid density
    long refine_allowance = static_cast<long>(cfg.refine_candidates + 1) *
                            (cfg.refine_iterations * (2 * cfg.dims()) + 4 * cfg.dims());
    auto planned = [&](int c) {
        long comp = cfg.freeze_chi ? c : static_cast<long>(c) * c;
        return stage_size * m + stage_size * (m - 1) * comp + refine_allowance;
    };
    while (cc > 5 && planned(cc) > cfg.budget_evals) cc -= 2;
    bool harvest = planned(cc) <= cfg.budget_evals;
    if (stage_size * m > cfg.budget_evals)
        throw BudgetExceeded("stage grids alone exceed budget_evals");

    struct Candidate {
        std::vector<double> point;
        double fidelity;
    };
    std::vector<Candidate> pool;

    // plain greedy pass at full density
    auto [greedy_point, greedy_fid] = greedy_complete(cfg, obj, ba, ca, zeros, 0);
    pool.push_back(Candidate{greedy_point, greedy_fid});

    if (harvest && m >= 2) {
        const Axis cba = coarse_beta_axis(cfg, cc);
        const Axis cca = coarse_chi_axis(cfg, cc);
        auto stage1 = stage_points(cfg, ba, ca, zeros, 0);
        std::vector<Candidate> completed(stage1.size());
        parallel_for_indexed(static_cast<long>(stage1.size()), cfg.threads == 0 ? 0 : cfg.threads,
                             [&](long i) {
                                 auto [pt, fid] = greedy_complete(
                                     cfg, obj, cba, cca, stage1[static_cast<size_t>(i)], 1);
                                 completed[static_cast<size_t>(i)] = Candidate{std::move(pt), fid};
                             });
        std::stable_sort(completed.begin(), completed.end(),
                         [](const Candidate& a, const Candidate& b) {
                             return a.fidelity > b.fidelity;
                         });
        for (int r = 0; r < cfg.refine_candidates && r < static_cast<int>(completed.size()); ++r)
            pool.push_back(completed[static_cast<size_t>(r)]);
    }

    detail::SimplexOptions sopts;
    sopts.max_iterations = cfg.refine_iterations;
    sopts.seed = cfg.seed;
    for (int k = 0; k < m; ++k) sopts.initial_step.push_back(0.05 * (cfg.beta_max - cfg.beta_min));
    if (!cfg.freeze_chi)
        for (int k = 0; k < m; ++k)
            sopts.initial_step.push_back(0.05 * (cfg.chi_over_pi_max - cfg.chi_over_pi_min));

    std::vector<double> best_point = canonical(cfg, greedy_point);
    double best_fid = greedy_fid;
    auto f = [&](const std::vector<double>& p) {
        if (!obj.budget_left()) return -1.0;
        return obj.eval(p);
    };
    for (const auto& cand : pool) {
        auto out = detail::simplex_maximize(f, canonical(cfg, cand.point), sopts);
        auto canon = canonical(cfg, out.best_point);
        double fid = obj.eval(canon);
        if (fid > best_fid) {
            best_fid = fid;
            best_point = canon;
        }
    }
    return make_result(cfg, obj, best_point, best_fid, {}, t0);
}

std::string SearchResult::to_json(const SearchConfig& config) const {
    nlohmann::json j;
    j["config"] = {{"target_n", config.target_n},
                   {"m_steps", config.m_steps},
                   {"beta_range", {config.beta_min, config.beta_max}},
                   {"chi_over_pi_range", {config.chi_over_pi_min, config.chi_over_pi_max}},
                   {"grid_points_per_axis", config.grid_points_per_axis},
                   {"refine_iterations", config.refine_iterations},
                   {"seed", config.seed},
                   {"budget_evals", config.budget_evals}};
    j["best"] = nlohmann::json::parse(best_params.to_json());
    j["best_fidelity"] = best_fidelity;
    j["evals_used"] = evals_used;
    j["cutoff_used"] = cutoff_used;
    j["wall_ms"] = wall_ms;
    if (!trace.empty()) {
        auto& tr = j["trace"] = nlohmann::json::array();
        for (const auto& [p, f] : trace) tr.push_back({{"params", p}, {"fidelity", f}});
    }
    return j.dump(2);
}

}  // namespace fockforge
