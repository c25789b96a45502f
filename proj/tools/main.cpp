// fockforge: coherent-state -> Fock-state protocol toolbox.
//
// Subcommands: evolve, optimize, dissipate, wigner, pulse-check.
// Exit codes: 0 ok, 2 config error, 3 numerical guard, 4 budget exhausted.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fockforge/io.hpp"
#include "fockforge/open_system.hpp"
#include "fockforge/optimize.hpp"
#include "fockforge/phase_space.hpp"
#include "fockforge/protocol.hpp"
#include "fockforge/pulse_validation.hpp"
#include "fockforge/states.hpp"
#include "fockforge/reference_table.hpp"
#include "fockforge/threads.hpp"

using namespace fockforge;
using nlohmann::json;
using std::numbers::pi;

namespace {

std::vector<PulseStep> parse_steps(const std::string& text) {
    std::vector<PulseStep> steps;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        auto comma = item.find(',');
        if (comma == std::string::npos)
            throw ConfigError("step must be 'beta,chi_over_pi': " + item);
        try {
            double beta = std::stod(item.substr(0, comma));
            double cop = std::stod(item.substr(comma + 1));
            steps.push_back(PulseStep{beta, cop * pi});
        } catch (const std::invalid_argument&) {
            throw ConfigError("cannot parse step: " + item);
        }
    }
    return steps;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            values.push_back(std::stod(item));
        } catch (const std::invalid_argument&) {
            throw ConfigError("cannot parse number: " + item);
        }
    }
    return values;
}

/// --config FILE merges under explicit flags: a key fills an option only if
/// the flag was not given on the command line.
json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    auto parsed = json::parse(read_text(path), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object())
        throw ConfigError("config file is not a JSON object: " + path);
    return parsed;
}

template <typename T>
void merge_config(const CLI::Option* opt, const json& cfg, const char* key, T& value) {
    if (opt->count() > 0) return;
    if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

std::string command_echo(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

RunManifest make_manifest(const std::string& command, const json& effective, int cutoff,
                          bool doubling_checked, double doubling_shift, double wall_ms) {
    RunManifest m;
    m.command = command;
    m.config_hash = hex64(fnv1a64(effective.dump()));
    m.version = FOCKFORGE_VERSION;
    m.timestamp = iso8601_utc_now();
    m.cutoff = cutoff;
    m.doubling_checked = doubling_checked;
    m.doubling_shift = doubling_shift;
    m.wall_ms = wall_ms;
    return m;
}

const ReferenceTable& table_from(const std::string& path) {
    if (path.empty()) return ReferenceTable::bundled();
    static ReferenceTable loaded = ReferenceTable::load(path);
    return loaded;
}

struct EvolveArgs {
    double alpha_sq = -1.0;
    std::string steps_text;
    int target_n = -1;
    int cutoff = 0;
    bool no_doubling = false;
    std::string out_dist, out_state, config_path;
    int threads = 0;
};

int cmd_evolve(const EvolveArgs& a, const std::string& echo) {
    if (a.alpha_sq < 0.0) throw ConfigError("--alpha-sq is required and must be >= 0");
    auto t0 = std::chrono::steady_clock::now();
    PulseSequence seq{cplx{std::sqrt(a.alpha_sq), 0.0}, parse_steps(a.steps_text)};

    ProtocolOptions opts;
    opts.convergence_doubling = !a.no_doubling;
    std::optional<int> target;
    if (a.target_n >= 0) target = a.target_n;
    std::optional<int> cutoff_override;
    if (a.cutoff > 0) cutoff_override = a.cutoff;

    auto run = run_protocol_checked(seq, opts, target, cutoff_override);
    double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    json effective = {{"alpha_sq", a.alpha_sq},
                      {"steps", json::parse(seq.to_json())["steps"]},
                      {"target_n", a.target_n},
                      {"cutoff", run.cutoff_used}};
    auto manifest = make_manifest(echo, effective, run.cutoff_used, opts.convergence_doubling,
                                  run.doubling_shift.value_or(0.0), wall);

    if (!a.out_dist.empty()) {
        auto dist = photon_distribution(run.state);
        CsvTable t;
        t.header = {"n", "probability"};
        for (size_t n = 0; n < dist.probabilities.size(); ++n)
            t.add_row({std::to_string(n), csv_number(dist.probabilities[n])});
        write_text_atomic(a.out_dist, t.to_string());
        write_manifest(a.out_dist, manifest);
    }
    if (!a.out_state.empty()) {
        write_text_atomic(a.out_state, run.state.to_json());
        write_manifest(a.out_state, manifest);
    }
    if (a.target_n >= 0) std::printf("%.12g\n", fock_fidelity(run.state, a.target_n));
    return 0;
}

struct OptimizeArgs {
    int n = -1, m = -1;
    std::string mode = "auto";
    long budget = 200000;
    std::uint64_t seed = 0;
    int grid_points = 21;
    int refine_iterations = 200;
    std::string out_json, out_csv, config_path;
    int threads = 0;
};

int cmd_optimize(const OptimizeArgs& a, const std::string& echo) {
    if (a.n < 0 || a.m < 0) throw ConfigError("--n and --m are required");
    SearchConfig cfg;
    cfg.target_n = a.n;
    cfg.m_steps = a.m;
    cfg.budget_evals = a.budget;
    cfg.seed = a.seed;
    cfg.grid_points_per_axis = a.grid_points;
    cfg.refine_iterations = a.refine_iterations;
    cfg.threads = a.threads;

    std::string mode = a.mode;
    if (mode == "auto") mode = (a.m >= 2) ? "staged" : "grid";
    auto t0 = std::chrono::steady_clock::now();
    SearchResult res;
    if (mode == "staged") {
        res = staged_search(cfg);
    } else if (mode == "grid") {
        res = grid_search(cfg);
        if (cfg.m_steps > 0) {
            SearchResult polished = refine(res.best_params, cfg);
            if (polished.best_fidelity > res.best_fidelity) {
                polished.evals_used += res.evals_used;
                res = std::move(polished);
            }
        }
    } else {
        throw ConfigError("--mode must be staged, grid or auto");
    }
    double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    json effective = {{"n", a.n},           {"m", a.m},       {"mode", mode},
                      {"budget", a.budget}, {"seed", a.seed}, {"grid_points", a.grid_points}};
    auto manifest = make_manifest(echo, effective, res.cutoff_used, false, 0.0, wall);

    std::string out_json =
        a.out_json.empty()
            ? "optimize_N" + std::to_string(a.n) + "_M" + std::to_string(a.m) + ".json"
            : a.out_json;
    write_text_atomic(out_json, res.to_json(cfg));
    write_manifest(out_json, manifest);

    std::string out_csv =
        a.out_csv.empty()
            ? "optimize_N" + std::to_string(a.n) + "_M" + std::to_string(a.m) + ".csv"
            : a.out_csv;
    CsvTable t;
    t.header = {"N"};
    for (int k = 1; k <= a.m; ++k) t.header.push_back("beta_" + std::to_string(k));
    for (int k = 1; k <= a.m; ++k) t.header.push_back("chi_over_pi_" + std::to_string(k));
    t.header.push_back("fidelity");
    std::vector<std::string> row{std::to_string(a.n)};
    for (const auto& st : res.best_params.steps) row.push_back(csv_number(st.beta));
    for (const auto& st : res.best_params.steps) row.push_back(csv_number(st.chi / pi));
    row.push_back(csv_number(res.best_fidelity));
    t.add_row(std::move(row));
    write_text_atomic(out_csv, t.to_string());
    write_manifest(out_csv, manifest);

    std::printf("%.12g\n", res.best_fidelity);
    return 0;
}

struct DissipateArgs {
    int n = -1, m = 3;
    std::string gamma_text;
    double dt = 1e-3 * pi;
    int cutoff = 0;
    bool region = false;
    std::string n_list_text;
    double threshold = 0.9;
    std::string table_path, out_path, config_path;
    int threads = 0;
};

int cmd_dissipate(const DissipateArgs& a, const std::string& echo) {
    const auto& table = table_from(a.table_path);
    auto t0 = std::chrono::steady_clock::now();

    if (a.region) {
        if (a.n_list_text.empty()) throw ConfigError("--region needs --n-list");
        auto gammas = parse_list(a.gamma_text);
        if (gammas.empty()) throw ConfigError("--region needs a non-empty --gamma-list");
        std::vector<int> ns;
        for (double v : parse_list(a.n_list_text)) ns.push_back(static_cast<int>(v));

        DissipativeConfig base;
        base.integrator_step = a.dt;
        if (a.cutoff > 0) base.cutoff = a.cutoff;
        auto map = region_map(
            ns, gammas, a.threshold, [&](int n) { return table.sequence_for(n, a.m); }, base,
            a.threads);
        double wall =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();

        std::string out = a.out_path.empty() ? "region_map.csv" : a.out_path;
        CsvTable t;
        t.header = {"N"};
        for (double g : gammas) t.header.push_back("gamma_" + csv_number(g));
        for (size_t ni = 0; ni < map.n_values.size(); ++ni) {
            std::vector<std::string> row{std::to_string(map.n_values[ni])};
            for (size_t gi = 0; gi < map.gammas.size(); ++gi)
                row.push_back(map.flag(ni, gi) ? "1" : "0");
            t.add_row(std::move(row));
        }
        write_text_atomic(out, t.to_string());

        json summary = json::object();
        for (size_t ni = 0; ni < map.n_values.size(); ++ni) {
            double best = -1.0;
            for (size_t gi = 0; gi < map.gammas.size(); ++gi)
                if (map.flag(ni, gi)) best = map.gammas[gi];
            if (best >= 0.0)
                summary[std::to_string(map.n_values[ni])] = best;
            else
                summary[std::to_string(map.n_values[ni])] = nullptr;
        }
        write_text_atomic(out + ".summary.json", summary.dump(2));

        json effective = {{"mode", "region"}, {"threshold", a.threshold}, {"m", a.m},
                          {"dt", a.dt},       {"gammas", gammas},         {"n_values", ns}};
        write_manifest(out, make_manifest(echo, effective, base.cutoff, false, 0.0, wall));
        std::printf("region map: %zu N values x %zu gammas\n", map.n_values.size(),
                    map.gammas.size());
        return 0;
    }

    if (a.n < 0) throw ConfigError("--n is required");
    auto gammas = parse_list(a.gamma_text);
    DissipativeConfig cfg;
    cfg.sequence = table.sequence_for(a.n, a.m);
    cfg.integrator_step = a.dt;
    if (a.cutoff > 0) cfg.cutoff = a.cutoff;

    auto rows = loss_sweep(cfg, gammas, a.n, a.threads);
    double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    std::string out = a.out_path.empty() ? "dissipate_N" + std::to_string(a.n) + ".csv"
                                         : a.out_path;
    CsvTable t;
    // wall time lives in the manifest so CSV bodies stay byte-identical
    t.header = {"gamma_over_k", "N", "fidelity", "trace_drift"};
    for (const auto& r : rows)
        t.add_row({csv_number(r.gamma_over_k), std::to_string(r.target_n),
                   csv_number(r.fidelity), csv_number(r.trace_drift)});
    write_text_atomic(out, t.to_string());

    json effective = {{"n", a.n}, {"m", a.m}, {"dt", a.dt}, {"gammas", gammas}};
    write_manifest(out, make_manifest(echo, effective, cfg.resolved_cutoff(), false, 0.0, wall));
    for (const auto& r : rows)
        std::printf("gamma/K=%.6g fidelity=%.12g\n", r.gamma_over_k, r.fidelity);
    return 0;
}

struct WignerArgs {
    std::string state_path;
    int fock = -1;
    double alpha_sq = -1.0;
    std::string steps_text;
    double x_min = 0.0, x_max = 0.0, p_min = 0.0, p_max = 0.0;
    int nx = 201, np = 201;
    std::string kind = "wigner";
    std::string out_csv, out_bin, config_path;
    int threads = 0;
};

int cmd_wigner(const WignerArgs& a, const std::string& echo) {
    auto t0 = std::chrono::steady_clock::now();

    std::optional<DensityMatrix> rho;
    int cutoff = 0;
    if (!a.state_path.empty()) {
        auto text = read_text(a.state_path);
        auto parsed = json::parse(text);
        if (parsed.contains("rho")) {
            rho = DensityMatrix::from_json(text);
        } else {
            rho = DensityMatrix::pure(PureState::from_json(text));
        }
        cutoff = rho->cutoff();
    } else if (a.fock >= 0) {
        cutoff = tail_safe_cutoff(std::sqrt(static_cast<double>(a.fock))) + a.fock;
        HilbertSpace sp(cutoff);
        rho = DensityMatrix::pure(fock_state(a.fock, sp));
    } else if (a.alpha_sq >= 0.0) {
        PulseSequence seq{cplx{std::sqrt(a.alpha_sq), 0.0}, parse_steps(a.steps_text)};
        auto run = run_protocol_checked(seq);
        cutoff = run.cutoff_used;
        rho = DensityMatrix::pure(run.state);
    } else {
        throw ConfigError("give --state, --fock or --alpha-sq/--steps");
    }

    double mean = mean_photon_number(*rho);
    PhaseSpaceGrid grid = (a.x_max > a.x_min && a.p_max > a.p_min)
                              ? PhaseSpaceGrid(a.x_min, a.x_max, a.p_min, a.p_max, a.nx, a.np)
                              : PhaseSpaceGrid::for_mean_photon(mean, a.nx);

    WignerField field =
        (a.kind == "husimi") ? husimi(*rho, grid, a.threads) : wigner(*rho, grid, a.threads);
    double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    json effective = {{"kind", a.kind},
                      {"grid", {grid.x_min, grid.x_max, grid.p_min, grid.p_max, grid.nx, grid.np}},
                      {"cutoff", cutoff}};
    auto manifest = make_manifest(echo, effective, cutoff, false, 0.0, wall);

    std::string out_csv = a.out_csv.empty() && a.out_bin.empty() ? "wigner.csv" : a.out_csv;
    if (!out_csv.empty()) {
        CsvTable t;
        t.header = {"x", "p", "value"};
        for (int j = 0; j < grid.np; ++j)
            for (int i = 0; i < grid.nx; ++i)
                t.add_row(
                    {csv_number(grid.x(i)), csv_number(grid.p(j)), csv_number(field.at(i, j))});
        write_text_atomic(out_csv, t.to_string());
        write_manifest(out_csv, manifest);
    }
    if (!a.out_bin.empty()) {
        std::string blob(reinterpret_cast<const char*>(field.values.data()),
                         field.values.size() * sizeof(double));
        write_text_atomic(a.out_bin, blob);
        json header = {{"nx", grid.nx},
                       {"np", grid.np},
                       {"x_min", grid.x_min},
                       {"x_max", grid.x_max},
                       {"p_min", grid.p_min},
                       {"p_max", grid.p_max},
                       {"order", "row-major, x fastest"},
                       {"dtype", "float64"},
                       {"convention", field.convention},
                       {"cutoff", cutoff}};
        write_text_atomic(a.out_bin + ".json", header.dump(2));
        write_manifest(a.out_bin, manifest);
    }
    std::printf("%s field %dx%d, min %.6g, max %.6g\n", a.kind.c_str(), grid.nx, grid.np,
                field.min_value(), field.max_value());
    return 0;
}

struct PulseCheckArgs {
    double beta = 0.5;
    double chi_over_pi = 0.74;
    double alpha_sq = 1.0;
    std::string widths_text;
    std::string shape = "gaussian";
    std::string out_path, config_path;
    int threads = 0;
};

int cmd_pulse_check(const PulseCheckArgs& a, const std::string& echo) {
    auto widths = parse_list(a.widths_text);
    if (widths.empty()) throw ConfigError("--widths is required");
    PulseShape::Kind kind;
    if (a.shape == "gaussian") {
        kind = PulseShape::Kind::gaussian;
    } else if (a.shape == "square") {
        kind = PulseShape::Kind::square;
    } else {
        throw ConfigError("--shape must be gaussian or square");
    }

    auto t0 = std::chrono::steady_clock::now();
    PulseStep step{a.beta, a.chi_over_pi * pi};
    auto study =
        convergence_study(cplx{std::sqrt(a.alpha_sq), 0.0}, step, widths, kind, a.threads);
    double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    std::string out = a.out_path.empty() ? "pulse_check.csv" : a.out_path;
    CsvTable t;
    t.header = {"width", "deficit", "fitted_order"};
    for (const auto& p : study.points)
        t.add_row({csv_number(p.width), csv_number(p.deficit), csv_number(study.fitted_order)});
    write_text_atomic(out, t.to_string());

    json effective = {{"beta", a.beta},
                      {"chi_over_pi", a.chi_over_pi},
                      {"alpha_sq", a.alpha_sq},
                      {"shape", a.shape},
                      {"widths", widths}};
    write_manifest(out, make_manifest(echo, effective,
                                      tail_safe_cutoff(std::sqrt(a.alpha_sq) + std::abs(a.beta)),
                                      false, 0.0, wall));
    std::printf("fitted order %.6g, final deficit %.6g\n", study.fitted_order,
                study.points.back().deficit);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"truncated-Fock-space engine for the Kerr-plus-displacement protocol"};
    app.require_subcommand(1);
    std::string echo = command_echo(argc, argv);

    EvolveArgs ev;
    auto* evolve = app.add_subcommand("evolve", "run the protocol and report fidelity");
    auto* ev_alpha = evolve->add_option("--alpha-sq", ev.alpha_sq, "initial |alpha|^2");
    auto* ev_steps = evolve->add_option("--steps", ev.steps_text, "'beta,chi_over_pi;...'");
    auto* ev_tn = evolve->add_option("--target-n", ev.target_n, "target Fock index");
    auto* ev_cut = evolve->add_option("--cutoff", ev.cutoff, "basis cutoff override");
    evolve->add_flag("--no-doubling", ev.no_doubling, "skip the convergence doubling check");
    evolve->add_option("--out-dist", ev.out_dist, "photon distribution CSV path");
    evolve->add_option("--out-state", ev.out_state, "state JSON path");
    evolve->add_option("--config", ev.config_path, "JSON config merged under flags");
    evolve->add_option("--threads", ev.threads, "worker cap (0 = FOCKFORGE_THREADS or all)");

    OptimizeArgs op;
    auto* optimize = app.add_subcommand("optimize", "search (beta_k, chi_k) for a target N");
    auto* op_n = optimize->add_option("--n", op.n, "target Fock index");
    auto* op_m = optimize->add_option("--m", op.m, "number of steps");
    optimize->add_option("--mode", op.mode, "staged | grid | auto");
    auto* op_budget = optimize->add_option("--budget", op.budget, "evaluation budget");
    auto* op_seed = optimize->add_option("--seed", op.seed, "deterministic seed");
    optimize->add_option("--grid-points", op.grid_points, "grid points per axis");
    optimize->add_option("--refine-iterations", op.refine_iterations, "simplex iterations");
    optimize->add_option("--out", op.out_json, "result JSON path");
    optimize->add_option("--out-csv", op.out_csv, "reference-style CSV row path");
    optimize->add_option("--config", op.config_path, "JSON config merged under flags");
    optimize->add_option("--threads", op.threads, "worker cap");

    DissipateArgs di;
    auto* dissipate = app.add_subcommand("dissipate", "lossy protocol sweeps over gamma/K");
    dissipate->add_option("--n", di.n, "target Fock index");
    dissipate->add_option("--m", di.m, "reference parameter block (default 3)");
    auto* di_gamma =
        dissipate->add_option("--gamma-list", di.gamma_text, "ascending gamma/K list");
    dissipate->add_option("--dt", di.dt, "integrator step in 1/K units");
    dissipate->add_option("--cutoff", di.cutoff, "basis cutoff override");
    dissipate->add_flag("--region", di.region, "fidelity>threshold region map mode");
    dissipate->add_option("--n-list", di.n_list_text, "region mode: N values");
    dissipate->add_option("--threshold", di.threshold, "region mode threshold");
    dissipate->add_option("--table", di.table_path, "reference parameter file override");
    dissipate->add_option("--out", di.out_path, "output CSV path");
    dissipate->add_option("--config", di.config_path, "JSON config merged under flags");
    dissipate->add_option("--threads", di.threads, "worker cap");

    WignerArgs wi;
    auto* wigner_cmd = app.add_subcommand("wigner", "phase-space field of a state");
    wigner_cmd->add_option("--state", wi.state_path, "state JSON file");
    wigner_cmd->add_option("--fock", wi.fock, "exact Fock state |n>");
    wigner_cmd->add_option("--alpha-sq", wi.alpha_sq, "evolve first: initial |alpha|^2");
    wigner_cmd->add_option("--steps", wi.steps_text, "evolve first: protocol steps");
    wigner_cmd->add_option("--xmin", wi.x_min, "grid x minimum");
    wigner_cmd->add_option("--xmax", wi.x_max, "grid x maximum");
    wigner_cmd->add_option("--pmin", wi.p_min, "grid p minimum");
    wigner_cmd->add_option("--pmax", wi.p_max, "grid p maximum");
    wigner_cmd->add_option("--nx", wi.nx, "grid points per x axis");
    wigner_cmd->add_option("--np", wi.np, "grid points per p axis");
    wigner_cmd->add_option("--kind", wi.kind, "wigner | husimi");
    wigner_cmd->add_option("--out-csv", wi.out_csv, "CSV output (x,p,value)");
    wigner_cmd->add_option("--out-bin", wi.out_bin, "flat float64 output + JSON header");
    wigner_cmd->add_option("--config", wi.config_path, "JSON config merged under flags");
    wigner_cmd->add_option("--threads", wi.threads, "worker cap");

    PulseCheckArgs pc;
    auto* pulse = app.add_subcommand("pulse-check", "finite-width pulse convergence study");
    pulse->add_option("--beta", pc.beta, "pulse area (displacement amplitude)");
    pulse->add_option("--chi-over-pi", pc.chi_over_pi, "Kerr window chi/pi");
    pulse->add_option("--alpha-sq", pc.alpha_sq, "initial |alpha|^2");
    auto* pc_widths = pulse->add_option("--widths", pc.widths_text, "descending width list");
    pulse->add_option("--shape", pc.shape, "gaussian | square");
    pulse->add_option("--out", pc.out_path, "output CSV path");
    pulse->add_option("--config", pc.config_path, "JSON config merged under flags");
    pulse->add_option("--threads", pc.threads, "worker cap");

    try {
        app.parse(argc, argv);

        if (evolve->parsed()) {
            auto cfg = load_config(ev.config_path);
            merge_config(ev_alpha, cfg, "alpha_sq", ev.alpha_sq);
            merge_config(ev_steps, cfg, "steps", ev.steps_text);
            merge_config(ev_tn, cfg, "target_n", ev.target_n);
            merge_config(ev_cut, cfg, "cutoff", ev.cutoff);
            return cmd_evolve(ev, echo);
        }
        if (optimize->parsed()) {
            auto cfg = load_config(op.config_path);
            merge_config(op_n, cfg, "n", op.n);
            merge_config(op_m, cfg, "m", op.m);
            merge_config(op_budget, cfg, "budget", op.budget);
            merge_config(op_seed, cfg, "seed", op.seed);
            return cmd_optimize(op, echo);
        }
        if (dissipate->parsed()) {
            auto cfg = load_config(di.config_path);
            merge_config(di_gamma, cfg, "gamma_list", di.gamma_text);
            return cmd_dissipate(di, echo);
        }
        if (wigner_cmd->parsed()) return cmd_wigner(wi, echo);
        if (pulse->parsed()) {
            auto cfg = load_config(pc.config_path);
            merge_config(pc_widths, cfg, "widths", pc.widths_text);
            return cmd_pulse_check(pc, echo);
        }
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const BudgetExceeded& e) {
        std::fprintf(stderr, "budget error: %s\n", e.what());
        return 4;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "numerical guard: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
