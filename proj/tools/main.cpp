#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ptroute/kernels.hpp"
#include "ptroute/scenario.hpp"

namespace fs = std::filesystem;
using namespace ptroute;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNoConverge = 2;

struct CommonOpts {
    std::string scenario_path;
    std::string edge_id;
    std::string out_dir;
    bool as_json = false;
    std::uint64_t seed = 42;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

fs::path resolve_out_dir(const CommonOpts& opts, const ScenarioConfig& sc) {
    fs::path dir = !opts.out_dir.empty() ? fs::path(opts.out_dir) : fs::path(sc.out_dir);
    if (dir.empty()) dir = ".";
    fs::create_directories(dir);
    return dir;
}

// Loads and validates, or reports why not. No outputs are produced for a
// scenario that fails validation.
bool prepare(const CommonOpts& opts, ScenarioConfig& sc) {
    try {
        sc = load_scenario(opts.scenario_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return false;
    }
    const ValidationReport rep = validate_scenario(sc);
    if (!rep.ok()) {
        std::cerr << "scenario validation failed:\n";
        for (const auto& v : rep.violations) std::cerr << "  - " << v << "\n";
        return false;
    }
    sc.solver.seed = opts.seed;
    return true;
}

int cmd_fit(const CommonOpts& opts) {
    ScenarioConfig sc;
    if (!prepare(opts, sc)) return kExitInput;

    if (!opts.edge_id.empty() && !sc.network.edge_index(opts.edge_id)) {
        std::cerr << "error: unknown edge '" << opts.edge_id << "'\n";
        return kExitInput;
    }

    const fs::path dir = resolve_out_dir(opts, sc);
    bool all_converged = true;
    for (const auto& edge : sc.network.edges()) {
        if (!opts.edge_id.empty() && edge.id != opts.edge_id) continue;
        const TargetFn target = pt_target(edge, sc.behavior);
        const auto t0 = std::chrono::steady_clock::now();
        const FitResult fr = fit_sigmoid(target, sc.fit.domain_end, sc.fit);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        all_converged = all_converged && fr.converged;

        write_file(dir / ("fit_" + edge.id + ".json"), fit_result_json(fr));
        const auto rows = error_profile(target, fr.params, sc.fit.domain_end, sc.fit.grid_size);
        write_file(dir / ("profile_" + edge.id + ".csv"), profile_csv(rows));

        std::cerr << "fit " << edge.id << ": " << secs << " s\n";
        if (opts.as_json) {
            std::cout << fit_result_json(fr);
        } else {
            std::cout << "edge " << edge.id << ": d=(" << fr.params.d1 << ", " << fr.params.d2
                      << ", " << fr.params.d3 << ", " << fr.params.d4
                      << ") max_error=" << fr.max_error << " mean_error=" << fr.mean_error
                      << (fr.converged ? "" : " [not converged]") << "\n";
        }
    }
    return all_converged ? kExitOk : kExitNoConverge;
}

int cmd_solve(const CommonOpts& opts) {
    ScenarioConfig sc;
    if (!prepare(opts, sc)) return kExitInput;
    if (sc.players.empty()) {
        std::cerr << "error: scenario has no players to solve for\n";
        return kExitInput;
    }

    const fs::path dir = resolve_out_dir(opts, sc);
    SigmoidMap sigmoids;
    for (const auto& edge : sc.network.edges())
        sigmoids.emplace(edge.id,
                         fit_sigmoid(pt_target(edge, sc.behavior), sc.fit.domain_end,
                                     sc.fit).params);

    const auto t0 = std::chrono::steady_clock::now();
    const EquilibriumResult eq = solve_nash(sc.network, sc.players, sigmoids, sc.solver);
    std::cerr << "solve: "
              << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
              << " s\n";

    write_file(dir / "equilibrium.json", equilibrium_json(sc, eq));
    if (opts.as_json) {
        std::cout << equilibrium_json(sc, eq);
    } else {
        std::cout << "equilibrium " << (eq.converged ? "converged" : "NOT converged") << " after "
                  << eq.iterations << " sweeps, vi_residual=" << eq.vi_residual << "\n";
    }
    if (!eq.converged) {
        std::cerr << "warning: iteration cap reached; partial result written\n";
        return kExitNoConverge;
    }
    return kExitOk;
}

int cmd_reproduce(const CommonOpts& opts) {
    ScenarioConfig sc = golden_scenario();
    sc.solver.seed = opts.seed;
    const ValidationReport vrep = validate_scenario(sc);
    if (!vrep.ok()) {
        std::cerr << "embedded scenario failed validation\n";
        return kExitInput;
    }

    const ReproduceReport rep = run_reproduce(sc);
    std::cerr << "reproduce fit: " << rep.fit_seconds << " s\n";

    const fs::path dir = resolve_out_dir(opts, sc);
    const Edge& edge = sc.network.edges().front();
    write_file(dir / ("fit_" + edge.id + ".json"), fit_result_json(rep.fit));
    const auto rows = error_profile(pt_target(edge, sc.behavior), rep.fit.params,
                                    sc.fit.domain_end, sc.fit.grid_size);
    write_file(dir / ("profile_" + edge.id + ".csv"), profile_csv(rows));
    write_file(dir / "equilibrium.json", equilibrium_json(sc, rep.eq));
    write_file(dir / "reproduce.json", reproduce_json(rep));

    std::cout << (opts.as_json ? reproduce_json(rep) : reproduce_text(rep));
    return kExitOk;
}

int cmd_validate(const CommonOpts& opts) {
    ScenarioConfig sc;
    try {
        sc = load_scenario(opts.scenario_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    const ValidationReport rep = validate_scenario(sc);
    if (!rep.ok()) {
        std::cout << "scenario INVALID:\n";
        for (const auto& v : rep.violations) std::cout << "  - " << v << "\n";
        return kExitInput;
    }
    std::cout << "scenario OK: " << sc.network.edge_count() << " edges, "
              << sc.network.route_count() << " routes, " << sc.players.size() << " players\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prospect-weighted routing game: sigmoid fitting and Nash solving"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
        if (needs_scenario)
            cmd->add_option("--scenario", opts.scenario_path, "scenario JSON file")->required();
        cmd->add_option("--edge", opts.edge_id, "restrict to one edge id");
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_flag("--json", opts.as_json, "machine-readable stdout");
        cmd->add_option("--seed", opts.seed, "certificate sampling seed");
    };

    CLI::App* fit = app.add_subcommand("fit", "fit sigmoid approximations per edge");
    add_common(fit, true);
    CLI::App* solve = app.add_subcommand("solve", "compute a Nash equilibrium");
    add_common(solve, true);
    CLI::App* reproduce =
        app.add_subcommand("reproduce", "run the embedded golden experiment");
    add_common(reproduce, false);
    CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
    add_common(validate, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInput;
    }

    std::cerr << "kernel backend: "
              << kernels::backend_name(kernels::active_backend()) << "\n";

    try {
        if (fit->parsed()) return cmd_fit(opts);
        if (solve->parsed()) return cmd_solve(opts);
        if (reproduce->parsed()) return cmd_reproduce(opts);
        if (validate->parsed()) return cmd_validate(opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
