// Command-line front end: robust discounted/average solvers, the convergence
// experiment harness, the counterexample gallery, and instance export.
//
// Exit codes: 0 success, 2 usage/config errors, 3 solver non-convergence.

#include "rmdp/average.hpp"
#include "rmdp/experiment.hpp"
#include "rmdp/gallery.hpp"
#include "rmdp/json_io.hpp"
#include "rmdp/robust.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>

namespace {

using namespace rmdp;

std::string join12(const Vec& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ' ';
        out += fmt12(xs[i]);
    }
    return out;
}

std::string join_actions(const DetPolicy& pi) {
    std::string out;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(pi[i]);
    }
    return out;
}

// `ref` is a gallery identifier unless it names an existing file.
Instance resolve_instance(const std::string& ref, const GalleryOptions& opt,
                          const std::string& uncertainty, Real radius) {
    Instance inst = std::filesystem::exists(ref) ? load_instance(ref)
                                                 : build_by_id(ref, opt);
    if (!uncertainty.empty()) attach_uncertainty(inst, uncertainty, radius);
    return inst;
}

int points_for_step(Real step) {
    if (!(step > 0.0) || step > 0.5)
        throw std::invalid_argument("grid step must lie in (0, 1/2]");
    return static_cast<int>(std::lround(1.0 / step)) + 1;
}

void print_gallery(const std::string& id, Real gamma, Real grid_step) {
    if (id == "curve-one-action") {
        const Real alpha = curve_worst_alpha(gamma);
        const Real value = curve_normalized_value(gamma);
        CurveSolveResult sol = solve_curve_one_action(gamma);
        std::cout << "gamma = " << fmt12(gamma) << "\n"
                  << "worst alpha = " << fmt12(alpha) << "\n"
                  << "normalized value = " << fmt12(value) << "\n"
                  << "solver alpha = " << fmt12(sol.alpha) << " (gap "
                  << fmt12(std::fabs(sol.alpha - alpha)) << ")\n"
                  << "solver normalized value = " << fmt12(sol.normalized_value)
                  << " (gap " << fmt12(std::fabs(sol.normalized_value - value))
                  << ")\n";
        return;
    }
    if (id == "curve-two-actions" || id == "no-blackwell") {
        bool alternates = true;
        for (const FlipProbe& probe : optimal_action_flip_points(4)) {
            std::cout << "k=" << probe.k << ": gamma = "
                      << fmt12(probe.gamma_first) << " -> action "
                      << probe.winner_first << " wins by "
                      << fmt12(probe.margin_first) << "\n";
            std::cout << "k=" << probe.k << ": gamma = "
                      << fmt12(probe.gamma_second) << " -> action "
                      << probe.winner_second << " wins by "
                      << fmt12(probe.margin_second) << "\n";
            alternates = alternates && probe.winner_first == 0 &&
                         probe.winner_second == 1;
        }
        std::cout << "alternation = " << (alternates ? "clean" : "broken") << "\n";
        return;
    }
    if (id == "loop-or-quit" || id == "big-match") {
        const int points = points_for_step(grid_step > 0 ? grid_step : 0.01);
        BigMatchGridResult grid = loop_or_quit_grid(points);
        std::cout << "grid points = " << points << "\n"
                  << "markovian deviation from 1/2 = "
                  << fmt12(grid.markovian_deviation) << "\n"
                  << "stationary max-min = " << fmt12(grid.stationary_maxmin)
                  << "\n"
                  << "stationary min-max = " << fmt12(grid.minmax) << "\n";
        return;
    }
    if (id == "escape-or-wait") {
        const int points = points_for_step(grid_step > 0 ? grid_step : 0.01);
        std::cout << "grid points = " << points << "\n";
        for (Real eps : {0.5, 0.1, 0.01})
            std::cout << "try rate " << fmt12(eps) << ": worst average = "
                      << fmt12(escape_or_wait_worst(eps, points)) << "\n";
        std::cout << "always wait: worst average = "
                  << fmt12(escape_or_wait_worst(0.0, points)) << "\n";
        return;
    }
    // cash-or-gamble
    const int points = points_for_step(grid_step > 0 ? grid_step : 0.001);
    const Real x_star = cash_or_gamble_worst_mix(gamma);
    const Real x_grid = cash_or_gamble_grid_best_mix(gamma, points);
    const Real worst = std::min(cash_or_gamble_return(x_star, 0.0, gamma),
                                cash_or_gamble_return(x_star, 1.0, gamma));
    std::cout << "gamma = " << fmt12(gamma) << "\n"
              << "optimal mix x* = " << fmt12(x_star) << "\n"
              << "grid argmax = " << fmt12(x_grid) << " (" << points
              << " points)\n"
              << "worst-case return at x* = " << fmt12(worst) << "\n"
              << "normalized = " << fmt12((1.0 - gamma) * worst) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust MDP toolkit: discounted and average-optimal solvers "
                 "over sa-rectangular uncertainty sets"};
    app.require_subcommand(1);

    // --- solve-discounted ---------------------------------------------------
    std::string sd_instance, sd_uncertainty, sd_method = "si";
    Real sd_radius = 0.05, sd_gamma = 0.95, sd_tol = 1e-9;
    GalleryOptions sd_opt;
    CLI::App* sd = app.add_subcommand("solve-discounted",
                                      "Solve the robust discounted problem");
    sd->add_option("--instance", sd_instance, "gallery id or instance JSON file")
        ->required();
    sd->add_option("--uncertainty", sd_uncertainty,
                   "attach sets: box, ell2 or singleton (default: keep the "
                   "instance's own)");
    sd->add_option("--radius", sd_radius, "uncertainty radius")
        ->capture_default_str();
    sd->add_option("--gamma", sd_gamma, "discount factor in [0, 1)")->required();
    sd->add_option("--method", sd_method, "vi (value iteration) or si (strategy iteration)")
        ->check(CLI::IsMember({"vi", "si"}))
        ->capture_default_str();
    sd->add_option("--tol", sd_tol, "Bellman residual tolerance")
        ->capture_default_str();
    sd->add_option("--num-states", sd_opt.num_states, "built instance size")
        ->capture_default_str();
    sd->add_option("--num-actions", sd_opt.num_actions, "garnet action count")
        ->capture_default_str();
    sd->add_option("--branch", sd_opt.branch, "garnet branching factor")
        ->capture_default_str();
    sd->add_option("--seed", sd_opt.seed, "garnet seed")->capture_default_str();

    // --- solve-average ------------------------------------------------------
    std::string sa_instance, sa_uncertainty, sa_algorithm;
    Real sa_radius = 0.05;
    int sa_iters = 1000;
    GalleryOptions sa_opt;
    CLI::App* sa = app.add_subcommand("solve-average",
                                      "Estimate the optimal worst-case gain");
    sa->add_option("--instance", sa_instance, "gallery id or instance JSON file")
        ->required();
    sa->add_option("--algorithm", sa_algorithm,
                   "limit-discount, horizon or discount-schedule")
        ->required()
        ->check(CLI::IsMember({"limit-discount", "horizon", "discount-schedule"}));
    sa->add_option("--iters", sa_iters, "iteration budget T")
        ->capture_default_str();
    sa->add_option("--uncertainty", sa_uncertainty,
                   "attach sets: box, ell2 or singleton");
    sa->add_option("--radius", sa_radius, "uncertainty radius")
        ->capture_default_str();
    sa->add_option("--num-states", sa_opt.num_states, "built instance size")
        ->capture_default_str();
    sa->add_option("--num-actions", sa_opt.num_actions, "garnet action count")
        ->capture_default_str();
    sa->add_option("--branch", sa_opt.branch, "garnet branching factor")
        ->capture_default_str();
    sa->add_option("--seed", sa_opt.seed, "garnet seed")->capture_default_str();

    // --- experiment -----------------------------------------------------------
    std::string ex_config, ex_instance, ex_instance_file, ex_uncertainty,
        ex_output;
    Real ex_radius = 0, ex_confidence = 0;
    int ex_T = 0, ex_T_ref = 0, ex_num_states = 0, ex_num_actions = 0,
        ex_branch = 0, ex_num_seeds = 0;
    std::uint64_t ex_seed = 0;
    bool ex_normalize = true;
    CLI::App* ex = app.add_subcommand(
        "experiment", "Convergence-error experiment producing a CSV artifact");
    ex->add_option("--config", ex_config, "JSON config file");
    ex->add_option("--instance", ex_instance, "gallery/benchmark id");
    ex->add_option("--instance-file", ex_instance_file, "instance JSON file");
    ex->add_option("--uncertainty", ex_uncertainty, "box, ell2 or singleton");
    ex->add_option("--radius", ex_radius, "uncertainty radius");
    ex->add_option("--num-states", ex_num_states, "built instance size");
    ex->add_option("--num-actions", ex_num_actions, "garnet action count");
    ex->add_option("--branch", ex_branch, "garnet branching factor");
    ex->add_option("--iters", ex_T, "measured iteration budget T");
    ex->add_option("--t-ref", ex_T_ref, "reference iteration budget");
    ex->add_option("--num-seeds", ex_num_seeds, "seed count (0 = auto)");
    ex->add_option("--seed", ex_seed, "base seed");
    ex->add_option("--confidence", ex_confidence, "confidence level");
    ex->add_option("--normalize", ex_normalize, "rescale rewards to [0, 1]");
    ex->add_option("--output", ex_output, "CSV path (default: stdout)");

    // --- gallery --------------------------------------------------------------
    std::string ga_id;
    Real ga_gamma = 0.75, ga_grid_step = -1.0;
    CLI::App* ga = app.add_subcommand(
        "gallery", "Reproduce the counterexample numbers, solver against closed form");
    ga->add_option("id", ga_id, "which counterexample")
        ->required()
        ->check(CLI::IsMember({"curve-one-action", "curve-two-actions",
                               "no-blackwell", "loop-or-quit", "big-match",
                               "escape-or-wait", "cash-or-gamble",
                               "srect-no-blackwell"}));
    ga->add_option("--gamma", ga_gamma, "discount factor where applicable")
        ->capture_default_str();
    ga->add_option("--grid-step", ga_grid_step,
                   "grid resolution for the scans (default depends on the id)");

    // --- export-instance --------------------------------------------------------
    std::string xp_id, xp_out, xp_uncertainty;
    Real xp_radius = 0.05;
    GalleryOptions xp_opt;
    CLI::App* xp = app.add_subcommand("export-instance",
                                      "Write a built instance as JSON");
    xp->add_option("--id", xp_id, "gallery/benchmark id")->required();
    xp->add_option("--out", xp_out, "output path")->required();
    xp->add_option("--uncertainty", xp_uncertainty,
                   "attach sets before exporting: box, ell2 or singleton");
    xp->add_option("--radius", xp_radius, "uncertainty radius")
        ->capture_default_str();
    xp->add_option("--num-states", xp_opt.num_states, "built instance size")
        ->capture_default_str();
    xp->add_option("--num-actions", xp_opt.num_actions, "garnet action count")
        ->capture_default_str();
    xp->add_option("--branch", xp_opt.branch, "garnet branching factor")
        ->capture_default_str();
    xp->add_option("--seed", xp_opt.seed, "garnet seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sd->parsed()) {
            Instance inst =
                resolve_instance(sd_instance, sd_opt, sd_uncertainty, sd_radius);
            SolveReport report = sd_method == "vi"
                                     ? robust_value_iteration(inst, sd_gamma, sd_tol)
                                     : strategy_iteration(inst, sd_gamma, sd_tol);
            std::cout << "instance = " << sd_instance << " (S=" << inst.num_states
                      << ", A=" << inst.num_actions << ")\n"
                      << "gamma = " << fmt12(sd_gamma) << "\n"
                      << "value = " << join12(report.value) << "\n"
                      << "weighted value = "
                      << fmt12(dot(inst.initial, report.value)) << "\n"
                      << "policy = " << join_actions(report.policy) << "\n"
                      << "iterations = " << report.iterations << "\n"
                      << "residual = " << fmt12(report.residual) << "\n"
                      << "converged = " << (report.converged ? "yes" : "no")
                      << "\n";
            if (!report.converged) {
                std::cerr << "error: solver did not reach the requested residual\n";
                return 3;
            }
            return 0;
        }

        if (sa->parsed()) {
            Instance inst =
                resolve_instance(sa_instance, sa_opt, sa_uncertainty, sa_radius);
            GainTrace trace;
            if (sa_algorithm == "limit-discount")
                trace = solve_limit_discount(inst, sa_iters);
            else if (sa_algorithm == "horizon")
                trace = solve_long_horizon(inst, sa_iters);
            else
                trace = solve_discount_schedule(inst, sa_iters);
            std::cout << "instance = " << sa_instance << " (S=" << inst.num_states
                      << ", A=" << inst.num_actions << ")\n"
                      << "algorithm = " << trace.algorithm << "\n"
                      << "iterations = " << sa_iters << "\n"
                      << "gain estimate = " << fmt12(trace.scalar_estimates.back())
                      << "\n"
                      << "gain = " << join12(trace.final_estimate) << "\n"
                      << "policy = " << join_actions(extract_average_policy(trace))
                      << "\n"
                      << "converged = " << (trace.converged ? "yes" : "no") << "\n";
            if (!trace.converged) {
                std::cerr << "error: an inner discounted solve did not converge\n";
                return 3;
            }
            return 0;
        }

        if (ex->parsed()) {
            ExperimentConfig cfg =
                ex_config.empty() ? ExperimentConfig{} : load_config(ex_config);
            if (ex->count("--instance")) cfg.instance_id = ex_instance;
            if (ex->count("--instance-file")) cfg.instance_file = ex_instance_file;
            if (ex->count("--uncertainty")) cfg.uncertainty = ex_uncertainty;
            if (ex->count("--radius")) cfg.radius = ex_radius;
            if (ex->count("--num-states")) cfg.num_states = ex_num_states;
            if (ex->count("--num-actions")) cfg.num_actions = ex_num_actions;
            if (ex->count("--branch")) cfg.branch = ex_branch;
            if (ex->count("--iters")) cfg.horizon = ex_T;
            if (ex->count("--t-ref")) cfg.reference_horizon = ex_T_ref;
            if (ex->count("--num-seeds")) cfg.num_seeds = ex_num_seeds;
            if (ex->count("--seed")) cfg.seed = ex_seed;
            if (ex->count("--confidence")) cfg.confidence = ex_confidence;
            if (ex->count("--normalize")) cfg.normalize = ex_normalize;
            if (ex->count("--output")) cfg.output = ex_output;

            ExperimentResult result = run_experiment(cfg);
            if (cfg.output.empty()) {
                std::cout << result.csv;
            } else {
                std::size_t rows =
                    std::count(result.csv.begin(), result.csv.end(), '\n');
                std::cout << "wrote " << cfg.output << " (" << result.runs.size()
                          << " seeds, " << rows << " lines)\n";
            }
            return 0;
        }

        if (ga->parsed()) {
            print_gallery(ga_id, ga_gamma, ga_grid_step);
            return 0;
        }

        // export-instance
        Instance inst = build_by_id(xp_id, xp_opt);
        if (!xp_uncertainty.empty())
            attach_uncertainty(inst, xp_uncertainty, xp_radius);
        save_instance(inst, xp_out);
        std::cout << "wrote " << xp_out << " (S=" << inst.num_states
                  << ", A=" << inst.num_actions << ")\n";
        return 0;
    } catch (const SolveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
