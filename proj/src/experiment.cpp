#include "rmdp/experiment.hpp"

#include "rmdp/gallery.hpp"
#include "rmdp/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rmdp {

using nlohmann::json;

namespace {

// Keys accepted in a config file; anything else is a typo worth failing on.
const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "instance",  "instance_file", "uncertainty", "radius",
        "num_states", "num_actions",  "branch",      "T",
        "T_ref",      "num_seeds",    "seed",        "confidence",
        "normalize_rewards",          "output"};
    return keys;
}

Real tail_range(const Vec& xs, std::size_t window) {
    std::size_t n = xs.size();
    std::size_t k = std::min(window, n);
    Real lo = xs[n - k], hi = xs[n - k];
    for (std::size_t i = n - k; i < n; ++i) {
        lo = std::min(lo, xs[i]);
        hi = std::max(hi, xs[i]);
    }
    return hi - lo;
}

Instance build_configured(const ExperimentConfig& cfg, std::uint64_t seed) {
    Instance inst;
    if (!cfg.instance_file.empty()) {
        inst = load_instance(cfg.instance_file);
    } else {
        GalleryOptions opt;
        opt.num_states = cfg.num_states;
        opt.num_actions = cfg.num_actions;
        opt.branch = cfg.branch;
        opt.seed = seed;
        inst = build_by_id(cfg.instance_id, opt);
    }
    attach_uncertainty(inst, cfg.uncertainty, cfg.radius);
    if (cfg.normalize) normalize_rewards(inst);
    return inst;
}

std::string csv_safe(std::string label) {
    std::replace(label.begin(), label.end(), ',', '_');
    return label;
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object())
        throw std::invalid_argument("experiment config must be a JSON object");
    for (const auto& item : j.items())
        if (known_keys().count(item.key()) == 0)
            throw std::invalid_argument("unknown config key: " + item.key());

    ExperimentConfig cfg;
    try {
        cfg.instance_id = j.value("instance", cfg.instance_id);
        cfg.instance_file = j.value("instance_file", cfg.instance_file);
        cfg.uncertainty = j.value("uncertainty", cfg.uncertainty);
        cfg.radius = j.value("radius", cfg.radius);
        cfg.num_states = j.value("num_states", cfg.num_states);
        cfg.num_actions = j.value("num_actions", cfg.num_actions);
        cfg.branch = j.value("branch", cfg.branch);
        cfg.horizon = j.value("T", cfg.horizon);
        cfg.reference_horizon = j.value("T_ref", cfg.reference_horizon);
        cfg.num_seeds = j.value("num_seeds", cfg.num_seeds);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.confidence = j.value("confidence", cfg.confidence);
        cfg.normalize = j.value("normalize_rewards", cfg.normalize);
        cfg.output = j.value("output", cfg.output);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed experiment config: ") +
                                    e.what());
    }
    return cfg;
}

} // namespace

ExperimentConfig config_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                    e.what());
    }
    return config_from_json(j);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("config file " + path +
                                    " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.instance_file.empty() && cfg.instance_id.empty())
        throw std::invalid_argument("config needs an instance id or an instance file");
    if (cfg.uncertainty != "box" && cfg.uncertainty != "ell2" &&
        cfg.uncertainty != "singleton")
        throw std::invalid_argument("uncertainty must be box, ell2 or singleton");
    if (!(cfg.radius > 0.0))
        throw std::invalid_argument("radius must be positive");
    if (cfg.horizon < 1)
        throw std::invalid_argument("T must be at least 1");
    if (cfg.horizon >= cfg.reference_horizon)
        throw std::invalid_argument("T must be smaller than T_ref");
    if (cfg.num_seeds < 0)
        throw std::invalid_argument("num_seeds must be nonnegative");
    if (cfg.num_states < 1 || cfg.num_actions < 1 || cfg.branch < 1)
        throw std::invalid_argument("instance dimensions must be positive");
    // The confidence bands below hardcode the 0.95 normal quantile.
    if (std::fabs(cfg.confidence - 0.95) > 1e-12)
        throw std::invalid_argument("only the 0.95 confidence level is supported");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    ExperimentResult result;
    result.config = cfg;

    int seeds = cfg.num_seeds;
    if (seeds == 0)
        seeds = (cfg.instance_file.empty() && cfg.instance_id == "garnet") ? 25 : 1;

    for (int i = 0; i < seeds; ++i) {
        std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
        Instance inst = build_configured(cfg, seed);
        if (result.instance_label.empty()) {
            std::string label = cfg.instance_file.empty() ? cfg.instance_id
                                : inst.name.empty()       ? std::string("custom")
                                                          : inst.name;
            result.instance_label = csv_safe(label);
        }

        SeedRun run;
        run.seed = seed;
        GainTrace reference = solve_limit_discount(inst, cfg.reference_horizon);
        run.stationarity_range = tail_range(reference.scalar_estimates, 50);
        if (run.stationarity_range > 1e-5)
            throw SolveError("reference run on " + result.instance_label +
                             " (seed " + std::to_string(seed) +
                             ") is not stationary: the last 50 estimates span " +
                             fmt12(run.stationarity_range) +
                             " which exceeds 1e-5; increase T_ref");
        run.reference_scalar = reference.scalar_estimates.back();

        run.traces[0] = solve_limit_discount(inst, cfg.horizon);
        run.traces[1] = solve_long_horizon(inst, cfg.horizon);
        run.traces[2] = solve_discount_schedule(inst, cfg.horizon);
        for (int a = 0; a < 3; ++a) {
            run.errors[a].resize(cfg.horizon);
            for (int t = 0; t < cfg.horizon; ++t)
                run.errors[a][t] = std::fabs(run.reference_scalar -
                                             run.traces[a].scalar_estimates[t]);
        }
        result.runs.push_back(std::move(run));
    }

    result.csv = experiment_csv(result);
    if (!cfg.output.empty()) {
        std::ofstream out(cfg.output);
        if (!out)
            throw std::invalid_argument("cannot write CSV to " + cfg.output);
        out << result.csv;
    }
    return result;
}

std::string experiment_csv(const ExperimentResult& result) {
    const ExperimentConfig& cfg = result.config;
    std::ostringstream out;
    out << "instance,uncertainty,algorithm,seed,iteration,error,"
           "one_over_T,one_over_sqrtT\n";

    auto prefix = [&](const std::string& algorithm, const std::string& seed_field,
                      int t) {
        out << result.instance_label << ',' << cfg.uncertainty << ',' << algorithm
            << ',' << seed_field << ',' << t << ',';
    };
    auto overlays = [&](int t) {
        Real ft = static_cast<Real>(t);
        out << ',' << fmt_exact(1.0 / ft) << ',' << fmt_exact(1.0 / std::sqrt(ft))
            << '\n';
    };

    for (const SeedRun& run : result.runs) {
        for (int a = 0; a < 3; ++a) {
            for (int t = 1; t <= cfg.horizon; ++t) {
                prefix(run.traces[a].algorithm, std::to_string(run.seed), t);
                out << fmt_exact(run.errors[a][t - 1]);
                overlays(t);
            }
        }
    }

    // Mean and normal-approximation confidence band across seeds, one row per
    // statistic so the artifact stays long-format.
    if (result.runs.size() > 1) {
        const Real n = static_cast<Real>(result.runs.size());
        for (int a = 0; a < 3; ++a) {
            const std::string& algorithm = result.runs.front().traces[a].algorithm;
            for (int t = 1; t <= cfg.horizon; ++t) {
                Real mean = 0.0;
                for (const SeedRun& run : result.runs) mean += run.errors[a][t - 1];
                mean /= n;
                Real ss = 0.0;
                for (const SeedRun& run : result.runs) {
                    Real d = run.errors[a][t - 1] - mean;
                    ss += d * d;
                }
                Real half = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
                const std::pair<const char*, Real> stats[] = {
                    {"mean", mean}, {"lo95", mean - half}, {"hi95", mean + half}};
                for (const auto& [name, value] : stats) {
                    prefix(algorithm, name, t);
                    out << fmt_exact(value);
                    overlays(t);
                }
            }
        }
    }
    return out.str();
}

} // namespace rmdp
