#include "rmdp/json_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rmdp {

using nlohmann::json;

namespace {

json descriptor_to_json(const UncertaintySet& u) {
    json d;
    d["kind"] = kind_name(u);
    if (const Box* box = std::get_if<Box>(&u)) {
        if (box->theta_up >= 0.0) {
            d["theta_up"] = box->theta_up;
            d["theta_low"] = box->theta_low;
        } else {
            d["p_low"] = box->lo;
            d["p_up"] = box->up;
        }
    } else if (const Ball2* ball = std::get_if<Ball2>(&u)) {
        d["alpha"] = ball->alpha;
    } else if (const VertexSet* vs = std::get_if<VertexSet>(&u)) {
        d["vertices"] = vs->vertices;
    } else if (const AffineCurveSet* cs = std::get_if<AffineCurveSet>(&u)) {
        d["breakpoints"] = cs->even_breakpoints ? "even" : "odd";
        d["k_trunc"] = cs->k_trunc;
    }
    return d;
}

UncertaintySet descriptor_from_json(const json& d, const Vec& nominal) {
    if (!d.is_object() || !d.contains("kind"))
        throw std::invalid_argument("uncertainty descriptor needs a \"kind\" field");
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "singleton") return Singleton{};
    if (kind == "box") {
        if (d.contains("theta_up") || d.contains("theta_low"))
            return make_box(nominal, d.at("theta_up").get<Real>(),
                            d.at("theta_low").get<Real>());
        return make_box_bounds(d.at("p_low").get<Vec>(), d.at("p_up").get<Vec>());
    }
    if (kind == "ell2") return make_ball2(nominal, d.at("alpha").get<Real>());
    if (kind == "polytope_vertices") {
        VertexSet vs;
        vs.vertices = d.at("vertices").get<std::vector<Vec>>();
        if (vs.vertices.empty())
            throw std::invalid_argument("polytope descriptor has no vertices");
        return vs;
    }
    if (kind == "param_alpha_beta") return QuadCurveSet{};
    if (kind == "param_piecewise") {
        const std::string tag = d.at("breakpoints").get<std::string>();
        if (tag != "even" && tag != "odd")
            throw std::invalid_argument("breakpoints must be \"even\" or \"odd\"");
        int k_trunc = d.value("k_trunc", 64);
        return make_affine_curve(tag == "even", k_trunc);
    }
    throw std::invalid_argument("unknown uncertainty kind: " + kind);
}

// Wrap nlohmann's type errors into invalid_argument so callers see a single
// exception type for every malformed-input path.
template <typename F>
auto reject_malformed(F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed instance JSON: ") + e.what());
    }
}

} // namespace

std::string instance_to_json(const Instance& inst) {
    json doc;
    doc["num_states"] = inst.num_states;
    doc["num_actions"] = inst.num_actions;
    if (!inst.name.empty()) doc["name"] = inst.name;

    json rewards = json::array(), kernel = json::array(), unc = json::array();
    for (int s = 0; s < inst.num_states; ++s) {
        json rrow = json::array(), krow = json::array(), urow = json::array();
        for (int a = 0; a < inst.num_actions; ++a) {
            rrow.push_back(inst.reward_row(s, a));
            krow.push_back(inst.nominal_row(s, a));
            urow.push_back(descriptor_to_json(inst.set_at(s, a)));
        }
        rewards.push_back(std::move(rrow));
        kernel.push_back(std::move(krow));
        unc.push_back(std::move(urow));
    }
    doc["rewards"] = std::move(rewards);
    doc["nominal_kernel"] = std::move(kernel);
    doc["initial_distribution"] = inst.initial;
    doc["uncertainty"] = std::move(unc);
    return doc.dump(2);
}

Instance instance_from_json(const std::string& text) {
    return reject_malformed([&] {
        json doc = json::parse(text);
        Instance inst;
        inst.num_states = doc.at("num_states").get<int>();
        inst.num_actions = doc.at("num_actions").get<int>();
        if (inst.num_states < 1 || inst.num_actions < 1)
            throw std::invalid_argument("num_states and num_actions must be positive");
        inst.name = doc.value("name", std::string{});

        const json& rewards = doc.at("rewards");
        const json& kernel = doc.at("nominal_kernel");
        const json& unc = doc.at("uncertainty");
        const auto S = static_cast<size_t>(inst.num_states);
        const auto A = static_cast<size_t>(inst.num_actions);
        if (rewards.size() != S || kernel.size() != S || unc.size() != S)
            throw std::invalid_argument("tensor fields must have one entry per state");

        inst.rewards.resize(S * A);
        inst.nominal.resize(S * A);
        inst.unc.assign(S * A, Singleton{});
        for (size_t s = 0; s < S; ++s) {
            if (rewards[s].size() != A || kernel[s].size() != A || unc[s].size() != A)
                throw std::invalid_argument("tensor fields must have one entry per action");
            for (size_t a = 0; a < A; ++a) {
                size_t i = s * A + a;
                inst.rewards[i] = rewards[s][a].get<Vec>();
                inst.nominal[i] = kernel[s][a].get<Vec>();
                inst.unc[i] = descriptor_from_json(unc[s][a], inst.nominal[i]);
            }
        }
        inst.initial = doc.at("initial_distribution").get<Vec>();
        validate(inst);
        return inst;
    });
}

void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);
    out << instance_to_json(inst) << '\n';
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open instance file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return instance_from_json(buf.str());
}

std::string report_to_json(const SolveReport& report) {
    json doc;
    doc["value"] = report.value;
    doc["policy"] = report.policy;
    doc["worst_kernel"] = report.worst_rows;
    doc["iterations"] = report.iterations;
    doc["residual"] = report.residual;
    doc["converged"] = report.converged;
    return doc.dump(2);
}

} // namespace rmdp
