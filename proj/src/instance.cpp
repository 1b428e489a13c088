#include "rmdp/instance.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace rmdp {

namespace {

void require(bool cond, const std::string& message) {
    if (!cond) throw std::invalid_argument(message);
}

void check_distribution(const Vec& p, int n, const std::string& what) {
    require(static_cast<int>(p.size()) == n, what + " has wrong length");
    Real sum = 0;
    for (Real x : p) {
        require(std::isfinite(x) && x >= -1e-12, what + " has a negative or non-finite entry");
        sum += x;
    }
    require(std::fabs(sum - 1.0) <= 1e-12, what + " does not sum to 1");
}

} // namespace

void validate(const Instance& inst) {
    require(inst.num_states > 0, "instance needs at least one state");
    require(inst.num_actions > 0, "instance needs at least one action");
    const size_t pairs = static_cast<size_t>(inst.num_states) * inst.num_actions;
    require(inst.rewards.size() == pairs, "reward table has wrong shape");
    require(inst.nominal.size() == pairs, "nominal kernel has wrong shape");
    require(inst.unc.size() == pairs, "uncertainty table has wrong shape");

    for (int s = 0; s < inst.num_states; ++s) {
        for (int a = 0; a < inst.num_actions; ++a) {
            const std::string where =
                " at state " + std::to_string(s) + ", action " + std::to_string(a);
            const Vec& r = inst.reward_row(s, a);
            require(static_cast<int>(r.size()) == inst.num_states,
                    "reward row has wrong length" + where);
            for (Real x : r)
                require(std::isfinite(x), "non-finite reward" + where);
            check_distribution(inst.nominal_row(s, a), inst.num_states,
                               "nominal row" + where);
        }
    }
    check_distribution(inst.initial, inst.num_states, "initial distribution");
}

std::vector<int> unreachable_states(const Instance& inst) {
    std::vector<char> seen(inst.num_states, 0);
    std::deque<int> frontier;
    for (int s = 0; s < inst.num_states; ++s) {
        if (inst.initial[s] > 1e-14) {
            seen[s] = 1;
            frontier.push_back(s);
        }
    }
    while (!frontier.empty()) {
        int s = frontier.front();
        frontier.pop_front();
        for (int a = 0; a < inst.num_actions; ++a) {
            const Vec& row = inst.nominal_row(s, a);
            for (int j = 0; j < inst.num_states; ++j) {
                if (row[j] > 1e-14 && !seen[j]) {
                    seen[j] = 1;
                    frontier.push_back(j);
                }
            }
        }
    }
    std::vector<int> missing;
    for (int s = 0; s < inst.num_states; ++s)
        if (!seen[s]) missing.push_back(s);
    return missing;
}

RewardScaling normalize_rewards(Instance& inst) {
    Real lo = 0, hi = 0;
    bool first = true;
    for (const Vec& row : inst.rewards) {
        for (Real x : row) {
            if (first) {
                lo = hi = x;
                first = false;
            } else {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        }
    }
    RewardScaling t;
    t.shift = lo;
    t.scale = (hi - lo) > 1e-300 ? (hi - lo) : 1.0;
    for (Vec& row : inst.rewards)
        for (Real& x : row)
            x = (x - t.shift) / t.scale;
    return t;
}

} // namespace rmdp
