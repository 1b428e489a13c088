#include "rmdp/chain.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>

namespace rmdp {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Tarjan's strongly connected components, iterative to stay safe on deep
// chains. Edges below the structural-zero cut are ignored.
std::vector<int> scc_ids(const std::vector<Vec>& P, int& num_components) {
    const int n = static_cast<int>(P.size());
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (P[i][j] > kStructuralZero) adj[i].push_back(j);

    std::vector<int> order(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    int next_order = 0;
    num_components = 0;

    struct Frame {
        int v;
        size_t child;
    };
    for (int root = 0; root < n; ++root) {
        if (order[root] >= 0) continue;
        std::vector<Frame> call{{root, 0}};
        order[root] = low[root] = next_order++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.child < adj[f.v].size()) {
                int w = adj[f.v][f.child++];
                if (order[w] < 0) {
                    order[w] = low[w] = next_order++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], order[w]);
                }
            } else {
                if (low[f.v] == order[f.v]) {
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp[w] = num_components;
                        if (w == f.v) break;
                    }
                    ++num_components;
                }
                int done = f.v;
                call.pop_back();
                if (!call.empty())
                    low[call.back().v] = std::min(low[call.back().v], low[done]);
            }
        }
    }
    return comp;
}

VectorXd solve_refined(const Eigen::PartialPivLU<MatrixXd>& lu, const MatrixXd& A,
                       const VectorXd& b) {
    VectorXd x = lu.solve(b);
    for (int pass = 0; pass < 2; ++pass) {
        VectorXd resid = b - A * x;
        if (resid.lpNorm<Eigen::Infinity>() <=
            1e-16 * (1.0 + b.lpNorm<Eigen::Infinity>()))
            break;
        x += lu.solve(resid);
    }
    return x;
}

} // namespace

InducedChain induce_chain(const Instance& inst, const RandPolicy& policy,
                          const std::vector<Vec>* rows) {
    const int n = inst.num_states;
    if (static_cast<int>(policy.size()) != n)
        throw std::invalid_argument("policy length does not match the state count");
    InducedChain chain;
    chain.P.assign(n, Vec(n, 0.0));
    chain.r.assign(n, 0.0);
    for (int s = 0; s < n; ++s) {
        if (static_cast<int>(policy[s].size()) != inst.num_actions)
            throw std::invalid_argument("policy row does not match the action count");
        for (int a = 0; a < inst.num_actions; ++a) {
            Real weight = policy[s][a];
            if (weight <= 0.0) continue;
            const Vec& p = rows ? (*rows)[inst.idx(s, a)] : inst.nominal_row(s, a);
            const Vec& rew = inst.reward_row(s, a);
            for (int j = 0; j < n; ++j) {
                chain.P[s][j] += weight * p[j];
                chain.r[s] += weight * p[j] * rew[j];
            }
        }
    }
    return chain;
}

Vec solve_discounted_chain(const std::vector<Vec>& P, const Vec& r, Real gamma) {
    const int n = static_cast<int>(P.size());
    if (gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("discount factor must lie in [0, 1)");
    MatrixXd A = MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A(i, j) -= gamma * P[i][j];
    VectorXd b(n);
    for (int i = 0; i < n; ++i)
        b(i) = r[i];
    Eigen::PartialPivLU<MatrixXd> lu(A);
    VectorXd x = solve_refined(lu, A, b);
    return Vec(x.data(), x.data() + n);
}

ChainClasses chain_classes(const std::vector<Vec>& P) {
    const int n = static_cast<int>(P.size());
    int num_comps = 0;
    std::vector<int> comp = scc_ids(P, num_comps);

    // A component is recurrent when no edge above the structural cut leaves it.
    std::vector<char> closed(num_comps, 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (P[i][j] > kStructuralZero && comp[j] != comp[i]) closed[comp[i]] = 0;

    std::vector<std::vector<int>> members(num_comps);
    for (int i = 0; i < n; ++i)
        members[comp[i]].push_back(i);

    ChainClasses out;
    out.class_of.assign(n, -1);
    // Deterministic class order: ascending by smallest member state.
    std::vector<int> closed_ids;
    for (int c = 0; c < num_comps; ++c)
        if (closed[c]) closed_ids.push_back(c);
    std::sort(closed_ids.begin(), closed_ids.end(),
              [&](int a, int b) { return members[a].front() < members[b].front(); });
    for (int c : closed_ids) {
        int id = static_cast<int>(out.recurrent.size());
        for (int s : members[c])
            out.class_of[s] = id;
        out.recurrent.push_back(members[c]);
    }
    return out;
}

Vec average_gain(const std::vector<Vec>& P, const Vec& r) {
    const int n = static_cast<int>(P.size());
    ChainClasses classes = chain_classes(P);
    const int nc = static_cast<int>(classes.recurrent.size());

    Vec class_gain(nc, 0.0);
    for (int c = 0; c < nc; ++c) {
        const std::vector<int>& states = classes.recurrent[c];
        const int m = static_cast<int>(states.size());
        if (m == 1) {
            class_gain[c] = r[states[0]];
            continue;
        }
        // Stationary distribution: mu' (P - I) = 0 with the normalization
        // sum(mu) = 1 replacing the last (redundant) equation.
        MatrixXd M(m, m);
        for (int col = 0; col < m; ++col)
            for (int row = 0; row < m; ++row)
                M(row, col) = P[states[col]][states[row]] - (row == col ? 1.0 : 0.0);
        for (int col = 0; col < m; ++col)
            M(m - 1, col) = 1.0;
        VectorXd rhs = VectorXd::Zero(m);
        rhs(m - 1) = 1.0;
        Eigen::PartialPivLU<MatrixXd> lu(M);
        VectorXd mu = solve_refined(lu, M, rhs);
        Real gain = 0;
        for (int i = 0; i < m; ++i)
            gain += std::max(0.0, mu(i)) * r[states[i]];
        class_gain[c] = gain;
    }

    Vec g(n, 0.0);
    for (int s = 0; s < n; ++s)
        if (classes.class_of[s] >= 0) g[s] = class_gain[classes.class_of[s]];

    std::vector<int> transient;
    for (int s = 0; s < n; ++s)
        if (classes.class_of[s] < 0) transient.push_back(s);
    if (!transient.empty()) {
        const int m = static_cast<int>(transient.size());
        MatrixXd IQ = MatrixXd::Identity(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                IQ(i, j) -= P[transient[i]][transient[j]];
        MatrixXd B = MatrixXd::Zero(m, nc);
        for (int i = 0; i < m; ++i)
            for (int c = 0; c < nc; ++c)
                for (int s : classes.recurrent[c])
                    B(i, c) += P[transient[i]][s];
        Eigen::PartialPivLU<MatrixXd> lu(IQ);
        MatrixXd absorb = lu.solve(B);
        absorb += lu.solve(B - IQ * absorb); // one refinement pass
        for (int i = 0; i < m; ++i) {
            Real mix = 0;
            for (int c = 0; c < nc; ++c)
                mix += absorb(i, c) * class_gain[c];
            g[transient[i]] = mix;
        }
    }
    return g;
}

Real discounted_return(const Instance& inst, const RandPolicy& policy, Real gamma,
                       const std::vector<Vec>* rows) {
    InducedChain chain = induce_chain(inst, policy, rows);
    Vec v = solve_discounted_chain(chain.P, chain.r, gamma);
    return dot(inst.initial, v);
}

Real average_return(const Instance& inst, const RandPolicy& policy,
                    const std::vector<Vec>* rows) {
    InducedChain chain = induce_chain(inst, policy, rows);
    Vec g = average_gain(chain.P, chain.r);
    return dot(inst.initial, g);
}

} // namespace rmdp
