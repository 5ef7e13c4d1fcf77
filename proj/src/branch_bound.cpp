#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>

#include "menet/milp.hpp"
#include "menet/simplex.hpp"

namespace menet {

namespace {

struct BoundChange {
    int var;
    double lb, ub;
    std::shared_ptr<BoundChange> parent;
};

struct Node {
    double bound;
    long seq;
    std::shared_ptr<BoundChange> changes;
};

struct NodeCmp {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // best-first
        return a.seq > b.seq;
    }
};

void materialize(const std::shared_ptr<BoundChange>& chain,
                 std::vector<double>& lb, std::vector<double>& ub) {
    // nearest change wins, so walk the chain and only apply unseen vars
    std::vector<int> seen;
    for (auto p = chain.get(); p; p = p->parent.get()) {
        if (std::find(seen.begin(), seen.end(), p->var) != seen.end()) continue;
        seen.push_back(p->var);
        lb[static_cast<size_t>(p->var)] = p->lb;
        ub[static_cast<size_t>(p->var)] = p->ub;
    }
}

// Try to repair fractional binaries with the continuous part frozen.
// Greedy violation descent over candidate flips; returns true when a
// fully feasible integral assignment was found (written into x).
bool repair_binaries(const MilpModel& m, const std::vector<int>& bins,
                     const std::vector<double>& lb, const std::vector<double>& ub,
                     std::vector<double>& x, double tol) {
    std::vector<double> cand = x;
    for (int b : bins)
        cand[static_cast<size_t>(b)] = std::round(cand[static_cast<size_t>(b)]);
    // honor node fixings
    for (int b : bins) {
        double& v = cand[static_cast<size_t>(b)];
        v = std::min(std::max(v, lb[static_cast<size_t>(b)]), ub[static_cast<size_t>(b)]);
    }

    // constraints touching at least one binary
    std::vector<int> active;
    for (int c = 0; c < m.n_constrs(); ++c)
        for (auto [v, coef] : m.constr(c).terms)
            if (m.var(v).type == VarType::Binary) {
                active.push_back(c);
                break;
            }

    auto violation = [&](int c) {
        const auto& con = m.constr(c);
        double lhs = 0.0;
        for (auto [v, coef] : con.terms) lhs += coef * cand[static_cast<size_t>(v)];
        switch (con.sense) {
            case Sense::LE: return std::max(0.0, lhs - con.rhs);
            case Sense::GE: return std::max(0.0, con.rhs - lhs);
            case Sense::EQ: return std::abs(lhs - con.rhs);
        }
        return 0.0;
    };

    double total = 0.0;
    for (int c : active) total += violation(c);

    for (int pass = 0; pass < 200 && total > tol; ++pass) {
        // flip the binary that shrinks total violation the most
        int best_b = -1;
        double best_gain = 1e-12;
        for (int b : bins) {
            double v = cand[static_cast<size_t>(b)];
            double flipped = 1.0 - v;
            if (flipped < lb[static_cast<size_t>(b)] - 0.5 ||
                flipped > ub[static_cast<size_t>(b)] + 0.5)
                continue;
            double before = 0.0, after = 0.0;
            for (int c : active) {
                const auto& con = m.constr(c);
                bool touches = false;
                for (auto [vv, coef] : con.terms)
                    if (vv == b) { touches = true; break; }
                if (!touches) continue;
                before += violation(c);
                cand[static_cast<size_t>(b)] = flipped;
                after += violation(c);
                cand[static_cast<size_t>(b)] = v;
            }
            if (before - after > best_gain) {
                best_gain = before - after;
                best_b = b;
            }
        }
        if (best_b < 0) break;
        cand[static_cast<size_t>(best_b)] = 1.0 - cand[static_cast<size_t>(best_b)];
        total -= best_gain;
        total = 0.0;
        for (int c : active) total += violation(c);
    }

    if (total > tol) return false;
    if (m.max_residual(cand) > 1e-6) return false;
    x = cand;
    return true;
}

}  // namespace

Solution solve(const MilpModel& model, const SolveOptions& opts) {
    std::vector<int> bins;
    for (int i = 0; i < model.n_vars(); ++i)
        if (model.var(i).type == VarType::Binary) bins.push_back(i);

    std::vector<double> lb0(static_cast<size_t>(model.n_vars()));
    std::vector<double> ub0(static_cast<size_t>(model.n_vars()));
    for (int i = 0; i < model.n_vars(); ++i) {
        lb0[static_cast<size_t>(i)] = model.var(i).lb;
        ub0[static_cast<size_t>(i)] = model.var(i).ub;
    }

    Solution incumbent;
    incumbent.status = SolveStatus::Infeasible;
    double inc_obj = kInf;
    bool root_unbounded = false;

    std::priority_queue<Node, std::vector<Node>, NodeCmp> open;
    long seq = 0;
    open.push({-kInf, seq++, nullptr});
    long nodes = 0;
    bool hit_limit = false;

    std::vector<double> lb = lb0, ub = ub0;
    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (node.bound >= inc_obj - opts.gap_rel * std::max(1.0, std::abs(inc_obj)))
            break;  // best-first: no remaining node can improve
        if (++nodes > opts.max_nodes) { hit_limit = true; break; }

        lb = lb0;
        ub = ub0;
        materialize(node.changes, lb, ub);
        LpResult rel = solve_lp(model, lb, ub);
        if (rel.status == LpStatus::Infeasible) continue;
        if (rel.status == LpStatus::Unbounded) {
            if (nodes == 1) root_unbounded = true;
            break;
        }
        if (rel.status == LpStatus::IterLimit)
            throw std::runtime_error("simplex iteration limit in branch and bound");
        if (rel.objective >= inc_obj - opts.gap_rel * std::max(1.0, std::abs(inc_obj)))
            continue;

        // fractional binaries
        int frac_var = -1;
        double frac_dist = opts.int_tol;
        for (int b : bins) {
            double v = rel.x[static_cast<size_t>(b)];
            double f = std::abs(v - std::round(v));
            if (f > frac_dist) {
                frac_dist = f;
                frac_var = b;
            }
        }

        if (frac_var < 0) {
            // integral
            if (rel.objective < inc_obj) {
                inc_obj = rel.objective;
                incumbent.status = SolveStatus::Optimal;
                incumbent.objective = rel.objective;
                incumbent.x = rel.x;
                for (int b : bins)
                    incumbent.x[static_cast<size_t>(b)] =
                        std::round(incumbent.x[static_cast<size_t>(b)]);
            }
            continue;
        }

        // repair heuristic: an integral point matching the node bound closes it
        std::vector<double> rep = rel.x;
        if (repair_binaries(model, bins, lb, ub, rep, 1e-7)) {
            double rep_obj = model.objective_value(rep);
            if (rep_obj < inc_obj) {
                inc_obj = rep_obj;
                incumbent.status = SolveStatus::Optimal;
                incumbent.objective = rep_obj;
                incumbent.x = rep;
            }
            if (rep_obj <= rel.objective +
                               opts.gap_rel * std::max(1.0, std::abs(rel.objective)))
                continue;  // node solved exactly
        }

        auto down = std::make_shared<BoundChange>(
            BoundChange{frac_var, 0.0, 0.0, node.changes});
        auto up = std::make_shared<BoundChange>(
            BoundChange{frac_var, 1.0, 1.0, node.changes});
        open.push({rel.objective, seq++, down});
        open.push({rel.objective, seq++, up});
    }

    if (root_unbounded && inc_obj == kInf) {
        incumbent.status = SolveStatus::Unbounded;
        return incumbent;
    }
    if (hit_limit) {
        incumbent.status = SolveStatus::NodeLimit;
        return incumbent;
    }
    if (inc_obj < kInf) incumbent.status = SolveStatus::Optimal;
    return incumbent;
}

}  // namespace menet
