#include "menet/simplex.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace menet {

namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;

constexpr double kTolPivot = 1e-10;
constexpr double kTolCost = 1e-9;
constexpr double kTolFeas = 1e-9;

enum class VStat : uint8_t { Basic, AtLower, AtUpper, FreeZero, Fixed };

struct Tableau {
    int m = 0;       // rows
    int n = 0;       // structural columns
    int ncols = 0;   // structural + slack + artificial
    Mat T;           // m x ncols, current B^-1 * A_all
    Vec beta;        // values of basic variables
    RowVec d;        // reduced costs
    std::vector<double> lb, ub, cost;  // per column
    std::vector<double> val;           // nonbasic values
    std::vector<VStat> stat;
    std::vector<int> basis;    // row -> column
    std::vector<double> rhs0;  // original b
};

void compute_reduced_costs(Tableau& tb) {
    Vec cB(tb.m);
    for (int i = 0; i < tb.m; ++i) cB(i) = tb.cost[static_cast<size_t>(tb.basis[i])];
    tb.d = RowVec::Map(tb.cost.data(), tb.ncols) - cB.transpose() * tb.T;
}

// One simplex phase on the current tableau/cost vector.
// Returns: 0 optimal, 1 unbounded, 2 iteration limit.
int run_phase(Tableau& tb, long max_iters) {
    compute_reduced_costs(tb);
    bool bland = false;
    long stall = 0;
    int fresh_restarts = 0;
    for (long iter = 0; iter < max_iters; ++iter) {
        // pricing
        int q = -1;
        double best = kTolCost;
        for (int j = 0; j < tb.ncols; ++j) {
            VStat s = tb.stat[static_cast<size_t>(j)];
            if (s == VStat::Basic || s == VStat::Fixed) continue;
            double dj = tb.d(j);
            double score = 0.0;
            if (s == VStat::AtLower && dj < -kTolCost) score = -dj;
            else if (s == VStat::AtUpper && dj > kTolCost) score = dj;
            else if (s == VStat::FreeZero && std::abs(dj) > kTolCost) score = std::abs(dj);
            if (score > best) {
                best = score;
                q = j;
                if (bland) break;
            }
        }
        if (q < 0) {
            // guard against reduced-cost drift before declaring optimality
            if (fresh_restarts < 3) {
                compute_reduced_costs(tb);
                ++fresh_restarts;
                bool any = false;
                for (int j = 0; j < tb.ncols && !any; ++j) {
                    VStat s = tb.stat[static_cast<size_t>(j)];
                    if (s == VStat::Basic || s == VStat::Fixed) continue;
                    double dj = tb.d(j);
                    any = (s == VStat::AtLower && dj < -10 * kTolCost) ||
                          (s == VStat::AtUpper && dj > 10 * kTolCost) ||
                          (s == VStat::FreeZero && std::abs(dj) > 10 * kTolCost);
                }
                if (any) continue;
            }
            return 0;
        }
        VStat sq = tb.stat[static_cast<size_t>(q)];
        double sigma = (sq == VStat::AtUpper) ? -1.0
                       : (sq == VStat::FreeZero && tb.d(q) > 0) ? -1.0
                                                                : 1.0;
        // ratio test
        double t_own = std::numeric_limits<double>::infinity();
        if (sigma > 0 && tb.ub[static_cast<size_t>(q)] < kInf)
            t_own = tb.ub[static_cast<size_t>(q)] - tb.val[static_cast<size_t>(q)];
        else if (sigma < 0 && tb.lb[static_cast<size_t>(q)] > -kInf)
            t_own = tb.val[static_cast<size_t>(q)] - tb.lb[static_cast<size_t>(q)];

        int r = -1;
        double t_star = t_own;
        double best_piv = 0.0;
        bool leave_at_upper = false;
        for (int i = 0; i < tb.m; ++i) {
            double a = tb.T(i, q);
            if (std::abs(a) < kTolPivot) continue;
            double rho = -sigma * a;  // beta_i moves at rate rho per unit t
            int k = tb.basis[static_cast<size_t>(i)];
            double ti;
            bool at_upper;
            if (rho > 0) {
                double u = tb.ub[static_cast<size_t>(k)];
                if (u == kInf) continue;
                ti = (u - tb.beta(i)) / rho;
                at_upper = true;
            } else {
                double l = tb.lb[static_cast<size_t>(k)];
                if (l == -kInf) continue;
                ti = (tb.beta(i) - l) / (-rho);
                at_upper = false;
            }
            if (ti < -kTolFeas) ti = 0.0;
            if (ti < t_star - 1e-12 ||
                (ti < t_star + 1e-12 && std::abs(a) > best_piv)) {
                t_star = ti;
                r = i;
                best_piv = std::abs(a);
                leave_at_upper = at_upper;
            }
        }
        if (t_star == std::numeric_limits<double>::infinity()) return 1;
        if (t_star < 0) t_star = 0;

        double progress = best * t_star;
        if (progress < 1e-12) ++stall; else stall = 0;
        if (stall > 400) bland = true;

        if (r < 0) {
            // entering variable flips to its opposite bound
            tb.beta.noalias() -= (sigma * t_star) * tb.T.col(q);
            tb.val[static_cast<size_t>(q)] += sigma * t_star;
            tb.stat[static_cast<size_t>(q)] =
                (sigma > 0) ? VStat::AtUpper : VStat::AtLower;
            continue;
        }

        // pivot on (r, q)
        int k = tb.basis[static_cast<size_t>(r)];
        double newval_q = tb.val[static_cast<size_t>(q)] + sigma * t_star;
        tb.beta.noalias() -= (sigma * t_star) * tb.T.col(q);

        double piv = tb.T(r, q);
        RowVec prow = tb.T.row(r) / piv;
        Vec pcol = tb.T.col(q);
        pcol(r) = 0.0;
        tb.T.noalias() -= pcol * prow;
        tb.T.row(r) = prow;
        tb.d.noalias() -= tb.d(q) * prow;
        tb.d(q) = 0.0;

        tb.stat[static_cast<size_t>(k)] = leave_at_upper ? VStat::AtUpper : VStat::AtLower;
        tb.val[static_cast<size_t>(k)] =
            leave_at_upper ? tb.ub[static_cast<size_t>(k)] : tb.lb[static_cast<size_t>(k)];
        if (tb.lb[static_cast<size_t>(k)] == tb.ub[static_cast<size_t>(k)])
            tb.stat[static_cast<size_t>(k)] = VStat::Fixed;
        tb.stat[static_cast<size_t>(q)] = VStat::Basic;
        tb.val[static_cast<size_t>(q)] = 0.0;
        tb.basis[static_cast<size_t>(r)] = q;
        tb.beta(r) = newval_q;
    }
    return 2;
}

VStat initial_stat(double lb, double ub, double* value) {
    if (lb == ub) { *value = lb; return VStat::Fixed; }
    if (lb > -kInf) { *value = lb; return VStat::AtLower; }
    if (ub < kInf) { *value = ub; return VStat::AtUpper; }
    *value = 0.0;
    return VStat::FreeZero;
}

// Recompute basic values exactly from the original columns via LU.
void refine_solution(const MilpModel& model, Tableau& tb) {
    Mat B = Mat::Zero(tb.m, tb.m);
    Vec rhs = Vec::Map(tb.rhs0.data(), tb.m);
    int n = tb.n, m = tb.m;
    // subtract nonbasic contributions
    for (int j = 0; j < tb.ncols; ++j) {
        if (tb.stat[static_cast<size_t>(j)] == VStat::Basic) continue;
        double v = tb.val[static_cast<size_t>(j)];
        if (v == 0.0) continue;
        if (j < n) {
            // structural column appears in its constraints
        } else {
            rhs(j - n) -= v;  // slack/artificial column is e_i
            continue;
        }
    }
    for (int c = 0; c < model.n_constrs(); ++c)
        for (auto [v, coef] : model.constr(c).terms)
            if (tb.stat[static_cast<size_t>(v)] != VStat::Basic)
                rhs(c) -= coef * tb.val[static_cast<size_t>(v)];
    // basis matrix
    std::vector<std::vector<std::pair<int, double>>> cols(static_cast<size_t>(n));
    for (int c = 0; c < model.n_constrs(); ++c)
        for (auto [v, coef] : model.constr(c).terms)
            cols[static_cast<size_t>(v)].emplace_back(c, coef);
    for (int i = 0; i < m; ++i) {
        int j = tb.basis[static_cast<size_t>(i)];
        if (j < n)
            for (auto [row, coef] : cols[static_cast<size_t>(j)]) B(row, i) = coef;
        else
            B(j - n, i) = 1.0;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    tb.beta = lu.solve(rhs);
}

}  // namespace

LpResult solve_lp(const MilpModel& model) {
    std::vector<double> lb(static_cast<size_t>(model.n_vars()));
    std::vector<double> ub(static_cast<size_t>(model.n_vars()));
    for (int i = 0; i < model.n_vars(); ++i) {
        lb[static_cast<size_t>(i)] = model.var(i).lb;
        ub[static_cast<size_t>(i)] = model.var(i).ub;
    }
    return solve_lp(model, lb, ub);
}

LpResult solve_lp(const MilpModel& model, const std::vector<double>& lb_in,
                  const std::vector<double>& ub_in) {
    const int n = model.n_vars();
    const int m = model.n_constrs();
    for (int j = 0; j < n; ++j)
        if (lb_in[static_cast<size_t>(j)] > ub_in[static_cast<size_t>(j)] + 1e-12)
            return {LpStatus::Infeasible, 0.0, {}};

    Tableau tb;
    tb.m = m;
    tb.n = n;

    // column layout: structural | slack | artificial (allocated lazily)
    tb.lb = lb_in;
    tb.ub = ub_in;
    tb.cost.assign(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) tb.cost[static_cast<size_t>(j)] = model.var(j).obj;
    tb.rhs0.resize(static_cast<size_t>(m));

    std::vector<double> slack_lb(static_cast<size_t>(m)), slack_ub(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        tb.rhs0[static_cast<size_t>(i)] = model.constr(i).rhs;
        switch (model.constr(i).sense) {
            case Sense::LE: slack_lb[static_cast<size_t>(i)] = 0.0; slack_ub[static_cast<size_t>(i)] = kInf; break;
            case Sense::GE: slack_lb[static_cast<size_t>(i)] = -kInf; slack_ub[static_cast<size_t>(i)] = 0.0; break;
            case Sense::EQ: slack_lb[static_cast<size_t>(i)] = 0.0; slack_ub[static_cast<size_t>(i)] = 0.0; break;
        }
    }

    // initial nonbasic values and residuals
    tb.val.assign(static_cast<size_t>(n + m), 0.0);
    tb.stat.assign(static_cast<size_t>(n + m), VStat::AtLower);
    for (int j = 0; j < n; ++j)
        tb.stat[static_cast<size_t>(j)] = initial_stat(
            tb.lb[static_cast<size_t>(j)], tb.ub[static_cast<size_t>(j)],
            &tb.val[static_cast<size_t>(j)]);

    std::vector<double> resid(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) resid[static_cast<size_t>(i)] = model.constr(i).rhs;
    for (int i = 0; i < m; ++i)
        for (auto [v, coef] : model.constr(i).terms)
            resid[static_cast<size_t>(i)] -= coef * tb.val[static_cast<size_t>(v)];

    // choose basis per row: slack if the residual fits its bounds, else artificial
    std::vector<int> art_of_row(static_cast<size_t>(m), -1);
    int n_art = 0;
    for (int i = 0; i < m; ++i) {
        double r = resid[static_cast<size_t>(i)];
        if (r >= slack_lb[static_cast<size_t>(i)] - kTolFeas &&
            r <= slack_ub[static_cast<size_t>(i)] + kTolFeas)
            continue;
        art_of_row[static_cast<size_t>(i)] = n_art++;
    }
    tb.ncols = n + m + n_art;
    tb.lb.resize(static_cast<size_t>(tb.ncols));
    tb.ub.resize(static_cast<size_t>(tb.ncols));
    tb.cost.resize(static_cast<size_t>(tb.ncols), 0.0);
    tb.val.resize(static_cast<size_t>(tb.ncols), 0.0);
    tb.stat.resize(static_cast<size_t>(tb.ncols), VStat::Fixed);
    for (int i = 0; i < m; ++i) {
        tb.lb[static_cast<size_t>(n + i)] = slack_lb[static_cast<size_t>(i)];
        tb.ub[static_cast<size_t>(n + i)] = slack_ub[static_cast<size_t>(i)];
    }

    tb.T = Mat::Zero(m, tb.ncols);
    for (int i = 0; i < m; ++i) {
        for (auto [v, coef] : model.constr(i).terms) tb.T(i, v) += coef;
        tb.T(i, n + i) = 1.0;
    }

    tb.basis.resize(static_cast<size_t>(m));
    tb.beta = Vec::Zero(m);
    bool need_phase1 = false;
    std::vector<double> phase1_cost(static_cast<size_t>(tb.ncols), 0.0);
    for (int i = 0; i < m; ++i) {
        double r = resid[static_cast<size_t>(i)];
        int a = art_of_row[static_cast<size_t>(i)];
        if (a < 0) {
            tb.basis[static_cast<size_t>(i)] = n + i;
            tb.stat[static_cast<size_t>(n + i)] = VStat::Basic;
        } else {
            int col = n + m + a;
            tb.T(i, col) = 1.0;
            tb.lb[static_cast<size_t>(col)] = std::min(0.0, r);
            tb.ub[static_cast<size_t>(col)] = std::max(0.0, r);
            phase1_cost[static_cast<size_t>(col)] = (r > 0) ? 1.0 : -1.0;
            tb.basis[static_cast<size_t>(i)] = col;
            tb.stat[static_cast<size_t>(col)] = VStat::Basic;
            // slack stays nonbasic at a bound (0 is always one of its bounds)
            tb.stat[static_cast<size_t>(n + i)] =
                (slack_ub[static_cast<size_t>(i)] == 0.0 && slack_lb[static_cast<size_t>(i)] == 0.0)
                    ? VStat::Fixed
                    : (slack_lb[static_cast<size_t>(i)] == 0.0 ? VStat::AtLower : VStat::AtUpper);
            need_phase1 = true;
        }
        tb.beta(i) = r;
    }

    const long max_iters = 20000 + 60L * (m + n);

    if (need_phase1) {
        std::vector<double> real_cost = tb.cost;
        tb.cost = phase1_cost;
        int rc = run_phase(tb, max_iters);
        if (rc == 2) return {LpStatus::IterLimit, 0.0, {}};
        // total infeasibility
        double infeas = 0.0;
        for (int i = 0; i < m; ++i) {
            int k = tb.basis[static_cast<size_t>(i)];
            if (k >= n + m) infeas += std::abs(tb.beta(i));
        }
        for (int j = n + m; j < tb.ncols; ++j)
            if (tb.stat[static_cast<size_t>(j)] != VStat::Basic)
                infeas += std::abs(tb.val[static_cast<size_t>(j)]);
        if (infeas > 1e-7) return {LpStatus::Infeasible, 0.0, {}};
        // freeze artificials at zero
        for (int j = n + m; j < tb.ncols; ++j) {
            tb.lb[static_cast<size_t>(j)] = 0.0;
            tb.ub[static_cast<size_t>(j)] = 0.0;
            if (tb.stat[static_cast<size_t>(j)] != VStat::Basic) {
                tb.stat[static_cast<size_t>(j)] = VStat::Fixed;
                tb.val[static_cast<size_t>(j)] = 0.0;
            }
        }
        tb.cost = real_cost;
        tb.cost.resize(static_cast<size_t>(tb.ncols), 0.0);
    }

    int rc = run_phase(tb, max_iters);
    if (rc == 1) return {LpStatus::Unbounded, 0.0, {}};
    if (rc == 2) return {LpStatus::IterLimit, 0.0, {}};

    // extract structural solution
    auto extract = [&](std::vector<double>& x) {
        x.assign(static_cast<size_t>(n), 0.0);
        for (int j = 0; j < n; ++j)
            if (tb.stat[static_cast<size_t>(j)] != VStat::Basic)
                x[static_cast<size_t>(j)] = tb.val[static_cast<size_t>(j)];
        for (int i = 0; i < m; ++i) {
            int k = tb.basis[static_cast<size_t>(i)];
            if (k < n) x[static_cast<size_t>(k)] = tb.beta(i);
        }
    };

    LpResult res;
    res.status = LpStatus::Optimal;
    extract(res.x);
    if (model.max_residual(res.x) > 1e-8) {
        refine_solution(model, tb);
        extract(res.x);
    }
    // clamp tiny bound violations from roundoff
    for (int j = 0; j < n; ++j) {
        double& v = res.x[static_cast<size_t>(j)];
        v = std::min(std::max(v, tb.lb[static_cast<size_t>(j)]),
                     tb.ub[static_cast<size_t>(j)]);
    }
    res.objective = model.objective_value(res.x);
    return res;
}

}  // namespace menet
