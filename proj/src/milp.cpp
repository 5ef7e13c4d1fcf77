#include "menet/milp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace menet {

int MilpModel::add_var(const std::string& name, double lb, double ub,
                       VarType type, double obj) {
    if (lb > ub)
        throw std::invalid_argument("variable " + name + ": lb > ub");
    vars_.push_back({name, lb, ub, type, obj});
    return static_cast<int>(vars_.size()) - 1;
}

void MilpModel::set_obj(int var, double coeff) {
    vars_[static_cast<size_t>(var)].obj = coeff;
}

void MilpModel::add_obj(int var, double coeff) {
    vars_[static_cast<size_t>(var)].obj += coeff;
}

int MilpModel::add_constr(const std::string& name,
                          std::vector<std::pair<int, double>> terms,
                          Sense sense, double rhs) {
    for (auto& [v, c] : terms)
        if (v < 0 || v >= n_vars())
            throw std::invalid_argument("constraint " + name +
                                        ": undeclared variable");
    constrs_.push_back({name, std::move(terms), sense, rhs});
    return static_cast<int>(constrs_.size()) - 1;
}

void MilpModel::set_bounds(int var, double lb, double ub) {
    if (lb > ub) throw std::invalid_argument("set_bounds: lb > ub");
    vars_[static_cast<size_t>(var)].lb = lb;
    vars_[static_cast<size_t>(var)].ub = ub;
}

double MilpModel::max_residual(const std::vector<double>& x) const {
    double worst = 0.0;
    for (size_t i = 0; i < vars_.size(); ++i) {
        const auto& v = vars_[i];
        worst = std::max(worst, v.lb - x[i]);
        worst = std::max(worst, x[i] - v.ub);
    }
    for (const auto& c : constrs_) {
        double lhs = 0.0;
        for (auto [v, coef] : c.terms) lhs += coef * x[static_cast<size_t>(v)];
        double r = 0.0;
        switch (c.sense) {
            case Sense::LE: r = lhs - c.rhs; break;
            case Sense::GE: r = c.rhs - lhs; break;
            case Sense::EQ: r = std::abs(lhs - c.rhs); break;
        }
        worst = std::max(worst, r);
    }
    return worst;
}

double MilpModel::objective_value(const std::vector<double>& x) const {
    double obj = 0.0;
    for (size_t i = 0; i < vars_.size(); ++i) obj += vars_[i].obj * x[i];
    return obj;
}

std::string MilpModel::to_lp_format() const {
    std::ostringstream os;
    os.precision(12);
    os << "Minimize\n obj:";
    for (size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].obj != 0.0)
            os << (vars_[i].obj >= 0 ? " + " : " - ") << std::abs(vars_[i].obj)
               << " x" << i;
    os << "\nSubject To\n";
    for (size_t k = 0; k < constrs_.size(); ++k) {
        const auto& c = constrs_[k];
        os << " c" << k << ":";
        for (auto [v, coef] : c.terms)
            os << (coef >= 0 ? " + " : " - ") << std::abs(coef) << " x" << v;
        switch (c.sense) {
            case Sense::LE: os << " <= "; break;
            case Sense::GE: os << " >= "; break;
            case Sense::EQ: os << " = "; break;
        }
        os << c.rhs << "\n";
    }
    os << "Bounds\n";
    for (size_t i = 0; i < vars_.size(); ++i) {
        os << " ";
        if (vars_[i].lb == -kInf) os << "-inf";
        else os << vars_[i].lb;
        os << " <= x" << i << " <= ";
        if (vars_[i].ub == kInf) os << "+inf";
        else os << vars_[i].ub;
        os << "\n";
    }
    os << "Binaries\n";
    for (size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].type == VarType::Binary) os << " x" << i;
    os << "\nEnd\n";
    return os.str();
}

int add_abs(MilpModel& m, int x_var, double big_m, const std::string& name) {
    const auto& xv = m.var(x_var);
    if (xv.lb < -big_m || xv.ub > big_m)
        throw std::invalid_argument("add_abs: big_m smaller than bound range of " +
                                    xv.name);
    int a = m.add_var(name, 0.0, big_m);
    m.add_constr(name + "_pos", {{a, 1.0}, {x_var, -1.0}}, Sense::GE, 0.0);
    m.add_constr(name + "_neg", {{a, 1.0}, {x_var, 1.0}}, Sense::GE, 0.0);
    return a;
}

bool pwl_is_convex(const std::vector<std::pair<double, double>>& bp) {
    double prev = -kInf;
    for (size_t k = 0; k + 1 < bp.size(); ++k) {
        double slope = (bp[k + 1].second - bp[k].second) /
                       (bp[k + 1].first - bp[k].first);
        if (slope < prev - 1e-12) return false;
        prev = slope;
    }
    return true;
}

static void check_breakpoints(const std::vector<std::pair<double, double>>& bp,
                              const MilpModel& m, int x_var) {
    if (bp.size() < 2)
        throw std::invalid_argument("pwl: need at least 2 breakpoints");
    for (size_t k = 0; k + 1 < bp.size(); ++k)
        if (bp[k + 1].first <= bp[k].first)
            throw std::invalid_argument("pwl: breakpoints not strictly increasing");
    const auto& v = m.var(x_var);
    if (v.lb < bp.front().first - 1e-9 || v.ub > bp.back().first + 1e-9)
        throw std::invalid_argument("pwl: x bounds exceed breakpoint range");
}

int add_pwl(MilpModel& m, int x_var,
            const std::vector<std::pair<double, double>>& bp,
            const std::string& name) {
    check_breakpoints(bp, m, x_var);
    size_t K = bp.size() - 1;  // segments
    std::vector<int> delta(K), z;
    for (size_t k = 0; k < K; ++k)
        delta[k] = m.add_var(name + "_d" + std::to_string(k), 0.0,
                             bp[k + 1].first - bp[k].first);
    // z_k = 1 iff segment k is full; ordering z_{k+1} <= z_k is implied by
    // delta_k >= w_k z_k and delta_k <= w_{k-1}... use the standard pairing:
    //   delta_k <= w_k,  delta_k >= w_k * z_k,  delta_{k+1} <= w_{k+1} * z_k
    z.resize(K > 1 ? K - 1 : 0);
    for (size_t k = 0; k + 1 < K; ++k)
        z[k] = m.add_binary(name + "_z" + std::to_string(k));
    for (size_t k = 0; k + 1 < K; ++k) {
        double wk = bp[k + 1].first - bp[k].first;
        double wk1 = bp[k + 2].first - bp[k + 1].first;
        m.add_constr(name + "_fill" + std::to_string(k),
                     {{delta[k], 1.0}, {z[k], -wk}}, Sense::GE, 0.0);
        m.add_constr(name + "_ord" + std::to_string(k),
                     {{delta[k + 1], 1.0}, {z[k], -wk1}}, Sense::LE, 0.0);
    }
    // x = x_0 + sum delta
    std::vector<std::pair<int, double>> xlink{{x_var, 1.0}};
    for (size_t k = 0; k < K; ++k) xlink.emplace_back(delta[k], -1.0);
    m.add_constr(name + "_x", std::move(xlink), Sense::EQ, bp.front().first);
    // cost = y_0 + sum slope_k delta_k
    int cost = m.add_var(name + "_y", -kInf, kInf);
    std::vector<std::pair<int, double>> clink{{cost, 1.0}};
    for (size_t k = 0; k < K; ++k) {
        double slope = (bp[k + 1].second - bp[k].second) /
                       (bp[k + 1].first - bp[k].first);
        clink.emplace_back(delta[k], -slope);
    }
    m.add_constr(name + "_y", std::move(clink), Sense::EQ, bp.front().second);
    return cost;
}

int add_pwl_convex(MilpModel& m, int x_var,
                   const std::vector<std::pair<double, double>>& bp,
                   const std::string& name) {
    check_breakpoints(bp, m, x_var);
    if (!pwl_is_convex(bp))
        throw std::invalid_argument("add_pwl_convex: breakpoints are not convex");
    size_t K = bp.size() - 1;
    std::vector<int> delta(K);
    for (size_t k = 0; k < K; ++k)
        delta[k] = m.add_var(name + "_d" + std::to_string(k), 0.0,
                             bp[k + 1].first - bp[k].first);
    std::vector<std::pair<int, double>> xlink{{x_var, 1.0}};
    for (size_t k = 0; k < K; ++k) xlink.emplace_back(delta[k], -1.0);
    m.add_constr(name + "_x", std::move(xlink), Sense::EQ, bp.front().first);
    int cost = m.add_var(name + "_y", -kInf, kInf);
    std::vector<std::pair<int, double>> clink{{cost, 1.0}};
    for (size_t k = 0; k < K; ++k) {
        double slope = (bp[k + 1].second - bp[k].second) /
                       (bp[k + 1].first - bp[k].first);
        clink.emplace_back(delta[k], -slope);
    }
    m.add_constr(name + "_y", std::move(clink), Sense::EQ, bp.front().second);
    return cost;
}

int add_exclusive_pair(MilpModel& m, int x_var, int y_var, double x_cap,
                       double y_cap, const std::string& name) {
    if (!(std::isfinite(x_cap) && std::isfinite(y_cap)) || x_cap < 0 || y_cap < 0)
        throw std::invalid_argument("add_exclusive_pair: caps must be finite and >= 0");
    int b = m.add_binary(name + "_b");
    m.add_constr(name + "_x", {{x_var, 1.0}, {b, -x_cap}}, Sense::LE, 0.0);
    m.add_constr(name + "_y", {{y_var, 1.0}, {b, y_cap}}, Sense::LE, y_cap);
    return b;
}

}  // namespace menet
