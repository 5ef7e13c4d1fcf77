#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

namespace menet {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarType { Continuous, Binary };
enum class Sense { LE, EQ, GE };
enum class SolveStatus { Optimal, Infeasible, Unbounded, NodeLimit };

struct Variable {
    std::string name;
    double lb = 0.0;
    double ub = kInf;
    VarType type = VarType::Continuous;
    double obj = 0.0;
};

struct Constraint {
    std::string name;
    std::vector<std::pair<int, double>> terms;  // (var index, coefficient)
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

// Language-neutral minimization MILP.
class MilpModel {
  public:
    int add_var(const std::string& name, double lb, double ub,
                VarType type = VarType::Continuous, double obj = 0.0);
    int add_binary(const std::string& name, double obj = 0.0) {
        return add_var(name, 0.0, 1.0, VarType::Binary, obj);
    }
    void set_obj(int var, double coeff);
    void add_obj(int var, double coeff);
    int add_constr(const std::string& name,
                   std::vector<std::pair<int, double>> terms, Sense sense,
                   double rhs);
    void set_bounds(int var, double lb, double ub);

    int n_vars() const { return static_cast<int>(vars_.size()); }
    int n_constrs() const { return static_cast<int>(constrs_.size()); }
    const Variable& var(int i) const { return vars_[static_cast<size_t>(i)]; }
    const Constraint& constr(int i) const { return constrs_[static_cast<size_t>(i)]; }
    const std::vector<Variable>& vars() const { return vars_; }
    const std::vector<Constraint>& constrs() const { return constrs_; }

    // max residual of x over all constraints and bounds (integrality excluded)
    double max_residual(const std::vector<double>& x) const;
    double objective_value(const std::vector<double>& x) const;

    // LP-format text export for debugging and cross-solver checks
    std::string to_lp_format() const;

  private:
    std::vector<Variable> vars_;
    std::vector<Constraint> constrs_;
};

struct Solution {
    SolveStatus status = SolveStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;

    double value(int var) const { return x[static_cast<size_t>(var)]; }
    bool optimal() const { return status == SolveStatus::Optimal; }
};

struct SolveOptions {
    long max_nodes = 200000;
    double int_tol = 1e-6;
    double gap_rel = 1e-9;
};

// Exact branch-and-bound over the bounded-variable simplex relaxation.
Solution solve(const MilpModel& model, const SolveOptions& opts = {});

// --- linearization helpers -------------------------------------------------

// Epigraph absolute value: adds abs_var with abs_var >= x, abs_var >= -x.
// Valid only when the caller's minimization objective puts positive
// pressure on abs_var. Throws if x's bounds exceed big_m in magnitude.
int add_abs(MilpModel& m, int x_var, double big_m,
            const std::string& name = "abs");

// Incremental (delta) piecewise-linear value of x over strictly increasing
// breakpoints (x_k, y_k); exact at the optimum regardless of curvature
// thanks to one binary per interior segment. Returns the cost variable.
// x must be bounded to [x_front, x_back].
int add_pwl(MilpModel& m, int x_var,
            const std::vector<std::pair<double, double>>& breakpoints,
            const std::string& name = "pwl");

// Binary-free incremental PWL, exact only for convex breakpoints under
// minimization pressure on the returned cost variable.
int add_pwl_convex(MilpModel& m, int x_var,
                   const std::vector<std::pair<double, double>>& breakpoints,
                   const std::string& name = "pwlc");

bool pwl_is_convex(const std::vector<std::pair<double, double>>& breakpoints);

// x <= x_cap*b, y <= y_cap*(1-b): at most one of x, y positive.
int add_exclusive_pair(MilpModel& m, int x_var, int y_var, double x_cap,
                       double y_cap, const std::string& name = "excl");

}  // namespace menet
