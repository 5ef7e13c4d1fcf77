#pragma once

#include <vector>

#include "menet/milp.hpp"

namespace menet {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;  // structural variables only
};

// Solves the LP relaxation of `model` with variable bounds replaced by
// (lb, ub). Two-phase bounded-variable tableau simplex; deterministic.
LpResult solve_lp(const MilpModel& model, const std::vector<double>& lb,
                  const std::vector<double>& ub);

LpResult solve_lp(const MilpModel& model);

}  // namespace menet
