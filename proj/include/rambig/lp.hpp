#pragma once

#include <vector>

#include "rambig/mdp.hpp"

namespace rambig {

/// Dense linear program: minimize c'x subject to
///   A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0.
struct DenseLp {
    numvec cost;
    std::vector<numvec> eq_rows;
    numvec eq_rhs;
    std::vector<numvec> ub_rows;
    numvec ub_rhs;
};

struct LpSolution {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Infeasible;
    numvec x;
    double objective = 0.0;
};

/// Two-phase tableau simplex with Bland's rule. Intended for the small
/// problems (tens of variables) that arise as inner robust problems.
LpSolution solve_dense_lp(const DenseLp& lp);

} // namespace rambig
