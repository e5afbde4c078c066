#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cmek {

struct LadSolution {
    std::vector<double> coefficients;  ///< entrywise >= 0
    double objective = 0.0;            ///< sum_i |y_i - x_i . beta|, recomputed from the coefficients
    double dual_bound = 0.0;           ///< value of a feasible dual point
    double dual_infeasibility = 0.0;   ///< largest dual constraint violation before clipping
    std::size_t pivots = 0;
    bool alternative_optima = false;   ///< a non-basic coefficient has zero reduced cost
};

/// Exact least-absolute-deviation fit with non-negative coefficients:
///
///   minimize   sum_i |y_i - x_i . beta|   subject to beta >= 0,
///
/// solved as the linear program  x_i . beta + u_i - v_i = y_i,  u, v >= 0,
/// minimize sum (u + v), by dense primal simplex from the slack basis.
/// The final basis is refactorized to certify primal and dual feasibility;
/// throws Error if the certified gap exceeds `gap_tolerance`.
LadSolution solve_nonnegative_lad(const std::vector<std::vector<double>>& design,
                                  std::span<const double> targets, double gap_tolerance = 1e-8);

}  // namespace cmek
