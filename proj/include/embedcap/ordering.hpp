#pragma once

#include <span>
#include <vector>

#include "embedcap/models.hpp"

namespace embedcap {

enum class OrderingRelation { LessVariable, MoreVariable, Incomparable };

struct OrderingVerdict {
    OrderingRelation relation = OrderingRelation::Incomparable;
    std::vector<double> evidence_grid;
    // worst violation of the declared inequality on the grid (<= tolerance for
    // a clean verdict; the smaller one-sided violation for Incomparable)
    double max_violation = 0.0;
};

enum class AgingClass { NBUE, NWUE, Both, Neither };

enum class CapacityOrder { FirstAtLeastSecond, FirstAtMostSecond, Unknown };

// default grids for the "for all x" / "for all p" checks
std::vector<double> default_x_grid();  // 1000 log-spaced points in [1e-3, 50]
std::vector<double> default_p_grid();  // 0.001, 0.002, ..., 0.999

// L(p) = int_0^p F^-1(u) du of the unit-mean law. Closed form for Pareto and
// Lognormal, quantile-based evaluation otherwise. L(0) = 0, L(1) = 1, convex,
// bounded by the diagonal.
double lorenz_curve(const InterarrivalModel& model, double p);

// Integrated-survival criterion: m1 is less variable than m2 when
// int_0^x surv_1 >= int_0^x surv_2 for every grid x (tolerance 1e-9).
// Ties count as LessVariable.
OrderingVerdict convex_order_check(const InterarrivalModel& m1,
                                   const InterarrivalModel& m2,
                                   std::span<const double> x_grid);
OrderingVerdict convex_order_check(const InterarrivalModel& m1,
                                   const InterarrivalModel& m2);

// Equivalent Lorenz-curve criterion: L1(p) >= L2(p) on a p grid.
OrderingVerdict convex_order_check_lorenz(const InterarrivalModel& m1,
                                          const InterarrivalModel& m2,
                                          std::span<const double> p_grid);

// Mean-residual-life classification against the unit mean on the s grid
// (tolerance 1e-6); the exponential belongs to both classes.
AgingClass nbue_classify(const InterarrivalModel& model, std::span<const double> s_grid);
AgingClass nbue_classify(const InterarrivalModel& model);

// Same-family shape-parameter rules (Gamma/Erlang xi up, Weibull b up,
// Pareto b up, Lognormal sigma down => capacity up), otherwise the grid-based
// convex-order check.
CapacityOrder predict_capacity_order(const InterarrivalModel& m1,
                                     const InterarrivalModel& m2);

}  // namespace embedcap
