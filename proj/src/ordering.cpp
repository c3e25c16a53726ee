#include "embedcap/ordering.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <stdexcept>

namespace embedcap {

namespace {

constexpr double kOrderTol = 1e-9;
constexpr double kAgingTol = 1e-6;

OrderingVerdict verdict_from_gaps(double worst_less, double worst_more,
                                  std::vector<double> grid) {
    OrderingVerdict v;
    v.evidence_grid = std::move(grid);
    if (worst_less <= kOrderTol) {
        v.relation = OrderingRelation::LessVariable;
        v.max_violation = worst_less;
    } else if (worst_more <= kOrderTol) {
        v.relation = OrderingRelation::MoreVariable;
        v.max_violation = worst_more;
    } else {
        v.relation = OrderingRelation::Incomparable;
        v.max_violation = std::min(worst_less, worst_more);
    }
    return v;
}

bool gamma_like(const InterarrivalModel& m) {
    return m.family() == Family::Gamma || m.family() == Family::Erlang ||
           m.family() == Family::Exponential;
}

double gamma_like_shape(const InterarrivalModel& m) {
    return m.family() == Family::Exponential ? 1.0 : m.shape();
}

}  // namespace

std::vector<double> default_x_grid() {
    std::vector<double> g(1000);
    const double lo = std::log(1e-3), hi = std::log(50.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / (g.size() - 1));
    }
    return g;
}

std::vector<double> default_p_grid() {
    std::vector<double> g(999);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = static_cast<double>(i + 1) / 1000.0;
    }
    return g;
}

double lorenz_curve(const InterarrivalModel& model, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("lorenz_curve: p must lie in [0,1]");
    }
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    switch (model.family()) {
        case Family::Pareto: {
            const double b = model.shape();
            return b * (1.0 - std::pow(1.0 - p, 1.0 - 1.0 / b)) - (b - 1.0) * p;
        }
        case Family::Lognormal: {
            static const boost::math::normal_distribution<double> unit;
            const double z = boost::math::quantile(unit, p);
            return boost::math::cdf(unit, z - model.shape());
        }
        default: {
            // L(p) = E[X; X <= q] = 1 - upm(q) - q (1 - p) at q = F^-1(p)
            const double q = model.quantile(p);
            return 1.0 - model.upper_partial_mean(q) - q * (1.0 - p);
        }
    }
}

OrderingVerdict convex_order_check(const InterarrivalModel& m1,
                                   const InterarrivalModel& m2,
                                   std::span<const double> x_grid) {
    double worst_less = 0.0, worst_more = 0.0;
    for (double x : x_grid) {
        // int_0^x surv_i = 1 - upm_i(x); the difference needs no quadrature
        const double gap = m2.upper_partial_mean(x) - m1.upper_partial_mean(x);
        worst_less = std::max(worst_less, -gap);
        worst_more = std::max(worst_more, gap);
    }
    return verdict_from_gaps(worst_less, worst_more,
                             std::vector<double>(x_grid.begin(), x_grid.end()));
}

OrderingVerdict convex_order_check(const InterarrivalModel& m1,
                                   const InterarrivalModel& m2) {
    const auto grid = default_x_grid();
    return convex_order_check(m1, m2, grid);
}

OrderingVerdict convex_order_check_lorenz(const InterarrivalModel& m1,
                                          const InterarrivalModel& m2,
                                          std::span<const double> p_grid) {
    double worst_less = 0.0, worst_more = 0.0;
    for (double p : p_grid) {
        const double gap = lorenz_curve(m1, p) - lorenz_curve(m2, p);
        worst_less = std::max(worst_less, -gap);
        worst_more = std::max(worst_more, gap);
    }
    return verdict_from_gaps(worst_less, worst_more,
                             std::vector<double>(p_grid.begin(), p_grid.end()));
}

AgingClass nbue_classify(const InterarrivalModel& model, std::span<const double> s_grid) {
    bool nbue = true, nwue = true;
    for (double s : s_grid) {
        if (model.survival(s) <= 0.0) continue;  // past the support
        const double mrl = model.mean_residual_life(s);
        if (mrl > 1.0 + kAgingTol) nbue = false;
        if (mrl < 1.0 - kAgingTol) nwue = false;
        if (!nbue && !nwue) return AgingClass::Neither;
    }
    if (nbue && nwue) return AgingClass::Both;
    return nbue ? AgingClass::NBUE : AgingClass::NWUE;
}

AgingClass nbue_classify(const InterarrivalModel& model) {
    std::vector<double> grid(501);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = 10.0 * static_cast<double>(i) / (grid.size() - 1);
    }
    return nbue_classify(model, grid);
}

CapacityOrder predict_capacity_order(const InterarrivalModel& m1,
                                     const InterarrivalModel& m2) {
    // same-family rules first (the exponential is Gamma with xi = 1)
    if (gamma_like(m1) && gamma_like(m2)) {
        return gamma_like_shape(m1) >= gamma_like_shape(m2)
                   ? CapacityOrder::FirstAtLeastSecond
                   : CapacityOrder::FirstAtMostSecond;
    }
    if (m1.family() == m2.family()) {
        switch (m1.family()) {
            case Family::Weibull:
            case Family::Pareto:
                return m1.shape() >= m2.shape() ? CapacityOrder::FirstAtLeastSecond
                                                : CapacityOrder::FirstAtMostSecond;
            case Family::Lognormal:
                return m1.shape() <= m2.shape() ? CapacityOrder::FirstAtLeastSecond
                                                : CapacityOrder::FirstAtMostSecond;
            default:
                break;  // fall through to the grid check
        }
    }
    const OrderingVerdict v = convex_order_check(m1, m2);
    switch (v.relation) {
        case OrderingRelation::LessVariable: return CapacityOrder::FirstAtLeastSecond;
        case OrderingRelation::MoreVariable: return CapacityOrder::FirstAtMostSecond;
        case OrderingRelation::Incomparable: return CapacityOrder::Unknown;
    }
    return CapacityOrder::Unknown;
}

}  // namespace embedcap
