#pragma once

#include <stdexcept>
#include <vector>

#include "embedcap/models.hpp"

namespace embedcap {

// Thrown when the Weibull renewal series fails its truncation criterion;
// callers fall back to the numeric renewal equation.
class SeriesDivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RenewalSource { ClosedForm, NumericRenewalEquation, TruncatedSeries };

// Renewal function of the unit-rate process sampled on the uniform grid
// {0, h, 2h, ...}. m(0) = 0 and values are non-decreasing.
struct RenewalFunctionTable {
    double grid_step = 0.0;
    std::vector<double> values;
    RenewalSource source = RenewalSource::NumericRenewalEquation;

    double t_max() const { return grid_step * (values.size() - 1); }
    // linear interpolation, clamped to the table range
    double operator()(double t) const;
};

// default grid: min(0.001, t_max / 1e4)
double default_grid_step(double t_max);

// m on the grid via the closed form when the family admits one (Exponential,
// Erlang, Weibull truncated series, Uniform piecewise); otherwise delegates to
// renewal_function_numeric. Throws SeriesDivergenceError for a Weibull series
// that fails to converge.
RenewalFunctionTable renewal_function(const InterarrivalModel& model, double t_max,
                                      double grid_step);
RenewalFunctionTable renewal_function(const InterarrivalModel& model, double t_max);

// m(t) = F(t) + int_0^t m(t-s) dF(s), discretized on the uniform grid with
// trapezoidal weights on m against the dF cell masses.
RenewalFunctionTable renewal_function_numeric(const InterarrivalModel& model,
                                              double t_max, double grid_step);
RenewalFunctionTable renewal_function_numeric(const InterarrivalModel& model,
                                              double t_max);

// closed-form point evaluations
double renewal_m_exponential(double t);
double renewal_m_erlang(int shape, double t);
double renewal_m_uniform(double t);
double renewal_m_weibull(double shape, double t);  // throws SeriesDivergenceError

// closed-form antiderivatives: int_0^t m(s) ds
double renewal_m_integral_exponential(double t);
double renewal_m_integral_erlang(int shape, double t);
double renewal_m_integral_uniform(double t);
double renewal_m_integral_weibull(double shape, double t);  // same series

// Callable m(t) on [0, t_max]: the closed form directly where the family has
// one, otherwise a numeric table with linear interpolation. The numeric grid
// is refined for densities unbounded at zero, whose discretization error
// decays like h^(1+shape) rather than h^2.
class RenewalEvaluator {
public:
    RenewalEvaluator(const InterarrivalModel& model, double t_max,
                     bool force_numeric = false);

    double operator()(double t) const;
    // int_0^delta m(t) dt: analytic antiderivative for closed forms,
    // trapezoid on the table otherwise; requires delta <= t_max
    double integral(double delta) const;
    RenewalSource source() const { return source_; }

private:
    InterarrivalModel model_;
    double t_max_;
    RenewalSource source_;
    bool closed_form_ = false;
    RenewalFunctionTable table_;  // numeric path only
};

}  // namespace embedcap
