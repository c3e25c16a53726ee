#pragma once

#include <complex>
#include <string>

#include "embedcap/rng.hpp"

namespace embedcap {

enum class Family {
    Exponential,
    Gamma,
    Erlang,
    Weibull,
    Uniform,
    Pareto,
    Lognormal,
    ShiftedExponential,
};

std::string family_name(Family f);

// One renewal traffic family: an interarrival law in unit-mean form (u-PDF)
// plus an arrival rate. Parameter domains are validated at construction and
// instances are immutable, so all operations are pure given an RngState.
//
// Unit-mean parameterizations:
//   Exponential          k(t) = e^-t
//   Gamma(xi)            k(t) = xi (xi t)^(xi-1) e^(-xi t) / Gamma(xi)
//   Erlang(xi)           Gamma with integer xi
//   Weibull(b)           k(t) = (b/s)(t/s)^(b-1) e^(-(t/s)^b), s = 1/Gamma(1+1/b)
//   Uniform              on [0, 2]
//   Pareto(b)            k(t) = (b/(b-1)) (1 + t/(b-1))^-(b+1), b > 1
//   Lognormal(sigma)     log t ~ N(-sigma^2/2, sigma^2)
//   ShiftedExponential(a) k(t) = e^(-(t-a)/(1-a))/(1-a) for t >= a, 0 < a < 1
class InterarrivalModel {
public:
    static InterarrivalModel exponential(double rate = 1.0);
    static InterarrivalModel gamma(double shape, double rate = 1.0);
    static InterarrivalModel erlang(int shape, double rate = 1.0);
    static InterarrivalModel weibull(double shape, double rate = 1.0);
    static InterarrivalModel uniform(double rate = 1.0);
    static InterarrivalModel pareto(double shape, double rate = 1.0);
    static InterarrivalModel lognormal(double sigma, double rate = 1.0);
    static InterarrivalModel shifted_exponential(double offset, double rate = 1.0);

    Family family() const { return family_; }
    double shape() const { return shape_; }
    double rate() const { return rate_; }

    // descriptor in the CLI grammar, e.g. "erlang:xi=2" or "pareto:b=3@2"
    std::string name() const;

    // same u-PDF at rate 1 (normalized time)
    InterarrivalModel unit_rate() const;

    // u-PDF k(t); zero below the support
    double updf(double t) const;
    // CDF of the unit-mean law
    double cdf(double t) const;
    // 1 - F(t), computed in the tail without cancellation
    double survival(double t) const;
    // integral of the survival function over (s, inf); upper_partial_mean(0) = 1
    double upper_partial_mean(double s) const;
    // mean residual life E[X - s | X > s]
    double mean_residual_life(double s) const;
    // quantile of the unit-mean law; closed form where available, otherwise
    // bisection on the CDF to 1e-10
    double quantile(double p) const;

    // dispersion index = variance of the u-PDF; +inf when the second moment
    // diverges (Pareto with b <= 2)
    double dispersion_index() const;
    bool finite_variance() const;

    // one draw from the u-PDF
    double sample(RngState& rng) const;

    // K(f) = int k(t) e^{i 2 pi f t} dt; closed form for Exponential,
    // Gamma/Erlang, Uniform and ShiftedExponential, numeric quadrature for the
    // rest. K(0) = 1 exactly.
    std::complex<double> characteristic_function(double f) const;

    // true when the u-PDF is unbounded at t -> 0 (Gamma/Weibull with shape < 1)
    bool density_unbounded_at_zero() const;
    // left edge of the support (0, or the offset for ShiftedExponential)
    double support_lower() const;

private:
    InterarrivalModel(Family f, double shape, double rate);

    Family family_;
    double shape_;
    double rate_;
};

}  // namespace embedcap
