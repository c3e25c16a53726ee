#include "embedcap/models.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "embedcap/quadrature.hpp"

namespace embedcap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_quantile(double p) {
    static const boost::math::normal_distribution<double> unit;
    return boost::math::quantile(unit, p);
}

// scale of the unit-mean Weibull: 1/Gamma(1+1/b)
double weibull_scale(double b) { return 1.0 / std::tgamma(1.0 + 1.0 / b); }

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::Exponential: return "exponential";
        case Family::Gamma: return "gamma";
        case Family::Erlang: return "erlang";
        case Family::Weibull: return "weibull";
        case Family::Uniform: return "uniform";
        case Family::Pareto: return "pareto";
        case Family::Lognormal: return "lognormal";
        case Family::ShiftedExponential: return "shifted-exponential";
    }
    return "?";
}

InterarrivalModel::InterarrivalModel(Family f, double shape, double rate)
    : family_(f), shape_(shape), rate_(rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument("rate must be a positive finite real");
    }
}

InterarrivalModel InterarrivalModel::exponential(double rate) {
    return {Family::Exponential, 0.0, rate};
}

InterarrivalModel InterarrivalModel::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw std::invalid_argument("gamma shape xi must be > 0");
    }
    return {Family::Gamma, shape, rate};
}

InterarrivalModel InterarrivalModel::erlang(int shape, double rate) {
    if (shape < 1) throw std::invalid_argument("erlang shape xi must be an integer >= 1");
    return {Family::Erlang, static_cast<double>(shape), rate};
}

InterarrivalModel InterarrivalModel::weibull(double shape, double rate) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw std::invalid_argument("weibull shape b must be > 0");
    }
    return {Family::Weibull, shape, rate};
}

InterarrivalModel InterarrivalModel::uniform(double rate) {
    return {Family::Uniform, 0.0, rate};
}

InterarrivalModel InterarrivalModel::pareto(double shape, double rate) {
    if (!(shape > 1.0) || !std::isfinite(shape)) {
        throw std::invalid_argument("pareto shape b must be > 1 for a finite mean");
    }
    return {Family::Pareto, shape, rate};
}

InterarrivalModel InterarrivalModel::lognormal(double sigma, double rate) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("lognormal scale sigma must be > 0");
    }
    return {Family::Lognormal, sigma, rate};
}

InterarrivalModel InterarrivalModel::shifted_exponential(double offset, double rate) {
    if (!(offset > 0.0 && offset < 1.0)) {
        throw std::invalid_argument("shifted-exponential offset a must satisfy 0 < a < 1");
    }
    return {Family::ShiftedExponential, offset, rate};
}

std::string InterarrivalModel::name() const {
    std::ostringstream os;
    os << family_name(family_);
    switch (family_) {
        case Family::Gamma:
        case Family::Erlang: os << ":xi=" << shape_; break;
        case Family::Weibull:
        case Family::Pareto: os << ":b=" << shape_; break;
        case Family::Lognormal: os << ":sigma=" << shape_; break;
        case Family::ShiftedExponential: os << ":a=" << shape_; break;
        default: break;
    }
    if (rate_ != 1.0) os << "@" << rate_;
    return os.str();
}

InterarrivalModel InterarrivalModel::unit_rate() const {
    return {family_, shape_, 1.0};
}

double InterarrivalModel::updf(double t) const {
    if (t < 0.0) return 0.0;
    switch (family_) {
        case Family::Exponential:
            return std::exp(-t);
        case Family::Gamma:
        case Family::Erlang: {
            const double xi = shape_;
            if (t == 0.0) {
                if (xi < 1.0) return kInf;
                if (xi == 1.0) return 1.0;
                return 0.0;
            }
            return std::exp(std::log(xi) + (xi - 1.0) * std::log(xi * t) - xi * t -
                            std::lgamma(xi));
        }
        case Family::Weibull: {
            const double b = shape_, s = weibull_scale(b);
            if (t == 0.0) {
                if (b < 1.0) return kInf;
                if (b == 1.0) return 1.0 / s;
                return 0.0;
            }
            const double z = t / s;
            return b / s * std::pow(z, b - 1.0) * std::exp(-std::pow(z, b));
        }
        case Family::Uniform:
            return t <= 2.0 ? 0.5 : 0.0;
        case Family::Pareto: {
            const double b = shape_;
            return b / (b - 1.0) * std::pow(1.0 + t / (b - 1.0), -(b + 1.0));
        }
        case Family::Lognormal: {
            if (t == 0.0) return 0.0;
            const double s = shape_;
            const double z = (std::log(t) + 0.5 * s * s) / s;
            return std::exp(-0.5 * z * z) / (t * s * std::sqrt(2.0 * kPi));
        }
        case Family::ShiftedExponential: {
            const double a = shape_;
            if (t < a) return 0.0;
            return std::exp(-(t - a) / (1.0 - a)) / (1.0 - a);
        }
    }
    return 0.0;
}

double InterarrivalModel::cdf(double t) const {
    if (t <= 0.0) return 0.0;
    switch (family_) {
        case Family::Exponential:
            return -std::expm1(-t);
        case Family::Gamma:
        case Family::Erlang:
            return boost::math::gamma_p(shape_, shape_ * t);
        case Family::Weibull: {
            const double s = weibull_scale(shape_);
            return -std::expm1(-std::pow(t / s, shape_));
        }
        case Family::Uniform:
            return t >= 2.0 ? 1.0 : 0.5 * t;
        case Family::Pareto:
            return -std::expm1(-shape_ * std::log1p(t / (shape_ - 1.0)));
        case Family::Lognormal:
            return std_normal_cdf((std::log(t) + 0.5 * shape_ * shape_) / shape_);
        case Family::ShiftedExponential: {
            const double a = shape_;
            if (t <= a) return 0.0;
            return -std::expm1(-(t - a) / (1.0 - a));
        }
    }
    return 0.0;
}

double InterarrivalModel::survival(double t) const {
    if (t <= 0.0) return 1.0;
    switch (family_) {
        case Family::Exponential:
            return std::exp(-t);
        case Family::Gamma:
        case Family::Erlang:
            return boost::math::gamma_q(shape_, shape_ * t);
        case Family::Weibull: {
            const double s = weibull_scale(shape_);
            return std::exp(-std::pow(t / s, shape_));
        }
        case Family::Uniform:
            return t >= 2.0 ? 0.0 : 1.0 - 0.5 * t;
        case Family::Pareto:
            return std::exp(-shape_ * std::log1p(t / (shape_ - 1.0)));
        case Family::Lognormal:
            return std_normal_cdf(-(std::log(t) + 0.5 * shape_ * shape_) / shape_);
        case Family::ShiftedExponential: {
            const double a = shape_;
            if (t <= a) return 1.0;
            return std::exp(-(t - a) / (1.0 - a));
        }
    }
    return 0.0;
}

double InterarrivalModel::upper_partial_mean(double s) const {
    if (s <= 0.0) return 1.0;
    switch (family_) {
        case Family::Exponential:
            return std::exp(-s);
        case Family::Gamma:
        case Family::Erlang: {
            const double xi = shape_;
            return boost::math::gamma_q(xi + 1.0, xi * s) -
                   s * boost::math::gamma_q(xi, xi * s);
        }
        case Family::Weibull: {
            const double b = shape_, sc = weibull_scale(b);
            // int_s^inf e^{-(t/sc)^b} dt = (sc/b) Gamma(1/b, (s/sc)^b)
            return sc / b * boost::math::tgamma(1.0 / b, std::pow(s / sc, b));
        }
        case Family::Uniform:
            return s >= 2.0 ? 0.0 : 0.25 * (2.0 - s) * (2.0 - s);
        case Family::Pareto:
            return std::exp((1.0 - shape_) * std::log1p(s / (shape_ - 1.0)));
        case Family::Lognormal: {
            const double sg = shape_;
            const double partial = std_normal_cdf(0.5 * sg - std::log(s) / sg);
            return partial - s * survival(s);
        }
        case Family::ShiftedExponential: {
            const double a = shape_;
            if (s <= a) return 1.0 - s;
            return (1.0 - a) * std::exp(-(s - a) / (1.0 - a));
        }
    }
    return 0.0;
}

double InterarrivalModel::mean_residual_life(double s) const {
    const double sv = survival(s);
    if (sv <= 0.0) {
        throw std::domain_error("mean residual life undefined beyond the support");
    }
    return upper_partial_mean(s) / sv;
}

double InterarrivalModel::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("quantile requires p in [0,1]");
    }
    if (p == 0.0) return support_lower();
    if (p == 1.0) return family_ == Family::Uniform ? 2.0 : kInf;
    switch (family_) {
        case Family::Exponential:
            return -std::log1p(-p);
        case Family::Weibull:
            return weibull_scale(shape_) * std::pow(-std::log1p(-p), 1.0 / shape_);
        case Family::Uniform:
            return 2.0 * p;
        case Family::Pareto:
            return (shape_ - 1.0) * std::expm1(-std::log1p(-p) / shape_);
        case Family::Lognormal:
            return std::exp(shape_ * std_normal_quantile(p) - 0.5 * shape_ * shape_);
        case Family::ShiftedExponential:
            return shape_ - (1.0 - shape_) * std::log1p(-p);
        case Family::Gamma:
        case Family::Erlang: {
            // no closed form: bisection on the CDF to 1e-10
            double lo = 0.0, hi = 1.0;
            while (cdf(hi) < p) {
                hi *= 2.0;
                if (hi > 1e9) break;
            }
            for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
                const double mid = 0.5 * (lo + hi);
                (cdf(mid) < p ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    return 0.0;
}

double InterarrivalModel::dispersion_index() const {
    switch (family_) {
        case Family::Exponential: return 1.0;
        case Family::Gamma:
        case Family::Erlang: return 1.0 / shape_;
        case Family::Weibull: {
            const double b = shape_;
            const double g1 = std::tgamma(1.0 + 1.0 / b);
            return std::tgamma(1.0 + 2.0 / b) / (g1 * g1) - 1.0;
        }
        case Family::Uniform: return 1.0 / 3.0;
        case Family::Pareto:
            return shape_ > 2.0 ? shape_ / (shape_ - 2.0) : kInf;
        case Family::Lognormal: return std::expm1(shape_ * shape_);
        case Family::ShiftedExponential: {
            const double a = shape_;
            return (1.0 - a) * (1.0 - a);
        }
    }
    return kInf;
}

bool InterarrivalModel::finite_variance() const {
    return std::isfinite(dispersion_index());
}

double InterarrivalModel::sample(RngState& rng) const {
    switch (family_) {
        case Family::Exponential:
            return rng.exponential();
        case Family::Gamma:
        case Family::Erlang:
            return rng.gamma(shape_) / shape_;
        case Family::Weibull:
            return weibull_scale(shape_) * std::pow(rng.exponential(), 1.0 / shape_);
        case Family::Uniform:
            return 2.0 * rng.uniform01();
        case Family::Pareto:
            return (shape_ - 1.0) * std::expm1(-std::log(rng.uniform01()) / shape_);
        case Family::Lognormal:
            return std::exp(shape_ * rng.normal() - 0.5 * shape_ * shape_);
        case Family::ShiftedExponential:
            return shape_ + (1.0 - shape_) * rng.exponential();
    }
    return 0.0;
}

std::complex<double> InterarrivalModel::characteristic_function(double f) const {
    using namespace std::complex_literals;
    if (f == 0.0) return 1.0;
    const double w = 2.0 * kPi * f;
    switch (family_) {
        case Family::Exponential:
            return 1.0 / (1.0 - 1i * w);
        case Family::Gamma:
        case Family::Erlang:
            return std::pow(std::complex<double>(1.0, -w / shape_), -shape_);
        case Family::Uniform:
            return std::exp(1i * w) * std::sin(w) / w;
        case Family::ShiftedExponential: {
            const double a = shape_;
            return std::exp(1i * (w * a)) / (1.0 - 1i * (w * (1.0 - a)));
        }
        default:
            break;
    }
    // numeric transform for Weibull, Pareto, Lognormal: integrate k(t)e^{iwt}
    // over [0, T], splitting at half-periods; the oscillatory tail of the
    // monotone-decreasing density is bounded by k(T)/|w|.
    double T = quantile(1.0 - 1e-9);
    while (T > 1.0 && updf(T) / std::abs(w) > 1e-10) T *= 1.5;
    const double half_period = kPi / std::abs(w);
    static const GaussLegendre gl(24);
    auto piece = [&](double lo, double hi, double& re, double& im) {
        re += gl.integrate([&](double t) { return updf(t) * std::cos(w * t); }, lo, hi);
        im += gl.integrate([&](double t) { return updf(t) * std::sin(w * t); }, lo, hi);
    };
    double re = 0.0, im = 0.0;
    const double b0 = std::min(half_period, T);
    if (density_unbounded_at_zero()) {
        // geometric subdivision toward the integrable endpoint singularity
        double lo = 0.0;
        for (int k = 59; k >= 0; --k) {
            const double hi = b0 * std::pow(0.5, k);
            piece(lo, hi, re, im);
            lo = hi;
        }
    } else {
        piece(0.0, b0, re, im);
    }
    for (double a0 = b0; a0 < T; ) {
        const double b1 = std::min(a0 + half_period, T);
        piece(a0, b1, re, im);
        a0 = b1;
    }
    return {re, im};
}

bool InterarrivalModel::density_unbounded_at_zero() const {
    return (family_ == Family::Gamma || family_ == Family::Weibull) && shape_ < 1.0;
}

double InterarrivalModel::support_lower() const {
    return family_ == Family::ShiftedExponential ? shape_ : 0.0;
}

}  // namespace embedcap
