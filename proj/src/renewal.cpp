#include "embedcap/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>

namespace embedcap {

namespace {

constexpr double kWeibullTermTol = 1e-12;
constexpr int kWeibullMaxTerms = 200;

// Iterates the rescaled Weibull series terms s_n = a_n x^(nb) / Gamma(1+nb)
// at x = Gamma(1+1/b) t. The rescaling keeps every intermediate bounded where
// the raw coefficients a_n and Gamma(1+nb) would overflow. sink(n, s_n) is
// called per term; stops once |s_n| < 1e-12, throws after 200 terms or when
// |s_n| grows for 3 consecutive terms before converging.
template <class Sink>
void weibull_series_terms(double b, double t, Sink&& sink) {
    if (t <= 0.0) return;
    const double lx = std::lgamma(1.0 + 1.0 / b) + std::log(t);
    std::vector<double> s;
    s.reserve(64);
    std::vector<double> lg_fact{0.0}, lg_gb{0.0};
    double prev = 0.0;
    int growing = 0;
    for (int n = 1; n <= kWeibullMaxTerms; ++n) {
        lg_fact.push_back(std::lgamma(n + 1.0));
        lg_gb.push_back(std::lgamma(1.0 + n * b));
        double sn = std::exp(n * b * lx - lg_fact[n]);
        for (int j = 1; j < n; ++j) {
            sn -= s[n - j - 1] *
                  std::exp(j * b * lx - lg_fact[j] + lg_gb[j] + lg_gb[n - j] - lg_gb[n]);
        }
        s.push_back(sn);
        sink(n, sn);
        const double mag = std::abs(sn);
        if (mag < kWeibullTermTol) return;
        if (n > 1 && mag > prev) {
            if (++growing >= 3) {
                throw SeriesDivergenceError(
                    "weibull renewal series diverges at t=" + std::to_string(t));
            }
        } else {
            growing = 0;
        }
        prev = mag;
    }
    throw SeriesDivergenceError("weibull renewal series: no convergence in 200 terms");
}

}  // namespace

double RenewalFunctionTable::operator()(double t) const {
    if (values.empty()) return 0.0;
    if (t <= 0.0) return 0.0;
    const double x = t / grid_step;
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= values.size()) return values.back();
    const double w = x - static_cast<double>(i);
    return values[i] * (1.0 - w) + values[i + 1] * w;
}

double default_grid_step(double t_max) { return std::min(1e-3, t_max / 1e4); }

double renewal_m_exponential(double t) { return t; }

double renewal_m_integral_exponential(double t) { return 0.5 * t * t; }

double renewal_m_erlang(int shape, double t) {
    using namespace std::complex_literals;
    std::complex<double> acc = 0.0;
    for (int h = 1; h < shape; ++h) {
        const auto theta = std::exp(1i * (2.0 * std::numbers::pi * h / shape));
        const auto r = static_cast<double>(shape) * (1.0 - theta);
        acc += theta / r * (1.0 - std::exp(-r * t));
    }
    if (std::abs(acc.imag()) >= 1e-10) {
        throw std::logic_error("erlang renewal function: conjugate terms did not cancel");
    }
    return t + acc.real();
}

double renewal_m_integral_erlang(int shape, double t) {
    using namespace std::complex_literals;
    std::complex<double> acc = 0.0;
    for (int h = 1; h < shape; ++h) {
        const auto theta = std::exp(1i * (2.0 * std::numbers::pi * h / shape));
        const auto r = static_cast<double>(shape) * (1.0 - theta);
        acc += theta / r * (t - (1.0 - std::exp(-r * t)) / r);
    }
    if (std::abs(acc.imag()) >= 1e-10) {
        throw std::logic_error("erlang renewal integral: conjugate terms did not cancel");
    }
    return 0.5 * t * t + acc.real();
}

double renewal_m_uniform(double t) {
    if (t <= 0.0) return 0.0;
    const auto K = static_cast<int>(std::floor(0.5 * t));
    double acc = 0.0;
    for (int k = 0; k <= K; ++k) {
        const double x = 0.5 * t - k;
        // (-1)^k e^x x^k / k!
        double p = std::exp(x);
        for (int q = 1; q <= k; ++q) p *= x / q;
        acc += (k % 2 ? -p : p);
    }
    return acc - 1.0;
}

namespace {

// antiderivative of e^(t/2-k) (t/2-k)^k / k!:  2 e^x sum_q (-1)^(k-q) x^q / q!
double uniform_term_antiderivative(int k, double t) {
    const double x = 0.5 * t - k;
    double acc = 0.0, xq = 1.0;
    for (int q = 0; q <= k; ++q) {
        acc += ((k - q) % 2 ? -xq : xq);
        xq *= x / (q + 1);
    }
    return 2.0 * std::exp(x) * acc;
}

}  // namespace

double renewal_m_integral_uniform(double t) {
    if (t <= 0.0) return 0.0;
    const auto J = static_cast<int>(std::floor(0.5 * t));
    double acc = -t;  // integral of the constant -1 in m
    for (int k = 0; k <= J; ++k) {
        // term k is present on [2k, t]
        const double upper = uniform_term_antiderivative(k, t);
        const double lower = uniform_term_antiderivative(k, 2.0 * k);
        acc += (k % 2 ? -(upper - lower) : (upper - lower));
    }
    return acc;
}

double renewal_m_weibull(double shape, double t) {
    double total = 0.0;
    weibull_series_terms(shape, t, [&](int n, double sn) {
        total += (n % 2 ? sn : -sn);
    });
    return total;
}

double renewal_m_integral_weibull(double shape, double t) {
    double total = 0.0;
    weibull_series_terms(shape, t, [&](int n, double sn) {
        const double term = sn * t / (n * shape + 1.0);
        total += (n % 2 ? term : -term);
    });
    return total;
}

RenewalFunctionTable renewal_function_numeric(const InterarrivalModel& model,
                                              double t_max, double grid_step) {
    if (!(t_max > 0.0) || !(grid_step > 0.0)) {
        throw std::invalid_argument("renewal_function_numeric: t_max and grid_step must be > 0");
    }
    const auto n = static_cast<std::size_t>(std::llround(std::ceil(t_max / grid_step - 1e-9)));
    const double h = grid_step;
    std::vector<double> F(n + 1), dF(n + 1);
    for (std::size_t i = 0; i <= n; ++i) F[i] = model.cdf(static_cast<double>(i) * h);
    for (std::size_t i = 1; i <= n; ++i) dF[i] = F[i] - F[i - 1];

    RenewalFunctionTable tab;
    tab.grid_step = h;
    tab.source = RenewalSource::NumericRenewalEquation;
    tab.values.assign(n + 1, 0.0);
    auto& m = tab.values;
    const double d1 = 1.0 - 0.5 * dF[1];
    for (std::size_t i = 1; i <= n; ++i) {
        double s = 0.5 * m[i - 1] * dF[1];
        for (std::size_t j = 2; j <= i; ++j) {
            s += 0.5 * (m[i - j + 1] + m[i - j]) * dF[j];
        }
        m[i] = (F[i] + s) / d1;
        if (m[i] < m[i - 1]) m[i] = m[i - 1];  // guard float noise
    }
    return tab;
}

RenewalFunctionTable renewal_function_numeric(const InterarrivalModel& model,
                                              double t_max) {
    return renewal_function_numeric(model, t_max, default_grid_step(t_max));
}

RenewalFunctionTable renewal_function(const InterarrivalModel& model, double t_max,
                                      double grid_step) {
    if (!(t_max > 0.0) || !(grid_step > 0.0)) {
        throw std::invalid_argument("renewal_function: t_max and grid_step must be > 0");
    }
    const auto n = static_cast<std::size_t>(std::llround(std::ceil(t_max / grid_step - 1e-9)));
    RenewalFunctionTable tab;
    tab.grid_step = grid_step;
    tab.values.assign(n + 1, 0.0);
    switch (model.family()) {
        case Family::Exponential:
            tab.source = RenewalSource::ClosedForm;
            for (std::size_t i = 0; i <= n; ++i) {
                tab.values[i] = renewal_m_exponential(i * grid_step);
            }
            return tab;
        case Family::Erlang: {
            tab.source = RenewalSource::ClosedForm;
            const int xi = static_cast<int>(model.shape());
            for (std::size_t i = 0; i <= n; ++i) {
                tab.values[i] = renewal_m_erlang(xi, i * grid_step);
            }
            return tab;
        }
        case Family::Uniform:
            tab.source = RenewalSource::ClosedForm;
            for (std::size_t i = 0; i <= n; ++i) {
                tab.values[i] = renewal_m_uniform(i * grid_step);
            }
            return tab;
        case Family::Weibull:
            tab.source = RenewalSource::TruncatedSeries;
            // largest argument first: if the series converges there it
            // converges on the rest of the grid
            tab.values[n] = renewal_m_weibull(model.shape(), n * grid_step);
            for (std::size_t i = 1; i < n; ++i) {
                tab.values[i] = renewal_m_weibull(model.shape(), i * grid_step);
            }
            return tab;
        default:
            return renewal_function_numeric(model, t_max, grid_step);
    }
}

RenewalFunctionTable renewal_function(const InterarrivalModel& model, double t_max) {
    return renewal_function(model, t_max, default_grid_step(t_max));
}

RenewalEvaluator::RenewalEvaluator(const InterarrivalModel& model, double t_max,
                                   bool force_numeric)
    : model_(model), t_max_(t_max), source_(RenewalSource::NumericRenewalEquation) {
    const Family fam = model.family();
    // the Uniform closed form loses precision to cancellation past t ~ 60
    const bool closed = !force_numeric &&
                        (fam == Family::Exponential || fam == Family::Erlang ||
                         fam == Family::Weibull ||
                         (fam == Family::Uniform && t_max <= 60.0));
    if (closed) {
        closed_form_ = true;
        source_ = fam == Family::Weibull ? RenewalSource::TruncatedSeries
                                         : RenewalSource::ClosedForm;
        if (fam == Family::Weibull) {
            renewal_m_weibull(model.shape(), t_max);  // probe convergence up front
        }
        return;
    }
    double h = default_grid_step(t_max);
    if (model.density_unbounded_at_zero()) {
        // discretization error decays like h^(1+shape); refine
        h = std::min(h, 1.25e-4);
    }
    h = std::max(h, t_max / 6e4);  // cost cap for very long horizons
    table_ = renewal_function_numeric(model, t_max, h);
}

double RenewalEvaluator::operator()(double t) const {
    if (!closed_form_) return table_(t);
    switch (model_.family()) {
        case Family::Exponential: return renewal_m_exponential(t);
        case Family::Erlang: return renewal_m_erlang(static_cast<int>(model_.shape()), t);
        case Family::Uniform: return renewal_m_uniform(t);
        case Family::Weibull: return renewal_m_weibull(model_.shape(), t);
        default: return 0.0;  // unreachable
    }
}

double RenewalEvaluator::integral(double delta) const {
    if (delta <= 0.0) return 0.0;
    if (closed_form_) {
        switch (model_.family()) {
            case Family::Exponential: return renewal_m_integral_exponential(delta);
            case Family::Erlang:
                return renewal_m_integral_erlang(static_cast<int>(model_.shape()), delta);
            case Family::Uniform: return renewal_m_integral_uniform(delta);
            case Family::Weibull: return renewal_m_integral_weibull(model_.shape(), delta);
            default: return 0.0;  // unreachable
        }
    }
    // trapezoid over the table cells inside [0, delta]
    const double h = table_.grid_step;
    const auto& v = table_.values;
    const auto full = std::min<std::size_t>(static_cast<std::size_t>(delta / h),
                                            v.size() - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < full; ++i) acc += 0.5 * (v[i] + v[i + 1]) * h;
    const double rest = delta - static_cast<double>(full) * h;
    if (rest > 0.0) {
        acc += 0.5 * (v[full] + table_(delta)) * rest;
    }
    return acc;
}

}  // namespace embedcap
