#include "embedcap/capacity.hpp"

#include <eigen3/Eigen/Dense>

#include <cmath>
#include <numbers>

#include "embedcap/bgm.hpp"
#include "embedcap/quadrature.hpp"

namespace embedcap {

namespace {

constexpr double kPi = std::numbers::pi;

double capacity_from_omega(double omega) { return 2.0 * omega / (1.0 + omega); }

void require_finite_variance(const InterarrivalModel& model, const char* what) {
    if (!model.finite_variance()) {
        throw InfiniteVarianceError(std::string(what) +
                                    ": infinite second moment for " + model.name());
    }
}

// Re{K(nu)/(1-K(nu))}, patched near nu = 0 by the limit (gamma-1)/2
double re_k_ratio(const InterarrivalModel& model, double nu, double gamma_idx) {
    if (std::abs(nu) <= 1e-4) return 0.5 * (gamma_idx - 1.0);
    const auto K = model.characteristic_function(nu);
    const auto r = K / (1.0 - K);
    return r.real();
}

double sinc_sq(double u) {
    if (std::abs(u) < 1e-8) return 1.0;
    const double s = std::sin(kPi * u) / (kPi * u);
    return s * s;
}

}  // namespace

CapacityEstimate capacity_zero_order(const InterarrivalModel& model, double delta,
                                     MPath path) {
    if (!(delta > 0.0)) throw std::invalid_argument("capacity: delta must be > 0");
    const RenewalEvaluator m(model, delta, path == MPath::Numeric);
    const double mean_m = 2.0 / delta * m.integral(delta);
    CapacityEstimate est;
    est.value = delta / (1.0 + mean_m);
    est.method = CapacityMethod::ZeroOrder;
    est.delta = delta;
    return est;
}

SystemMatrix build_system_matrix(const InterarrivalModel& model, double delta,
                                 int order, MPath path) {
    if (!(delta > 0.0)) throw std::invalid_argument("capacity: delta must be > 0");
    if (order < 1) throw std::invalid_argument("build_system_matrix: order must be >= 1");
    require_finite_variance(model, "build_system_matrix");

    const RenewalEvaluator m(model, delta, path == MPath::Numeric);
    const double mean_m = 2.0 / delta * m.integral(delta);
    const double a00 = 1.0 - 0.5 * delta + mean_m;

    std::vector<double> row0(order + 1), diag(order + 1);
    row0[0] = diag[0] = a00;
    for (int k = 1; k <= order; ++k) {
        const double w = 2.0 * kPi * k / delta;
        const int nodes = 1024 * k;
        const double ck =
            simpson([&](double t) { return m(t) * std::cos(w * t); }, 0.0, delta, nodes);
        row0[k] = 2.0 * (k % 2 ? -1.0 : 1.0) / delta * ck;
        diag[k] = 1.0 + 2.0 / delta *
                            simpson(
                                [&](double t) {
                                    return m(t) * (std::cos(w * t) +
                                                   2.0 * kPi * k * (1.0 - t / delta) *
                                                       std::sin(w * t));
                                },
                                0.0, delta, nodes);
    }

    SystemMatrix A;
    A.order = order;
    A.entries.assign(static_cast<std::size_t>(A.dim()) * A.dim(), 0.0);
    for (int h = -order; h <= order; ++h) {
        for (int k = -order; k <= order; ++k) {
            if (h == k) {
                A.at(h, k) = diag[std::abs(h)];
            } else if (h == 0) {
                A.at(h, k) = row0[std::abs(k)];
            } else if (k == 0) {
                A.at(h, k) = row0[std::abs(h)];
            } else {
                const double a0h = row0[std::abs(h)];
                const double a0k = row0[std::abs(k)];
                const double sgn = ((h - k) % 2) ? -1.0 : 1.0;
                const double sh = (h % 2) ? -1.0 : 1.0;
                const double sk = (k % 2) ? -1.0 : 1.0;
                A.at(h, k) = sgn / (h - k) * (h * sh * a0h - k * sk * a0k);
            }
        }
    }
    return A;
}

CapacityEstimate capacity_linear(const InterarrivalModel& model, double delta,
                                 int order, MPath path) {
    const SystemMatrix A = build_system_matrix(model, delta, order, path);
    const int n = A.dim();
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            M(i, j) = A.entries[static_cast<std::size_t>(i) * n + j];
        }
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) {
        throw SingularMatrixError("capacity_linear: system matrix is singular");
    }
    const Eigen::MatrixXd inv = lu.inverse();
    const double cond = M.cwiseAbs().rowwise().sum().maxCoeff() *
                        inv.cwiseAbs().rowwise().sum().maxCoeff();
    if (cond > 1e12) {
        throw SingularMatrixError("capacity_linear: condition estimate " +
                                  std::to_string(cond) + " exceeds 1e12");
    }
    const double omega = 0.5 * delta * inv(order, order);
    CapacityEstimate est;
    est.value = capacity_from_omega(omega);
    est.method = CapacityMethod::LinearSystem;
    est.delta = delta;
    est.order = order;
    return est;
}

CapacityEstimate capacity_linear_n1(const InterarrivalModel& model, double delta,
                                    MPath path) {
    const SystemMatrix A = build_system_matrix(model, delta, 1, path);
    const double a01 = A.at(0, 1);
    const double a11 = A.at(1, 1);
    const double correction = a01 == 0.0 ? 0.0 : 2.0 * a01 * a01 / (a01 - a11);
    const double mean_m = A.at(0, 0) - 1.0 + 0.5 * delta;
    CapacityEstimate est;
    est.value = delta / (1.0 + mean_m + correction);
    est.method = CapacityMethod::LinearSystem;
    est.delta = delta;
    est.order = 1;
    return est;
}

double a00_fourier(const InterarrivalModel& model, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("a00_fourier: delta must be > 0");
    require_finite_variance(model, "a00_fourier");
    const double gamma_idx = model.dispersion_index();

    // A00 = 1 + delta/2 + 4 int_0^inf g(u/delta) sinc^2(u) du  (u = delta nu)
    static const GaussLegendre gl_head(40);
    static const GaussLegendre gl_tail(64);
    constexpr int kHeadPeriods = 200;
    double head = 0.0;
    for (int j = 0; j < kHeadPeriods; ++j) {
        head += gl_head.integrate(
            [&](double u) {
                return 4.0 * re_k_ratio(model, u / delta, gamma_idx) * sinc_sq(u);
            },
            j, j + 1.0);
    }
    // tail with sin^2 replaced by its mean 1/2 and the substitution u = U0/x
    const double tail =
        2.0 / (kPi * kPi * kHeadPeriods) *
        gl_tail.integrate(
            [&](double x) {
                return re_k_ratio(model, kHeadPeriods / (x * delta), gamma_idx);
            },
            0.0, 1.0);
    return 1.0 + 0.5 * delta + head + tail;
}

double asymptotic_capacity_gap(const InterarrivalModel& model, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("asymptotic gap: delta must be > 0");
    require_finite_variance(model, "asymptotic_capacity_gap");
    return model.dispersion_index() / delta;
}

namespace {

// batch-means standard error of the capacity over per-batch occupancies
std::optional<double> batch_std_error(const std::vector<double>& batch_caps) {
    const auto n = batch_caps.size();
    if (n < 2) return std::nullopt;
    double mean = 0.0;
    for (double c : batch_caps) mean += c;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double c : batch_caps) var += (c - mean) * (c - mean);
    var /= static_cast<double>(n - 1);
    return std::sqrt(var / static_cast<double>(n));
}

}  // namespace

CapacityEstimate capacity_mc_chain(const InterarrivalModel& model, double delta,
                                   std::uint64_t steps, std::uint64_t seed) {
    RngState rng(seed);
    CapacityEstimate est;
    est.method = CapacityMethod::MonteCarloChain;
    est.delta = delta;
    est.samples = steps;

    constexpr std::uint64_t kBatches = 16;
    if (steps < kBatches * 1000) {
        est.value = chain_capacity(simulate_chain(model, delta, steps, rng));
        return est;
    }
    // one stream, split into batches: pooled occupancy for the value,
    // per-batch capacities for the standard error
    const std::uint64_t per = steps / kBatches;
    std::uint64_t inside = 0, total = 0;
    std::vector<double> caps;
    caps.reserve(kBatches);
    for (std::uint64_t b = 0; b < kBatches; ++b) {
        const std::uint64_t len = (b + 1 == kBatches) ? steps - per * (kBatches - 1) : per;
        const ChainTrace trace = simulate_chain(model, delta, len, rng);
        inside += trace.steps_inside;
        total += trace.steps_total;
        caps.push_back(chain_capacity(trace));
    }
    const double p = static_cast<double>(inside) / static_cast<double>(total);
    est.value = 2.0 * p / (1.0 + p);
    est.std_error = batch_std_error(caps);
    return est;
}

CapacityEstimate capacity_mc_bgm(const InterarrivalModel& model, double delta,
                                 std::uint64_t points, std::uint64_t seed) {
    RngState rng(seed);
    // normalized time: unit-rate realizations under the same u-PDF, delay delta
    const InterarrivalModel unit_rate = model.unit_rate();
    CapacityEstimate est;
    est.method = CapacityMethod::MonteCarloBGM;
    est.delta = delta;
    est.samples = points;

    constexpr std::size_t kBatches = 16;
    const auto n = static_cast<std::size_t>(points);
    if (n < kBatches * 64) {
        const PointSequence s = generate_renewal(unit_rate, n, rng);
        const PointSequence t = generate_renewal(unit_rate, n, rng);
        est.value = empirical_capacity(bgm_match(s, t, delta));
        return est;
    }
    const std::size_t per = n / kBatches;
    std::size_t matched2 = 0, chaff = 0;
    std::vector<double> caps;
    caps.reserve(kBatches);
    for (std::size_t b = 0; b < kBatches; ++b) {
        const std::size_t len = (b + 1 == kBatches) ? n - per * (kBatches - 1) : per;
        const PointSequence s = generate_renewal(unit_rate, len, rng);
        const PointSequence t = generate_renewal(unit_rate, len, rng);
        const MatchOutcome out = bgm_match(s, t, delta);
        matched2 += 2 * out.pairs.size();
        chaff += out.chaff_s + out.chaff_t;
        caps.push_back(empirical_capacity(out));
    }
    est.value = static_cast<double>(matched2) / static_cast<double>(matched2 + chaff);
    est.std_error = batch_std_error(caps);
    return est;
}

}  // namespace embedcap
