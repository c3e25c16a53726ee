#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "embedcap/models.hpp"
#include "embedcap/renewal.hpp"

namespace embedcap {

// Refused operations that assume a finite second moment (Pareto with b <= 2).
class InfiniteVarianceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CapacityMethod { ZeroOrder, LinearSystem, MonteCarloBGM, MonteCarloChain };

// Whether to prefer the closed-form renewal function (may throw
// SeriesDivergenceError for Weibull) or force the numeric table.
enum class MPath { Auto, Numeric };

struct CapacityEstimate {
    double value = 0.0;  // in [0, 1]
    CapacityMethod method = CapacityMethod::ZeroOrder;
    double delta = 0.0;  // normalized delay
    int order = 0;       // N, LinearSystem only
    std::uint64_t samples = 0;             // steps/points, Monte Carlo only
    std::optional<double> std_error{};     // Monte Carlo only
};

// The (2N+1)x(2N+1) structured system matrix, indices h, k in [-N, N].
// Row 0 and the main diagonal determine every other entry.
struct SystemMatrix {
    int order = 0;
    std::vector<double> entries;  // row-major, dimension (2N+1)^2

    int dim() const { return 2 * order + 1; }
    double& at(int h, int k) {
        return entries[static_cast<std::size_t>((h + order) * dim() + (k + order))];
    }
    double at(int h, int k) const {
        return entries[static_cast<std::size_t>((h + order) * dim() + (k + order))];
    }
};

// C = delta / (1 + (2/delta) int_0^delta m): exact for exponential traffic,
// zero-order approximation otherwise. Propagates SeriesDivergenceError from
// the Weibull series unless path = Numeric.
CapacityEstimate capacity_zero_order(const InterarrivalModel& model, double delta,
                                     MPath path = MPath::Auto);

// Row 0 and diagonal from the renewal-function integrals (composite Simpson,
// >= 1024 nodes per oscillation period delta/k), remaining entries from the
// row/diagonal reconstruction identity. Requires a finite second moment.
SystemMatrix build_system_matrix(const InterarrivalModel& model, double delta,
                                 int order, MPath path = MPath::Auto);

// Solves the (2N+1) system and maps the center entry of the inverse to a
// capacity. Throws SingularMatrixError when the 1-norm condition estimate
// exceeds 1e12.
CapacityEstimate capacity_linear(const InterarrivalModel& model, double delta,
                                 int order, MPath path = MPath::Auto);

// Explicit N=1 closed form: delta / (1 + (2/delta) int m + 2 A01^2/(A01 - A11)).
CapacityEstimate capacity_linear_n1(const InterarrivalModel& model, double delta,
                                    MPath path = MPath::Auto);

// A00 via the Fourier-domain route: 1 + delta/2 + 2 int Re{K/(1-K)} delta
// sinc^2(delta nu) dnu, with the removable singularity at nu = 0 patched by
// the limit (gamma-1)/2. Agrees with the time-domain A00 for finite-variance
// families. Fast for families with a closed-form transform; the numeric-
// transform families (Weibull, Pareto, Lognormal) pay an oscillatory
// quadrature per frequency sample.
double a00_fourier(const InterarrivalModel& model, double delta);

// Predicted 1 - C for large delta: gamma / delta.
double asymptotic_capacity_gap(const InterarrivalModel& model, double delta);

// Monte Carlo estimates. Deterministic for a fixed seed; std_error by batch
// means over 16 contiguous batches.
CapacityEstimate capacity_mc_chain(const InterarrivalModel& model, double delta,
                                   std::uint64_t steps, std::uint64_t seed);
CapacityEstimate capacity_mc_bgm(const InterarrivalModel& model, double delta,
                                 std::uint64_t points, std::uint64_t seed);

}  // namespace embedcap
