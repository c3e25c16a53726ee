#include "embedcap/bgm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace embedcap {

PointSequence::PointSequence(std::vector<double> epochs) : epochs_(std::move(epochs)) {
    double prev = 0.0;
    for (std::size_t i = 0; i < epochs_.size(); ++i) {
        if (!(epochs_[i] > prev) || !std::isfinite(epochs_[i])) {
            throw std::invalid_argument(
                "PointSequence: epochs must be positive and strictly increasing (index " +
                std::to_string(i) + ")");
        }
        prev = epochs_[i];
    }
}

MatchOutcome bgm_match(const PointSequence& s, const PointSequence& t, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("bgm_match: delta must be > 0");
    MatchOutcome out;
    std::size_t j = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        // second-process points strictly before the reference point can no
        // longer match anything causal
        while (j < t.size() && t[j] < s[i]) {
            ++j;
            ++out.chaff_t;
        }
        if (j < t.size() && t[j] <= s[i] + delta) {
            out.pairs.emplace_back(i, j);
            ++j;
        } else {
            ++out.chaff_s;
        }
    }
    out.undetermined_t = t.size() - j;
    return out;
}

std::size_t brute_force_max_matching(const PointSequence& s, const PointSequence& t,
                                     double delta) {
    if (s.size() + t.size() > 24) {
        throw std::invalid_argument("brute_force_max_matching: |s|+|t| exceeds 24");
    }
    const std::size_t n = s.size(), m = t.size();
    // M[i][j] = max pairs using s[i..), t[j..)
    std::vector<std::size_t> cur(m + 1, 0), next(m + 1, 0);
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t jj = m; jj-- > 0;) {
            std::size_t best = std::max(next[jj], cur[jj + 1]);
            const double d = t[jj] - s[ii];
            if (d >= 0.0 && d <= delta) best = std::max(best, 1 + next[jj + 1]);
            cur[jj] = best;
        }
        std::swap(cur, next);
        std::fill(cur.begin(), cur.end(), 0);
    }
    return next[0];
}

PointSequence generate_renewal(const InterarrivalModel& model, std::size_t n_points,
                               RngState& rng) {
    if (n_points < 1) throw std::invalid_argument("generate_renewal: n_points must be >= 1");
    std::vector<double> epochs(n_points);
    double acc = 0.0;
    const double inv_rate = 1.0 / model.rate();
    for (std::size_t i = 0; i < n_points; ++i) {
        acc += model.sample(rng) * inv_rate;
        epochs[i] = acc;
    }
    return PointSequence(std::move(epochs));
}

ChainTrace simulate_chain(const InterarrivalModel& model, double delta,
                          std::uint64_t n_steps, RngState& rng) {
    if (!(delta > 0.0)) throw std::invalid_argument("simulate_chain: delta must be > 0");
    if (n_steps < 1) throw std::invalid_argument("simulate_chain: n_steps must be >= 1");
    constexpr std::uint64_t kBurnIn = 1000;
    // Z0 = Y1 - X1; draws are sequenced so the stream layout is fixed
    const double y0 = model.sample(rng);
    const double x0 = model.sample(rng);
    double z = y0 - x0;
    ChainTrace trace;
    trace.steps_total = n_steps;
    for (std::uint64_t step = 0; step < kBurnIn + n_steps; ++step) {
        if (z > delta) {
            z -= model.sample(rng);
        } else if (z >= 0.0) {
            const double y = model.sample(rng);
            const double x = model.sample(rng);
            z += y - x;
        } else {
            z += model.sample(rng);
        }
        if (step >= kBurnIn && z >= 0.0 && z <= delta) {
            ++trace.steps_inside;
        }
    }
    trace.final_state = z;
    return trace;
}

double empirical_capacity(const MatchOutcome& outcome) {
    const double matched = 2.0 * static_cast<double>(outcome.pairs.size());
    const double denom =
        matched + static_cast<double>(outcome.chaff_s) + static_cast<double>(outcome.chaff_t);
    if (denom == 0.0) {
        throw std::domain_error("empirical_capacity: no points examined");
    }
    return matched / denom;
}

double chain_capacity(const ChainTrace& trace) {
    const double p =
        static_cast<double>(trace.steps_inside) / static_cast<double>(trace.steps_total);
    return 2.0 * p / (1.0 + p);
}

}  // namespace embedcap
