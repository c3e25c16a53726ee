#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "embedcap/models.hpp"

namespace embedcap {

// Strictly increasing positive arrival epochs.
class PointSequence {
public:
    PointSequence() = default;
    explicit PointSequence(std::vector<double> epochs);  // validates

    const std::vector<double>& epochs() const { return epochs_; }
    std::size_t size() const { return epochs_.size(); }
    bool empty() const { return epochs_.empty(); }
    double operator[](std::size_t i) const { return epochs_[i]; }

private:
    std::vector<double> epochs_;
};

// Result of a bounded greedy match: matched index pairs (0-based, strictly
// increasing in both coordinates), per-process chaff counts, and the count of
// second-process tail points never examined because the first process ran out.
struct MatchOutcome {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t chaff_s = 0;
    std::size_t chaff_t = 0;
    std::size_t undetermined_t = 0;
};

struct ChainTrace {
    std::uint64_t steps_inside = 0;
    std::uint64_t steps_total = 0;
    double final_state = 0.0;
};

// Bounded Greedy Match under the causal delay constraint 0 <= t_j - s_i <= delta.
// Runs until the first process is exhausted; finds the maximum number of
// matched points satisfying the delay bound.
MatchOutcome bgm_match(const PointSequence& s, const PointSequence& t, double delta);

// Exhaustive maximum matching over all order-consistent one-one mappings,
// by dynamic programming over index pairs. Oracle for the BGM optimality
// claim; restricted to |s| + |t| <= 24.
std::size_t brute_force_max_matching(const PointSequence& s, const PointSequence& t,
                                     double delta);

// Cumulative sums of n interarrival draws scaled by 1/rate.
PointSequence generate_renewal(const InterarrivalModel& model, std::size_t n_points,
                               RngState& rng);

// Three-branch recursion equivalent to BGM in normalized time (unit-mean
// interarrivals, barrier at delta), started from Z0 = Y1 - X1 with a burn-in
// of 1000 discarded steps. steps_inside counts visits to [0, delta], both
// endpoints inclusive.
ChainTrace simulate_chain(const InterarrivalModel& model, double delta,
                          std::uint64_t n_steps, RngState& rng);

// 2|pairs| / (2|pairs| + chaff_s + chaff_t); unexamined tail points are
// excluded from the denominator. Throws std::domain_error when no point was
// examined at all.
double empirical_capacity(const MatchOutcome& outcome);

// capacity from chain occupancy p: 2p / (1 + p)
double chain_capacity(const ChainTrace& trace);

}  // namespace embedcap
