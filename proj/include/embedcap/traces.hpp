#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "embedcap/bgm.hpp"
#include "embedcap/models.hpp"

namespace embedcap {

class TraceParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Packet timestamps in seconds, strictly increasing after parsing.
struct Trace {
    std::vector<double> timestamps;
    std::string source_label;
};

// Whitespace-separated columns, '#' comment lines, timestamp column selected
// 1-based. Duplicate timestamps are perturbed by +1e-9 * occurrence index to
// restore strict monotonicity; decreasing lines are tolerated up to 0.1% of
// the file (clamped to the running maximum), more than that is an error.
Trace parse_trace(const std::string& path, int column = 1);

// A rate-matched pair of n-packet segments. After normalization the pooled
// sample-mean interarrival over the union of the two segments equals 1.
struct TranchePair {
    Trace source;  // n packets
    Trace relay;   // n packets
    bool normalized = false;
    double sample_rate = 0.0;  // pooled raw packet rate of the selected pair
    double scale = 1.0;        // raw pooled mean interarrival divided out
    std::vector<double> source_interarrivals;  // n-1 each, unit pooled mean
    std::vector<double> relay_interarrivals;

    // normalized segments re-based to the time origin (cumulative sums of the
    // normalized interarrivals)
    PointSequence source_points() const;
    PointSequence relay_points() const;
};

// Windowed rates (window / span of window packets) at every offset of both
// traces; picks the offset pair minimizing |r1 - r2| / max(r1, r2), smallest
// offsets on ties, then normalizes by the pooled mean interarrival.
TranchePair select_tranches(const Trace& source, const Trace& relay, std::size_t n,
                            std::size_t window = 0 /* = n */);

// Uniformly random permutation of an interarrival sequence; the multiset is
// preserved exactly (the same doubles, reordered).
std::vector<double> scramble_interarrivals(std::vector<double> gaps, RngState& rng);

// Permutes the segment's interarrivals and re-accumulates from the original
// first epoch.
Trace scramble(const Trace& segment, RngState& rng);

// Scrambles both segments of a pair; the normalized interarrival vectors are
// permuted exactly and the timestamps rebuilt.
TranchePair scramble(const TranchePair& pair, RngState& rng);

struct WeibullFit {
    double shape = 0.0;
    double log_likelihood = 0.0;
    bool at_upper_bound = false;  // degenerate data pushed the search to the cap
};

// Maximum-likelihood Weibull shape for unit-mean interarrivals; the scale is
// pinned to 1/Gamma(1+1/b), so the search is one-dimensional over b.
WeibullFit fit_weibull_shape(std::span<const double> interarrivals);

// Shape fitted over the union of the pair's interarrivals.
WeibullFit fit_weibull_union(const TranchePair& pair);

struct CapacityErrorRow {
    double delta = 0.0;
    double empirical = 0.0;
    double theoretical = 0.0;
    double abs_error = 0.0;
};

// For each delta: BGM on the normalized pair truncated at the observation
// limit, against the Weibull-shape capacity formula at the fitted union shape.
std::vector<CapacityErrorRow> capacity_error_table(const TranchePair& pair,
                                                   std::span<const double> delta_grid,
                                                   double observation_limit,
                                                   double weibull_shape);
std::vector<CapacityErrorRow> capacity_error_table(const TranchePair& pair,
                                                   std::span<const double> delta_grid,
                                                   double observation_limit);

// header "delta,empirical_capacity,theoretical_capacity,abs_error"
void write_capacity_error_csv(std::ostream& os,
                              const std::vector<CapacityErrorRow>& rows);

}  // namespace embedcap
