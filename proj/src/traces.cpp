#include "embedcap/traces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "embedcap/capacity.hpp"
#include "embedcap/format.hpp"

namespace embedcap {

Trace parse_trace(const std::string& path, int column) {
    if (column < 1) throw std::invalid_argument("parse_trace: column is 1-based");
    std::ifstream in(path);
    if (!in) throw TraceParseError("cannot open trace file: " + path);

    Trace trace;
    trace.source_label = path;
    std::string line;
    std::size_t line_no = 0, decreasing = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        std::string tok;
        for (int c = 0; c < column; ++c) {
            if (!(fields >> tok)) {
                throw TraceParseError(path + ": line " + std::to_string(line_no) +
                                      ": missing column " + std::to_string(column));
            }
        }
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size() || !std::isfinite(v)) {
            throw TraceParseError(path + ": line " + std::to_string(line_no) +
                                  ": cannot parse timestamp '" + tok + "'");
        }
        if (!trace.timestamps.empty() && v < trace.timestamps.back()) ++decreasing;
        trace.timestamps.push_back(v);
    }
    if (trace.timestamps.empty()) {
        throw TraceParseError(path + ": no timestamps found");
    }
    if (static_cast<double>(decreasing) >
        1e-3 * static_cast<double>(trace.timestamps.size())) {
        throw TraceParseError(path + ": " + std::to_string(decreasing) +
                              " decreasing timestamps (more than 0.1% of lines)");
    }
    // clamp the rare decreasing entries, then perturb ties into strict order
    double run_max = -std::numeric_limits<double>::infinity();
    std::size_t dup_run = 0;
    for (auto& t : trace.timestamps) {
        if (t < run_max) t = run_max;
        if (t == run_max) {
            ++dup_run;
            t += 1e-9 * static_cast<double>(dup_run);
        } else {
            run_max = t;
            dup_run = 0;
        }
    }
    return trace;
}

namespace {

std::vector<double> window_rates(const Trace& tr, std::size_t window) {
    const auto n = tr.timestamps.size();
    std::vector<double> rates;
    if (n < window) return rates;
    rates.reserve(n - window + 1);
    for (std::size_t i = 0; i + window <= n; ++i) {
        const double span = tr.timestamps[i + window - 1] - tr.timestamps[i];
        rates.push_back(static_cast<double>(window) / span);
    }
    return rates;
}

std::vector<double> interarrivals_of(const Trace& tr) {
    std::vector<double> d(tr.timestamps.size() - 1);
    for (std::size_t i = 0; i + 1 < tr.timestamps.size(); ++i) {
        d[i] = tr.timestamps[i + 1] - tr.timestamps[i];
    }
    return d;
}

}  // namespace

PointSequence TranchePair::source_points() const {
    std::vector<double> epochs(source_interarrivals.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        acc += source_interarrivals[i];
        epochs[i] = acc;
    }
    return PointSequence(std::move(epochs));
}

PointSequence TranchePair::relay_points() const {
    std::vector<double> epochs(relay_interarrivals.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        acc += relay_interarrivals[i];
        epochs[i] = acc;
    }
    return PointSequence(std::move(epochs));
}

TranchePair select_tranches(const Trace& source, const Trace& relay, std::size_t n,
                            std::size_t window) {
    if (n < 2) throw std::invalid_argument("select_tranches: n must be >= 2");
    if (window == 0) window = n;
    if (source.timestamps.size() < n || relay.timestamps.size() < n ||
        source.timestamps.size() < window || relay.timestamps.size() < window) {
        throw InsufficientDataError("select_tranches: traces shorter than the tranche size");
    }

    std::vector<double> r1 = window_rates(source, window);
    std::vector<double> r2 = window_rates(relay, window);
    // an offset must leave room for the n-packet slice as well as the window
    r1.resize(std::min(r1.size(), source.timestamps.size() - n + 1));
    r2.resize(std::min(r2.size(), relay.timestamps.size() - n + 1));
    // sort relay offsets by rate; for each source offset the best partner is a
    // value-neighbor of its rate
    std::vector<std::size_t> order(r2.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return r2[a] < r2[b] || (r2[a] == r2[b] && a < b);
    });
    std::vector<double> sorted_rates(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted_rates[i] = r2[order[i]];

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0, best_j = 0;
    for (std::size_t i = 0; i < r1.size(); ++i) {
        const auto it = std::lower_bound(sorted_rates.begin(), sorted_rates.end(), r1[i]);
        for (auto cand = it == sorted_rates.begin() ? it : std::prev(it);
             cand != sorted_rates.end() && cand <= it; ++cand) {
            const std::size_t j = order[static_cast<std::size_t>(cand - sorted_rates.begin())];
            const double rel =
                std::abs(r1[i] - r2[j]) / std::max(r1[i], r2[j]);
            if (rel < best || (rel == best && (i < best_i || (i == best_i && j < best_j)))) {
                best = rel;
                best_i = i;
                best_j = j;
            }
        }
    }

    TranchePair pair;
    pair.source.source_label = source.source_label;
    pair.relay.source_label = relay.source_label;
    pair.source.timestamps.assign(source.timestamps.begin() + best_i,
                                  source.timestamps.begin() + best_i + n);
    pair.relay.timestamps.assign(relay.timestamps.begin() + best_j,
                                 relay.timestamps.begin() + best_j + n);

    pair.source_interarrivals = interarrivals_of(pair.source);
    pair.relay_interarrivals = interarrivals_of(pair.relay);
    double total = 0.0;
    for (double d : pair.source_interarrivals) total += d;
    for (double d : pair.relay_interarrivals) total += d;
    const double count =
        static_cast<double>(pair.source_interarrivals.size() + pair.relay_interarrivals.size());
    pair.scale = total / count;
    pair.sample_rate = count / total;
    for (double& d : pair.source_interarrivals) d /= pair.scale;
    for (double& d : pair.relay_interarrivals) d /= pair.scale;
    pair.normalized = true;
    return pair;
}

std::vector<double> scramble_interarrivals(std::vector<double> gaps, RngState& rng) {
    // Fisher-Yates
    for (std::size_t i = gaps.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i));
        std::swap(gaps[i - 1], gaps[std::min(j, i - 1)]);
    }
    return gaps;
}

namespace {

std::vector<double> accumulate_from(double first, const std::vector<double>& gaps) {
    std::vector<double> epochs;
    epochs.reserve(gaps.size() + 1);
    epochs.push_back(first);
    double acc = first;
    for (double g : gaps) {
        acc += g;
        epochs.push_back(acc);
    }
    return epochs;
}

}  // namespace

Trace scramble(const Trace& segment, RngState& rng) {
    Trace out;
    out.source_label = segment.source_label;
    if (segment.timestamps.size() < 2) {
        out.timestamps = segment.timestamps;
        return out;
    }
    const auto gaps = scramble_interarrivals(interarrivals_of(segment), rng);
    out.timestamps = accumulate_from(segment.timestamps.front(), gaps);
    return out;
}

TranchePair scramble(const TranchePair& pair, RngState& rng) {
    TranchePair out = pair;
    out.source_interarrivals = scramble_interarrivals(pair.source_interarrivals, rng);
    out.relay_interarrivals = scramble_interarrivals(pair.relay_interarrivals, rng);
    auto rebuild = [&](Trace& tr, const std::vector<double>& norm_gaps) {
        std::vector<double> raw(norm_gaps.size());
        for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = norm_gaps[i] * pair.scale;
        tr.timestamps = accumulate_from(tr.timestamps.front(), raw);
    };
    rebuild(out.source, out.source_interarrivals);
    rebuild(out.relay, out.relay_interarrivals);
    return out;
}

WeibullFit fit_weibull_shape(std::span<const double> interarrivals) {
    if (interarrivals.size() < 2) {
        throw InsufficientDataError("fit_weibull_shape: need at least 2 interarrivals");
    }
    const auto n = static_cast<double>(interarrivals.size());
    double sum_log = 0.0;
    for (double x : interarrivals) {
        if (!(x > 0.0)) throw std::invalid_argument("fit_weibull_shape: interarrivals must be > 0");
        sum_log += std::log(x);
    }
    const auto log_lik = [&](double b) {
        const double lg = std::lgamma(1.0 + 1.0 / b);  // -log sigma
        double pow_sum = 0.0;
        for (double x : interarrivals) {
            const double e = b * (std::log(x) + lg);
            pow_sum += e > 700.0 ? 1e308 : std::exp(e);
        }
        return n * std::log(b) + n * b * lg + (b - 1.0) * sum_log - pow_sum;
    };

    // golden-section maximization over log b
    constexpr double kLo = 0.05, kHi = 20.0;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::log(kLo), hi = std::log(kHi);
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = log_lik(std::exp(x1)), f2 = log_lik(std::exp(x2));
    int iterations = 0;
    while (hi - lo > 1e-10) {
        if (++iterations > 200) {
            throw std::runtime_error("fit_weibull_shape: no convergence in 200 iterations");
        }
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = log_lik(std::exp(x2));
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = log_lik(std::exp(x1));
        }
    }
    WeibullFit fit;
    fit.shape = std::exp(0.5 * (lo + hi));
    fit.log_likelihood = log_lik(fit.shape);
    fit.at_upper_bound = fit.shape > 0.98 * kHi;
    return fit;
}

WeibullFit fit_weibull_union(const TranchePair& pair) {
    std::vector<double> all;
    all.reserve(pair.source_interarrivals.size() + pair.relay_interarrivals.size());
    all.insert(all.end(), pair.source_interarrivals.begin(), pair.source_interarrivals.end());
    all.insert(all.end(), pair.relay_interarrivals.begin(), pair.relay_interarrivals.end());
    return fit_weibull_shape(all);
}

namespace {

PointSequence truncated(const PointSequence& seq, double limit) {
    std::vector<double> epochs;
    epochs.reserve(seq.size());
    for (double e : seq.epochs()) {
        if (e > limit) break;
        epochs.push_back(e);
    }
    return PointSequence(std::move(epochs));
}

}  // namespace

std::vector<CapacityErrorRow> capacity_error_table(const TranchePair& pair,
                                                   std::span<const double> delta_grid,
                                                   double observation_limit,
                                                   double weibull_shape) {
    if (!pair.normalized) {
        throw std::invalid_argument("capacity_error_table: pair must be normalized");
    }
    const InterarrivalModel fitted = InterarrivalModel::weibull(weibull_shape);
    const PointSequence s = truncated(pair.source_points(), observation_limit);
    const PointSequence t = truncated(pair.relay_points(), observation_limit);

    std::vector<CapacityErrorRow> rows;
    rows.reserve(delta_grid.size());
    for (double delta : delta_grid) {
        CapacityErrorRow row;
        row.delta = delta;
        row.empirical = empirical_capacity(bgm_match(s, t, delta));
        double theo;
        try {
            theo = capacity_zero_order(fitted, delta).value;
        } catch (const SeriesDivergenceError&) {
            theo = capacity_zero_order(fitted, delta, MPath::Numeric).value;
        }
        row.theoretical = theo;
        row.abs_error = std::abs(row.empirical - row.theoretical);
        rows.push_back(row);
    }
    return rows;
}

std::vector<CapacityErrorRow> capacity_error_table(const TranchePair& pair,
                                                   std::span<const double> delta_grid,
                                                   double observation_limit) {
    return capacity_error_table(pair, delta_grid, observation_limit,
                                fit_weibull_union(pair).shape);
}

void write_capacity_error_csv(std::ostream& os,
                              const std::vector<CapacityErrorRow>& rows) {
    os << "delta,empirical_capacity,theoretical_capacity,abs_error\n";
    for (const auto& r : rows) {
        os << format_csv_number(r.delta) << ',' << format_csv_number(r.empirical) << ','
           << format_csv_number(r.theoretical) << ',' << format_csv_number(r.abs_error)
           << '\n';
    }
}

}  // namespace embedcap
