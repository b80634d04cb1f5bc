#ifndef DPRE_WALK_STATS_HPP
#define DPRE_WALK_STATS_HPP

// Exhaustive pair/return combinatorics and Monte Carlo return statistics of
// the simple random walk. Exact-mode histograms enumerate every walk within
// budget; nothing is sampled there.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "dpre/path.hpp"

#include "json.hpp"

namespace dpre {

// key -> count; exact-mode masses sum to the number of enumerated objects.
using Histogram = std::map<std::uint64_t, std::uint64_t>;

// Histogram over all (2d)^{2n} ordered pairs of n-step paths of the number
// of meeting times m in [0, n] (origin included, so every key is >= 1).
Histogram pair_coincidence_histogram(int d, int n, const Limits& lim = {});

// Histogram over all (2d)^{horizon} walks of the number of visits to the
// origin at times m in [0, horizon] (the start counts, so every key >= 1).
Histogram return_count_histogram(int d, int horizon, const Limits& lim = {});

// Exact fraction of ordered pairs whose meeting count on [1, n] (the
// covariance-relevant count) is >= n^(1/2 + eta).
double high_coincidence_fraction(int d, int n, double eta, const Limits& lim = {});

struct ReturnStats {
    int d = 1;
    int n = 0;
    std::uint64_t samples = 0;
    Histogram visit_hist;          // visits to origin in [0, n], start included
    Histogram first_return_hist;   // time of first return, when <= n
    std::uint64_t first_return_censored = 0; // walks with no return by n
    std::optional<double> escape_prob;       // d >= 3 only
    std::uint64_t escape_horizon = 0;
    double escape_bias_estimate = 0.0; // mass of returns in (horizon/4, horizon]

    nlohmann::json to_json() const;
};

struct ReturnStatsOptions {
    std::uint64_t escape_horizon = 1000000; // truncation for the escape estimate
    int workers = 0;                        // 0 = library default
};

// Monte Carlo over `samples` independent walks; deterministic per-sample
// streams keyed by (seed, sample index), so the result is independent of
// worker count.
ReturnStats return_stats_mc(int d, int n, std::uint64_t samples, std::uint64_t seed,
                            const ReturnStatsOptions& opt = {});

void hist_to_csv(std::ostream& os, const Histogram& h, const std::string& key_name);
nlohmann::json hist_to_json(const Histogram& h);

} // namespace dpre

#endif
