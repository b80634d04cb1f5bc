#ifndef DPRE_POINT_PROCESS_HPP
#define DPRE_POINT_PROCESS_HPP

// Point process summaries of the near-level gap sets: window counts,
// pairwise covariance audits, order statistics across environments.

#include <cstdint>
#include <span>
#include <vector>

#include "dpre/energy.hpp"

namespace dpre {

// Number of gaps <= b for each b in the ladder; gaps ascending as produced
// by all_gaps. Throws ConfigError when some b exceeds the collection cutoff
// gp.g_max (those counts would silently undercount).
std::vector<std::uint64_t> window_counts(const GapProcess& gp, std::span<const double> b);

struct PairDecorrelation {
    std::uint64_t qualifying = 0;      // entries with gap <= b
    std::uint64_t pairs = 0;           // unordered qualifying pairs examined
    std::uint64_t violating_pairs = 0; // pairs with covariance > eps
    double max_cov = 0.0;              // largest pair covariance seen
};

// Pairwise covariance audit of a near-level set: filter entries to gap <= b,
// then compare every unordered pair's overlap covariance against eps.
PairDecorrelation near_pair_decorrelation(int d, int n, std::span<const GapEntry> entries, double b, double eps);

// k-th smallest gap per environment, k = 1..k_max; environments with fewer
// than k gaps are skipped for that k and tallied in missing.
struct OrderStatSeries {
    int k_max = 0;
    std::vector<std::vector<double>> by_k; // [k-1] -> values across environments
    std::vector<std::uint64_t> missing;    // [k-1] -> environments lacking a k-th gap
};

OrderStatSeries collect_order_stats(const std::vector<std::vector<double>>& gap_lists, int k_max);

} // namespace dpre

#endif
