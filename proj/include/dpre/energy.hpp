#ifndef DPRE_ENERGY_HPP
#define DPRE_ENERGY_HPP

// Path energies eta(omega) = N^{-1/2} sum_{i=1..N} eta(i, omega_i), the
// exhaustive near-level gap scan, and the covariance / pattern-matrix
// algebra of path tuples.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dpre/environment.hpp"
#include "dpre/levels.hpp"
#include "dpre/path.hpp"

#include "json.hpp"

namespace dpre {

double path_energy(const Path& p, const EnvField& env);

// ---------------------------------------------------------------- gap scan

struct GapEntry {
    double gap; // delta_N^{-1} |energy - E_N|
    PathId id;
};

inline bool gap_entry_less(const GapEntry& a, const GapEntry& b) {
    return a.gap < b.gap || (a.gap == b.gap && a.id < b.id);
}

// Depth-first scan over all (2d)^n paths with prefix sums: one field query
// per extended site, O(n) live state. fn(id, energy) is called once per
// path in PathId order. Serial reference for the parallel kernel.
template <class Field, class Fn>
void scan_path_energies_serial(int d, int n, Field&& field, Fn&& fn) {
    std::array<std::int32_t, kMaxEnumDim> x{};
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const int base = 2 * d;
    auto descend = [&](auto&& self, int depth, PathId id, double sum) -> void {
        for (int k = 0; k < base; ++k) {
            const int axis = k >> 1;
            const std::int32_t sign = (k & 1) ? -1 : 1;
            x[axis] += sign;
            const double s = sum + field(depth + 1, std::span<const std::int32_t>(x.data(), static_cast<std::size_t>(d)));
            const PathId cid = id * static_cast<PathId>(base) + static_cast<PathId>(k);
            if (depth + 1 == n)
                fn(cid, s * scale);
            else
                self(self, depth + 1, cid, s);
            x[axis] -= sign;
        }
    };
    if (n > 0) descend(descend, 0, 0, 0.0);
}

// Paths whose gap is at most g_max, sorted by (gap, id). The parallel
// version partitions PathId space into subtrees; prefix sums are replayed
// along each subtree root in the same depth order as the serial scan, so
// the collected values are bit-identical for any worker count.
std::vector<GapEntry> collect_near_level_serial(int d, int n, const EnvField& env, double e_level, double g_max,
                                                const Limits& lim = {});
std::vector<GapEntry> collect_near_level(int d, int n, const EnvField& env, double e_level, double g_max,
                                         const Limits& lim = {}, int workers = 0);

struct GapProcess {
    int d = 1;
    int n = 0;
    double e_level = 0.0;
    double delta_n = 0.0;
    double g_max = 0.0;
    std::uint64_t total_paths = 0;
    std::vector<double> gaps; // ascending

    nlohmann::json to_json() const;
};

GapProcess all_gaps(int d, int n, const EnvField& env, double e_level, double g_max, const Limits& lim = {},
                    int workers = 0);

// ------------------------------------------------------- tuple covariance

// Gram matrix of meeting counts on [1, n]: s[i][j] = #{m in [1,n] :
// omega^i_m = omega^j_m}, diagonal exactly n. B = s / n has unit diagonal.
struct CovMatrix {
    int l = 0;
    int n = 0;
    std::vector<std::int64_t> s;

    std::int64_t count(int i, int j) const { return s[static_cast<std::size_t>(i) * l + j]; }
    double cov(int i, int j) const { return static_cast<double>(count(i, j)) / n; }
    Eigen::MatrixXd dense() const;
};

CovMatrix covariance_matrix(const PathTuple& t);

// 0/1 site-sharing matrix: one row group per time step n = 1..N, one row
// per block of paths sharing a site at that step, blocks ordered by their
// smallest member. Row stored as a bitmask over tuple positions (l <= 32).
// Satisfies A^T A = n * B exactly in integers.
struct PatternMatrix {
    int l = 0;
    int n = 0;
    std::vector<std::uint32_t> rows;

    int row_count() const { return static_cast<int>(rows.size()); }
    // Integer A^T A entry.
    std::int64_t gram(int i, int j) const;
};

PatternMatrix pattern_matrix(const PathTuple& t);

// True iff A^T A equals the meeting-count matrix entrywise (diag n).
bool pattern_identity_holds(const PatternMatrix& a, const CovMatrix& b);

// ------------------------------------------------------------ rank report

struct RankInfo {
    int rank = 0;            // exact rank of the integer matrix s over Q
    bool degenerate = false; // rank < l
    std::vector<int> basis;  // greedy independent positions, increasing
    double det_b = 0.0;      // exact det(s) / n^l pushed to double
    int float_rank = 0;      // eigenvalue count above 1e-8 relative tolerance
    double min_eigenvalue = 0.0;
};

RankInfo rank_analysis(const CovMatrix& b);

} // namespace dpre

#endif
