#include "dpre/energy.hpp"

#include <omp.h>

#include <algorithm>
#include <stdexcept>

namespace dpre {

double path_energy(const Path& p, const EnvField& env) {
    double sum = 0.0;
    for (int i = 1; i <= p.n; ++i)
        sum += env.value_at(i, std::span<const std::int32_t>(p.site(i), static_cast<std::size_t>(p.d)));
    return sum / std::sqrt(static_cast<double>(p.n));
}

namespace {

// Subtree walk used by the parallel kernel; addition order along any
// root-to-leaf line matches the serial reference exactly.
struct SubtreeScan {
    int d;
    int n;
    const EnvField* env;
    double e_level;
    double delta;
    double g_max;
    double scale;
    std::vector<GapEntry>* out;
    std::array<std::int32_t, kMaxEnumDim> x{};

    void leaf(PathId id, double sum) {
        const double gap = std::abs(sum * scale - e_level) / delta;
        if (gap <= g_max) out->push_back({gap, id});
    }

    void descend(int depth, PathId id, double sum) {
        const int base = 2 * d;
        for (int k = 0; k < base; ++k) {
            const int axis = k >> 1;
            const std::int32_t sign = (k & 1) ? -1 : 1;
            x[axis] += sign;
            const double s =
                sum + env->value_at(depth + 1, std::span<const std::int32_t>(x.data(), static_cast<std::size_t>(d)));
            const PathId cid = id * static_cast<PathId>(base) + static_cast<PathId>(k);
            if (depth + 1 == n)
                leaf(cid, s);
            else
                descend(depth + 1, cid, s);
            x[axis] -= sign;
        }
    }
};

} // namespace

std::vector<GapEntry> collect_near_level_serial(int d, int n, const EnvField& env, double e_level, double g_max,
                                                const Limits& lim) {
    path_count(d, n, lim.enum_cap);
    const double delta = delta_n(d, n, e_level);
    std::vector<GapEntry> out;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    scan_path_energies_serial(
        d, n, [&](std::int64_t step, std::span<const std::int32_t> x) { return env.value_at(step, x); },
        [&](PathId id, double energy) {
            const double gap = std::abs(energy - e_level) / delta;
            if (gap <= g_max) out.push_back({gap, id});
        });
    (void)scale;
    std::sort(out.begin(), out.end(), gap_entry_less);
    return out;
}

std::vector<GapEntry> collect_near_level(int d, int n, const EnvField& env, double e_level, double g_max,
                                         const Limits& lim, int workers) {
    const std::uint64_t total = path_count(d, n, lim.enum_cap);
    const int nthreads = workers > 0 ? workers : omp_get_max_threads();
    if (nthreads <= 1 || total < 4096) return collect_near_level_serial(d, n, env, e_level, g_max, lim);

    const double delta = delta_n(d, n, e_level);
    const int base = 2 * d;
    int prefix_depth = 0;
    std::uint64_t prefixes = 1;
    while (prefix_depth < n - 1 && prefixes < 8ull * static_cast<std::uint64_t>(nthreads)) {
        prefixes *= static_cast<std::uint64_t>(base);
        ++prefix_depth;
    }

    std::vector<GapEntry> merged;
#pragma omp parallel num_threads(nthreads)
    {
        SubtreeScan scan{d, n, &env, e_level, delta, g_max, 1.0 / std::sqrt(static_cast<double>(n)), nullptr, {}};
        std::vector<GapEntry> local;
        scan.out = &local;
#pragma omp for schedule(dynamic, 1)
        for (std::int64_t pre = 0; pre < static_cast<std::int64_t>(prefixes); ++pre) {
            // Replay the prefix path exactly as the serial scan reaches it.
            scan.x.fill(0);
            double sum = 0.0;
            auto id = static_cast<PathId>(pre);
            for (int i = prefix_depth - 1; i >= 0; --i) {
                std::uint64_t digit = static_cast<std::uint64_t>(pre);
                for (int j = 0; j < i; ++j) digit /= static_cast<std::uint64_t>(base);
                const int k = static_cast<int>(digit % static_cast<std::uint64_t>(base));
                const int axis = k >> 1;
                scan.x[axis] += (k & 1) ? -1 : 1;
                const int step = prefix_depth - i;
                sum += env.value_at(step, std::span<const std::int32_t>(scan.x.data(), static_cast<std::size_t>(d)));
            }
            if (prefix_depth == n)
                scan.leaf(id, sum);
            else
                scan.descend(prefix_depth, id, sum);
        }
#pragma omp critical
        merged.insert(merged.end(), local.begin(), local.end());
    }
    std::sort(merged.begin(), merged.end(), gap_entry_less);
    return merged;
}

GapProcess all_gaps(int d, int n, const EnvField& env, double e_level, double g_max, const Limits& lim, int workers) {
    GapProcess gp;
    gp.d = d;
    gp.n = n;
    gp.e_level = e_level;
    gp.delta_n = delta_n(d, n, e_level);
    gp.g_max = g_max;
    gp.total_paths = path_count(d, n, lim.enum_cap);
    const auto entries = collect_near_level(d, n, env, e_level, g_max, lim, workers);
    gp.gaps.reserve(entries.size());
    for (const auto& e : entries) gp.gaps.push_back(e.gap);
    return gp;
}

nlohmann::json GapProcess::to_json() const {
    return nlohmann::json{{"d", d},       {"n", n},           {"e_level", e_level},
                          {"delta_n", delta_n}, {"g_max", g_max}, {"total_paths", total_paths},
                          {"gaps", gaps}};
}

// ------------------------------------------------------- tuple covariance

CovMatrix covariance_matrix(const PathTuple& t) {
    const int l = static_cast<int>(t.paths.size());
    if (l < 1) throw std::invalid_argument("covariance_matrix: empty tuple");
    CovMatrix b;
    b.l = l;
    b.n = t.n;
    b.s.assign(static_cast<std::size_t>(l) * l, 0);
    for (int i = 0; i < l; ++i) {
        b.s[static_cast<std::size_t>(i) * l + i] = t.n;
        for (int j = i + 1; j < l; ++j) {
            const auto c = static_cast<std::int64_t>(coincidences(t.paths[static_cast<std::size_t>(i)],
                                                                  t.paths[static_cast<std::size_t>(j)], false));
            b.s[static_cast<std::size_t>(i) * l + j] = c;
            b.s[static_cast<std::size_t>(j) * l + i] = c;
        }
    }
    return b;
}

Eigen::MatrixXd CovMatrix::dense() const {
    Eigen::MatrixXd m(l, l);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) m(i, j) = cov(i, j);
    return m;
}

PatternMatrix pattern_matrix(const PathTuple& t) {
    const int l = static_cast<int>(t.paths.size());
    if (l < 1 || l > 32) throw std::invalid_argument("pattern_matrix: tuple size outside [1,32]");
    PatternMatrix a;
    a.l = l;
    a.n = t.n;
    a.rows.reserve(static_cast<std::size_t>(t.n));
    const int d = t.d;
    for (int m = 1; m <= t.n; ++m) {
        std::uint32_t assigned = 0;
        for (int k = 0; k < l; ++k) {
            if (assigned & (1u << k)) continue;
            std::uint32_t mask = 1u << k;
            const std::int32_t* xk = t.paths[static_cast<std::size_t>(k)].site(m);
            for (int k2 = k + 1; k2 < l; ++k2) {
                if (assigned & (1u << k2)) continue;
                const std::int32_t* x2 = t.paths[static_cast<std::size_t>(k2)].site(m);
                bool eq = true;
                for (int j = 0; j < d; ++j)
                    if (xk[j] != x2[j]) { eq = false; break; }
                if (eq) mask |= 1u << k2;
            }
            assigned |= mask;
            a.rows.push_back(mask);
        }
    }
    return a;
}

std::int64_t PatternMatrix::gram(int i, int j) const {
    std::int64_t acc = 0;
    const std::uint32_t want = (1u << i) | (1u << j);
    for (std::uint32_t row : rows)
        if ((row & want) == want) ++acc;
    return acc;
}

bool pattern_identity_holds(const PatternMatrix& a, const CovMatrix& b) {
    if (a.l != b.l || a.n != b.n) return false;
    for (int i = 0; i < b.l; ++i)
        for (int j = 0; j < b.l; ++j)
            if (a.gram(i, j) != b.count(i, j)) return false;
    return true;
}

// ------------------------------------------------------------ rank report

namespace {

using int128 = __int128;

// Fraction-free (Bareiss) elimination with full pivoting. Returns the rank;
// if det_out is given and the matrix is square and nonsingular, stores the
// exact determinant.
int bareiss_rank(std::vector<int128> m, int dim, int128* det_out) {
    int sign = 1;
    int128 prev = 1;
    int rank = 0;
    for (int k = 0; k < dim; ++k) {
        int pi = -1, pj = -1;
        for (int i = k; i < dim && pi < 0; ++i)
            for (int j = k; j < dim; ++j)
                if (m[static_cast<std::size_t>(i) * dim + j] != 0) { pi = i; pj = j; break; }
        if (pi < 0) break;
        if (pi != k) {
            for (int j = 0; j < dim; ++j) std::swap(m[static_cast<std::size_t>(pi) * dim + j], m[static_cast<std::size_t>(k) * dim + j]);
            sign = -sign;
        }
        if (pj != k) {
            for (int i = 0; i < dim; ++i) std::swap(m[static_cast<std::size_t>(i) * dim + pj], m[static_cast<std::size_t>(i) * dim + k]);
            sign = -sign;
        }
        const int128 pivot = m[static_cast<std::size_t>(k) * dim + k];
        for (int i = k + 1; i < dim; ++i)
            for (int j = k + 1; j < dim; ++j) {
                int128& e = m[static_cast<std::size_t>(i) * dim + j];
                e = (pivot * e - m[static_cast<std::size_t>(i) * dim + k] * m[static_cast<std::size_t>(k) * dim + j]) / prev;
            }
        prev = pivot;
        ++rank;
    }
    if (det_out) *det_out = rank == dim ? sign * prev : 0;
    return rank;
}

double int128_to_double(int128 v) {
    const bool neg = v < 0;
    if (neg) v = -v;
    double r = 0.0;
    double scale = 1.0;
    while (v > 0) {
        r += static_cast<double>(static_cast<std::uint64_t>(v & 0xFFFFFFFFull)) * scale;
        v >>= 32;
        scale *= 4294967296.0;
    }
    return neg ? -r : r;
}

std::vector<int128> principal_submatrix(const CovMatrix& b, const std::vector<int>& idx) {
    const int r = static_cast<int>(idx.size());
    std::vector<int128> m(static_cast<std::size_t>(r) * r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) m[static_cast<std::size_t>(i) * r + j] = b.count(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    return m;
}

} // namespace

RankInfo rank_analysis(const CovMatrix& b) {
    if (b.l > 32) throw std::invalid_argument("rank_analysis: l > 32");
    RankInfo info;

    std::vector<int> all(static_cast<std::size_t>(b.l));
    for (int i = 0; i < b.l; ++i) all[static_cast<std::size_t>(i)] = i;
    int128 det = 0;
    info.rank = bareiss_rank(principal_submatrix(b, all), b.l, &det);
    info.degenerate = info.rank < b.l;
    double ndl = 1.0;
    for (int i = 0; i < b.l; ++i) ndl *= static_cast<double>(b.n);
    info.det_b = int128_to_double(det) / ndl;

    // Greedy basis: extend while the principal minor keeps full rank. Valid
    // because s is a Gram matrix of the site-indicator vectors.
    for (int i = 0; i < b.l && static_cast<int>(info.basis.size()) < info.rank; ++i) {
        std::vector<int> cand = info.basis;
        cand.push_back(i);
        if (bareiss_rank(principal_submatrix(b, cand), static_cast<int>(cand.size()), nullptr) ==
            static_cast<int>(cand.size()))
            info.basis.push_back(i);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.dense());
    const auto& ev = es.eigenvalues();
    info.min_eigenvalue = ev(0);
    const double tol = 1e-8 * std::max(ev(b.l - 1), 0.0);
    info.float_rank = 0;
    for (int i = 0; i < b.l; ++i)
        if (ev(i) > tol) ++info.float_rank;
    return info;
}

} // namespace dpre
