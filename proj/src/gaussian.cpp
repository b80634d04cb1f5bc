#include "dpre/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dpre/errors.hpp"
#include "dpre/rng.hpp"

namespace dpre {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

namespace {

struct Neumaier {
    double s = 0.0, c = 0.0;
    void add(double x)
    {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double total() const { return s + c; }
};

// Gauss-Legendre nodes, fixed symmetric order so evaluation order is stable.
constexpr double kGl5X[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
constexpr double kGl5W[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                             0.2369268850561891};
constexpr double kGl9X[9] = {-0.9681602395076261, -0.8360311073266358, -0.6133714327005904, -0.3242534234038089,
                             0.0,                 0.3242534234038089,  0.6133714327005904,  0.8360311073266358,
                             0.9681602395076261};
constexpr double kGl9W[9] = {0.0812743883615744, 0.1806481606948574, 0.2606106964029354, 0.3123470770400029,
                             0.3302393550012598, 0.3123470770400029, 0.2606106964029354, 0.1806481606948574,
                             0.0812743883615744};

struct MvnDensity {
    int l = 0;
    double nc = 0.0;       // (2 pi)^{-l/2} / prod diag(L)
    double linv[4][4] = {}; // inverse of the Cholesky factor, lower triangular

    double operator()(const double* x) const
    {
        double q = 0.0;
        for (int i = 0; i < l; ++i) {
            double y = 0.0;
            for (int j = 0; j <= i; ++j)
                y += linv[i][j] * x[j];
            q += y * y;
        }
        return nc * std::exp(-0.5 * q);
    }
};

template <int K>
double tensor_eval(const MvnDensity& f, const double* lo, const double* hi, int l, const double* xs, const double* ws)
{
    double nx[4][K], nw[4][K];
    double vol = 1.0;
    for (int a = 0; a < l; ++a) {
        const double c = 0.5 * (lo[a] + hi[a]);
        const double h = 0.5 * (hi[a] - lo[a]);
        vol *= h;
        for (int i = 0; i < K; ++i) {
            nx[a][i] = c + h * xs[i];
            nw[a][i] = ws[i];
        }
    }
    int idx[4] = {0, 0, 0, 0};
    double sum = 0.0;
    for (;;) {
        double x[4];
        double w = 1.0;
        for (int a = 0; a < l; ++a) {
            x[a] = nx[a][idx[a]];
            w *= nw[a][idx[a]];
        }
        sum += w * f(x);
        int a = 0;
        while (a < l && ++idx[a] == K)
            idx[a++] = 0;
        if (a == l)
            break;
    }
    return sum * vol;
}

struct QuadCell {
    double lo[4], hi[4];
    double i9 = 0.0, err = 0.0;
};

QuadCell make_cell(const MvnDensity& f, const double* lo, const double* hi, int l)
{
    QuadCell c;
    std::memcpy(c.lo, lo, sizeof(double) * 4);
    std::memcpy(c.hi, hi, sizeof(double) * 4);
    const double i5 = tensor_eval<5>(f, lo, hi, l, kGl5X, kGl5W);
    c.i9 = tensor_eval<9>(f, lo, hi, l, kGl9X, kGl9W);
    c.err = std::abs(c.i9 - i5);
    return c;
}

} // namespace

BoxProb mvn_box_probability(const Eigen::MatrixXd& b, const Eigen::VectorXd& center, const Eigen::VectorXd& halfwidth)
{
    const int l = static_cast<int>(b.rows());
    if (l < 1 || b.cols() != l || center.size() != l || halfwidth.size() != l)
        throw std::invalid_argument("mvn_box_probability: dimension mismatch");
    for (int i = 0; i < l; ++i)
        if (!(halfwidth[i] >= 0.0))
            throw std::invalid_argument("mvn_box_probability: negative halfwidth");

    BoxProb out;
    if (halfwidth.minCoeff() == 0.0) {
        out.method = BoxProb::Method::closed_form;
        return out; // zero-width slab
    }

    if (l == 1) {
        const double v = b(0, 0);
        if (!(v > 0.0))
            throw SingularMatrixError("mvn_box_probability: nonpositive variance");
        const double sd = std::sqrt(v);
        out.value = normal_cdf((center[0] + halfwidth[0]) / sd) - normal_cdf((center[0] - halfwidth[0]) / sd);
        out.rel_err_bound = 1e-14;
        out.method = BoxProb::Method::closed_form;
        return out;
    }
    if (l > 4)
        throw std::invalid_argument("mvn_box_probability: l > 4 not supported");

    Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() != Eigen::Success)
        throw SingularMatrixError("mvn_box_probability: covariance has no Cholesky factor");
    const Eigen::MatrixXd lmat = llt.matrixL();

    if (halfwidth.maxCoeff() < 1e-3) {
        // density at center times volume, with a recorded first/second order bound
        const Eigen::VectorXd q = llt.solve(center);
        const Eigen::MatrixXd binv = llt.solve(Eigen::MatrixXd::Identity(l, l));
        double b1 = 0.0, b2 = 0.0;
        for (int i = 0; i < l; ++i) {
            b1 += std::abs(q[i]) * halfwidth[i];
            for (int j = 0; j < l; ++j)
                b2 += 0.5 * std::abs(binv(i, j)) * halfwidth[i] * halfwidth[j];
        }
        double vol = 1.0;
        for (int i = 0; i < l; ++i)
            vol *= 2.0 * halfwidth[i];
        const double dens =
            std::exp(-0.5 * center.dot(q)) / (std::pow(2.0 * M_PI, 0.5 * l) * lmat.diagonal().prod());
        out.value = dens * vol;
        out.rel_err_bound = std::expm1(b1 + b2);
        out.method = BoxProb::Method::density_volume;
        return out;
    }

    MvnDensity f;
    f.l = l;
    f.nc = 1.0 / (std::pow(2.0 * M_PI, 0.5 * l) * lmat.diagonal().prod());
    const Eigen::MatrixXd linv =
        lmat.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(l, l));
    for (int i = 0; i < l; ++i)
        for (int j = 0; j <= i; ++j)
            f.linv[i][j] = linv(i, j);

    double lo[4] = {}, hi[4] = {};
    for (int i = 0; i < l; ++i) {
        lo[i] = center[i] - halfwidth[i];
        hi[i] = center[i] + halfwidth[i];
    }

    const double rel_tol = 1e-6;
    std::vector<QuadCell> cells;
    cells.push_back(make_cell(f, lo, hi, l));
    auto cmp = [](const QuadCell& a, const QuadCell& b2) { return a.err < b2.err; };
    double err_tot = cells[0].err;
    double total = cells[0].i9;
    int rounds = 0;
    while (err_tot > rel_tol * std::max(std::abs(total), 1e-300) && rounds++ < 20000) {
        std::pop_heap(cells.begin(), cells.end(), cmp);
        QuadCell worst = cells.back();
        cells.pop_back();
        int axis = 0;
        for (int a2 = 1; a2 < l; ++a2)
            if (worst.hi[a2] - worst.lo[a2] > worst.hi[axis] - worst.lo[axis])
                axis = a2;
        const double mid = 0.5 * (worst.lo[axis] + worst.hi[axis]);
        if (!(mid > worst.lo[axis] && mid < worst.hi[axis]))
            break; // cell narrower than double spacing
        double clo[4], chi[4];
        std::memcpy(clo, worst.lo, sizeof clo);
        std::memcpy(chi, worst.hi, sizeof chi);
        chi[axis] = mid;
        QuadCell left = make_cell(f, clo, chi, l);
        chi[axis] = worst.hi[axis];
        clo[axis] = mid;
        QuadCell right = make_cell(f, clo, chi, l);
        total += left.i9 + right.i9 - worst.i9;
        err_tot += left.err + right.err - worst.err;
        cells.push_back(left);
        std::push_heap(cells.begin(), cells.end(), cmp);
        cells.push_back(right);
        std::push_heap(cells.begin(), cells.end(), cmp);
    }
    Neumaier acc;
    for (const auto& c : cells)
        acc.add(c.i9);
    out.value = acc.total();
    out.rel_err_bound = err_tot / std::max(std::abs(out.value), 1e-300);
    out.method = BoxProb::Method::quadrature;
    return out;
}

// ------------------------------------------------------------- tuple sums

namespace {

constexpr int kMaxTupleLen = 4;

int pair_overlap(const Path& a, const Path& b)
{
    const int d = a.d;
    const std::int32_t* pa = a.sites.data();
    const std::int32_t* pb = b.sites.data();
    int s = 0;
    for (int m = 1; m <= a.n; ++m) {
        const std::int32_t* xa = pa + static_cast<std::size_t>(m) * d;
        const std::int32_t* xb = pb + static_cast<std::size_t>(m) * d;
        bool eq = true;
        for (int k = 0; k < d; ++k)
            eq = eq && xa[k] == xb[k];
        s += eq ? 1 : 0;
    }
    return s;
}

struct ClassTerm {
    double term = 0.0;
    int rank = 0;
    bool inside = false;
};

// skey packs the l(l-1)/2 pair overlaps, one byte each, pairs (i,j), i < j,
// ordered lexicographically.
ClassTerm compute_class(int d, int n, int l, std::uint64_t skey, double e, double delta,
                        const std::vector<double>& b, double eta_class)
{
    CovMatrix cov;
    cov.l = l;
    cov.n = n;
    cov.s.assign(static_cast<std::size_t>(l) * l, 0);
    for (int i = 0; i < l; ++i)
        cov.s[static_cast<std::size_t>(i) * l + i] = n;
    int p = 0;
    std::int64_t smax = 0;
    for (int i = 0; i < l; ++i)
        for (int j = i + 1; j < l; ++j, ++p) {
            const auto sij = static_cast<std::int64_t>((skey >> (8 * p)) & 0xff);
            cov.s[static_cast<std::size_t>(i) * l + j] = sij;
            cov.s[static_cast<std::size_t>(j) * l + i] = sij;
            smax = std::max(smax, sij);
        }

    ClassTerm out;
    const double thresh = d == 1 ? std::pow(n, eta_class + 0.5) : std::pow(n, eta_class);
    out.inside = static_cast<double>(smax) <= thresh;

    const RankInfo ri = rank_analysis(cov);
    out.rank = ri.rank;
    const Eigen::MatrixXd bd = cov.dense();
    if (!ri.degenerate) {
        Eigen::VectorXd center = Eigen::VectorXd::Constant(l, e);
        Eigen::VectorXd hw(l);
        for (int i = 0; i < l; ++i)
            hw[i] = b[i] * delta;
        out.term = mvn_box_probability(bd, center, hw).value;
        return out;
    }
    const int r = static_cast<int>(ri.basis.size());
    Eigen::MatrixXd sub(r, r);
    Eigen::VectorXd center = Eigen::VectorXd::Constant(r, e);
    Eigen::VectorXd hw(r);
    for (int i = 0; i < r; ++i) {
        hw[i] = b[ri.basis[i]] * delta;
        for (int j = 0; j < r; ++j)
            sub(i, j) = bd(ri.basis[i], ri.basis[j]);
    }
    out.term = mvn_box_probability(sub, center, hw).value;
    return out;
}

struct ZetSetup {
    int l = 0;
    std::uint64_t total_paths = 0;
    double e = 0.0;
    double delta = 0.0;
    int pidx[kMaxTupleLen][kMaxTupleLen] = {};
    std::vector<Path> paths;
};

ZetSetup zet_setup(int d, int n, const LevelSpec& level, const WindowSpec& w, const Limits& lim)
{
    ZetSetup s;
    s.l = static_cast<int>(w.b.size());
    if (s.l < 1 || s.l > kMaxTupleLen)
        throw std::invalid_argument("zet_sum: tuple length must be 1..4");
    for (double bi : w.b)
        if (!(bi >= 0.0))
            throw std::invalid_argument("zet_sum: negative window width");
    s.total_paths = path_count(d, n, lim.enum_cap);
    unsigned __int128 tuples = 1;
    for (int i = 0; i < s.l; ++i) {
        tuples *= s.total_paths;
        if (tuples > static_cast<unsigned __int128>(lim.tuple_cap))
            throw BudgetExceeded("zet_sum: ordered tuple count exceeds budget");
    }
    s.e = level_value(level, n);
    s.delta = delta_n(d, n, s.e);
    int p = 0;
    for (int i = 0; i < s.l; ++i)
        for (int j = i + 1; j < s.l; ++j)
            s.pidx[i][j] = p++;
    s.paths = enumerate_paths(d, n);
    return s;
}

// Innermost position of the tuple walk: base_key already packs every pair
// among idx[0 .. last-1].
void tally_last(const ZetSetup& s, const std::size_t* idx, int last, std::uint64_t base_key,
                std::unordered_map<std::uint64_t, std::uint64_t>& counts)
{
    const std::size_t np = s.paths.size();
    for (std::size_t j = 0; j < np; ++j) {
        bool dup = false;
        for (int k = 0; k < last; ++k)
            dup = dup || idx[k] == j;
        if (dup)
            continue;
        std::uint64_t key = base_key;
        for (int k = 0; k < last; ++k) {
            const int ov = pair_overlap(s.paths[idx[k]], s.paths[j]);
            key |= static_cast<std::uint64_t>(ov) << (8 * s.pidx[k][last]);
        }
        counts[key] += 1;
    }
}

// Enumerates ordered tuples of distinct paths with idx[0] fixed, tallying
// packed overlap keys.
void tally_tuples(const ZetSetup& s, std::size_t i0, std::unordered_map<std::uint64_t, std::uint64_t>& counts)
{
    const std::size_t np = s.paths.size();
    const int l = s.l;
    if (l == 1) {
        counts[0] += 1;
        return;
    }
    std::size_t idx[kMaxTupleLen] = {i0, 0, 0, 0};
    std::uint64_t keys[kMaxTupleLen] = {0, 0, 0, 0};
    if (l == 2) {
        tally_last(s, idx, 1, 0, counts);
        return;
    }
    // positions 1 .. l-2 walk here; the last position runs flat
    int p = 1;
    idx[1] = 0;
    while (p >= 1) {
        if (idx[p] >= np) {
            --p;
            if (p >= 1)
                ++idx[p];
            continue;
        }
        bool dup = false;
        for (int k = 0; k < p; ++k)
            dup = dup || idx[k] == idx[p];
        if (dup) {
            ++idx[p];
            continue;
        }
        std::uint64_t key = keys[p - 1];
        for (int k = 0; k < p; ++k) {
            const int ov = pair_overlap(s.paths[idx[k]], s.paths[idx[p]]);
            key |= static_cast<std::uint64_t>(ov) << (8 * s.pidx[k][p]);
        }
        keys[p] = key;
        if (p == l - 2) {
            tally_last(s, idx, l - 1, key, counts);
            ++idx[p];
        } else {
            ++p;
            idx[p] = 0;
        }
    }
}

} // namespace

nlohmann::json ZetResult::to_json() const
{
    nlohmann::json rb = nlohmann::json::object();
    for (const auto& [r, agg] : rank_breakdown)
        rb[std::to_string(r)] = {{"count", agg.tuple_count}, {"sum", agg.sum}};
    return {{"d", d},
            {"n", n},
            {"l", l},
            {"e_level", e_level},
            {"delta", delta},
            {"b", b},
            {"eta_class", eta_class},
            {"sum", sum},
            {"target", target},
            {"inside_sum", inside_sum},
            {"inside_share", inside_share},
            {"rank_breakdown", rb},
            {"distinct_tuples", distinct_tuples},
            {"pattern_classes", pattern_classes}};
}

ZetResult zet_sum(int d, int n, const LevelSpec& level, const WindowSpec& w, double eta_class, const Limits& lim,
                  int workers)
{
    const ZetSetup s = zet_setup(d, n, level, w, lim);
    const std::size_t np = s.paths.size();

    std::map<std::uint64_t, std::uint64_t> merged;
#ifdef _OPENMP
    if (workers > 0)
        omp_set_num_threads(workers);
#pragma omp parallel
    {
        std::unordered_map<std::uint64_t, std::uint64_t> local;
#pragma omp for schedule(dynamic, 16)
        for (std::int64_t i0 = 0; i0 < static_cast<std::int64_t>(np); ++i0)
            tally_tuples(s, static_cast<std::size_t>(i0), local);
#pragma omp critical(zet_merge)
        for (const auto& [k, v] : local)
            merged[k] += v;
    }
#else
    (void)workers;
    std::unordered_map<std::uint64_t, std::uint64_t> local;
    for (std::size_t i0 = 0; i0 < np; ++i0)
        tally_tuples(s, i0, local);
    for (const auto& [k, v] : local)
        merged[k] += v;
#endif

    ZetResult out;
    out.d = d;
    out.n = n;
    out.l = s.l;
    out.e_level = s.e;
    out.delta = s.delta;
    out.b = w.b;
    out.eta_class = eta_class;
    out.target = 1.0;
    for (double bi : w.b)
        out.target *= bi;
    out.pattern_classes = merged.size();

    Neumaier sum, inside;
    for (const auto& [key, count] : merged) {
        const ClassTerm ct = compute_class(d, n, s.l, key, s.e, s.delta, w.b, eta_class);
        const double contrib = static_cast<double>(count) * ct.term;
        sum.add(contrib);
        if (ct.inside)
            inside.add(contrib);
        auto& agg = out.rank_breakdown[ct.rank];
        agg.tuple_count += count;
        agg.sum += contrib;
        out.distinct_tuples += count;
    }
    out.sum = sum.total();
    out.inside_sum = inside.total();
    out.inside_share = out.sum != 0.0 ? out.inside_sum / out.sum : 0.0;
    return out;
}

ZetResult zet_sum_serial(int d, int n, const LevelSpec& level, const WindowSpec& w, double eta_class,
                         const Limits& lim)
{
    const ZetSetup s = zet_setup(d, n, level, w, lim);
    const std::size_t np = s.paths.size();
    const int l = s.l;

    ZetResult out;
    out.d = d;
    out.n = n;
    out.l = l;
    out.e_level = s.e;
    out.delta = s.delta;
    out.b = w.b;
    out.eta_class = eta_class;
    out.target = 1.0;
    for (double bi : w.b)
        out.target *= bi;

    std::unordered_map<std::uint64_t, ClassTerm> memo;
    Neumaier sum, inside;

    // plain nested tuple walk, one term per tuple in lexicographic order
    std::size_t idx[kMaxTupleLen] = {0, 0, 0, 0};
    int depth = 0;
    while (true) {
        if (depth == l) {
            std::uint64_t key = 0;
            for (int i = 0; i < l; ++i)
                for (int j = i + 1; j < l; ++j)
                    key |= static_cast<std::uint64_t>(pair_overlap(s.paths[idx[i]], s.paths[idx[j]]))
                           << (8 * s.pidx[i][j]);
            auto it = memo.find(key);
            if (it == memo.end())
                it = memo.emplace(key, compute_class(d, n, l, key, s.e, s.delta, w.b, eta_class)).first;
            const ClassTerm& ct = it->second;
            sum.add(ct.term);
            if (ct.inside)
                inside.add(ct.term);
            auto& agg = out.rank_breakdown[ct.rank];
            agg.tuple_count += 1;
            agg.sum += ct.term;
            out.distinct_tuples += 1;
            --depth;
            ++idx[depth];
            continue;
        }
        if (idx[depth] >= np) {
            if (depth == 0)
                break;
            idx[depth] = 0;
            --depth;
            ++idx[depth];
            continue;
        }
        bool dup = false;
        for (int k2 = 0; k2 < depth; ++k2)
            dup = dup || idx[k2] == idx[depth];
        if (dup) {
            ++idx[depth];
            continue;
        }
        ++depth;
        if (depth < l)
            idx[depth] = 0;
    }
    out.pattern_classes = memo.size();
    out.sum = sum.total();
    out.inside_sum = inside.total();
    out.inside_share = out.sum != 0.0 ? out.inside_sum / out.sum : 0.0;
    return out;
}

// ------------------------------------------- joint characteristic function

std::complex<double> joint_char_fn(const PatternMatrix& a, DistKind kind, std::span<const double> t)
{
    if (static_cast<int>(t.size()) != a.l)
        throw std::invalid_argument("joint_char_fn: argument length mismatch");
    const double scale = 1.0 / std::sqrt(static_cast<double>(a.n));
    std::complex<double> f(1.0, 0.0);
    for (std::uint32_t row : a.rows) {
        double s = 0.0;
        for (int i = 0; i < a.l; ++i)
            if (row & (1u << i))
                s += t[i];
        f *= char_fn(kind, scale * s);
    }
    return f;
}

// --------------------------------------------------- Berry-Esseen reports

CfBoundsReport berry_esseen_check(const PathTuple& t, DistKind kind, const CfBoundsOptions& opt)
{
    const int l = static_cast<int>(t.paths.size());
    if (l < 1)
        throw std::invalid_argument("berry_esseen_check: empty tuple");
    const int n = t.paths[0].n;
    const PatternMatrix pat = pattern_matrix(t);
    const Eigen::MatrixXd b = covariance_matrix(t).dense();

    CfBoundsReport rep;
    rep.inner_radius = opt.eps * std::pow(n, 1.0 / 6.0);
    rep.outer_radius = opt.delta * std::sqrt(static_cast<double>(n));
    if (!(rep.outer_radius > rep.inner_radius))
        throw ConfigError("berry_esseen_check: empty shell, raise delta or lower eps");

    std::vector<std::vector<double>> dirs;
    if (l == 1) {
        dirs.push_back({1.0});
    } else if (l == 2) {
        for (int j = 0; j < opt.angular; ++j) {
            const double th = M_PI * (j + 0.5) / opt.angular;
            dirs.push_back({std::cos(th), std::sin(th)});
        }
    } else {
        SampleRng rng(0x6469726563746e73ULL, 7, static_cast<std::uint64_t>(l));
        for (int j = 0; j < opt.angular; ++j) {
            std::vector<double> v(l);
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (int i = 0; i < l; ++i) {
                    v[i] = inv_normal_cdf(rng.next_u01());
                    norm2 += v[i] * v[i];
                }
            } while (norm2 < 1e-12);
            const double inv = 1.0 / std::sqrt(norm2);
            for (double& x : v)
                x *= inv;
            dirs.push_back(v);
        }
    }

    const double nsqrt_inv = 1.0 / std::sqrt(static_cast<double>(n));
    rep.c_hat = 0.0;
    rep.zeta_hat = std::numeric_limits<double>::infinity();
    rep.max_shell_abs = 0.0;
    std::vector<double> tv(l);
    for (const auto& dir : dirs) {
        for (int k = 1; k <= opt.radial; ++k) {
            const double r = rep.inner_radius * k / opt.radial;
            for (int i = 0; i < l; ++i)
                tv[i] = r * dir[i];
            const std::complex<double> f = joint_char_fn(pat, kind, tv);
            double quad = 0.0;
            for (int i = 0; i < l; ++i)
                for (int j = 0; j < l; ++j)
                    quad += tv[i] * b(i, j) * tv[j];
            const double g = std::exp(-0.5 * quad);
            const double ratio = std::abs(f - g) / (r * r * r * nsqrt_inv * g);
            rep.c_hat = std::max(rep.c_hat, ratio);
            rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(f - g));
        }
        for (int k = 1; k <= opt.radial; ++k) {
            const double r = rep.inner_radius + (rep.outer_radius - rep.inner_radius) * k / (opt.radial + 1);
            for (int i = 0; i < l; ++i)
                tv[i] = r * dir[i];
            const std::complex<double> f = joint_char_fn(pat, kind, tv);
            double quad = 0.0;
            for (int i = 0; i < l; ++i)
                for (int j = 0; j < l; ++j)
                    quad += tv[i] * b(i, j) * tv[j];
            rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(f - std::exp(-0.5 * quad)));
            const double af = std::abs(f);
            rep.max_shell_abs = std::max(rep.max_shell_abs, af);
            if (af > 0.0)
                rep.zeta_hat = std::min(rep.zeta_hat, -std::log(af) / (r * r));
        }
    }
    return rep;
}

// ------------------------------------------------------ Fourier inversion

namespace {

std::complex<double> cpow_n(std::complex<double> z, int n)
{
    std::complex<double> r(1.0, 0.0);
    while (n > 0) {
        if (n & 1)
            r *= z;
        z *= z;
        n >>= 1;
    }
    return r;
}

struct FourierIntegrand {
    DistKind kind;
    int n;
    double c, w;
    double root_n;

    double operator()(double t) const
    {
        const std::complex<double> fn = cpow_n(char_fn(kind, t / root_n), n);
        const std::complex<double> rot(std::cos(t * c), -std::sin(t * c));
        const double tw = t * w;
        double kern;
        if (std::abs(tw) < 1e-8)
            kern = 2.0 * w * (1.0 - tw * tw / 6.0);
        else
            kern = 2.0 * std::sin(tw) / t;
        return (fn * rot).real() * kern;
    }
};

template <typename F>
double adapt_simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                     int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double both = left + right;
    if (depth <= 0 || std::abs(both - whole) <= 15.0 * tol)
        return both + (both - whole) / 15.0;
    return adapt_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate_panels(const F& f, double a, double b, double panel, double abs_tol)
{
    const int k = std::max(1, static_cast<int>(std::ceil((b - a) / panel)));
    const double h = (b - a) / k;
    Neumaier acc;
    for (int i = 0; i < k; ++i) {
        const double x0 = a + i * h;
        const double x1 = a + (i + 1) * h;
        const double xm = 0.5 * (x0 + x1);
        const double f0 = f(x0);
        const double fm = f(xm);
        const double f1 = f(x1);
        const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        acc.add(adapt_simpson(f, x0, x1, f0, fm, f1, whole, abs_tol / k, 28));
    }
    return acc.total();
}

} // namespace

double fourier_box_probability_1d(DistKind kind, int n, double center, double halfwidth, const FourierOptions& opt)
{
    if (n < 1)
        throw std::invalid_argument("fourier_box_probability_1d: n must be positive");
    if (!(halfwidth >= 0.0))
        throw std::invalid_argument("fourier_box_probability_1d: negative halfwidth");
    if (halfwidth == 0.0)
        return 0.0;

    FourierIntegrand f{kind, n, center, halfwidth, std::sqrt(static_cast<double>(n))};
    const double cdecay = env_decay_const(kind);
    // |phi(t/sqrt n)|^n <= (C sqrt n / t)^n once t is past valid_from
    const double valid_from = f.root_n * std::max(2.0 * cdecay, 1.5);
    const double panel = M_PI / (std::abs(center) + halfwidth + 2.0);

    // (2/pi) * (C sqrt n / T)^n / n bounds the discarded tail mass
    auto tail = [&](double tcut) { return 2.0 / M_PI * std::pow(cdecay * f.root_n / tcut, n) / n; };

    double tcut = valid_from;
    double abs_tol = opt.rel_tol * 2.0 * halfwidth * 1e-3;
    double integral = integrate_panels(f, 0.0, tcut, panel, abs_tol);
    while (tail(tcut) > opt.tail_fraction * std::abs(integral)) {
        if (2.0 * tcut > opt.t_max)
            throw TailBoundError("fourier_box_probability_1d: tail bound will not meet target");
        integral += integrate_panels(f, tcut, 2.0 * tcut, panel, abs_tol);
        tcut *= 2.0;
    }
    double result = integral / M_PI;
    // second pass when the cancellation leaves the first-pass tolerance too loose
    const double want_abs = opt.rel_tol * std::abs(result);
    if (want_abs > 0.0 && want_abs < abs_tol * 0.5) {
        abs_tol = want_abs;
        integral = integrate_panels(f, 0.0, tcut, panel, abs_tol);
        result = integral / M_PI;
    }
    return result;
}

} // namespace dpre
