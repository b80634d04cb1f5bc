#ifndef DPRE_GAUSSIAN_HPP
#define DPRE_GAUSSIAN_HPP

// Gaussian tuple analysis: multivariate normal box probabilities, the
// tuple sum over ordered distinct path tuples, joint characteristic
// functions through the pattern matrix, Berry-Esseen-style constant
// reports, and one-dimensional Fourier inversion of window probabilities.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "dpre/energy.hpp"
#include "dpre/environment.hpp"
#include "dpre/levels.hpp"
#include "dpre/path.hpp"

#include "json.hpp"

namespace dpre {

double normal_cdf(double x);

struct WindowSpec {
    std::vector<double> b; // per-position window multiples of delta_N
};

// -------------------------------------------------------------- MVN boxes

struct BoxProb {
    enum class Method { closed_form, density_volume, quadrature };
    double value = 0.0;
    // density_volume: bound on the relative error of density * volume;
    // quadrature: the achieved relative error estimate.
    double rel_err_bound = 0.0;
    Method method = Method::closed_form;
};

// P(|Z_i - center_i| <= halfwidth_i, i = 1..l) for Z ~ N(0, B). l = 1 is
// closed-form; boxes with every halfwidth below 1e-3 use density-at-center
// times volume (second-order correction bound recorded); anything else runs
// adaptive tensor quadrature (l <= 4) to 1e-6 relative tolerance. Throws
// SingularMatrixError when B has no Cholesky factor; callers with a
// degenerate tuple must reduce to a full-rank basis first.
BoxProb mvn_box_probability(const Eigen::MatrixXd& b, const Eigen::VectorXd& center, const Eigen::VectorXd& halfwidth);

// ------------------------------------------------------------- tuple sums

struct RankClassAgg {
    std::uint64_t tuple_count = 0;
    double sum = 0.0;
};

struct ZetResult {
    int d = 1;
    int n = 0;
    int l = 0;
    double e_level = 0.0;
    double delta = 0.0;
    std::vector<double> b;
    double eta_class = 0.4;

    double sum = 0.0;        // over ordered tuples of distinct paths
    double target = 1.0;     // prod b_i, the Poisson factorial-moment limit
    double inside_sum = 0.0; // classes with every pair inside the class threshold
    double inside_share = 0.0; // inside_sum / sum
    std::map<int, RankClassAgg> rank_breakdown;
    std::uint64_t distinct_tuples = 0;
    std::uint64_t pattern_classes = 0;

    nlohmann::json to_json() const;
};

// Exact sum of mvn_box_probability over all ordered tuples of l distinct
// paths, boxes centered at E_N with halfwidths b_i * delta_N. Pairs inside
// the class when covariance <= n^(eta_class - 1/2) for d = 1 and
// <= n^(eta_class - 1) for d >= 2. Degenerate tuples (possible from l = 4)
// are charged their greedy rank-r basis box probability. The parallel
// kernel accumulates integer pattern-class counts (bit-stable for any
// worker count); the serial reference sums per tuple with Neumaier
// compensation.
ZetResult zet_sum(int d, int n, const LevelSpec& level, const WindowSpec& w, double eta_class, const Limits& lim = {},
                  int workers = 0);
ZetResult zet_sum_serial(int d, int n, const LevelSpec& level, const WindowSpec& w, double eta_class,
                         const Limits& lim = {});

// ------------------------------------------- joint characteristic function

// f_N(t) = prod over pattern rows of char_fn(N^{-1/2} (A t)_row). For the
// gaussian environment this equals exp(-t' B t / 2) up to rounding.
std::complex<double> joint_char_fn(const PatternMatrix& a, DistKind kind, std::span<const double> t);

// --------------------------------------------------- Berry-Esseen reports

struct CfBoundsOptions {
    double eps = 0.6;    // inner radius eps * n^{1/6}
    double delta = 0.75; // outer radius delta * sqrt(n)
    int radial = 12;
    int angular = 16;
};

struct CfBoundsReport {
    double c_hat = 0.0;          // max |f - g| / (||t||^3 n^{-1/2} g), ||t|| <= inner
    double zeta_hat = 0.0;       // min -ln|f| / ||t||^2 on the shell grid
    double max_shell_abs = 0.0;  // max |f| on the shell grid
    double max_abs_diff = 0.0;   // max |f - g| over every grid point
    double inner_radius = 0.0;
    double outer_radius = 0.0;
};

// Fitted constants are reported, never asserted here; trend checks live in
// the test suites.
CfBoundsReport berry_esseen_check(const PathTuple& t, DistKind kind, const CfBoundsOptions& opt = {});

// ------------------------------------------------------ Fourier inversion

struct FourierOptions {
    double tail_fraction = 1e-3; // truncation tail bound, relative to the result
    double rel_tol = 1e-7;       // quadrature tolerance
    double t_max = 1e6;          // giving up past this truncation
};

// P(|eta(omega^N) - center| <= halfwidth) for a single path, by inversion
// of char_fn(kind, t / sqrt(n))^n. Throws TailBoundError when the |phi|
// decay cannot push the tail below tail_fraction of the result by t_max.
double fourier_box_probability_1d(DistKind kind, int n, double center, double halfwidth, const FourierOptions& opt = {});

} // namespace dpre

#endif
