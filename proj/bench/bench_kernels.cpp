// Serial reference vs OpenMP kernels: wall time and bit-identity check.
// Usage: bench_kernels [N_scan] [N_zet]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dpre/energy.hpp"
#include "dpre/gaussian.hpp"

using namespace dpre;

template <class Fn>
static double secs(Fn&& fn)
{
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int main(int argc, char** argv)
{
    const int n_scan = argc > 1 ? std::atoi(argv[1]) : 18;
    const int n_zet = argc > 2 ? std::atoi(argv[2]) : 8;

#ifdef _OPENMP
    std::printf("omp max threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP\n");
#endif

    {
        const EnvField env{12345, 0, DistKind::gaussian};
        std::vector<GapEntry> a, b;
        const double ts = secs([&] { a = collect_near_level_serial(1, n_scan, env, 0.0, 50.0); });
        const double tp = secs([&] { b = collect_near_level(1, n_scan, env, 0.0, 50.0); });
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i)
            same = a[i].id == b[i].id && a[i].gap == b[i].gap;
        std::printf("gap scan   d=1 N=%2d: serial %7.3fs  parallel %7.3fs  speedup %5.2fx  bit-identical=%s\n",
                    n_scan, ts, tp, ts / tp, same ? "yes" : "NO");
    }

    {
        const LevelSpec lv{0.0, 0.0};
        const WindowSpec w{{1.0, 1.0}};
        ZetResult zs, zp;
        const double ts = secs([&] { zs = zet_sum_serial(1, n_zet, lv, w, 0.3); });
        const double tp = secs([&] { zp = zet_sum(1, n_zet, lv, w, 0.3); });
        const double rel = std::abs(zs.sum - zp.sum) / std::max(std::abs(zs.sum), 1e-300);
        std::printf("zet sum    d=1 N=%2d: serial %7.3fs  parallel %7.3fs  speedup %5.2fx  rel-diff %.2e\n", n_zet,
                    ts, tp, ts / tp, rel);
    }
    return 0;
}
