#include "dpre/environment.hpp"

#include <cmath>
#include <stdexcept>

namespace dpre {

DistKind dist_from_name(const std::string& name) {
    if (name == "gaussian") return DistKind::gaussian;
    if (name == "uniform") return DistKind::uniform;
    if (name == "cexp") return DistKind::cexp;
    throw std::invalid_argument("unknown distribution '" + name + "' (want gaussian|uniform|cexp)");
}

std::string dist_name(DistKind k) {
    switch (k) {
        case DistKind::gaussian: return "gaussian";
        case DistKind::uniform: return "uniform";
        case DistKind::cexp: return "cexp";
    }
    throw std::logic_error("dist_name");
}

static constexpr double kSqrt3 = 1.7320508075688772;

std::complex<double> char_fn(DistKind k, double t) {
    switch (k) {
        case DistKind::gaussian:
            return {std::exp(-0.5 * t * t), 0.0};
        case DistKind::uniform: {
            const double a = kSqrt3 * t;
            if (std::abs(a) < 1e-8) return {1.0 - a * a / 6.0, 0.0};
            return {std::sin(a) / a, 0.0};
        }
        case DistKind::cexp: {
            // E exp(it(X-1)) for X ~ Exp(1): exp(-it) / (1 - it).
            const std::complex<double> num = std::polar(1.0, -t);
            return num / std::complex<double>(1.0, -t);
        }
    }
    throw std::logic_error("char_fn");
}

double env_decay_const(DistKind k) {
    switch (k) {
        case DistKind::gaussian: return 1.0; // e^{-t^2/2} <= 1/|t| for |t| >= 1.2
        case DistKind::uniform: return 1.0 / kSqrt3;
        case DistKind::cexp: return 1.0; // |phi| = (1+t^2)^{-1/2} <= 1/|t|
    }
    throw std::logic_error("env_decay_const");
}

// Wichura's algorithm AS241 (PPND16). Max relative error about 1e-15 on
// (0,1); the round-trip against the erfc-based CDF is tested.
double inv_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inv_normal_cdf: p outside (0,1)");
    static const double A[8] = {3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
                                1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
                                3.3430575583588128105e4, 2.5090809287301226727e3};
    static const double B[8] = {1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
                                2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
                                5.2264952788528545610e3};
    static const double C[8] = {1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
                                3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
                                2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static const double D[8] = {1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
                                1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                1.05075007164441684324e-9};
    static const double E[8] = {6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
                                2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static const double F[8] = {1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
                                7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                2.04426310338993978564e-15};
    auto horner = [](const double* c, double r) {
        return ((((((c[7] * r + c[6]) * r + c[5]) * r + c[4]) * r + c[3]) * r + c[2]) * r + c[1]) * r + c[0];
    };
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner(A, r) / horner(B, r);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double v;
    if (r <= 5.0) {
        r -= 1.6;
        v = horner(C, r) / horner(D, r);
    } else {
        r -= 5.0;
        v = horner(E, r) / horner(F, r);
    }
    return q < 0.0 ? -v : v;
}

double sample_from_u01(DistKind k, double u) {
    switch (k) {
        case DistKind::gaussian: return inv_normal_cdf(u);
        case DistKind::uniform: return kSqrt3 * (2.0 * u - 1.0);
        case DistKind::cexp: return -std::log1p(-u) - 1.0;
    }
    throw std::logic_error("sample_from_u01");
}

double EnvField::value_at(std::int64_t n, std::span<const std::int32_t> x) const {
    return sample_from_u01(kind, u01(site_hash(n, x)));
}

} // namespace dpre
