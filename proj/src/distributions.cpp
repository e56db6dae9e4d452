#include "qhahn/distributions.hpp"

#include <cmath>
#include <limits>

#include "qhahn/errors.hpp"
#include "qhahn/qspecial.hpp"

namespace qhahn {

namespace {

bool is_integer_power(double v, double q, long long* out) {
    // v == q^{-m} for an integer m >= 0?
    if (v <= 0.0) return false;
    double m = -std::log(v) / std::log(q);
    long long mi = std::llround(m);
    if (mi < 0) return false;
    if (std::fabs(v - std::pow(q, static_cast<double>(-mi))) >
        1e-12 * std::pow(q, static_cast<double>(-mi)))
        return false;
    if (out) *out = mi;
    return true;
}

}  // namespace

QBetaBinomialParams QBetaBinomialParams::checked(double q, double mu, double nu,
                                                 std::optional<long long> y) {
    if (y && *y < 0) throw domain_error("phi: support size y must be >= 0");
    bool family_a = (q >= 0.0 && q < 1.0) && (mu >= 0.0 && mu < 1.0) && (nu <= mu);
    if (family_a) {
        if (!y && !(q < 1.0 && mu < 1.0))
            throw domain_error("phi: infinite support requires q, mu < 1");
        return {q, mu, nu, y};
    }
    if (q > 1.0) {
        long long m = 0, n = 0;
        if (is_integer_power(mu, q, &m) && is_integer_power(nu, q, &n) && m <= n && y &&
            *y <= n)
            return {q, mu, nu, y};
    }
    throw domain_error("phi: parameters fit neither admissible family");
}

SignedLog phi_weight(double q, double mu, double nu, long long s, long long y) {
    if (s < 0 || s > y) return SignedLog::zero();
    SignedLog den = qpoch(nu, q, y);
    if (den.is_zero()) throw singularity_error("phi: (nu;q)_y vanishes");
    SignedLog r = SignedLog::of(mu).pow_int(s);
    r *= qpoch(nu / mu, q, s);
    r *= qpoch(mu, q, y - s);
    r /= den;
    r *= qpoch(q, q, y);
    r /= qpoch(q, q, s) * qpoch(q, q, y - s);
    return r;
}

SignedLog phi_weight_inf(double q, double mu, double nu, long long s) {
    if (s < 0) return SignedLog::zero();
    SignedLog r = SignedLog::of(mu).pow_int(s);
    r *= qpoch(nu / mu, q, s);
    r /= qpoch(q, q, s);
    r *= qpoch_inf(mu, q);
    SignedLog den = qpoch_inf(nu, q);
    if (den.is_zero()) throw singularity_error("phi: (nu;q)_inf vanishes");
    r /= den;
    return r;
}

double phi_pmf(const QBetaBinomialParams& params, long long s) {
    if (s < 0) return 0.0;
    if (params.y) {
        if (s > *params.y) return 0.0;
        if (params.mu == 0.0) return s == 0 ? 1.0 : 0.0;  // point mass; nu <= mu = 0
        return phi_weight(params.q, params.mu, params.nu, s, *params.y).value();
    }
    if (params.mu == 0.0) return s == 0 ? 1.0 : 0.0;
    return phi_weight_inf(params.q, params.mu, params.nu, s).value();
}

long long phi_sample(const QBetaBinomialParams& params, RngStream& rng) {
    const double q = params.q, mu = params.mu, nu = params.nu;
    double u = rng.next_open();
    if (params.y) {
        long long y = *params.y;
        if (y == 0) return 0;
        if (mu == 0.0) return 0;
        double w = phi_pmf(params, 0);
        double cum = w;
        for (long long s = 0; s < y; ++s) {
            if (u <= cum) return s;
            double qs = std::pow(q, static_cast<double>(s));
            double qys = std::pow(q, static_cast<double>(y - s));
            w *= mu * (1.0 - (nu / mu) * qs) / (1.0 - q * qs) * (1.0 - qys) /
                 (1.0 - mu * qys / q);
            cum += w;
        }
        return y;  // remaining mass
    }
    // infinite support: sequential inversion, term ratio -> mu
    double w = phi_weight_inf(q, mu, nu, 0).value();
    double cum = w;
    double qs = 1.0;
    for (long long s = 0; s < 100000000; ++s) {
        if (u <= cum) return s;
        // certified tail: once remaining mass provably < 1e-14 and u is past
        // cum + bound, the draw is numerically impossible
        double ratio_bound = mu * (1.0 + std::fabs(nu / mu) * qs) / (1.0 - q * qs);
        if (ratio_bound < 1.0) {
            double bound = w * ratio_bound / (1.0 - ratio_bound);
            if (bound < 1e-14 && u > cum + bound)
                throw truncation_error("phi_sample: tail bound below draw");
        }
        w *= mu * (1.0 - (nu / mu) * qs) / (1.0 - q * qs);
        cum += w;
        qs *= q;
    }
    throw truncation_error("phi_sample: max terms exceeded");
}

QHypergeomParams QHypergeomParams::checked(double q, double a, double b, double c) {
    if (!(q > 0.0 && q < 1.0)) throw domain_error("psi: requires q in (0,1)");
    if (!(a < 1.0 && b < 1.0)) throw domain_error("psi: requires a, b < 1");
    if (!(c >= 0.0 && c < 1.0)) throw domain_error("psi: requires c in [0,1)");
    if (a * b == 0.0) throw domain_error("psi: use with_ratio for a*b = 0");
    double z = c / (a * b);
    if (!(z > 0.0 && z < 1.0)) throw domain_error("psi: requires c/(ab) in (0,1)");
    return {q, a, b, c, z};
}

QHypergeomParams QHypergeomParams::with_ratio(double q, double a, double b, double z) {
    if (!(q > 0.0 && q < 1.0)) throw domain_error("psi: requires q in (0,1)");
    if (!(a < 1.0 && b < 1.0)) throw domain_error("psi: requires a, b < 1");
    if (!(z > 0.0 && z < 1.0)) throw domain_error("psi: requires z in (0,1)");
    return {q, a, b, z * a * b, z};
}

namespace {

double psi_normalizer(const QHypergeomParams& p) {
    // (c;q)inf (z;q)inf / ((c/a;q)inf (c/b;q)inf) with c/a = z*b, c/b = z*a
    SignedLog r = qpoch_inf(p.c, p.q) * qpoch_inf(p.z, p.q);
    r /= qpoch_inf(p.z * p.b, p.q) * qpoch_inf(p.z * p.a, p.q);
    return r.value();
}

}  // namespace

double psi_pmf(const QHypergeomParams& params, long long p) {
    if (p < 0) return 0.0;
    SignedLog r = SignedLog::of(params.z).pow_int(p);
    r *= qpoch(params.a, params.q, p) * qpoch(params.b, params.q, p);
    r /= qpoch(params.q, params.q, p) * qpoch(params.c, params.q, p);
    return r.value() * psi_normalizer(params);
}

long long psi_sample(const QHypergeomParams& params, RngStream& rng) {
    const double q = params.q, a = params.a, b = params.b, c = params.c, z = params.z;
    double u = rng.next_open();
    double w = psi_normalizer(params);
    double cum = w;
    double qp = 1.0;
    for (long long p = 0; p < 100000000; ++p) {
        if (u <= cum) return p;
        double ratio_bound =
            z * (1.0 + std::fabs(a) * qp) * (1.0 + std::fabs(b) * qp) /
            ((1.0 - q * qp) * (1.0 - std::fabs(c) * qp));
        if (ratio_bound < 1.0) {
            double bound = w * ratio_bound / (1.0 - ratio_bound);
            if (bound < 1e-14 && u > cum + bound)
                throw truncation_error("psi_sample: tail bound below draw");
        }
        w *= z * (1.0 - a * qp) * (1.0 - b * qp) / ((1.0 - q * qp) * (1.0 - c * qp));
        cum += w;
        qp *= q;
    }
    throw truncation_error("psi_sample: max terms exceeded");
}

double nb_pmf(double r, double p, long long k) {
    if (r < 0.0 || p < 0.0 || p >= 1.0) throw domain_error("nb_pmf: invalid parameters");
    if (k < 0) return 0.0;
    if (k == 0) return std::pow(1.0 - p, r);
    // (1-p)^r p^k (r)_k / k! in logs
    double lg = r * std::log1p(-p) + k * std::log(p) + std::lgamma(r + k) -
                std::lgamma(r) - std::lgamma(k + 1.0);
    return (r == 0.0) ? 0.0 : std::exp(lg);
}

long long nb_sample(double r, double p, RngStream& rng) {
    if (r < 0.0 || p < 0.0 || p >= 1.0) throw domain_error("nb_sample: invalid parameters");
    if (r == 0.0 || p == 0.0) return 0;
    double u = rng.next_open();
    double w = std::pow(1.0 - p, r);
    double cum = w;
    for (long long k = 0; k < 100000000; ++k) {
        if (u <= cum) return k;
        w *= p * (r + k) / (k + 1.0);
        cum += w;
    }
    throw truncation_error("nb_sample: max terms exceeded");
}

double genbeta1_pdf(double c, double m, double n, double x) {
    if (!(m > 0.0 && n > 0.0 && c < 1.0)) throw domain_error("genbeta1: invalid parameters");
    if (!(x > 0.0 && x < 1.0)) throw domain_error("genbeta1: x outside (0,1)");
    double lg = m * std::log1p(-c) + std::lgamma(m + n) - std::lgamma(m) - std::lgamma(n) +
                (m - 1.0) * std::log(x) + (n - 1.0) * std::log1p(-x) -
                (m + n) * std::log1p(-c * x);
    return std::exp(lg);
}

double genbeta1_sample(double c, double m, double n, RngStream& rng) {
    if (!(m > 0.0 && n > 0.0 && c < 1.0)) throw domain_error("genbeta1: invalid parameters");
    double y = sample_beta(m, n, rng);
    return y / (1.0 - c * (1.0 - y));
}

NBB1Params NBB1Params::checked(double r, double p, double c, double m, double n) {
    if (!(r >= 0.0)) throw domain_error("nbb1: requires r >= 0");
    if (!(p >= 0.0 && p < 1.0)) throw domain_error("nbb1: requires p in [0,1)");
    if (!(c < 1.0)) throw domain_error("nbb1: requires c < 1");
    if (!(m > 0.0 && n > 0.0)) throw domain_error("nbb1: requires m, n > 0");
    return {r, p, c, m, n};
}

double nbb1_pdf(const NBB1Params& params, double x) {
    if (!(x > 0.0 && x < 1.0)) throw domain_error("nbb1_pdf: x outside (0,1)");
    double base = genbeta1_pdf(params.c, params.m, params.n, x);
    double arg = params.p * (1.0 - x) / (1.0 - params.c * x);
    double f = gauss_2f1(params.r, params.m + params.n, params.n, arg);
    return std::pow(1.0 - params.p, params.r) * base * f;
}

double nbb1_sample(const NBB1Params& params, RngStream& rng) {
    long long k = nb_sample(params.r, params.p, rng);
    return genbeta1_sample(params.c, params.m, params.n + static_cast<double>(k), rng);
}

double sample_normal(RngStream& rng) {
    double u1 = rng.next_open();
    double u2 = rng.next_open();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double sample_gamma(double shape, RngStream& rng) {
    if (!(shape > 0.0)) throw domain_error("sample_gamma: shape must be > 0");
    if (shape < 1.0) {
        // Marsaglia-Tsang boost for shape < 1
        double u = rng.next_open();
        return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = sample_normal(rng);
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = rng.next_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_beta(double m, double n, RngStream& rng) {
    double g1 = sample_gamma(m, rng);
    double g2 = sample_gamma(n, rng);
    double y = g1 / (g1 + g2);
    // keep draws strictly inside (0,1): a rounded endpoint would later read
    // as a tie or a division by zero in the Z recursion
    if (y <= 0.0) return std::numeric_limits<double>::min();
    if (y >= 1.0) return std::nextafter(1.0, 0.0);
    return y;
}

}  // namespace qhahn
