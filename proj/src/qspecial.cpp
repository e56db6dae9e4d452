#include "qhahn/qspecial.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qhahn/errors.hpp"

namespace qhahn {

namespace {

// log(|1 - t|), accurate for t near 0.
double log1m_abs(double t) {
    if (std::fabs(t) < 0.5) return std::log1p(-t);
    return std::log(std::fabs(1.0 - t));
}

SignedLog factor(double t) {
    double f = 1.0 - t;
    if (f == 0.0) return SignedLog::zero();
    return SignedLog::from_log(log1m_abs(t), f > 0 ? 1 : -1);
}

bool nearly_vanishes(double t) {
    // |1 - t| <= 1e-14 * (1 + |t|)
    return std::fabs(1.0 - t) <= 1e-14 * (1.0 + std::fabs(t));
}

}  // namespace

SignedLog qpoch(double a, double q, long long n) {
    if (n == 0) return SignedLog::one();
    SignedLog r = SignedLog::one();
    if (n > 0) {
        double t = a;
        for (long long i = 0; i < n; ++i) {
            r *= factor(t);
            if (r.is_zero()) return r;  // exact zero; remaining factors moot
            t *= q;
        }
        return r;
    }
    if (std::fabs(q) >= 1.0)
        throw domain_error("qpoch: negative index requires |q| < 1");
    if (q == 0.0) throw domain_error("qpoch: negative index requires q != 0");
    for (long long i = n; i < 0; ++i) {
        double t = a * std::pow(q, static_cast<double>(i));
        if (nearly_vanishes(t))
            throw singularity_error("qpoch: reciprocal factor 1 - a q^i vanishes");
        r /= factor(t);
    }
    return r;
}

SignedLog qpoch_inf(double a, double q, const TruncationPolicy& policy) {
    if (std::fabs(q) >= 1.0)
        throw divergence_error("qpoch_inf: requires |q| < 1");
    SignedLog r = SignedLog::one();
    double t = a;
    for (std::size_t i = 0; i < policy.max_terms; ++i) {
        if (std::fabs(t) < policy.tail_tol) break;
        r *= factor(t);
        if (r.is_zero()) return r;
        t *= q;
    }
    return r;
}

SignedLog qpoch_ratio_inf(double a, double b, double q, const TruncationPolicy& policy) {
    if (std::fabs(q) >= 1.0)
        throw divergence_error("qpoch_ratio_inf: requires |q| < 1");
    SignedLog r = SignedLog::one();
    double ta = a, tb = b;
    for (std::size_t i = 0; i < policy.max_terms; ++i) {
        if (std::fabs(ta) < policy.tail_tol && std::fabs(tb) < policy.tail_tol) break;
        if (nearly_vanishes(tb))
            throw singularity_error("qpoch_ratio_inf: denominator factor vanishes");
        r *= factor(ta);
        r /= factor(tb);
        ta *= q;
        tb *= q;
    }
    return r;
}

long long terminating_index(std::span<const double> upper, double q, long long limit) {
    long long best = -1;
    for (double a : upper) {
        if (a <= 0.0) continue;
        // a == q^{-y}  <=>  y == -log(a)/log(q)
        double lq = std::log(std::fabs(q));
        if (lq == 0.0) continue;
        double yf = -std::log(a) / lq;
        long long y = std::llround(yf);
        if (y < 0 || y > limit) continue;
        double target = std::pow(q, static_cast<double>(-y));
        if (std::fabs(a - target) <= 1e-12 * std::fabs(target)) {
            if (best < 0 || y < best) best = y;
        }
    }
    return best;
}

SignedLog basic_hyp(std::span<const double> upper, std::span<const double> lower,
                    double q, double z, const TruncationPolicy& policy) {
    if (z == 0.0) return SignedLog::one();
    long long nterm = terminating_index(upper, q, static_cast<long long>(policy.max_terms));
    if (nterm < 0 && !(std::fabs(q) < 1.0 && std::fabs(z) < 1.0))
        throw divergence_error("basic_hyp: series neither terminating nor |q|,|z| < 1");

    LogAccumulator acc;
    SignedLog term = SignedLog::one();
    acc.add(term);
    double qn = 1.0;  // q^n
    long long nmax = (nterm >= 0) ? nterm : static_cast<long long>(policy.max_terms);
    for (long long n = 0; n < nmax; ++n) {
        SignedLog ratio = SignedLog::of(z);
        for (double a : upper) ratio *= factor(a * qn);
        for (double b : lower) {
            double t = b * qn;
            if (nearly_vanishes(t))
                throw pole_error("basic_hyp: lower-parameter q-Pochhammer vanishes");
            ratio /= factor(t);
        }
        double tq = q * qn;
        if (nearly_vanishes(tq))
            throw pole_error("basic_hyp: (q;q)_n factor vanishes");
        ratio /= factor(tq);
        term *= ratio;
        acc.add(term);
        qn *= q;
        if (nterm < 0 && !term.is_zero()) {
            SignedLog tot = acc.total();
            if (!tot.is_zero() && term.log_mag < tot.log_mag + std::log(policy.tail_tol)) break;
        }
        if (term.is_zero()) break;
    }
    return acc.total();
}

SignedLog incomplete_4phi3(const std::array<double, 4>& upper,
                           const std::array<double, 3>& lower,
                           double q, double z, long long p) {
    if (p < 0) throw domain_error("incomplete_4phi3: p must be nonnegative");
    LogAccumulator acc;
    SignedLog term = SignedLog::one();
    acc.add(term);
    double qn = 1.0;
    for (long long n = 0; n < p; ++n) {
        SignedLog ratio = SignedLog::of(z);
        for (double a : upper) ratio *= factor(a * qn);
        for (double b : lower) {
            double t = b * qn;
            if (nearly_vanishes(t))
                throw pole_error("incomplete_4phi3: lower-parameter pole before index p");
            ratio /= factor(t);
        }
        double tq = q * qn;
        if (nearly_vanishes(tq))
            throw pole_error("incomplete_4phi3: (q;q)_n factor vanishes");
        ratio /= factor(tq);
        term *= ratio;
        acc.add(term);
        qn *= q;
        if (term.is_zero()) break;
    }
    return acc.total();
}

namespace {

double hyp2f1_series(double a, double b, double c, double z) {
    double term = 1.0, total = 1.0, comp = 0.0;
    for (int n = 0; n < 200000; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        double y = term - comp;
        double t = total + y;
        comp = (t - total) - y;
        total = t;
        if (std::fabs(term) <= 1e-17 * std::fabs(total) && n > 2) return total;
        if (term == 0.0) return total;
    }
    return total;
}

bool near_nonpositive_integer(double c) {
    if (c > 0.5) return false;
    double r = std::llround(c);
    return r <= 0.0 && std::fabs(c - r) <= 1e-12 * (1.0 + std::fabs(c));
}

}  // namespace

double gauss_2f1(double a, double b, double c, double z) {
    if (z >= 1.0) throw domain_error("gauss_2f1: requires z < 1");
    if (near_nonpositive_integer(c))
        throw domain_error("gauss_2f1: c is a nonpositive integer");
    if (z == 0.0) return 1.0;
    if (z > 0.8) {
        // Euler's transformation: (1-z)^{c-a-b} 2F1(c-a, c-b; c; z)
        return std::pow(1.0 - z, c - a - b) * hyp2f1_series(c - a, c - b, c, z);
    }
    if (z < -0.8) {
        // Pfaff: (1-z)^{-a} 2F1(a, c-b; c; z/(z-1)), argument in (0, 1)
        double w = z / (z - 1.0);
        double f = (w > 0.8) ? std::pow(1.0 - w, c - a - (c - b)) * hyp2f1_series(c - a, b, c, w)
                             : hyp2f1_series(a, c - b, c, w);
        return std::pow(1.0 - z, -a) * f;
    }
    return hyp2f1_series(a, b, c, z);
}

double q_gamma(double x, double q) {
    if (!(q > 0.0 && q < 1.0)) throw domain_error("q_gamma: requires 0 < q < 1");
    if (near_nonpositive_integer(x)) throw pole_error("q_gamma: pole at nonpositive integer");
    double qx = std::pow(q, x);
    SignedLog r = qpoch_ratio_inf(q, qx, q);
    r *= SignedLog::from_log((1.0 - x) * std::log(1.0 - q), 1);
    return r.value();
}

}  // namespace qhahn
