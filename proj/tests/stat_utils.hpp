#pragma once

// Shared statistics helpers for the test suites: chi-square quantiles
// (Wilson-Hilferty), Kolmogorov-Smirnov distances, and the regularized
// incomplete beta function for beta-family CDFs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qhahn_test {

// Upper chi-square quantile via the Wilson-Hilferty cube approximation;
// accurate to a few percent, plenty for test gates.
inline double chi2_quantile(double p_upper_tail, double dof) {
    double z;
    if (p_upper_tail == 0.001) z = 3.090232306;
    else if (p_upper_tail == 0.01) z = 2.326347874;
    else if (p_upper_tail == 0.05) z = 1.644853627;
    else throw std::invalid_argument("chi2_quantile: unsupported tail");
    double a = 2.0 / (9.0 * dof);
    double c = 1.0 - a + z * std::sqrt(a);
    return dof * c * c * c;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i;
        else ++j;
        double fa = static_cast<double>(i) / a.size();
        double fb = static_cast<double>(j) / b.size();
        d = std::max(d, std::fabs(fa - fb));
    }
    return d;
}

// critical value c(alpha) sqrt((n+m)/(n m)); c(0.01) = 1.628
inline double ks_two_sample_critical(double alpha, std::size_t n, std::size_t m) {
    double c;
    if (alpha == 0.01) c = 1.628;
    else if (alpha == 0.05) c = 1.358;
    else throw std::invalid_argument("ks critical: unsupported alpha");
    return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

inline double ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double f = cdf(x[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / x.size()));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / x.size() - f));
    }
    return d;
}

inline double ks_one_sample_critical(double alpha, std::size_t n) {
    double c;
    if (alpha == 0.01) c = 1.628;
    else if (alpha == 0.05) c = 1.358;
    else throw std::invalid_argument("ks critical: unsupported alpha");
    return c / std::sqrt(static_cast<double>(n));
}

// Regularized incomplete beta I_x(a,b) by the Lentz continued fraction.
inline double betacf(double a, double b, double x) {
    const int maxit = 300;
    const double eps = 3e-14, fpmin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= maxit; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

inline double inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - lbeta) *
                     betacf(b, a, 1.0 - x) / b;
}

// Simpson quadrature with the x = sin^2(theta) substitution, which smooths
// beta-type endpoint singularities x^{m-1} (1-x)^{n-1}.
inline double integrate01(const std::function<double(double)>& f, int n = 20000) {
    const double pi_half = 1.5707963267948966;
    auto g = [&](double th) {
        double s = std::sin(th), c = std::cos(th);
        double x = s * s;
        if (x <= 0.0 || x >= 1.0) return 0.0;
        return f(x) * 2.0 * s * c;
    };
    double h = pi_half / n;
    double total = g(0.0) + g(pi_half);
    for (int i = 1; i < n; ++i) total += g(i * h) * (i % 2 ? 4.0 : 2.0);
    return total * h / 3.0;
}

}  // namespace qhahn_test
