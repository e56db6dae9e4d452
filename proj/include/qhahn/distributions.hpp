#pragma once

#include <optional>

#include "qhahn/rng.hpp"
#include "qhahn/signed_log.hpp"

namespace qhahn {

// ---------------------------------------------------------------------------
// q-beta-binomial distribution phi_{q,mu,nu}( . | y )
// ---------------------------------------------------------------------------

/// Parameters of the q-beta-binomial law. Two admissible families:
///   (A) 0 <= q < 1, 0 <= mu < 1, nu <= mu;
///   (B) q > 1, mu = q^{-m}, nu = q^{-n}, integers 0 <= m <= n, y <= n.
/// y absent means the y -> infinity law (family A only, mu > 0... mu < 1).
struct QBetaBinomialParams {
    double q, mu, nu;
    std::optional<long long> y;  // nullopt = infinite support

    /// Validates against the two admissible families; throws domain_error.
    static QBetaBinomialParams checked(double q, double mu, double nu,
                                       std::optional<long long> y);
};

/// Raw q-beta-binomial weight phi_{q,mu,nu}(s|y) for finite y; defined for
/// arbitrary real parameters (it is a rational function), which the Boson
/// operator and the kernel exploit with mu-arguments outside [0,1).
/// Throws singularity_error when (nu;q)_y vanishes.
SignedLog phi_weight(double q, double mu, double nu, long long s, long long y);

/// phi_{q,mu,nu}(s | infinity), |q| < 1, |mu| < 1.
SignedLog phi_weight_inf(double q, double mu, double nu, long long s);

/// Validated pmf; 0 outside the support.
double phi_pmf(const QBetaBinomialParams& params, long long s);

/// Exact draw by sequential CDF inversion; for y = infinity the inversion
/// carries a geometric tail bound (term ratio -> mu) and throws
/// truncation_error if the remainder cannot be certified below 1e-14.
long long phi_sample(const QBetaBinomialParams& params, RngStream& rng);

// ---------------------------------------------------------------------------
// q-hypergeometric distribution psi_{q,a,b,c}
// ---------------------------------------------------------------------------

/// psi parameters; z = c/(ab) is carried explicitly so that degenerate
/// a = 0 or b = 0 (then c = 0 with z finite) stays well-defined.
struct QHypergeomParams {
    double q, a, b, c;
    double z;  // = c/(ab)

    static QHypergeomParams checked(double q, double a, double b, double c);
    /// Build from the ratio z = c/(ab) directly (c = z*a*b).
    static QHypergeomParams with_ratio(double q, double a, double b, double z);
};

/// pmf at p >= 0 (0 for p < 0).
double psi_pmf(const QHypergeomParams& params, long long p);

long long psi_sample(const QHypergeomParams& params, RngStream& rng);

// ---------------------------------------------------------------------------
// Distributions for the q -> 1 beta limit
// ---------------------------------------------------------------------------

/// Negative binomial NB(r,p)[k] = (1-p)^r p^k (r)_k / k!.
double nb_pmf(double r, double p, long long k);
long long nb_sample(double r, double p, RngStream& rng);

/// Generalized beta of the first kind B1(c,m,n) on (0,1):
///   (1-c)^m Gamma(m+n)/(Gamma(m)Gamma(n)) x^{m-1}(1-x)^{n-1}/(1-cx)^{m+n}.
double genbeta1_pdf(double c, double m, double n, double x);

/// Draw: Y ~ Beta(m,n), return Y / (1 - c(1-Y)).
double genbeta1_sample(double c, double m, double n, RngStream& rng);

struct NBB1Params {
    double r, p, c, m, n;

    static NBB1Params checked(double r, double p, double c, double m, double n);
};

/// NBB1(r,p,c,m,n) density: the B1 mixture over a negative binomial index,
/// with the 2F1 factor evaluated by gauss_2f1.
double nbb1_pdf(const NBB1Params& params, double x);

/// Composition draw: k ~ NB(r,p), then B1(c, m, n+k).
double nbb1_sample(const NBB1Params& params, RngStream& rng);

/// Map a draw X to X^{-1} (Beta^{-1} / NBBeta^{-1} conventions).
inline double inverse_draw(double x) { return 1.0 / x; }

// ---------------------------------------------------------------------------
// Elementary samplers
// ---------------------------------------------------------------------------

double sample_normal(RngStream& rng);
double sample_gamma(double shape, RngStream& rng);
double sample_beta(double m, double n, RngStream& rng);

}  // namespace qhahn
