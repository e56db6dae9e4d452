#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qhahn/kernel.hpp"
#include "qhahn/processes.hpp"

namespace qhahn {

/// Outcome of a numerical identity/duality verification.
struct DualityReport {
    double lhs = 0.0, rhs = 0.0;
    double abs_err = 0.0, rel_err = 0.0;
    double truncation_bound = 0.0;
    double tolerance = 0.0;
    bool pass = false;  // rel_err <= tolerance and truncation_bound <= tolerance/10
    std::string instance;
};

/// Duality functional H(x, y) = prod_i q^{y_i (x_i + i)}, zero when y_0 > 0.
double duality_functional(const ParticleConfig& x, const BosonConfig& y, double q);

/// q-Hahn TASEP duality (both operators with alpha = bmu): compares
/// (P^TASEP H)(x,y) against sum_{y'} P^Boson(y,y') H(x,y'). The first
/// particle's infinite jump sum is truncated with a certified phi tail.
DualityReport tasep_duality_check(const ParticleConfig& x, const BosonConfig& y,
                                  const TasepParams& params, double tol = 1e-10);

/// q-Hahn PushTASEP duality:
///   mu^k  sum_{x',y'} P^Push(x,x') H(x',y') P^Boson_{q,q/mu,nu}(y,y')
/// = nu^k  sum_{y''}   H(x,y'')  P^Boson_{q,q/nu,nu}(y,y'').
/// Requires mu < q^k (the x' sums converge at geometric rate mu q^{-k});
/// truncation is certified by geometric extrapolation at that rate.
DualityReport push_duality_check(const ParticleConfig& x, const BosonConfig& y,
                                 const PushParams& params, double tol = 1e-8);

/// The main q-identity behind the duality induction step: for y >= 0,
/// a binomial-type sum in t equals a (s, L)-sum against P_{ell,g}(L) with
/// weights q^{-L(y-s)}. Requires mu q^{-y} < 1.
DualityReport main_identity_check(long long ell, long long g, long long y,
                                  const PushParams& params, double tol = 1e-9);

/// The rational reformulation (finite sums on both sides).
DualityReport rational_identity_check(long long ell, long long g, long long y,
                                      const PushParams& params, double tol = 1e-10);

/// The incomplete-4phi3 four-term identity with closed-form remainder
/// (proved by induction on p); gamma is a generic parameter.
DualityReport proof10_check(long long p, long long ell, long long x, double gamma,
                            long long k, double mu, double q, double tol = 1e-10);

/// True evolution equations:
/// mu^k P^Boson_{q,q/mu,nu} v(t+1;.) = nu^k P^Boson_{q,q/nu,nu} v(t;.),
/// with v the nested contour integrals.
DualityReport evolution_check(const std::vector<int>& n, int t, const PushParams& params,
                              double tol = 1e-8);

/// Two-body boundary condition at n_i = n_{i+1}: the four-term contour
/// combination vanishes (absolute comparison against 0).
DualityReport boundary_check(const std::vector<int>& n, int i, int t,
                             const PushParams& params, double tol = 1e-9);

/// q-beta-binomial symmetry (self-duality):
/// sum_s phi(s|y) q^{sx} = sum_t phi(t|x) q^{ty}.
DualityReport phi_symmetry_check(double q, double mu, double nu, long long x, long long y,
                                 double tol = 1e-11);

/// Randomized suites with a fixed seed; every report uses the given tol.
std::vector<DualityReport> push_duality_suite(int instances, std::uint64_t seed,
                                              double tol = 1e-8);
std::vector<DualityReport> tasep_duality_suite(int instances, std::uint64_t seed,
                                               double tol = 1e-10);
/// which: "main-identity" | "rational-identity" | "proof10"
std::vector<DualityReport> identity_suite(const std::string& which, int instances,
                                          std::uint64_t seed, double tol = 1e-9);
std::vector<DualityReport> evolution_suite(int instances, std::uint64_t seed,
                                           double tol = 1e-8);
std::vector<DualityReport> symmetry_suite(int instances, std::uint64_t seed,
                                          double tol = 1e-11);

}  // namespace qhahn
