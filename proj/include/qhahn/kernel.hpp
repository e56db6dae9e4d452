#pragma once

#include <string>
#include <vector>

#include "qhahn/rng.hpp"

namespace qhahn {

/// q-Hahn PushTASEP parameters. The admissible range is
///   q in (0,1), 0 < mu < 1, -1 < nu <= min(mu, sqrt(q)).
struct PushParams {
    double q, mu, nu;

    /// Validates the range above; throws domain_error.
    static PushParams checked(double q, double mu, double nu);

    /// No range check (negative tests probe out-of-range behavior).
    static PushParams unchecked(double q, double mu, double nu) { return {q, mu, nu}; }

    bool in_range() const;
};

enum class KernelMethod { automatic, sum, phi87, cross_checked };

/// One-particle update probability P_{ell,g}(L) as the phi x psi sum over
/// the push distance p. Throws pole_error when ell > g and mu*nu lies
/// within 1e-8 relative of q^j for an integer j in [1, ell-g] (the phi
/// denominator vanishes; the 8phi7 form is the fallback).
double p_update_sum(const PushParams& params, long long ell, long long g, long long L);

/// P_{ell,g}(L) through the two 8phi7 representations (ell < g and
/// ell >= g); every prefactor and series term is nonnegative for in-range
/// parameters, so no cancellation occurs. Requires nu != 0.
double p_update_phi87(const PushParams& params, long long ell, long long g, long long L);

/// Dispatching evaluator: nu <= 0 uses the sum form (each factor is then a
/// probability), nu > 0 the 8phi7 form; near nu == mu the 8phi7 form
/// degenerates and the sum form with the mu*nu = q^j continuity limit is
/// used instead. cross_checked evaluates both and verifies agreement
/// wherever the sum form retains enough precision.
double p_update(const PushParams& params, long long ell, long long g, long long L,
                KernelMethod method = KernelMethod::automatic);

/// First-particle jump law phi_{q,mu,nu}(ell | infinity).
double p_first(const PushParams& params, long long ell);

/// nu = 0 degeneration (geometric q-PushTASEP single-sum kernel).
double kernel_nu0(const PushParams& params, long long ell, long long g, long long L);

/// q = nu = 0 degeneration: (1-mu) mu^{L - max(0, ell-g)} on the support.
double kernel_geometric(double mu, long long ell, long long g, long long L);

/// Geometric-Bernoulli distribution gB(alpha, beta; k).
double gb_pmf(double alpha, double beta, long long k);

/// q = 0 degeneration of the kernel: the four-case gB table. Parameter
/// validity: (-1 <= nu <= 0, 0 <= mu < 1) or
/// (0 < nu < 1, nu/(1 - nu + nu^2) <= mu < 1).
double kernel_q0(double mu, double nu, long long ell, long long g, long long L);

/// Certified upper bound on sum_{L > L0} |P_{ell,g}(L)| via the
/// phi-envelope x psi-envelope geometric tail. Returns +inf if the
/// envelope ratio is not yet below 1 at L0.
double kernel_tail_bound(const PushParams& params, long long ell, long long g, long long L0);

/// Certified upper bound on sum_{L > L0} |P_{ell,g}(L)| q^{-w L}: the
/// pointwise envelope at L0+1 summed geometrically at ratio
/// (envelope ratio) x q^{-w}. Returns +inf when that ratio is >= 1.
double kernel_weighted_tail_bound(const PushParams& params, long long ell, long long g,
                                  long long L0, double w);

/// Draw from phi_{q,mu,nu}(.|inf) / from P_{ell,g} by sequential CDF
/// inversion. Samplers cache the q-Pochhammer normalizers, so reuse one
/// instance across draws with the same parameters.
class JumpSampler {
  public:
    explicit JumpSampler(const PushParams& params);

    long long first(RngStream& rng) const;
    long long jump(long long ell, long long g, RngStream& rng) const;

    const PushParams& params() const { return params_; }

  private:
    PushParams params_;
    double log_phi_inf_norm_;  // log[(mu;q)_inf / (nu;q)_inf]
};

long long sample_first(const PushParams& params, RngStream& rng);
long long sample_jump(const PushParams& params, long long ell, long long g, RngStream& rng);

/// Tabulated kernel row with certified tail.
struct KernelTable {
    long long ell = 0, g = 0;
    long long L_min = 0;
    std::vector<double> prob;  // prob[i] = P(L_min + i)
    std::string method;        // "sum" | "phi87" | "cross-checked"
    double tail_bound = 0.0;   // certified mass bound beyond the table

    double p(long long L) const;
    double total_mass() const;
    long long max_L() const { return L_min + static_cast<long long>(prob.size()) - 1; }

    /// Extends L until the accumulated mass reaches 1 - mass_tol (and at
    /// least through cover_L, when given).
    static KernelTable build(const PushParams& params, long long ell, long long g,
                             double mass_tol = 1e-12,
                             KernelMethod method = KernelMethod::automatic,
                             long long cover_L = -1);
};

}  // namespace qhahn
