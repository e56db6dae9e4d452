#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "qhahn/signed_log.hpp"

namespace qhahn {

/// Controls truncation of infinite q-products and series. The underlying
/// quantities are exact; truncation is purely an evaluation concern.
struct TruncationPolicy {
    double tail_tol = 1e-17;        // relative magnitude below which tails are dropped
    std::size_t max_terms = 1000000;  // hard cap on summed/multiplied terms
};

/// Finite q-Pochhammer symbol (a; q)_n with the three-case definition:
/// n = 0 -> 1;  n >= 1 -> prod_{i=0}^{n-1} (1 - a q^i);
/// n <= -1 -> prod_{i=n}^{-1} (1 - a q^i)^{-1}.
/// Throws singularity_error if a reciprocal factor vanishes (within 1e-14
/// relative) and domain_error for n < 0 with |q| >= 1.
SignedLog qpoch(double a, double q, long long n);

/// Infinite q-Pochhammer symbol (a; q)_infty, |q| < 1.
SignedLog qpoch_inf(double a, double q, const TruncationPolicy& policy = {});

/// (a; q)_infty / (b; q)_infty evaluated as one product of ratios. Stable
/// when a and b are close (the tails cancel), e.g. for q-Gamma ratios.
SignedLog qpoch_ratio_inf(double a, double b, double q, const TruncationPolicy& policy = {});

/// Termination index of a basic hypergeometric series: the smallest integer
/// y in [0, limit] with upper parameter a == q^{-y} within 1e-12 relative,
/// or -1 if none.
long long terminating_index(std::span<const double> upper, double q, long long limit);

/// Unilateral basic hypergeometric series
///   sum_n prod_j (upper_j; q)_n / (prod_j (lower_j; q)_n (q;q)_n) z^n.
/// Requires a terminating upper parameter or |q|, |z| < 1 (divergence_error
/// otherwise); throws pole_error when a lower-parameter factor vanishes
/// before termination. Terminating series are exact finite sums and do not
/// depend on the policy.
SignedLog basic_hyp(std::span<const double> upper, std::span<const double> lower,
                    double q, double z, const TruncationPolicy& policy = {});

/// Partial sum of a 4phi3 series through term index p (inclusive).
SignedLog incomplete_4phi3(const std::array<double, 4>& upper,
                           const std::array<double, 3>& lower,
                           double q, double z, long long p);

/// Gauss hypergeometric 2F1(a, b; c; z) for real z < 1: direct power series
/// for |z| <= 0.8, Euler transformation on (0.8, 1), Pfaff transformation
/// for z < -0.8.
double gauss_2f1(double a, double b, double c, double z);

/// q-Gamma function Gamma_q(x) = (q;q)_inf / (q^x;q)_inf * (1-q)^{1-x},
/// 0 < q < 1. Throws pole_error at nonpositive integer x.
double q_gamma(double x, double q);

}  // namespace qhahn
