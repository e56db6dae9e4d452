#pragma once

#include <cstdint>
#include <vector>

#include "qhahn/kernel.hpp"
#include "qhahn/processes.hpp"

namespace qhahn {

/// Joint q-moment label: n_1 >= n_2 >= ... >= n_k >= 0 and a time t.
struct MomentSpec {
    std::vector<int> n;
    int t = 0;

    int order() const { return static_cast<int>(n.size()); }
    static MomentSpec checked(std::vector<int> n, int t);
};

/// n-vector <-> Boson occupation encoding: y_m = #{i : n_i = m}.
std::vector<long long> moments_to_occupation(const std::vector<int>& n, int sites);
std::vector<int> occupation_to_moments(const std::vector<long long>& y);

enum class ContourFamily { push_around_1, tasep_around_1, beta_around_0 };

/// Nested circles: for the push/tasep families circle A (around 1) must
/// contain q x circle B for A < B, i.e. r_A > (1-q) + q r_B; for the beta
/// family circle A (around 0) must contain circle B shifted by +1, i.e.
/// R_A > 1 + R_B. Radii are listed outermost first.
struct ContourSpec {
    ContourFamily family;
    std::vector<double> radii;

    int order() const { return static_cast<int>(radii.size()); }
};

/// Realize the nesting constraints with the innermost radius r_min and the
/// available slack distributed geometrically from the outside in. Throws
/// infeasible_contour_error naming the violated constraint.
ContourSpec plan_contours_push(int k, const PushParams& params, double r_min = 0.05);
ContourSpec plan_contours_tasep(int k, const TasepParams& params, double r_min = 0.05);
ContourSpec plan_contours_beta(int k, const BetaParams& params, double r_min = 0.05);

/// k-fold nested contour integrals by the trapezoid rule on circles
/// (spectrally accurate for these analytic integrands); the node count per
/// circle starts at points and doubles until two successive evaluations
/// agree to rel_tol (divergence_error past 2^14).
double push_moment_integral(const MomentSpec& spec, const PushParams& params,
                            const ContourSpec& contours, int points = 256,
                            double rel_tol = 1e-9);
double tasep_moment_integral(const MomentSpec& spec, const TasepParams& params,
                             const ContourSpec& contours, int points = 256,
                             double rel_tol = 1e-9);
double beta_moment_integral(const MomentSpec& spec, const BetaParams& params,
                            const ContourSpec& contours, int points = 256,
                            double rel_tol = 1e-9);

/// Same integrals for an arbitrary ordered index tuple (used by the
/// two-body boundary checks, where the tuple is not weakly decreasing).
double push_moment_integral_ordered(const std::vector<int>& n, int t,
                                    const PushParams& params, const ContourSpec& contours,
                                    int points = 256, double rel_tol = 1e-9);

struct McMoment {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t paths = 0;
    bool divergence_warning = false;  // mu >= q^k: the true moment is infinite
};

/// Monte Carlo estimate of E[prod_j q^{x_{n_j}(t) + n_j}] from step initial
/// data, with paths split deterministically across workers.
McMoment mc_push_moment(const MomentSpec& spec, const PushParams& params,
                        std::uint64_t paths, std::uint64_t seed, int workers = 1);

/// Monte Carlo estimate of U(t; n) = E[prod_j Z(n_j,t)^{-1}]. When
/// use_ztilde is set the estimator multiplies the stored Z~ values instead
/// (bit-identical by construction).
McMoment mc_beta_moment(const MomentSpec& spec, const BetaParams& params,
                        std::uint64_t paths, std::uint64_t seed, int workers = 1,
                        bool use_ztilde = false, bool resolve_ties = true);

}  // namespace qhahn
