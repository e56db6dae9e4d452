#include "qhahn/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "qhahn/distributions.hpp"
#include "qhahn/errors.hpp"
#include "qhahn/qspecial.hpp"
#include "qhahn/signed_log.hpp"

namespace qhahn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// mu*nu = q^j proximity thresholds: inside kPoleExact the continuity limit
// is taken (the vanishing numerator/denominator pair cancels exactly);
// between kPoleExact and kPoleDetect the cancellation is too ill-conditioned
// for doubles and the sum form refuses.
constexpr double kPoleDetect = 1e-8;
constexpr double kPoleExact = 1e-12;

double log1m_abs(double t) {
    if (std::fabs(t) < 0.5) return std::log1p(-t);
    return std::log(std::fabs(1.0 - t));
}

SignedLog factor_sl(double t) {
    double f = 1.0 - t;
    if (f == 0.0) return SignedLog::zero();
    return SignedLog::from_log(log1m_abs(t), f > 0 ? 1 : -1);
}

// j with |mu*nu - q^j| <= tol*q^j for an integer j in [1, ell-g], or 0.
long long munu_pole_index(const PushParams& p, long long ell, long long g, double tol) {
    if (ell <= g) return 0;
    double munu = p.mu * p.nu;
    if (munu <= 0.0) return 0;
    long long j = std::llround(std::log(munu) / std::log(p.q));
    if (j < 1 || j > ell - g) return 0;
    double qj = std::pow(p.q, static_cast<double>(j));
    return (std::fabs(munu - qj) <= tol * qj) ? j : 0;
}

// phi_{q^{-1}, q^g, mu nu q^{g-1}}(p | ell) for p = 0..ell. With continuity
// enabled and mu*nu = q^j (j in [1, ell-g]) the vanishing factor pair
// (1 - mu nu q^{-j}) in numerator and denominator is cancelled exactly.
std::vector<SignedLog> push_phi_weights(const PushParams& pp, long long ell, long long g,
                                        bool continuity) {
    const double q = pp.q, mu = pp.mu, nu = pp.nu;
    long long jstar = munu_pole_index(pp, ell, g, kPoleDetect);
    if (jstar != 0) {
        if (!continuity || munu_pole_index(pp, ell, g, kPoleExact) == 0)
            throw pole_error("p_update_sum: mu*nu within 1e-8 of q^j, phi denominator vanishes");
    }

    const double qh = 1.0 / q;  // base of the push phi
    std::vector<SignedLog> w(ell + 1);

    // denominator (mu nu q^{g-1}; q^{-1})_ell, skipping the cancelled factor
    SignedLog den = SignedLog::one();
    for (long long i = 0; i < ell; ++i) {
        if (jstar != 0 && i == g - 1 + jstar) continue;
        den *= factor_sl(mu * nu * std::pow(q, static_cast<double>(g - 1 - i)));
    }
    if (den.is_zero()) throw singularity_error("p_update_sum: phi denominator vanishes");

    // n2[p] = (q^g; q^{-1})_{ell-p}, built descending (exact zeros for p < ell-g)
    std::vector<SignedLog> n2(ell + 1);
    n2[ell] = SignedLog::one();
    for (long long p = ell - 1; p >= 0; --p)
        n2[p] = n2[p + 1] * factor_sl(std::pow(q, static_cast<double>(g - (ell - p - 1))));

    SignedLog n1 = SignedLog::one();           // (mu nu / q; q^{-1})_p
    SignedLog qb = SignedLog::one();           // q-binomial (ell, p) at base q^{-1}
    SignedLog mhat_pow = SignedLog::one();     // (q^g)^p
    const SignedLog mhat = SignedLog::of(std::pow(q, static_cast<double>(g)));
    for (long long p = 0; p <= ell; ++p) {
        if (p > 0) {
            if (!(jstar != 0 && p == jstar))
                n1 *= factor_sl(mu * nu * std::pow(q, static_cast<double>(-p)));
            qb *= factor_sl(std::pow(qh, static_cast<double>(ell - p + 1)));
            qb /= factor_sl(std::pow(qh, static_cast<double>(p)));
            mhat_pow *= mhat;
        }
        if (jstar != 0 && p < jstar) {
            w[p] = SignedLog::zero();  // continuity limit: exact support zero
            continue;
        }
        w[p] = mhat_pow * n1 * n2[p] * qb / den;
    }
    return w;
}

// psi parameters of the p-th summand: a = nu q^p / mu, b = nu q^g,
// c = nu^2 q^{g+p}, term ratio -> mu.
struct PsiPart {
    double a, b, c;
    SignedLog norm;  // (c;q)inf (mu;q)inf / ((mu nu q^g;q)inf (nu q^p;q)inf)
};

PsiPart psi_part(const PushParams& pp, long long g, long long p) {
    const double q = pp.q, mu = pp.mu, nu = pp.nu;
    PsiPart ps;
    ps.a = nu * std::pow(q, static_cast<double>(p)) / mu;
    ps.b = nu * std::pow(q, static_cast<double>(g));
    ps.c = nu * nu * std::pow(q, static_cast<double>(g + p));
    ps.norm = qpoch_inf(ps.c, q) * qpoch_inf(mu, q);
    ps.norm /= qpoch_inf(mu * nu * std::pow(q, static_cast<double>(g)), q) *
               qpoch_inf(nu * std::pow(q, static_cast<double>(p)), q);
    return ps;
}

double psi_ratio(const PsiPart& ps, double q, double mu, long long m) {
    double qm = std::pow(q, static_cast<double>(m));
    return mu * (1.0 - ps.a * qm) * (1.0 - ps.b * qm) /
           ((1.0 - q * qm) * (1.0 - ps.c * qm));
}

// Envelope ratio bound: decreasing in m and >= |psi(m+1)/psi(m)| for all m' >= m.
double psi_ratio_bound(const PsiPart& ps, double q, double mu, long long m) {
    double qm = std::pow(q, static_cast<double>(m));
    return mu * (1.0 + std::fabs(ps.a) * qm) * (1.0 + std::fabs(ps.b) * qm) /
           ((1.0 - q * qm) * (1.0 - std::fabs(ps.c) * qm));
}

// Incremental evaluator of the phi x psi sum: P(L) for L = 0, 1, 2, ...
class SumEval {
  public:
    SumEval(const PushParams& pp, long long ell, long long g, bool continuity)
        : pp_(pp), ell_(ell), g_(g), w_(push_phi_weights(pp, ell, g, continuity)) {
        psi_.reserve(ell + 1);
        cur_.resize(ell + 1);
    }

    // P(L) at the current position, advancing by one afterwards.
    double next() { return next_with_condition(nullptr); }

    double next_with_condition(double* condition) {
        const long long L = L_;
        if (L <= ell_) {
            psi_.push_back(psi_part(pp_, g_, L));
            cur_[L] = psi_.back().norm;  // psi_L(0)
        }
        LogAccumulator acc;
        long long pmax = std::min(ell_, L);
        for (long long p = 0; p <= pmax; ++p) acc.add(w_[p] * cur_[p]);
        for (long long p = 0; p <= pmax; ++p)
            cur_[p].mul_real(psi_ratio(psi_[p], pp_.q, pp_.mu, L - p));
        ++L_;
        if (condition) *condition = acc.condition();
        return acc.total().value();
    }

    long long position() const { return L_; }

  private:
    PushParams pp_;
    long long ell_, g_;
    std::vector<SignedLog> w_;
    std::vector<PsiPart> psi_;
    std::vector<SignedLog> cur_;  // cur_[p] = psi_p(L - p)
    long long L_ = 0;
};

// Evaluator of the two 8phi7 representations. The very-well-poised pair
// (q sigma^{1/2}, -q sigma^{1/2}) / (sigma^{1/2}, -sigma^{1/2}) is folded
// into the closed ratio (1 - sigma q^{2n})/(1 - sigma), which removes the
// spurious sigma -> 1 singularity at nu = sqrt(q), ell = g.
class Phi87Eval {
  public:
    Phi87Eval(const PushParams& pp, long long ell, long long g)
        : pp_(pp), ell_(ell), g_(g) {
        const double q = pp.q, mu = pp.mu, nu = pp.nu;
        if (nu == 0.0) throw domain_error("p_update_phi87: requires nu != 0");
        case1_ = ell < g;
        d_ = case1_ ? g - ell : ell - g;
        sigma_ = nu * nu * std::pow(q, static_cast<double>(d_ - 1));
        double qd = std::pow(q, static_cast<double>(d_));
        if (case1_) {
            static_upper_ = {std::pow(q, static_cast<double>(-ell)), nu * nu / q,
                             mu * nu * qd, nu};
            static_lower_ = {q * qd, nu / mu, nu * qd,
                             nu * nu * std::pow(q, static_cast<double>(g))};
        } else {
            static_upper_ = {std::pow(q, static_cast<double>(-g)), nu * nu / q, mu * nu,
                             nu * qd};
            static_lower_ = {q * qd, nu / mu * qd, nu,
                             nu * nu * std::pow(q, static_cast<double>(ell))};
        }
        L_ = L_min();
        pref_ = full_prefactor(L_);
    }

    long long L_min() const { return case1_ ? 0 : ell_ - g_; }

    // P(L) at the current position, advancing by one afterwards.
    double next() {
        double v = eval_at(L_, pref_);
        pref_.mul_real(pref_ratio(L_));
        ++L_;
        return v;
    }

    double value(long long L) {
        if (L < L_min()) return 0.0;
        if (L != L_) {
            L_ = L;
            pref_ = full_prefactor(L);
        }
        return next();
    }

  private:
    double series(long long L) const {
        const double q = pp_.q, mu = pp_.mu, nu = pp_.nu;
        const long long M = case1_ ? L : L - ell_ + g_;
        const long long nmax = case1_ ? std::min(ell_, L) : std::min(g_, M);
        const double z = std::pow(q, static_cast<double>(L + g_ + 1)) / mu;
        const double dyn_u = std::pow(q, static_cast<double>(-M));  // q^{-L} or q^{-(L-ell+g)}
        const double dyn_l =
            nu * nu * std::pow(q, static_cast<double>(case1_ ? L + d_ : L));
        double term = 1.0, total = 1.0;
        double qn = 1.0;
        for (long long n = 0; n < nmax; ++n) {
            double sr = (n == 0)
                            ? (1.0 - sigma_ * q * q)
                            : (1.0 - sigma_ * qn) * (1.0 - sigma_ * qn * qn * q * q) /
                                  (1.0 - sigma_ * qn * qn);
            double num = z * sr;
            for (double u : static_upper_) num *= (1.0 - u * qn);
            num *= (1.0 - dyn_u * qn);
            double den = (1.0 - q * qn);
            for (double l : static_lower_) den *= (1.0 - l * qn);
            den *= (1.0 - dyn_l * qn);
            if (den == 0.0) throw pole_error("p_update_phi87: series pole");
            term *= num / den;
            total += term;
            qn *= q;
            if (!std::isfinite(total)) return series_slow(L);
        }
        return total;
    }

    // Log-space fallback for parameter corners where the double series over/underflows.
    double series_slow(long long L) const {
        const double q = pp_.q, mu = pp_.mu, nu = pp_.nu;
        const long long M = case1_ ? L : L - ell_ + g_;
        const long long nmax = case1_ ? std::min(ell_, L) : std::min(g_, M);
        const double z = std::pow(q, static_cast<double>(L + g_ + 1)) / mu;
        const double dyn_u = std::pow(q, static_cast<double>(-M));
        const double dyn_l = nu * nu * std::pow(q, static_cast<double>(case1_ ? L + d_ : L));
        LogAccumulator acc;
        SignedLog term = SignedLog::one();
        acc.add(term);
        double qn = 1.0;
        for (long long n = 0; n < nmax; ++n) {
            double sr = (n == 0)
                            ? (1.0 - sigma_ * q * q)
                            : (1.0 - sigma_ * qn) * (1.0 - sigma_ * qn * qn * q * q) /
                                  (1.0 - sigma_ * qn * qn);
            SignedLog ratio = SignedLog::of(z * sr);
            for (double u : static_upper_) ratio *= factor_sl(u * qn);
            ratio *= factor_sl(dyn_u * qn);
            ratio /= factor_sl(q * qn);
            for (double l : static_lower_) ratio /= factor_sl(l * qn);
            ratio /= factor_sl(dyn_l * qn);
            term *= ratio;
            acc.add(term);
            qn *= q;
        }
        // returned on the prefactor scale by the caller; keep as plain double
        SignedLog t = acc.total();
        series_log_carry_ = t;
        return std::numeric_limits<double>::quiet_NaN();  // signal log-space result
    }

    double eval_at(long long L, const SignedLog& pref) const {
        if (L < L_min()) return 0.0;
        double s = series(L);
        if (std::isnan(s)) return (pref * series_log_carry_).value();
        return (pref * SignedLog::of(s)).value();
    }

    // prefactor(L+1)/prefactor(L); big factors are paired as inverse powers
    // so the ratio stays finite even where q^{-g-L} alone would overflow.
    double pref_ratio(long long L) const {
        const double q = pp_.q, mu = pp_.mu, nu = pp_.nu;
        if (case1_) {
            double qL = std::pow(q, static_cast<double>(L));
            double qgL = std::pow(q, static_cast<double>(g_ + L));
            double r = mu * (1.0 - (nu / mu) * qL) * (1.0 - nu * qgL) /
                       ((1.0 - q * qL) * (1.0 - nu * nu * qgL));
            // S(L+1)/S(L) with S(L) = (nu^-2 q^{1-g-L};q)_ell / (nu^-1 q^{1-g-L};q)_ell
            double ia = qgL;                                                // q^{g+L}
            double ib = std::pow(q, static_cast<double>(g_ + L - ell_));    // q^{g+L-ell}
            r *= ((ia - 1.0 / (nu * nu)) / (ia - 1.0 / nu)) *
                 ((ib - 1.0 / nu) / (ib - 1.0 / (nu * nu)));
            return r;
        }
        long long M = L - ell_ + g_;
        double qM = std::pow(q, static_cast<double>(M));
        double qd = std::pow(q, static_cast<double>(d_));
        double r = mu * (1.0 - (nu / mu) * qd * qM) *
                   (1.0 - nu * std::pow(q, static_cast<double>(g_)) * qM) /
                   ((1.0 - q * qM) * (1.0 - nu * nu * std::pow(q, static_cast<double>(g_ + L))));
        // S2(L+1)/S2(L), S2(L) = (nu^-2 q^{1-L-g};q)_g / (nu^-1 q^{1-L+ell-2g};q)_g
        double ia = std::pow(q, static_cast<double>(L + g_));          // q^{L+g}
        double ib = std::pow(q, static_cast<double>(L));               // q^{L}
        double ic = std::pow(q, static_cast<double>(L - ell_ + 2 * g_));
        double id = std::pow(q, static_cast<double>(L - ell_ + g_));
        r *= ((ia - 1.0 / (nu * nu)) / (ib - 1.0 / (nu * nu))) *
             ((id - 1.0 / nu) / (ic - 1.0 / nu));
        return r;
    }

    SignedLog full_prefactor(long long L) const {
        const double q = pp_.q, mu = pp_.mu, nu = pp_.nu;
        SignedLog c = qpoch_inf(mu, q) *
                      qpoch_inf(nu * nu * std::pow(q, static_cast<double>(g_)), q);
        c /= qpoch_inf(nu, q) *
             qpoch_inf(nu * mu * std::pow(q, static_cast<double>(g_)), q);
        const double qh = 1.0 / q;
        auto qp = [&](double a, double base, long long n) { return qpoch(a, base, n); };
        if (case1_) {
            SignedLog num = qp(std::pow(q, static_cast<double>(g_)), qh, ell_);
            num *= qpoch(nu / mu, q, L) * qpoch(nu * std::pow(q, static_cast<double>(g_)), q, L);
            num *= qpoch(std::pow(q, static_cast<double>(1 - g_)) / nu, q, ell_);
            num *= qpoch(std::pow(q, static_cast<double>(1 - g_ - L)) / (nu * nu), q, ell_);
            SignedLog den = qp(mu * nu * std::pow(q, static_cast<double>(g_ - 1)), qh, ell_);
            den *= qpoch(q, q, L) *
                   qpoch(nu * nu * std::pow(q, static_cast<double>(g_)), q, L);
            den *= qpoch(std::pow(q, static_cast<double>(1 - g_ - L)) / nu, q, ell_);
            den *= qpoch(std::pow(q, static_cast<double>(1 - g_)) / (nu * nu), q, ell_);
            if (den.is_zero()) throw pole_error("p_update_phi87: prefactor pole");
            SignedLog r = c * num / den;
            r *= SignedLog::of(mu).pow_int(L);
            return r;
        }
        long long M = L - ell_ + g_;
        double qd = std::pow(q, static_cast<double>(d_));
        SignedLog num = qp(std::pow(q, static_cast<double>(ell_)), qh, g_);
        num *= qpoch(nu / mu * qd, q, M);
        num *= qpoch(nu, q, d_);
        num *= qpoch(nu * std::pow(q, static_cast<double>(g_)), q, M);
        num *= qpoch(std::pow(q, static_cast<double>(1 - L - g_)) / (nu * nu), q, g_);
        num *= qpoch(std::pow(q, static_cast<double>(1 - g_)) / nu, q, g_);
        SignedLog den = qpoch(mu * nu, q, g_);
        den *= qpoch(q, q, M);
        den *= qpoch(nu * nu * std::pow(q, static_cast<double>(g_)), q, L);
        den *= qpoch(std::pow(q, static_cast<double>(1 - L + ell_ - 2 * g_)) / nu, q, g_);
        den *= qpoch(std::pow(q, static_cast<double>(1 - ell_)) / (nu * nu), q, g_);
        if (den.is_zero()) throw pole_error("p_update_phi87: prefactor pole");
        SignedLog r = c * num / den;
        r *= SignedLog::of(mu).pow_int(M);
        return r;
    }

    PushParams pp_;
    long long ell_, g_, d_;
    bool case1_;
    double sigma_;
    std::array<double, 4> static_upper_{}, static_lower_{};
    long long L_ = 0;
    SignedLog pref_;
    mutable SignedLog series_log_carry_;
};

bool near_equal_mu_nu(const PushParams& p) {
    return std::fabs(p.nu - p.mu) <= 1e-12 * std::fabs(p.mu);
}

double p_update_sum_impl(const PushParams& params, long long ell, long long g, long long L,
                         bool continuity, double* condition) {
    if (ell < 0 || g < 0 || L < 0) throw domain_error("p_update: indices must be >= 0");
    if (L < ell - g) {
        if (condition) *condition = 1.0;
        return 0.0;
    }
    auto w = push_phi_weights(params, ell, g, continuity);
    LogAccumulator acc;
    long long pmax = std::min(ell, L);
    for (long long p = 0; p <= pmax; ++p) {
        if (w[p].is_zero()) continue;
        PsiPart ps = psi_part(params, g, p);
        long long m = L - p;
        SignedLog psi = ps.norm * SignedLog::of(params.mu).pow_int(m);
        psi *= qpoch(ps.a, params.q, m) * qpoch(ps.b, params.q, m);
        psi /= qpoch(params.q, params.q, m) * qpoch(ps.c, params.q, m);
        acc.add(w[p] * psi);
    }
    if (condition) *condition = acc.condition();
    return acc.total().value();
}

}  // namespace

PushParams PushParams::checked(double q, double mu, double nu) {
    PushParams p{q, mu, nu};
    if (!p.in_range()) throw domain_error(
        "PushParams: require q in (0,1), 0 < mu < 1, -1 < nu <= min(mu, sqrt(q))");
    return p;
}

bool PushParams::in_range() const {
    return q > 0.0 && q < 1.0 && mu > 0.0 && mu < 1.0 && nu > -1.0 &&
           nu <= std::min(mu, std::sqrt(q));
}

double p_update_sum(const PushParams& params, long long ell, long long g, long long L) {
    return p_update_sum_impl(params, ell, g, L, /*continuity=*/false, nullptr);
}

double p_update_phi87(const PushParams& params, long long ell, long long g, long long L) {
    if (ell < 0 || g < 0 || L < 0) throw domain_error("p_update: indices must be >= 0");
    Phi87Eval eval(params, ell, g);
    return eval.value(L);
}

double p_update(const PushParams& params, long long ell, long long g, long long L,
                KernelMethod method) {
    switch (method) {
        case KernelMethod::sum:
            return p_update_sum(params, ell, g, L);
        case KernelMethod::phi87:
            return p_update_phi87(params, ell, g, L);
        case KernelMethod::automatic:
            if (params.nu <= 0.0 || near_equal_mu_nu(params))
                return p_update_sum_impl(params, ell, g, L, /*continuity=*/true, nullptr);
            return p_update_phi87(params, ell, g, L);
        case KernelMethod::cross_checked: {
            double primary = p_update(params, ell, g, L, KernelMethod::automatic);
            if (params.nu == 0.0 || near_equal_mu_nu(params)) return primary;
            double cond = 0.0;
            double other;
            if (params.nu < 0.0) {
                other = p_update_phi87(params, ell, g, L);
                cond = 1.0;
            } else {
                try {
                    other = p_update_sum_impl(params, ell, g, L, true, &cond);
                } catch (const pole_error&) {
                    return primary;
                }
            }
            if (cond <= 1e6 &&
                std::fabs(primary - other) >
                    1e-9 * std::max({std::fabs(primary), std::fabs(other), 1e-300}))
                throw error("p_update: sum and 8phi7 representations disagree");
            return primary;
        }
    }
    throw domain_error("p_update: unknown method");
}

double p_first(const PushParams& params, long long ell) {
    if (ell < 0) return 0.0;
    return phi_weight_inf(params.q, params.mu, params.nu, ell).value();
}

double kernel_nu0(const PushParams& params, long long ell, long long g, long long L) {
    if (params.nu != 0.0) throw domain_error("kernel_nu0: requires nu = 0");
    if (ell < 0 || g < 0 || L < 0) throw domain_error("kernel_nu0: indices must be >= 0");
    if (L < ell - g) return 0.0;
    const double q = params.q, mu = params.mu;
    const double qh = 1.0 / q;
    LogAccumulator acc;
    SignedLog qqell = qpoch(qh, qh, ell);
    for (long long p = 0; p <= std::min(ell, L); ++p) {
        SignedLog t = SignedLog::of(std::pow(q, static_cast<double>(g))).pow_int(p);
        t *= SignedLog::of(mu).pow_int(L - p);
        t *= qpoch(std::pow(q, static_cast<double>(g)), qh, ell - p) * qqell;
        t /= qpoch(q, q, L - p) * qpoch(qh, qh, p) * qpoch(qh, qh, ell - p);
        acc.add(t);
    }
    return (qpoch_inf(mu, q) * acc.total()).value();
}

double kernel_geometric(double mu, long long ell, long long g, long long L) {
    if (!(mu >= 0.0 && mu < 1.0)) throw domain_error("kernel_geometric: mu in [0,1)");
    long long start = std::max<long long>(0, ell - g);
    if (L < start) return 0.0;
    return (1.0 - mu) * std::pow(mu, static_cast<double>(L - start));
}

double gb_pmf(double alpha, double beta, long long k) {
    if (!(alpha >= 0.0 && alpha < 1.0 && beta >= 0.0 && beta <= 1.0))
        throw domain_error("gb_pmf: requires alpha in [0,1), beta in [0,1]");
    if (k < 0) return 0.0;
    if (k == 0) return beta;
    return (1.0 - beta) * (1.0 - alpha) * std::pow(alpha, static_cast<double>(k - 1));
}

double kernel_q0(double mu, double nu, long long ell, long long g, long long L) {
    bool valid = (nu >= -1.0 && nu <= 0.0 && mu >= 0.0 && mu < 1.0) ||
                 (nu > 0.0 && nu < 1.0 && mu >= nu / (1.0 - nu + nu * nu) && mu < 1.0);
    if (!valid) throw domain_error("kernel_q0: parameters outside the q=0 validity region");
    if (L < 0) return 0.0;
    if (ell < g) return gb_pmf(mu, (1.0 - mu) / (1.0 - nu), L);
    if (ell > g) {
        if (L < ell - g) return 0.0;
        return gb_pmf(mu, (1.0 - mu) / (1.0 - mu * nu), L - ell + g);
    }
    if (ell == 0) return gb_pmf(mu, (1.0 - mu) * (1.0 + nu) / (1.0 - mu * nu), L);
    return gb_pmf(mu, (1.0 - mu) / ((1.0 - nu) * (1.0 - mu * nu)), L);
}

namespace {

// pointwise envelope sum_p |phi'(p)| psi~_p(L-p) at L = L0+1, and the
// largest envelope ratio r^ valid for all deeper L
void kernel_envelope(const PushParams& params, long long ell, long long g, long long L0,
                     double* env, double* rmax) {
    const double q = params.q, mu = params.mu;
    auto w = push_phi_weights(params, ell, g, /*continuity=*/true);
    *env = 0.0;
    *rmax = 0.0;
    for (long long p = 0; p <= ell; ++p) {
        if (w[p].is_zero()) continue;
        PsiPart ps = psi_part(params, g, p);
        long long m0 = std::max<long long>(L0 + 1 - p, 0);
        *rmax = std::max(*rmax, psi_ratio_bound(ps, q, mu, m0));
        double lg = ps.norm.log_mag + m0 * std::log(mu);
        double qa = 1.0;
        for (long long i = 0; i < m0; ++i) {
            lg += std::log1p(std::fabs(ps.a) * qa) + std::log1p(std::fabs(ps.b) * qa);
            lg -= std::log1p(-q * qa) + std::log1p(-std::fabs(ps.c) * qa);
            qa *= q;
        }
        *env += std::exp(w[p].log_mag + lg);
    }
}

}  // namespace

double kernel_tail_bound(const PushParams& params, long long ell, long long g, long long L0) {
    double env = 0.0, rmax = 0.0;
    kernel_envelope(params, ell, g, L0, &env, &rmax);
    if (rmax >= 1.0) return kInf;
    return env / (1.0 - rmax);
}

double kernel_weighted_tail_bound(const PushParams& params, long long ell, long long g,
                                  long long L0, double w) {
    double env = 0.0, rmax = 0.0;
    kernel_envelope(params, ell, g, L0, &env, &rmax);
    double qw = std::pow(params.q, -w);
    if (rmax * qw >= 1.0) return kInf;
    return env * std::pow(params.q, -w * static_cast<double>(L0 + 1)) /
           (1.0 - rmax * qw);
}

JumpSampler::JumpSampler(const PushParams& params) : params_(params) {
    SignedLog n = qpoch_inf(params.mu, params.q) / qpoch_inf(params.nu, params.q);
    if (n.sign <= 0) throw domain_error("JumpSampler: invalid phi(.|inf) normalizer");
    log_phi_inf_norm_ = n.log_mag;
}

long long JumpSampler::first(RngStream& rng) const {
    const double q = params_.q, mu = params_.mu, nu = params_.nu;
    double u = rng.next_open();
    double w = std::exp(log_phi_inf_norm_);
    double cum = w;
    double qs = 1.0;
    for (long long s = 0; s < 100000000; ++s) {
        if (u <= cum) return s;
        w *= mu * (1.0 - (nu / mu) * qs) / (1.0 - q * qs);
        cum += w;
        qs *= q;
        if (w < 1e-18 && cum > 1.0 - 1e-12) return s + 1;
    }
    throw truncation_error("sample_first: inversion did not terminate");
}

long long JumpSampler::jump(long long ell, long long g, RngStream& rng) const {
    const double q = params_.q, mu = params_.mu, nu = params_.nu;
    double u = rng.next_open();
    if (nu <= 0.0) {
        // two-stage draw: push distance p, then an independent psi jump
        auto w = push_phi_weights(params_, ell, g, true);
        double cum = 0.0;
        long long p = ell;
        for (long long i = 0; i <= ell; ++i) {
            cum += w[i].value();
            if (u <= cum) { p = i; break; }
        }
        PsiPart ps = psi_part(params_, g, p);
        double u2 = rng.next_open();
        double wv = ps.norm.value();
        double c2 = wv;
        for (long long m = 0; m < 100000000; ++m) {
            if (u2 <= c2) return p + m;
            wv *= psi_ratio(ps, q, mu, m);
            c2 += wv;
            if (wv < 1e-18 && c2 > 1.0 - 1e-12) return p + m + 1;
        }
        throw truncation_error("sample_jump: psi inversion did not terminate");
    }
    // nu > 0: sequential inversion over L with the nonnegative 8phi7 terms
    if (near_equal_mu_nu(params_)) {
        SumEval eval(params_, ell, g, true);
        double cum = 0.0;
        for (long long L = 0; L < 10000000; ++L) {
            double v = eval.next();
            cum += std::max(v, 0.0);
            if (u <= cum) return L;
            if (v < 1e-18 && cum > 1.0 - 1e-12 && L > ell - g) return L;
        }
        throw truncation_error("sample_jump: inversion did not terminate");
    }
    Phi87Eval eval(params_, ell, g);
    double cum = 0.0;
    for (long long L = eval.L_min(); L < eval.L_min() + 10000000; ++L) {
        double v = eval.next();
        cum += v;
        if (u <= cum) return L;
        if (v < 1e-18 && cum > 1.0 - 1e-12) return L;
    }
    throw truncation_error("sample_jump: inversion did not terminate");
}

long long sample_first(const PushParams& params, RngStream& rng) {
    return JumpSampler(params).first(rng);
}

long long sample_jump(const PushParams& params, long long ell, long long g, RngStream& rng) {
    return JumpSampler(params).jump(ell, g, rng);
}

double KernelTable::p(long long L) const {
    if (L < L_min) return 0.0;
    std::size_t idx = static_cast<std::size_t>(L - L_min);
    return idx < prob.size() ? prob[idx] : 0.0;
}

double KernelTable::total_mass() const {
    double s = 0.0;
    for (double v : prob) s += v;
    return s;
}

KernelTable KernelTable::build(const PushParams& params, long long ell, long long g,
                               double mass_tol, KernelMethod method, long long cover_L) {
    if (ell < 0 || g < 0) throw domain_error("KernelTable: indices must be >= 0");
    mass_tol = std::max(mass_tol, 1e-14);  // the cumulative sum itself carries rounding
    KernelTable t;
    t.ell = ell;
    t.g = g;

    bool use_sum;
    bool cross = false;
    switch (method) {
        case KernelMethod::sum: use_sum = true; break;
        case KernelMethod::phi87: use_sum = false; break;
        case KernelMethod::cross_checked:
            cross = true;
            [[fallthrough]];
        case KernelMethod::automatic:
        default:
            use_sum = (params.nu <= 0.0 || near_equal_mu_nu(params));
            break;
    }
    if (params.nu == 0.0) use_sum = true;
    t.method = cross ? "cross-checked" : (use_sum ? "sum" : "phi87");
    t.L_min = use_sum ? 0 : std::max<long long>(0, ell - g);

    SumEval sum_eval(params, ell, g, true);
    std::unique_ptr<Phi87Eval> p87;
    if (!use_sum || (cross && params.nu != 0.0 && !near_equal_mu_nu(params)))
        p87 = std::make_unique<Phi87Eval>(params, ell, g);
    if (!use_sum) {
        for (long long L = 0; L < t.L_min; ++L) sum_eval.next();  // align for cross-checks
    }

    double cum = 0.0;
    double prev = 0.0;
    double recent[3] = {2.0, 2.0, 2.0};  // observed |P(L+1)/P(L)|, ring buffer
    for (long long L = t.L_min; L < t.L_min + 10000000; ++L) {
        double v;
        if (use_sum) {
            double cond = 0.0;
            v = sum_eval.next_with_condition(&cond);
            if (cross && p87 && L >= std::max<long long>(0, ell - g) && cond <= 1e6) {
                double other = p87->value(L);
                if (std::fabs(v - other) >
                    1e-9 * std::max({std::fabs(v), std::fabs(other), 1e-300}))
                    throw error("KernelTable: representation cross-check failed");
            }
        } else {
            v = p87->next();
            if (cross) {
                double cond = 0.0;
                double other = sum_eval.next_with_condition(&cond);
                if (cond <= 1e6 &&
                    std::fabs(v - other) >
                        1e-9 * std::max({std::fabs(v), std::fabs(other), 1e-300}))
                    throw error("KernelTable: representation cross-check failed");
            }
        }
        if (L > t.L_min) {
            if (prev != 0.0) recent[L % 3] = std::fabs(v / prev);
            else recent[L % 3] = (v == 0.0) ? 0.0 : 2.0;  // exact-zero run vs resurgence
        }
        prev = v;
        t.prob.push_back(v);
        cum += v;
        // certified geometric tail: past the bulk the term ratio approaches
        // mu from psi, so tail <= |P(L)| rho / (1 - rho) once the observed
        // ratios have settled below rho. The cumulative-mass test allows for
        // the ~1e-12 relative accuracy of the log-space evaluators at large
        // indices; the geometric bound is the actual certificate.
        if (cum >= 1.0 - std::max(100.0 * mass_tol, 1e-11) && L >= ell - g &&
            L >= cover_L && L >= t.L_min + 3) {
            double rho = std::max({params.mu, recent[0], recent[1], recent[2]}) *
                         (1.0 + 1e-9);
            if (rho < 1.0) {
                double bound = std::fabs(v) * rho / (1.0 - rho);
                if (bound <= mass_tol) {
                    t.tail_bound = bound;
                    return t;
                }
            }
        }
    }
    throw truncation_error("KernelTable: mass target not reached");
}

}  // namespace qhahn
