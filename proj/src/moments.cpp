#include "qhahn/moments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <thread>

#include "qhahn/errors.hpp"

namespace qhahn {

namespace {

using cplx = std::complex<double>;
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr int kMaxPoints = 1 << 14;

cplx ipow(cplx z, int n) {
    cplx r{1.0, 0.0};
    bool inv = n < 0;
    unsigned e = static_cast<unsigned>(inv ? -n : n);
    while (e) {
        if (e & 1u) r *= z;
        z *= z;
        e >>= 1;
    }
    return inv ? 1.0 / r : r;
}

struct CrossFactor {
    double shift;  // z_A - c z_B in the denominator: c = q (push/tasep), and
    double scale;  // (w_A - w_B - shift) for beta with scale 1
};

// Generic nested-circle quadrature. center/cross describe the family:
// push/tasep: nodes z = center + r e^{i th}, cross = (zA-zB)/(zA-q zB);
// beta: nodes w = r e^{i th}, cross = (wA-wB)/(wA-wB-1).
template <typename PerVar>
double nested_quadrature(const std::vector<double>& radii, double center, double cross_q,
                         bool beta_cross, double prefactor, PerVar&& per_var, int m0,
                         double rel_tol) {
    const int k = static_cast<int>(radii.size());
    double prev = 0.0;
    bool have_prev = false;
    for (int M = m0; M <= kMaxPoints; M *= 2) {
        // per-variable factor tables, weight r e^{i th} folded in
        std::vector<std::vector<cplx>> f(k, std::vector<cplx>(M));
        std::vector<std::vector<cplx>> nodes(k, std::vector<cplx>(M));
        for (int j = 0; j < k; ++j) {
            for (int m = 0; m < M; ++m) {
                double th = kTwoPi * m / M;
                cplx e{std::cos(th), std::sin(th)};
                cplx z = center + radii[j] * e;
                nodes[j][m] = z;
                f[j][m] = per_var(j, z) * (radii[j] * e);
            }
        }
        cplx total{0.0, 0.0};
        std::vector<int> idx(k, 0);
        for (;;) {
            cplx w{1.0, 0.0};
            for (int j = 0; j < k; ++j) w *= f[j][idx[j]];
            for (int a = 0; a < k; ++a)
                for (int b = a + 1; b < k; ++b) {
                    cplx za = nodes[a][idx[a]], zb = nodes[b][idx[b]];
                    w *= beta_cross ? (za - zb) / (za - zb - 1.0)
                                    : (za - zb) / (za - cross_q * zb);
                }
            total += w;
            int j = 0;
            while (j < k && ++idx[j] == M) idx[j++] = 0;
            if (j == k) break;
        }
        double value = prefactor * (total / std::pow(static_cast<double>(M), k)).real();
        if (have_prev && std::fabs(value - prev) <= rel_tol * std::max(std::fabs(value), 1.0))
            return value;
        prev = value;
        have_prev = true;
    }
    throw divergence_error("nested_quadrature: no convergence by M = 2^14");
}

void check_weakly_decreasing(const std::vector<int>& n) {
    for (std::size_t i = 1; i < n.size(); ++i)
        if (n[i] > n[i - 1]) throw domain_error("MomentSpec: n must be weakly decreasing");
}

}  // namespace

MomentSpec MomentSpec::checked(std::vector<int> n, int t) {
    if (n.empty()) throw domain_error("MomentSpec: order k must be >= 1");
    check_weakly_decreasing(n);
    if (n.back() < 0) throw domain_error("MomentSpec: n_k must be >= 0");
    if (t < 0) throw domain_error("MomentSpec: t must be >= 0");
    return {std::move(n), t};
}

std::vector<long long> moments_to_occupation(const std::vector<int>& n, int sites) {
    std::vector<long long> y(sites + 1, 0);
    for (int v : n) {
        if (v < 0 || v > sites) throw domain_error("moments_to_occupation: n_i out of range");
        ++y[v];
    }
    return y;
}

std::vector<int> occupation_to_moments(const std::vector<long long>& y) {
    std::vector<int> n;
    for (int m = static_cast<int>(y.size()) - 1; m >= 0; --m)
        for (long long c = 0; c < y[m]; ++c) n.push_back(m);
    return n;
}

namespace {

std::vector<double> nested_radii_around_1(int k, double q, double r_max, double r_min,
                                          const char* what) {
    if (r_max <= 0.0)
        throw infeasible_contour_error(std::string(what) + ": exclusion radius is nonpositive");
    // minimal radii: m_k = r_min, m_j = (1-q) + q m_{j+1}
    std::vector<double> m(k);
    m[k - 1] = r_min;
    for (int j = k - 2; j >= 0; --j) m[j] = (1.0 - q) + q * m[j + 1];
    if (m[0] >= r_max)
        throw infeasible_contour_error(
            std::string(what) + ": nesting needs r_1 >= " + std::to_string(m[0]) +
            " but the exclusion constraints cap it at " + std::to_string(r_max));
    // distribute 10% of the slack geometrically from the outside in;
    // e_j > q e_{j+1} keeps the nesting strict
    double slack = r_max - m[0];
    double e = 0.1 * slack;
    for (int j = 0; j < k; ++j) {
        m[j] += e;
        e *= 0.5;
    }
    return m;
}

}  // namespace

ContourSpec plan_contours_push(int k, const PushParams& params, double r_min) {
    if (k < 1) throw domain_error("plan_contours: k >= 1");
    double r_max = std::min(1.0 - params.mu / params.q, 1.0);
    if (params.nu > 0.0) r_max = std::min(r_max, std::fabs(1.0 / params.nu - 1.0));
    return {ContourFamily::push_around_1,
            nested_radii_around_1(k, params.q, r_max, r_min, "plan_contours_push")};
}

ContourSpec plan_contours_tasep(int k, const TasepParams& params, double r_min) {
    if (k < 1) throw domain_error("plan_contours: k >= 1");
    double r_max = 1.0;
    if (params.bnu > 0.0) r_max = std::min(r_max, std::fabs(1.0 / params.bnu - 1.0));
    return {ContourFamily::tasep_around_1,
            nested_radii_around_1(k, params.q, r_max, r_min, "plan_contours_tasep")};
}

ContourSpec plan_contours_beta(int k, const BetaParams& params, double r_min) {
    if (k < 1) throw domain_error("plan_contours: k >= 1");
    double r_max = std::min(params.mu_bar - 1.0, params.nu_bar);
    if (r_max <= 0.0)
        throw infeasible_contour_error("plan_contours_beta: mu_bar - 1 leaves no room");
    std::vector<double> m(k);
    m[k - 1] = r_min;
    for (int j = k - 2; j >= 0; --j) m[j] = 1.0 + m[j + 1];
    if (m[0] >= r_max)
        throw infeasible_contour_error(
            "plan_contours_beta: nesting needs R_1 >= " + std::to_string(m[0]) +
            " but exclusion caps it at " + std::to_string(r_max));
    double slack = r_max - m[0];
    double e = 0.1 * slack;
    for (int j = 0; j < k; ++j) {
        m[j] += e;
        e *= 0.5;
    }
    return {ContourFamily::beta_around_0, std::move(m)};
}

double push_moment_integral_ordered(const std::vector<int>& n, int t,
                                    const PushParams& params, const ContourSpec& contours,
                                    int points, double rel_tol) {
    if (contours.family != ContourFamily::push_around_1)
        throw domain_error("push_moment_integral: wrong contour family");
    const int k = static_cast<int>(n.size());
    if (contours.order() != k) throw domain_error("push_moment_integral: k mismatch");
    const double q = params.q, mu = params.mu, nu = params.nu;
    double pref = ((k % 2) ? -1.0 : 1.0) * std::pow(q, 0.5 * k * (k - 1));
    auto per_var = [&](int j, cplx z) -> cplx {
        cplx a = ipow((1.0 - nu * z) / (1.0 - z), n[j]);
        cplx b = ipow((1.0 - nu / (q * z)) / (1.0 - mu / (q * z)), t);
        return a * b / ((1.0 - nu * z) * z);
    };
    return nested_quadrature(contours.radii, 1.0, q, false, pref, per_var, points, rel_tol);
}

double push_moment_integral(const MomentSpec& spec, const PushParams& params,
                            const ContourSpec& contours, int points, double rel_tol) {
    check_weakly_decreasing(spec.n);
    return push_moment_integral_ordered(spec.n, spec.t, params, contours, points, rel_tol);
}

double tasep_moment_integral(const MomentSpec& spec, const TasepParams& params,
                             const ContourSpec& contours, int points, double rel_tol) {
    if (contours.family != ContourFamily::tasep_around_1)
        throw domain_error("tasep_moment_integral: wrong contour family");
    const int k = spec.order();
    if (contours.order() != k) throw domain_error("tasep_moment_integral: k mismatch");
    const double q = params.q, bmu = params.bmu, bnu = params.bnu;
    double pref = ((k % 2) ? -1.0 : 1.0) * std::pow(q, 0.5 * k * (k - 1));
    auto per_var = [&](int j, cplx z) -> cplx {
        cplx a = ipow((1.0 - bnu * z) / (1.0 - z), spec.n[j]);
        cplx b = ipow((1.0 - bmu * z) / (1.0 - bnu * z), spec.t);
        return a * b / ((1.0 - bnu * z) * z);
    };
    return nested_quadrature(contours.radii, 1.0, q, false, pref, per_var, points, rel_tol);
}

double beta_moment_integral(const MomentSpec& spec, const BetaParams& params,
                            const ContourSpec& contours, int points, double rel_tol) {
    if (contours.family != ContourFamily::beta_around_0)
        throw domain_error("beta_moment_integral: wrong contour family");
    const int k = spec.order();
    if (contours.order() != k) throw domain_error("beta_moment_integral: k mismatch");
    const double mb = params.mu_bar, nb = params.nu_bar;
    auto per_var = [&](int j, cplx w) -> cplx {
        cplx a = ipow((nb + w) / w, spec.n[j]);
        cplx b = ipow((nb - 1.0 - w) / (mb - 1.0 - w), spec.t);
        return a * b / (nb + w);
    };
    return nested_quadrature(contours.radii, 0.0, 0.0, true, 1.0, per_var, points, rel_tol);
}

namespace {

struct MeanAccumulator {
    double sum = 0.0, sumsq = 0.0;
    std::uint64_t count = 0;
    void add(double v) {
        sum += v;
        sumsq += v * v;
        ++count;
    }
    void merge(const MeanAccumulator& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        count += o.count;
    }
};

McMoment finish(const MeanAccumulator& acc, bool warn) {
    McMoment r;
    r.paths = acc.count;
    r.estimate = acc.sum / acc.count;
    double var = std::max(0.0, acc.sumsq / acc.count - r.estimate * r.estimate);
    r.std_error = std::sqrt(var / acc.count);
    r.divergence_warning = warn;
    return r;
}

// Runs fn(worker, paths_for_worker) on each worker; merge order is fixed by
// worker index, so the result does not depend on thread scheduling.
template <typename Fn>
MeanAccumulator run_workers(std::uint64_t paths, int workers, Fn&& fn) {
    workers = std::max(1, workers);
    std::vector<MeanAccumulator> acc(workers);
    std::vector<std::thread> pool;
    std::uint64_t base = paths / workers, rem = paths % workers;
    for (int w = 0; w < workers; ++w) {
        std::uint64_t count = base + (static_cast<std::uint64_t>(w) < rem ? 1 : 0);
        pool.emplace_back([&, w, count] { acc[w] = fn(w, count); });
    }
    for (auto& th : pool) th.join();
    MeanAccumulator total;
    for (const auto& a : acc) total.merge(a);
    if (total.count == 0) throw domain_error("monte carlo: needs paths >= 1");
    return total;
}

}  // namespace

McMoment mc_push_moment(const MomentSpec& spec, const PushParams& params,
                        std::uint64_t paths, std::uint64_t seed, int workers) {
    const int k = spec.order();
    bool warn = params.mu * std::pow(params.q, -static_cast<double>(k)) >= 1.0;
    const int particles = std::max(1, spec.n.empty() ? 1 : spec.n.front());
    const double lq = std::log(params.q);
    JumpSampler sampler(params);
    auto body = [&](int w, std::uint64_t count) {
        MeanAccumulator acc;
        RngStream ws = worker_stream(seed, static_cast<std::uint64_t>(w));
        for (std::uint64_t p = 0; p < count; ++p) {
            RngStream path_stream = ws.substream(p);
            ParticleConfig cfg = ParticleConfig::step(particles);
            for (int t = 1; t <= spec.t; ++t)
                push_step(cfg, sampler, path_stream.substream(static_cast<std::uint64_t>(t)));
            double v = 1.0;
            for (int nj : spec.n) {
                if (nj == 0) { v = 0.0; break; }  // x_0 = +infinity
                v *= std::exp(lq * static_cast<double>(cfg.positions[nj - 1] + nj));
            }
            acc.add(v);
        }
        return acc;
    };
    return finish(run_workers(paths, workers, body), warn);
}

McMoment mc_beta_moment(const MomentSpec& spec, const BetaParams& params,
                        std::uint64_t paths, std::uint64_t seed, int workers,
                        bool use_ztilde, bool resolve_ties) {
    const int rows = std::max(1, spec.n.empty() ? 1 : spec.n.front());
    for (int nj : spec.n)
        if (nj == 0) throw domain_error("mc_beta_moment: requires n_j >= 1");
    auto body = [&](int w, std::uint64_t count) {
        MeanAccumulator acc;
        RngStream ws = worker_stream(seed, static_cast<std::uint64_t>(w));
        for (std::uint64_t p = 0; p < count; ++p) {
            RngStream path_stream = ws.substream(p);
            ZState state(rows);
            for (int t = 1; t <= spec.t; ++t)
                z_step(state, params, path_stream.substream(static_cast<std::uint64_t>(t)),
                       resolve_ties);
            double v = 1.0;
            for (int nj : spec.n)
                v *= use_ztilde ? state.ztilde(nj, spec.t) : 1.0 / state.z(nj, spec.t);
            acc.add(v);
        }
        return acc;
    };
    return finish(run_workers(paths, workers, body), false);
}

}  // namespace qhahn
