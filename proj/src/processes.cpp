#include "qhahn/processes.hpp"

#include <algorithm>
#include <cmath>

#include "qhahn/distributions.hpp"
#include "qhahn/errors.hpp"

namespace qhahn {

ParticleConfig ParticleConfig::step(int n) {
    ParticleConfig c;
    c.positions.resize(n);
    for (int i = 0; i < n; ++i) c.positions[i] = -(i + 1);
    return c;
}

bool ParticleConfig::strictly_decreasing() const {
    for (std::size_t i = 1; i < positions.size(); ++i)
        if (positions[i] >= positions[i - 1]) return false;
    return true;
}

TasepParams TasepParams::checked(double q, double bmu, double bnu) {
    if (!(q > 0.0 && q < 1.0 && bnu >= 0.0 && bnu <= bmu && bmu < 1.0))
        throw domain_error("TasepParams: require q in (0,1), 0 <= bnu <= bmu < 1");
    return {q, bmu, bnu};
}

BetaParams BetaParams::checked(double mu_bar, double nu_bar) {
    if (!(mu_bar > 0.0 && mu_bar < nu_bar && nu_bar >= 0.5))
        throw domain_error("BetaParams: require 0 < mu_bar < nu_bar and nu_bar >= 1/2");
    return {mu_bar, nu_bar};
}

void push_step(ParticleConfig& config, const JumpSampler& sampler,
               const RngStream& time_stream) {
    long long prev_jump = 0;
    for (int i = 1; i <= config.size(); ++i) {
        RngStream rs = time_stream.substream(static_cast<std::uint64_t>(i));
        long long& xi = config.positions[i - 1];
        if (i == 1) {
            prev_jump = sampler.first(rs);
            xi -= prev_jump;
        } else {
            long long gap = config.positions[i - 2] + prev_jump - xi - 1;  // pre-move gap
            long long jump = sampler.jump(prev_jump, gap, rs);
            xi -= jump;
            prev_jump = jump;
        }
    }
}

void tasep_step(ParticleConfig& config, const TasepParams& params,
                const RngStream& time_stream) {
    std::vector<long long> gaps(config.size());
    for (int i = 2; i <= config.size(); ++i)
        gaps[i - 1] = config.positions[i - 2] - config.positions[i - 1] - 1;
    for (int i = 1; i <= config.size(); ++i) {
        RngStream rs = time_stream.substream(static_cast<std::uint64_t>(i));
        auto p = QBetaBinomialParams::checked(
            params.q, params.bmu, params.bnu,
            i == 1 ? std::optional<long long>{} : std::optional<long long>{gaps[i - 1]});
        config.positions[i - 1] += phi_sample(p, rs);
    }
}

namespace {

// gB(alpha, beta) draw by analytic inversion: mass beta at 0, otherwise
// 1 + Geometric(alpha).
long long gb_sample(double alpha, double beta, RngStream& rng) {
    double u = rng.next_open();
    if (u <= beta) return 0;
    if (alpha == 0.0) return 1;
    double v = (u - beta) / (1.0 - beta);
    return 1 + static_cast<long long>(std::floor(std::log1p(-v) / std::log(alpha)));
}

}  // namespace

void q0_push_step(ParticleConfig& config, double mu, double nu,
                  const RngStream& time_stream) {
    kernel_q0(mu, nu, 0, 0, 0);  // parameter validation
    long long prev_jump = 0;
    for (int i = 1; i <= config.size(); ++i) {
        RngStream rs = time_stream.substream(static_cast<std::uint64_t>(i));
        long long& xi = config.positions[i - 1];
        if (i == 1) {
            prev_jump = gb_sample(mu, (1.0 - mu) / (1.0 - nu), rs);
            xi -= prev_jump;
            continue;
        }
        long long ell = prev_jump;
        long long g = config.positions[i - 2] + prev_jump - xi - 1;
        long long jump;
        if (ell < g) {
            jump = gb_sample(mu, (1.0 - mu) / (1.0 - nu), rs);
        } else if (ell > g) {
            jump = ell - g + gb_sample(mu, (1.0 - mu) / (1.0 - mu * nu), rs);
        } else if (ell == 0) {
            jump = gb_sample(mu, (1.0 - mu) * (1.0 + nu) / (1.0 - mu * nu), rs);
        } else {
            jump = gb_sample(mu, (1.0 - mu) / ((1.0 - nu) * (1.0 - mu * nu)), rs);
        }
        xi -= jump;
        prev_jump = jump;
    }
}

namespace {

template <typename Step>
Trajectory simulate(int particles, int steps, std::uint64_t seed, Step&& step_fn) {
    Trajectory traj;
    traj.particles = particles;
    traj.steps = steps;
    traj.x.reserve(static_cast<std::size_t>(steps + 1) * particles);
    ParticleConfig cfg = ParticleConfig::step(particles);
    RngStream base(seed);
    traj.x.insert(traj.x.end(), cfg.positions.begin(), cfg.positions.end());
    for (int t = 1; t <= steps; ++t) {
        step_fn(cfg, base.substream(static_cast<std::uint64_t>(t)));
        traj.x.insert(traj.x.end(), cfg.positions.begin(), cfg.positions.end());
    }
    return traj;
}

}  // namespace

Trajectory push_simulate(int particles, int steps, const PushParams& params,
                         std::uint64_t seed) {
    JumpSampler sampler(params);
    return simulate(particles, steps, seed, [&](ParticleConfig& c, RngStream rs) {
        push_step(c, sampler, rs);
    });
}

Trajectory tasep_simulate(int particles, int steps, const TasepParams& params,
                          std::uint64_t seed) {
    return simulate(particles, steps, seed, [&](ParticleConfig& c, RngStream rs) {
        tasep_step(c, params, rs);
    });
}

Trajectory q0_push_simulate(int particles, int steps, double mu, double nu,
                            std::uint64_t seed) {
    return simulate(particles, steps, seed, [&](ParticleConfig& c, RngStream rs) {
        q0_push_step(c, mu, nu, rs);
    });
}

double x_observable(const ParticleConfig& config, int i, double q) {
    return x_observable(config.positions[i - 1], i, q);
}

double x_observable(long long xi, int i, double q) {
    return std::exp(-static_cast<double>(xi + i) * std::log(q));
}

long long BosonConfig::level() const {
    long long k = 0;
    for (long long v : y) k += v;
    return k;
}

namespace {

void enumerate_sector(int sites, long long level, std::vector<long long>& cur,
                      std::vector<std::vector<long long>>& out) {
    if (cur.size() == static_cast<std::size_t>(sites)) {
        cur.push_back(level);  // last coordinate absorbs the remainder
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (long long v = 0; v <= level; ++v) {
        cur.push_back(v);
        enumerate_sector(sites, level - v, cur, out);
        cur.pop_back();
    }
}

}  // namespace

long long BosonMatrix::index_of(const std::vector<long long>& y) const {
    auto it = std::lower_bound(states.begin(), states.end(), y);
    if (it == states.end() || *it != y) return -1;
    return it - states.begin();
}

double BosonMatrix::row_sum(int row) const {
    double s = 0.0;
    for (int j = 0; j < dim(); ++j) s += at(row, j);
    return s;
}

BosonMatrix boson_matrix(int sites, long long level, double q, double alpha, double nu) {
    if (sites < 1 || level < 0) throw domain_error("boson_matrix: need N >= 1, k >= 0");
    BosonMatrix m;
    m.sites = sites;
    m.level = level;
    std::vector<long long> cur;
    enumerate_sector(sites, level, cur, m.states);  // lexicographic by construction
    const int dim = m.dim();
    m.a.assign(static_cast<std::size_t>(dim) * dim, 0.0);

    // phi_{q,alpha,nu}(s|y) for all 0 <= s <= y <= level
    std::vector<std::vector<double>> phi(level + 1);
    for (long long y = 0; y <= level; ++y) {
        phi[y].resize(y + 1);
        for (long long s = 0; s <= y; ++s)
            phi[y][s] = phi_weight(q, alpha, nu, s, y).value();
    }

    std::vector<long long> target(sites + 1);
    std::vector<long long> s(sites + 1, 0);
    for (int row = 0; row < dim; ++row) {
        const auto& y = m.states[row];
        // iterate over all moves s_i in [0, y_i], i = 1..N; each s_i is drawn
        // from the pre-update occupancy (parallel update)
        std::fill(s.begin(), s.end(), 0);
        for (;;) {
            double w = 1.0;
            for (int i = 1; i <= sites; ++i) w *= phi[y[i]][s[i]];
            for (int i = 0; i <= sites; ++i) {
                target[i] = y[i] - s[i] + (i + 1 <= sites ? s[i + 1] : 0);
            }
            target[0] = y[0] + s[1];
            long long col = m.index_of(target);
            m.a[static_cast<std::size_t>(row) * dim + col] += w;
            int i = 1;
            while (i <= sites && s[i] == y[i]) s[i++] = 0;
            if (i > sites) break;
            ++s[i];
        }
    }
    return m;
}

ZState::ZState(int rows) : rows_(rows) {
    zgrid_.assign(rows_, 1.0);
    ztgrid_.assign(rows_, 1.0);
}

void ZState::append_column(const std::vector<double>& zcol) {
    for (int i = 0; i < rows_; ++i) {
        zgrid_.push_back(zcol[i]);
        ztgrid_.push_back(1.0 / zcol[i]);
    }
    ++t_;
}

namespace {

bool tied(double a, double b) {
    return std::fabs(a - b) < 1e-14 * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace

void z_step(ZState& state, const BetaParams& params, const RngStream& time_stream,
            bool resolve_ties) {
    const double mb = params.mu_bar, nb = params.nu_bar;
    const int t = state.time() + 1;
    std::vector<double> col(state.rows());
    for (int i = 1; i <= state.rows(); ++i) {
        RngStream rs = time_stream.substream(static_cast<std::uint64_t>(i));
        if (i == 1) {
            col[0] = state.z(1, t - 1) * sample_beta(mb, nb - mb, rs);
            continue;
        }
        const double up = state.z(i, t - 1);     // Z(i, t-1)
        const double left = col[i - 2];          // Z(i-1, t)
        const double diag = state.z(i - 1, t - 1);  // Z(i-1, t-1)
        if (tied(up, left)) {
            if (!resolve_ties) throw tie_error("z_step: Z(i,t-1) == Z(i-1,t)");
            // limit law (gamma -> 0): Z * B1(Z/X, mu_bar, 2 nu_bar - 1)
            col[i - 1] = left * genbeta1_sample(left / diag, mb, 2.0 * nb - 1.0, rs);
            continue;
        }
        double r = 2.0 * nb - 1.0;
        if (up < left) {
            double p = (1.0 / left - 1.0 / diag) / (1.0 / up - 1.0 / diag);
            auto nbb = NBB1Params::checked(r, p, up / left, mb, nb - mb);
            col[i - 1] = up * nbb1_sample(nbb, rs);
        } else {
            double p = (1.0 / up - 1.0 / diag) / (1.0 / left - 1.0 / diag);
            auto nbb = NBB1Params::checked(r, p, left / up, mb, nb);
            col[i - 1] = left * nbb1_sample(nbb, rs);
        }
    }
    state.append_column(col);
}

void ztilde_step(ZState& state, const BetaParams& params, const RngStream& time_stream,
                 bool resolve_ties) {
    const double mb = params.mu_bar, nb = params.nu_bar;
    const int t = state.time() + 1;
    std::vector<double> col(state.rows());  // Z values (inverted Z~)
    for (int i = 1; i <= state.rows(); ++i) {
        RngStream rs = time_stream.substream(static_cast<std::uint64_t>(i));
        if (i == 1) {
            double zt = state.ztilde(1, t - 1) * inverse_draw(sample_beta(mb, nb - mb, rs));
            col[0] = 1.0 / zt;
            continue;
        }
        const double up = state.ztilde(i, t - 1);      // Z~(i, t-1)
        const double left = 1.0 / col[i - 2];          // Z~(i-1, t)
        const double diag = state.ztilde(i - 1, t - 1);
        if (tied(up, left)) {
            if (!resolve_ties) throw tie_error("ztilde_step: Z~(i,t-1) == Z~(i-1,t)");
            double z = 1.0 / up;
            col[i - 1] = z * genbeta1_sample(z * diag, mb, 2.0 * nb - 1.0, rs);
            continue;
        }
        double r = 2.0 * nb - 1.0;
        double zt;
        if (up > left) {
            double p = (left - diag) / (up - diag);
            auto nbeta = NBB1Params::checked(r, p, 0.0, mb, nb - mb);
            double ytilde = inverse_draw(nbb1_sample(nbeta, rs));
            zt = ytilde * up + (1.0 - ytilde) * left;
        } else {
            double p = (up - diag) / (left - diag);
            auto nbeta = NBB1Params::checked(r, p, 0.0, mb, nb);
            double ytilde = inverse_draw(nbb1_sample(nbeta, rs));
            zt = ytilde * left + (1.0 - ytilde) * up;
        }
        col[i - 1] = 1.0 / zt;
    }
    state.append_column(col);
}

}  // namespace qhahn
