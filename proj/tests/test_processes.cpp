#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "qhahn/distributions.hpp"
#include "qhahn/errors.hpp"
#include "qhahn/processes.hpp"
#include "qhahn/qspecial.hpp"
#include "stat_utils.hpp"

using namespace qhahn;
using namespace qhahn_test;

TEST_CASE("step initial data and order preservation") {
    auto cfg = ParticleConfig::step(4);
    CHECK(cfg.positions == std::vector<long long>{-1, -2, -3, -4});
    CHECK(cfg.strictly_decreasing());

    auto p = PushParams::checked(0.5, 0.3, 0.2);
    JumpSampler sampler(p);
    RngStream base(7);
    ParticleConfig c = ParticleConfig::step(10);
    for (int t = 1; t <= 10000; ++t) {
        push_step(c, sampler, base.substream(t));
        REQUIRE(c.strictly_decreasing());
    }
}

TEST_CASE("single-particle displacement follows phi(.|inf)") {
    auto p = PushParams::checked(0.5, 0.3, 0.2);
    JumpSampler sampler(p);
    RngStream base(21);
    const int trials = 200000;
    std::map<long long, long long> counts;
    for (int t = 1; t <= trials; ++t) {
        ParticleConfig c = ParticleConfig::step(1);
        push_step(c, sampler, base.substream(t));
        ++counts[-1 - c.positions[0]];
    }
    double chi2 = 0.0;
    int cells = 0;
    for (long long v = 0; v <= 8; ++v) {
        double expect = p_first(p, v) * trials;
        if (expect < 20.0) break;
        long long got = counts.count(v) ? counts[v] : 0;
        chi2 += (got - expect) * (got - expect) / expect;
        ++cells;
    }
    CHECK(chi2 < chi2_quantile(0.001, cells - 1));
}

TEST_CASE("push_simulate: snapshots, convolution marginal, restriction consistency") {
    auto p = PushParams::checked(0.5, 0.3, 0.2);
    auto traj = push_simulate(5, 10, p, 99);
    for (int i = 1; i <= 5; ++i) CHECK(traj.at(0, i) == -i);

    // first-particle law at t=2 is the 2-fold convolution of phi(.|inf)
    const int trials = 200000;
    std::map<long long, long long> counts;
    for (int r = 0; r < trials; ++r) {
        auto tr = push_simulate(1, 2, p, 1000000 + r);
        ++counts[-1 - tr.at(2, 1)];
    }
    std::vector<double> conv(16, 0.0);
    for (long long a = 0; a < 16; ++a)
        for (long long b = 0; a + b < 16; ++b) conv[a + b] += p_first(p, a) * p_first(p, b);
    double chi2 = 0.0;
    int cells = 0;
    for (long long v = 0; v < 16; ++v) {
        double expect = conv[v] * trials;
        if (expect < 20.0) break;
        long long got = counts.count(v) ? counts[v] : 0;
        chi2 += (got - expect) * (got - expect) / expect;
        ++cells;
    }
    CHECK(chi2 < chi2_quantile(0.001, cells - 1));

    // the first m particles evolve identically whatever trails behind them
    auto small = push_simulate(3, 12, p, 4242);
    auto big = push_simulate(9, 12, p, 4242);
    for (int t = 0; t <= 12; ++t)
        for (int i = 1; i <= 3; ++i) REQUIRE(small.at(t, i) == big.at(t, i));
}

TEST_CASE("mu -> 0 proxy: move probability is 1 - phi(0|inf)") {
    auto p = PushParams::checked(0.5, 1e-4, 0.0);
    JumpSampler sampler(p);
    RngStream base(3);
    const int trials = 100000;
    int moved = 0;
    for (int t = 1; t <= trials; ++t) {
        ParticleConfig c = ParticleConfig::step(1);
        push_step(c, sampler, base.substream(t));
        if (c.positions[0] != -1) ++moved;
    }
    double expect = (1.0 - p_first(p, 0)) * trials;
    CHECK(std::fabs(moved - expect) <= 4.0 * std::sqrt(expect));
}

TEST_CASE("tasep step semantics") {
    auto p = TasepParams::checked(0.5, 0.4, 0.2);
    RngStream base(12);
    // jumps are bounded by the pre-step gaps; a zero gap freezes a particle
    ParticleConfig c{{0, -1, -2}};
    for (int t = 1; t <= 200; ++t) {
        ParticleConfig before = c;
        tasep_step(c, p, base.substream(t));
        REQUIRE(c.strictly_decreasing());
        for (int i = 1; i < 3; ++i)
            REQUIRE(c.positions[i] - before.positions[i] <=
                    before.positions[i - 1] - before.positions[i] - 1);
    }
    // single-particle marginal matches phi(.|inf) with jumps to the right
    const int trials = 100000;
    std::map<long long, long long> counts;
    for (int r = 0; r < trials; ++r) {
        auto tr = tasep_simulate(1, 1, p, 50000 + r);
        ++counts[tr.at(1, 1) + 1];
    }
    auto pinf = QBetaBinomialParams::checked(p.q, p.bmu, p.bnu, std::nullopt);
    double chi2 = 0.0;
    int cells = 0;
    for (long long v = 0; v <= 8; ++v) {
        double expect = phi_pmf(pinf, v) * trials;
        if (expect < 20.0) break;
        long long got = counts.count(v) ? counts[v] : 0;
        chi2 += (got - expect) * (got - expect) / expect;
        ++cells;
    }
    CHECK(chi2 < chi2_quantile(0.001, cells - 1));
}

TEST_CASE("boson matrix structure") {
    // unit row sums at a non-stochastic alpha
    auto m = boson_matrix(2, 3, 0.5, 1.7, 0.2);
    CHECK(m.dim() == 10);  // C(2+3,2)
    for (int r = 0; r < m.dim(); ++r)
        CHECK(m.row_sum(r) == doctest::Approx(1.0).epsilon(1e-12));
    // N = 1, k = 1 explicit entries
    double alpha = 0.45, nu = 0.15, q = 0.5;
    auto m1 = boson_matrix(1, 1, q, alpha, nu);
    long long from = m1.index_of({0, 1});
    long long to_moved = m1.index_of({1, 0});
    long long to_stay = m1.index_of({0, 1});
    CHECK(m1.at(from, to_moved) == doctest::Approx((alpha - nu) / (1 - nu)).epsilon(1e-13));
    CHECK(m1.at(from, to_stay) == doctest::Approx((1 - alpha) / (1 - nu)).epsilon(1e-13));
    // alpha = q/mu and q/nu (the duality operators) still have unit row sums
    for (double a : {q / 0.1, q / 0.2, q / -0.35}) {
        auto mb = boson_matrix(3, 2, q, a, 0.2);
        for (int r = 0; r < mb.dim(); ++r)
            CHECK(mb.row_sum(r) == doctest::Approx(1.0).epsilon(1e-11));
    }
}

TEST_CASE("q0 PushTASEP") {
    RngStream base(77);
    ParticleConfig c = ParticleConfig::step(8);
    for (int t = 1; t <= 10000; ++t) {
        q0_push_step(c, 0.5, -0.3, base.substream(t));
        REQUIRE(c.strictly_decreasing());
    }
    // first particle draws from gB(mu, (1-mu)/(1-nu))
    const int trials = 200000;
    std::map<long long, long long> counts;
    for (int r = 0; r < trials; ++r) {
        auto tr = q0_push_simulate(1, 1, 0.5, -0.3, 60000 + r);
        ++counts[-1 - tr.at(1, 1)];
    }
    double beta = (1.0 - 0.5) / (1.0 + 0.3);
    double chi2 = 0.0;
    int cells = 0;
    for (long long v = 0; v <= 10; ++v) {
        double expect = gb_pmf(0.5, beta, v) * trials;
        if (expect < 20.0) break;
        long long got = counts.count(v) ? counts[v] : 0;
        chi2 += (got - expect) * (got - expect) / expect;
        ++cells;
    }
    CHECK(chi2 < chi2_quantile(0.001, cells - 1));
    // nu = 0 reduces to the geometric PushTASEP first-particle law
    std::map<long long, long long> c0;
    for (int r = 0; r < trials; ++r) {
        auto tr = q0_push_simulate(1, 1, 0.5, 0.0, 90000 + r);
        ++c0[-1 - tr.at(1, 1)];
    }
    chi2 = 0.0;
    cells = 0;
    for (long long v = 0; v <= 10; ++v) {
        double expect = kernel_geometric(0.5, 0, 0, v) * trials;
        if (expect < 20.0) break;
        long long got = c0.count(v) ? c0[v] : 0;
        chi2 += (got - expect) * (got - expect) / expect;
        ++cells;
    }
    CHECK(chi2 < chi2_quantile(0.001, cells - 1));
}

TEST_CASE("x_observable") {
    auto cfg = ParticleConfig::step(3);
    for (int i = 1; i <= 3; ++i) CHECK(x_observable(cfg, i, 0.5) == 1.0);
    // X(1,1) = q^{ell} after a first-particle jump by ell; leftward jumps
    // from step data keep X inside (0, 1]
    CHECK(x_observable(-1 - 4, 1, 0.5) == doctest::Approx(std::pow(0.5, 4.0)).epsilon(1e-13));
    CHECK(x_observable(-1 - 4, 1, 0.5) <= 1.0);
}

TEST_CASE("Z recursion basics") {
    auto p = BetaParams::checked(1.0, 1.5);
    RngStream base(5);
    ZState st(4);
    for (int i = 1; i <= 4; ++i) CHECK(st.z(i, 0) == 1.0);
    for (int t = 1; t <= 10; ++t) {
        z_step(st, p, base.substream(t));
        for (int i = 1; i <= 4; ++i) {
            double z = st.z(i, t);
            REQUIRE(z > 0.0);
            REQUIRE(z <= 1.0);
            REQUIRE(st.ztilde(i, t) == 1.0 / z);
            REQUIRE(st.ztilde(i, t) >= 1.0);
        }
    }
    // nu_bar = 1/2 runs on the pure-B1 branch (r = 0)
    auto ph = BetaParams::checked(0.3, 0.5);
    ZState sth(3);
    for (int t = 1; t <= 10; ++t) z_step(sth, ph, base.substream(100 + t));
    for (int i = 1; i <= 3; ++i) CHECK(sth.z(i, 10) > 0.0);
    CHECK_THROWS_AS(BetaParams::checked(0.6, 0.45), domain_error);
}

TEST_CASE("z_step and ztilde_step agree in law on Z~(2,2)") {
    auto p = BetaParams::checked(1.0, 1.5);
    const int paths = 100000;
    std::vector<double> a(paths), b(paths);
    for (int r = 0; r < paths; ++r) {
        RngStream sa = RngStream(1000).substream(r);
        ZState za(2);
        z_step(za, p, sa.substream(1));
        z_step(za, p, sa.substream(2));
        a[r] = za.ztilde(2, 2);
        RngStream sb = RngStream(2000).substream(r);
        ZState zb(2);
        ztilde_step(zb, p, sb.substream(1));
        ztilde_step(zb, p, sb.substream(2));
        b[r] = zb.ztilde(2, 2);
    }
    double d = ks_two_sample(a, b);
    CHECK(d < ks_two_sample_critical(0.01, paths, paths));
}

TEST_CASE("q-Pochhammer ratio limit as q -> 1") {
    double q = 1.0 - 1e-4, r = 0.5, x = 1.2, y = 0.4;
    double lhs = (qpoch_inf(r * std::pow(q, y), q) / qpoch_inf(r * std::pow(q, x), q)).value();
    double rhs = std::pow(1.0 - r, x - y);
    CHECK(std::fabs(lhs - rhs) / rhs < 1e-3);
}
