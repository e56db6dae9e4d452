#pragma once

#include <cstdint>
#include <vector>

#include "qhahn/kernel.hpp"
#include "qhahn/rng.hpp"

namespace qhahn {

/// Particle configuration x_1 > x_2 > ... > x_N on the integer lattice,
/// with the virtual particle x_0 = +infinity.
struct ParticleConfig {
    std::vector<long long> positions;

    /// Step initial data x_i = -i, i = 1..N.
    static ParticleConfig step(int n);

    int size() const { return static_cast<int>(positions.size()); }
    bool strictly_decreasing() const;
};

/// q-Hahn TASEP parameters: q in (0,1), 0 <= bnu <= bmu < 1.
struct TasepParams {
    double q, bmu, bnu;
    static TasepParams checked(double q, double bmu, double bnu);
};

/// Beta-limit parameters: 0 < mu_bar < nu_bar, nu_bar >= 1/2.
struct BetaParams {
    double mu_bar, nu_bar;
    static BetaParams checked(double mu_bar, double nu_bar);
};

/// One q-Hahn PushTASEP step (sequential in i; jumps to the left). Particle
/// i draws from time_stream.substream(i), so the law of the first m
/// particles does not depend on N.
void push_step(ParticleConfig& config, const JumpSampler& sampler, const RngStream& time_stream);

/// One q-Hahn TASEP step (parallel update from pre-step gaps; jumps right).
void tasep_step(ParticleConfig& config, const TasepParams& params, const RngStream& time_stream);

/// One geometric-Bernoulli PushTASEP step (the q = 0 kernel).
void q0_push_step(ParticleConfig& config, double mu, double nu, const RngStream& time_stream);

/// Positions over time; row t holds the configuration after t steps.
struct Trajectory {
    int particles = 0;
    int steps = 0;
    std::vector<long long> x;  // (steps+1) x particles, row-major

    long long at(int t, int i) const {  // i is 1-based
        return x[static_cast<std::size_t>(t) * particles + (i - 1)];
    }
};

Trajectory push_simulate(int particles, int steps, const PushParams& params,
                         std::uint64_t seed);
Trajectory tasep_simulate(int particles, int steps, const TasepParams& params,
                          std::uint64_t seed);
Trajectory q0_push_simulate(int particles, int steps, double mu, double nu,
                            std::uint64_t seed);

/// X(i,t) = q^{-(x_i(t) + i)}.
double x_observable(const ParticleConfig& config, int i, double q);
double x_observable(long long xi, int i, double q);

/// Boson occupation vector (y_0, ..., y_N).
struct BosonConfig {
    std::vector<long long> y;
    long long level() const;
    int sites() const { return static_cast<int>(y.size()) - 1; }
};

/// Dense q-Hahn Boson transition matrix on the level-k sector of Y^N.
/// alpha is unrestricted: entries may be negative, rows still sum to one.
struct BosonMatrix {
    int sites = 0;      // N
    long long level = 0;  // k
    std::vector<std::vector<long long>> states;  // sector, lexicographic
    std::vector<double> a;                       // row-major dim x dim

    int dim() const { return static_cast<int>(states.size()); }
    double at(int row, int col) const { return a[static_cast<std::size_t>(row) * dim() + col]; }
    long long index_of(const std::vector<long long>& y) const;  // -1 if absent
    double row_sum(int row) const;
};

BosonMatrix boson_matrix(int sites, long long level, double q, double alpha, double nu);

/// The q -> 1 beta-limit process Z(i,t) with companion Z_tilde = Z^{-1}.
/// Grid storage: column t is appended by z_step / ztilde_step.
class ZState {
  public:
    explicit ZState(int rows);

    int rows() const { return rows_; }
    int time() const { return t_; }
    double z(int i, int t) const { return zgrid_[idx(i, t)]; }          // i is 1-based
    double ztilde(int i, int t) const { return ztgrid_[idx(i, t)]; }

    void append_column(const std::vector<double>& zcol);

  private:
    std::size_t idx(int i, int t) const {
        return static_cast<std::size_t>(t) * rows_ + (i - 1);
    }
    int rows_;
    int t_ = 0;
    std::vector<double> zgrid_, ztgrid_;
};

/// Advance Z by one time step via the NBB1 recurrence (Z-side sampling).
/// Ties between Z(i,t-1) and Z(i-1,t) raise tie_error unless resolve_ties,
/// in which case the limit law Z * B1(Z/X, mu_bar, 2 nu_bar - 1) applies.
void z_step(ZState& state, const BetaParams& params, const RngStream& time_stream,
            bool resolve_ties = false);

/// Advance by one step via the inverse-variables recursion
/// Z~(i,t) = Y~ max + (1 - Y~) min with NBBeta^{-1} weights.
void ztilde_step(ZState& state, const BetaParams& params, const RngStream& time_stream,
                 bool resolve_ties = false);

}  // namespace qhahn
