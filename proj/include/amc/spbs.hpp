#pragma once

#include "amc/fhtd.hpp"
#include "amc/sbm.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace amc {

/// Particle-based simulation settings. Devices start at z_tx = 0 and
/// z_rx = r0; the molecule leaves the TX at release_time.
struct SimConfig {
    MobileChannelParams params;
    double dt = 0.5;
    std::size_t n_particles = 10000;
    double horizon = 100.0;
    std::uint64_t seed = 1;
    IncrementScheme scheme = IncrementScheme::ExactTimeChange;
    // Defaults to k * T_s.
    std::optional<double> release_time;
    // Brownian-bridge crossing check inside each step; alpha = 1 only.
    bool bridge_correction = false;
    // Postpone the release by one step when the step ending at the release
    // instant was a collision revert.
    bool delay_release_after_collision = false;
    unsigned threads = 1;

    void validate() const;
    double effective_release_time() const;
    std::int64_t release_step() const;
    std::int64_t total_steps() const;
};

struct WorldState {
    double z_tx = 0.0;
    double z_rx = 0.0;
    double z_m = 0.0;
    std::int64_t step = 0;
    bool molecule_released = false;
    std::int64_t release_step = 0;
    double prev_z_tx = 0.0;
    double prev_z_rx = 0.0;
    bool last_step_reverted = false;
    std::uint64_t collision_reverts = 0;

    static WorldState initial(const MobileChannelParams& params);
};

struct SimOutcome {
    std::vector<double> hit_times; // seconds after release, in trial order
    std::size_t n_particles = 0;
    std::size_t n_censored = 0;
    std::uint64_t n_collision_reverts = 0;
    double horizon = 0.0;
    double release_time = 0.0;
};

/// Applies a proposed device move. Crossing or coinciding proposals are
/// rejected and both devices keep their positions. Returns true on revert.
bool apply_device_proposal(WorldState& state, double proposed_tx, double proposed_rx);

/// Step machinery with per-step standard deviations precomputed for one
/// configuration. Shared read-only between worker threads.
class SpbsEngine {
  public:
    explicit SpbsEngine(const SimConfig& config);

    const SimConfig& config() const { return config_; }

    /// Moves TX and RX one step and advances the clock. Returns true when
    /// the proposal was reverted.
    bool step_devices(WorldState& state, RandomStream& rng) const;

    void release_molecule(WorldState& state) const;

    /// Advances molecule and devices one step. Returns the hit time,
    /// measured from release, when the molecule reaches the RX.
    std::optional<double> step_molecule_and_detect(WorldState& state, RandomStream& rng) const;

    struct Trial {
        std::optional<double> hit_time;
        std::uint64_t collision_reverts = 0;
    };

    Trial run_trial(std::uint64_t index) const;

    /// TX-RX separation at the release instant for one trial.
    double release_distance(std::uint64_t index) const;

  private:
    double device_sd(const std::vector<double>& table, std::int64_t step) const;

    SimConfig config_;
    double mol_D_ = 0.0;
    double rel_D_ = 0.0;
    std::vector<double> tx_sd_;
    std::vector<double> rx_sd_;
    std::vector<double> mol_sd_;
};

SimOutcome simulate_fhtd(const SimConfig& config);

std::vector<double> simulate_release_distance(const SimConfig& config);

/// Fraction of all trials (censored ones count as misses) with hit time <= t.
double empirical_cdf(const SimOutcome& outcome, double t);

std::vector<double> empirical_cdf(const SimOutcome& outcome, const std::vector<double>& grid);

} // namespace amc
