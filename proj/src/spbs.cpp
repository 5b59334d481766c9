#include "amc/spbs.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace amc {

namespace {

std::vector<double> sd_table(const DiffusionSpec& spec, double dt, IncrementScheme scheme,
                             std::int64_t steps) {
    std::vector<double> table(static_cast<std::size_t>(steps));
    for (std::int64_t n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        table[static_cast<std::size_t>(n)] = std::sqrt(increment_variance(spec, t, dt, scheme));
    }
    return table;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(
                                                                          std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace

void SimConfig::validate() const {
    params.validate(true);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    if (n_particles < 1) throw std::invalid_argument("n_particles must be at least 1");
    const double release = effective_release_time();
    if (!(release >= 0.0)) throw std::invalid_argument("release_time must be non-negative");
    if (!(horizon > release) || !std::isfinite(horizon)) {
        throw std::invalid_argument("horizon must exceed release_time");
    }
    const double steps = release / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
        throw std::invalid_argument("release_time must be a multiple of dt");
    }
    if (bridge_correction && params.alpha != 1.0) {
        throw std::invalid_argument("bridge correction is only exact for alpha = 1");
    }
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
}

double SimConfig::effective_release_time() const {
    return release_time ? *release_time : params.k * params.T_s;
}

std::int64_t SimConfig::release_step() const {
    return std::llround(effective_release_time() / dt);
}

std::int64_t SimConfig::total_steps() const {
    return static_cast<std::int64_t>(std::floor(horizon / dt + 1e-9));
}

WorldState WorldState::initial(const MobileChannelParams& params) {
    WorldState s;
    s.z_tx = 0.0;
    s.z_rx = params.r0;
    s.z_m = 0.0;
    s.prev_z_tx = s.z_tx;
    s.prev_z_rx = s.z_rx;
    return s;
}

bool apply_device_proposal(WorldState& state, double proposed_tx, double proposed_rx) {
    state.prev_z_tx = state.z_tx;
    state.prev_z_rx = state.z_rx;
    if (proposed_tx >= proposed_rx) {
        state.last_step_reverted = true;
        ++state.collision_reverts;
        return true;
    }
    state.z_tx = proposed_tx;
    state.z_rx = proposed_rx;
    state.last_step_reverted = false;
    return false;
}

SpbsEngine::SpbsEngine(const SimConfig& config) : config_(config) {
    config_.validate();
    const auto& p = config_.params;
    const std::int64_t steps = config_.total_steps() + 1;
    tx_sd_ = sd_table({p.alpha, p.D_tx}, config_.dt, config_.scheme, steps);
    rx_sd_ = sd_table({p.alpha, p.D_rx}, config_.dt, config_.scheme, steps);
    // The molecule's clock starts at its release.
    mol_sd_ = sd_table({p.alpha, p.D_m}, config_.dt, config_.scheme, steps);
    mol_D_ = p.D_m;
    rel_D_ = p.D_m + p.D_rx;
}

double SpbsEngine::device_sd(const std::vector<double>& table, std::int64_t step) const {
    const auto i = static_cast<std::size_t>(std::min<std::int64_t>(step, table.size() - 1));
    return table[i];
}

bool SpbsEngine::step_devices(WorldState& state, RandomStream& rng) const {
    const double sd_tx = device_sd(tx_sd_, state.step);
    const double sd_rx = device_sd(rx_sd_, state.step);
    ++state.step;
    if (sd_tx == 0.0 && sd_rx == 0.0) {
        state.prev_z_tx = state.z_tx;
        state.prev_z_rx = state.z_rx;
        state.last_step_reverted = false;
        return false;
    }
    const double dz_tx = sd_tx == 0.0 ? 0.0 : sd_tx * rng.gaussian();
    const double dz_rx = sd_rx == 0.0 ? 0.0 : sd_rx * rng.gaussian();
    return apply_device_proposal(state, state.z_tx + dz_tx, state.z_rx + dz_rx);
}

void SpbsEngine::release_molecule(WorldState& state) const {
    if (state.molecule_released) throw std::logic_error("molecule already released");
    if (state.step < config_.release_step()) {
        throw std::logic_error("release attempted before the release instant");
    }
    state.z_m = state.z_tx;
    state.molecule_released = true;
    state.release_step = state.step;
}

std::optional<double> SpbsEngine::step_molecule_and_detect(WorldState& state,
                                                           RandomStream& rng) const {
    if (!state.molecule_released) throw std::logic_error("molecule not released");
    const std::int64_t age = state.step - state.release_step;
    const double gap_before = state.z_rx - state.z_m;

    step_devices(state, rng);
    const double sd_m = device_sd(mol_sd_, age);
    if (sd_m > 0.0) state.z_m += sd_m * rng.gaussian();

    const double gap_after = state.z_rx - state.z_m;
    const double hit_time = static_cast<double>(state.step - state.release_step) * config_.dt;
    if (gap_after <= 0.0) return hit_time;

    if (config_.bridge_correction) {
        // Probability that a Brownian bridge between two positive gaps
        // touched zero inside the step.
        const double D = state.last_step_reverted ? mol_D_ : rel_D_;
        const double u = rng.uniform();
        if (D > 0.0 && u < std::exp(-gap_before * gap_after / (D * config_.dt))) return hit_time;
    }
    return std::nullopt;
}

SpbsEngine::Trial SpbsEngine::run_trial(std::uint64_t index) const {
    RandomStream rng = RandomStream::substream(config_.seed, index);
    WorldState state = WorldState::initial(config_.params);
    const std::int64_t release = config_.release_step();
    const std::int64_t last = config_.total_steps();

    while (state.step < release) step_devices(state, rng);
    if (config_.delay_release_after_collision && state.last_step_reverted && state.step < last) {
        step_devices(state, rng);
    }
    release_molecule(state);

    Trial trial;
    while (state.step < last) {
        if (auto hit = step_molecule_and_detect(state, rng)) {
            trial.hit_time = hit;
            break;
        }
    }
    trial.collision_reverts = state.collision_reverts;
    return trial;
}

double SpbsEngine::release_distance(std::uint64_t index) const {
    RandomStream rng = RandomStream::substream(config_.seed, index);
    WorldState state = WorldState::initial(config_.params);
    const std::int64_t release = config_.release_step();
    while (state.step < release) step_devices(state, rng);
    return state.z_rx - state.z_tx;
}

SimOutcome simulate_fhtd(const SimConfig& config) {
    const SpbsEngine engine(config);
    std::vector<SpbsEngine::Trial> trials(config.n_particles);
    parallel_for(config.n_particles, config.threads,
                 [&](std::size_t i) { trials[i] = engine.run_trial(i); });

    SimOutcome out;
    out.n_particles = config.n_particles;
    out.horizon = config.horizon;
    out.release_time = config.effective_release_time();
    for (const auto& trial : trials) {
        if (trial.hit_time) {
            out.hit_times.push_back(*trial.hit_time);
        } else {
            ++out.n_censored;
        }
        out.n_collision_reverts += trial.collision_reverts;
    }
    return out;
}

std::vector<double> simulate_release_distance(const SimConfig& config) {
    const SpbsEngine engine(config);
    std::vector<double> distances(config.n_particles);
    parallel_for(config.n_particles, config.threads,
                 [&](std::size_t i) { distances[i] = engine.release_distance(i); });
    return distances;
}

double empirical_cdf(const SimOutcome& outcome, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("empirical_cdf: t must be non-negative");
    if (outcome.n_particles == 0) return 0.0;
    const auto hits = std::count_if(outcome.hit_times.begin(), outcome.hit_times.end(),
                                    [t](double h) { return h <= t; });
    return static_cast<double>(hits) / static_cast<double>(outcome.n_particles);
}

std::vector<double> empirical_cdf(const SimOutcome& outcome, const std::vector<double>& grid) {
    std::vector<double> sorted = outcome.hit_times;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(grid.size());
    const double n = static_cast<double>(std::max<std::size_t>(outcome.n_particles, 1));
    for (const double t : grid) {
        if (!(t >= 0.0)) throw std::invalid_argument("empirical_cdf: t must be non-negative");
        const auto hits = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
        out.push_back(static_cast<double>(hits) / n);
    }
    return out;
}

} // namespace amc
