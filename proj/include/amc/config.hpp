#pragma once

#include "amc/fhtd.hpp"
#include "amc/spbs.hpp"
#include "amc/timing_channel.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace amc {

/// A malformed or invalid configuration entry. `key` is "section.key".
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const { return key_; }

  private:
    std::string key_;
};

struct DeviceSet {
    double D_tx;
    double D_rx;
};

enum class MobileDevice { Tx, Rx, Both };

struct TimeGrid {
    double t_min = 0.5;
    double t_max = 50.0;
    double t_step = 0.5;

    std::vector<double> points() const;
};

/// Everything a CLI run needs. Defaults are the reference parameter
/// sets; all quantities are stored in um and s.
struct ExperimentConfig {
    MobileChannelParams channel;

    double T1 = 10.0;
    double Tu = 40.0;
    EtaMode eta_mode = EtaMode::TruncatedMoment;
    double eta_override = 0.0;

    double dt = 0.5;
    std::size_t n_particles = 10000;
    double horizon = 100.0;
    std::uint64_t seed = 1;
    IncrementScheme scheme = IncrementScheme::ExactTimeChange;
    unsigned threads = 1;
    bool bridge = false;
    bool delay_release = false;
    double release_time = -1.0; // negative: k * T_s
    double hist_bin = 0.0;      // zero: dt

    FhtdVariant variant = FhtdVariant::Normalized;
    ClosedForm closed_form = ClosedForm::Corrected;

    TimeGrid fhtd_grid{0.5, 50.0, 0.5};
    TimeGrid hitting_grid{0.0, 40.0, 0.5};
    double r_max = 60.0;
    double r_step = 0.01;
    double beta_step = 0.01;

    std::vector<double> alphas{0.8, 1.0, 1.1};
    std::vector<double> hitting_D_rx{0.5, 50.0};
    std::vector<DeviceSet> fhtd_devices{{0.0, 5.0}, {5.0, 0.0}, {5.0, 5.0}};
    std::vector<DeviceSet> distance_devices{{1.0, 1.0}, {5.0, 5.0}};
    std::vector<double> mobility{0.5, 5.0};
    MobileDevice mobility_device = MobileDevice::Tx;
    // RX diffusivity held fixed while the TX mobility is swept.
    double air_fixed_D_rx = 0.5;

    bool fhtd_spbs = false;
    std::string out_dir = "out";

    void validate() const;
    SimConfig sim_config() const;
    SimConfig sim_config(const MobileChannelParams& params) const;
    ChannelSetup channel_setup() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(dump_config(c)) reproduces c. Without
/// runtime settings (threads, output dir) the dump identifies the
/// experiment alone.
std::string dump_config(const ExperimentConfig& config, bool include_runtime = true);

/// 64-bit FNV-1a of the dump without runtime settings.
std::uint64_t config_hash(const ExperimentConfig& config);

// Unit conversion to the internal um / s system. Throw ConfigError for
// unknown units.
double diffusion_to_um2_per_s(double value, const std::string& unit);
double length_to_um(double value, const std::string& unit);
double time_to_s(double value, const std::string& unit);

FhtdVariant parse_variant(const std::string& text);
ClosedForm parse_closed_form(const std::string& text);
IncrementScheme parse_scheme(const std::string& text);
std::string to_string(FhtdVariant v);
std::string to_string(ClosedForm f);
std::string to_string(IncrementScheme s);

} // namespace amc
