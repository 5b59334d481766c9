#pragma once

#include "amc/config.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace amc {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitConfig = 2,
};

/// A set of output files written all-or-nothing: each file goes to a
/// temporary name first and is renamed into place; on failure every file
/// already placed is removed.
class OutputSet {
  public:
    void add(std::string name, std::string content);
    /// Returns the final paths. Throws std::runtime_error on I/O failure.
    std::vector<std::string> commit(const std::string& dir) const;

  private:
    std::vector<std::pair<std::string, std::string>> files_;
};

/// CSV number format: %.12g, so reruns are byte-identical.
std::string format_number(double v);

struct CommandResult {
    int exit_code = kExitOk;
    std::vector<std::string> files;
};

// Each command computes everything in memory, then writes its files into
// config.out_dir. Messages go to `log`.
CommandResult cmd_fhtd(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_hitting(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_distance_pdf(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_simulate(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_air(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_validate(const ExperimentConfig& config, std::ostream& log);

/// Channel parameters for one AIR curve.
MobileChannelParams air_params(const ExperimentConfig& config, double alpha, double mobility);

} // namespace amc
