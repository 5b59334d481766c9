#pragma once

#include "amc/config.hpp"

#include <string>
#include <vector>

namespace amc {

struct CheckResult {
    std::string name;
    bool passed = false;
    // Human-readable measurement, e.g. "max rel err 3.1e-12".
    std::string detail;
    // Informational checks are reported but never fail a run.
    bool informational = false;
};

struct OracleGridPoint {
    double alpha;
    double t;
    int k;
    double D_m;
    double D_tx;
    double D_rx;
};

/// alpha x t x k x (D_m, D_tx, D_rx): 4 x 6 x 2 x 3 points, r0 = 10, T_s = 1.
std::vector<OracleGridPoint> oracle_grid();

MobileChannelParams params_at(const OracleGridPoint& point);

struct ClosedFormDeviation {
    double max_rel_corrected = 0.0;
    double max_rel_printed = 0.0;
    double median_ratio_printed = 0.0; // oracle / printed
    std::size_t points = 0;
};

ClosedFormDeviation closed_form_deviation(const QuadratureSettings& quad = {});

CheckResult check_closed_form_oracle(const ClosedFormDeviation& d, double tol = 1e-8);
CheckResult report_printed_form(const ClosedFormDeviation& d);
CheckResult check_reduction();
CheckResult check_normalization();
CheckResult check_channel_sanity();

/// Static alpha = 1 particle simulation against the erfc law. The
/// tolerance covers 4 binomial standard errors plus `bias_budget`.
CheckResult check_spbs_static(std::size_t n_particles, std::uint64_t seed, unsigned threads,
                              double bias_budget = 0.005);

/// Runs every check. Sizes are small enough for an interactive run.
std::vector<CheckResult> run_validation_suite(const ExperimentConfig& config);

} // namespace amc
