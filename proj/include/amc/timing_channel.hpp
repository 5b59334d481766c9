#pragma once

#include "amc/fhtd.hpp"

#include <array>
#include <functional>

namespace amc {

/// Timing-modulation slots. Bit 0 is released at T0 = 0, bit 1 at T1; the
/// channel use lasts Tu and arrivals before eta decode as 0.
struct TimingScheme {
    double T0 = 0.0;
    double T1 = 10.0;
    double Tu = 40.0;
    double eta = 0.0;

    void validate() const;
    /// eta >= T1 is legal but the two detection windows then overlap.
    bool slot_overlap() const { return eta >= T1; }
};

struct TransitionProbs {
    double p0 = 0.0;
    double p1 = 0.0;
    double eps0 = 0.0;
    double eps1 = 0.0;

    void validate() const;
    /// Mass of symbol 0 decoded as 1, and of symbol 1 decoded as 0.
    double cross0() const { return 1.0 - p0 - eps0; }
    double cross1() const { return 1.0 - p1 - eps1; }
};

struct OutputDist {
    double pr0 = 0.0;
    double pr1 = 0.0;
    double pr_eps = 0.0;

    std::array<double, 3> as_array() const { return {pr0, pr1, pr_eps}; }
};

using CdfAccessor = std::function<double(double)>;

/// F is evaluated only at non-negative arguments; F(x) = 0 for x < 0.
/// F_h(inf - T1) is read as F_h(inf).
TransitionProbs transition_probs(const TimingScheme& scheme, const CdfAccessor& F, double F_total);

OutputDist output_distribution(const TransitionProbs& probs, double beta);

/// Shannon entropy in bits with 0 log 0 = 0.
double ternary_entropy(const std::array<double, 3>& dist);

/// I(T_r; T_a) in bits for input distribution Pr(bit 0) = beta.
double mutual_information(const TransitionProbs& probs, double beta);

struct AirResult {
    double beta_star;
    double air_bits;
};

AirResult maximize_air(const TransitionProbs& probs, double tol = 1e-9);

/// Everything needed to go from channel parameters to a BEC.
struct ChannelSetup {
    FhtdVariant variant = FhtdVariant::Normalized;
    ClosedForm closed_form = ClosedForm::Corrected;
    EtaMode eta_mode = EtaMode::TruncatedMoment;
    double T1 = 10.0;
    double Tu = 40.0;
    // When set, overrides the computed threshold.
    double eta_override = 0.0;
};

struct ChannelAnalysis {
    TimingScheme scheme;
    TransitionProbs probs;
    double F_total = 0.0;
    // Set when F values above one were clipped (Printed variant, alpha < 1).
    bool clipped = false;
};

ChannelAnalysis analyze_channel(const MobileChannelParams& params, const ChannelSetup& setup,
                                const QuadratureSettings& quad = {});

} // namespace amc
