#pragma once

#include "amc/quadrature.hpp"

#include <vector>

namespace amc {

/// Full parameterization of the mobile channel. Diffusion coefficients in
/// um^2/s^alpha, times in seconds, lengths in micrometres.
struct MobileChannelParams {
    double D_m = 5.0;
    double D_tx = 0.0;
    double D_rx = 0.0;
    double alpha = 1.0;
    double T_s = 1.0;
    int k = 1;
    double r0 = 10.0;

    /// The simulator accepts a frozen molecule (D_m = 0); analysis does not.
    void validate(bool allow_frozen_molecule = false) const;

    /// Relative diffusivity of the two devices.
    double D_tr() const { return D_tx + D_rx; }
    /// Molecule diffusivity relative to the receiver.
    double D_mr() const { return D_m + D_rx; }
    double sigma_k() const;
    /// b = k D_tr T_s^alpha, so that sigma_k^2 = 2b.
    double b() const;
    /// a = D_mr t_h^alpha.
    double a(double t_h) const;
    bool devices_static() const { return D_tr() == 0.0; }
};

/// Printed integrates to 1/alpha over (0, inf); Normalized is alpha times
/// Printed and integrates to one. They coincide at alpha = 1.
enum class FhtdVariant { Printed, Normalized };

/// Which closed form to use for the mobile density.
enum class ClosedForm { Printed, Corrected };

double static_fhtd(double t_h, double r0, double D, double alpha, FhtdVariant variant);

double static_hitting_cdf(double t, double r0, double D, double alpha, FhtdVariant variant);

/// Density of |N(r0, sigma_k^2)| evaluated at r_k.
double distance_pdf(double r_k, const MobileChannelParams& params);

/// Tail mass P(R_k > r) of the folded-normal distance.
double distance_tail(double r, const MobileChannelParams& params);

/// Average of the static density over the distance law by direct
/// quadrature; the oracle for both closed forms.
double mobile_fhtd_quadrature(double t_h, const MobileChannelParams& params, FhtdVariant variant,
                              const QuadratureSettings& quad = {});

/// The uncorrected closed form, kept for auditing. Singular at b = 0.
double mobile_fhtd_printed(double t_h, const MobileChannelParams& params);

/// Argument of the error function shared by both closed forms.
double closed_form_erf_argument(double r0, double a, double b);

/// Closed form obtained by evaluating the Gaussian moment integral. Reduces
/// to static_fhtd with D_mr when b = 0.
double mobile_fhtd_corrected(double t_h, const MobileChannelParams& params, FhtdVariant variant);

double mobile_fhtd(double t_h, const MobileChannelParams& params, FhtdVariant variant,
                   ClosedForm form);

/// F_h(t): integral of the mobile density over (0, t].
double hitting_cdf(double t, const MobileChannelParams& params, FhtdVariant variant,
                   const QuadratureSettings& quad = {}, ClosedForm form = ClosedForm::Corrected);

struct HittingTotal {
    double value = 0.0;         // F_h at the final horizon
    double tail_estimate = 0.0; // extrapolated remaining mass
    double horizon = 0.0;

    double total() const { return value + tail_estimate; }
};

/// F_h(inf). The horizon doubles until an extension adds less than
/// increment_tol.
HittingTotal hitting_prob_total(const MobileChannelParams& params, FhtdVariant variant,
                                const QuadratureSettings& quad = {},
                                ClosedForm form = ClosedForm::Corrected,
                                double increment_tol = 1e-4);

struct HittingCurve {
    std::vector<double> grid;
    std::vector<double> values;
    double tail_mass = 0.0;
};

/// Tabulates F_h over an ascending grid. Values are accumulated segment by
/// segment, so the curve is non-decreasing by construction.
HittingCurve tabulate_hitting_curve(const MobileChannelParams& params, FhtdVariant variant,
                                    const std::vector<double>& grid,
                                    const QuadratureSettings& quad = {},
                                    ClosedForm form = ClosedForm::Corrected);

enum class EtaMode {
    TruncatedMoment,  // integral of t f(t) over [0, T_s]
    ConditionalMean,  // the same divided by F_h(T_s)
};

double decision_threshold_eta(const MobileChannelParams& params, FhtdVariant variant,
                              const QuadratureSettings& quad = {},
                              EtaMode mode = EtaMode::TruncatedMoment,
                              ClosedForm form = ClosedForm::Corrected);

} // namespace amc
