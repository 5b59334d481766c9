#include "amc/fhtd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace amc {

namespace {

constexpr double kPi = std::numbers::pi;
// Gaussian mass beyond 12 standard deviations is below 1e-30.
constexpr double kTruncationSigmas = 12.0;

double variant_factor(double alpha, FhtdVariant variant) {
    return variant == FhtdVariant::Normalized ? alpha : 1.0;
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

// Integral of f over (0, t] after substituting u = t^(alpha/2). The mobile
// density behaves like t^(alpha/2 - 1) near zero; in u the integrand is
// bounded.
double integrate_from_zero(const RealFunction& f, double t, double alpha,
                           const QuadratureSettings& quad) {
    if (t == 0.0) return 0.0;
    const double power = 2.0 / alpha;
    const auto g = [&](double u) {
        const double th = std::pow(u, power);
        if (!(th > 0.0)) return 0.0;
        return f(th) * power * th / u;
    };
    return adaptive_quad(g, 0.0, std::pow(t, alpha / 2.0), quad).value;
}

} // namespace

void MobileChannelParams::validate(bool allow_frozen_molecule) const {
    if (!(r0 > 0.0) || !std::isfinite(r0)) throw std::invalid_argument("r0 must be positive");
    if (!(T_s > 0.0) || !std::isfinite(T_s)) throw std::invalid_argument("T_s must be positive");
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (!std::isfinite(D_m) || !(allow_frozen_molecule ? D_m >= 0.0 : D_m > 0.0)) {
        throw std::invalid_argument("D_m must be positive");
    }
    if (!(D_tx >= 0.0) || !std::isfinite(D_tx)) {
        throw std::invalid_argument("D_tx must be non-negative");
    }
    if (!(D_rx >= 0.0) || !std::isfinite(D_rx)) {
        throw std::invalid_argument("D_rx must be non-negative");
    }
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("alpha must lie in (0, 2]");
}

double MobileChannelParams::sigma_k() const {
    return std::sqrt(2.0 * b());
}

double MobileChannelParams::b() const {
    return k * D_tr() * std::pow(T_s, alpha);
}

double MobileChannelParams::a(double t_h) const {
    return D_mr() * std::pow(t_h, alpha);
}

double static_fhtd(double t_h, double r0, double D, double alpha, FhtdVariant variant) {
    if (!(t_h > 0.0)) throw std::invalid_argument("static_fhtd: t_h must be positive");
    if (!(r0 > 0.0)) throw std::invalid_argument("static_fhtd: r0 must be positive");
    if (!(D > 0.0)) throw std::invalid_argument("static_fhtd: D must be positive");
    const double a = D * std::pow(t_h, alpha);
    // sqrt(4 pi D t^(alpha+2)) = t sqrt(4 pi a)
    const double density = r0 / (t_h * std::sqrt(4.0 * kPi * a)) * std::exp(-r0 * r0 / (4.0 * a));
    return variant_factor(alpha, variant) * density;
}

double static_hitting_cdf(double t, double r0, double D, double alpha, FhtdVariant variant) {
    if (!(t >= 0.0)) throw std::invalid_argument("static_hitting_cdf: t must be non-negative");
    if (!(r0 > 0.0)) throw std::invalid_argument("static_hitting_cdf: r0 must be positive");
    if (!(D > 0.0)) throw std::invalid_argument("static_hitting_cdf: D must be positive");
    if (t == 0.0) return 0.0;
    const double p = erf_pair(r0 / std::sqrt(4.0 * D * std::pow(t, alpha))).erfc;
    return variant == FhtdVariant::Normalized ? p : p / alpha;
}

double distance_pdf(double r_k, const MobileChannelParams& params) {
    params.validate();
    if (!(r_k >= 0.0)) throw std::invalid_argument("distance_pdf: r_k must be non-negative");
    const double sigma = params.sigma_k();
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("distance_pdf: sigma_k is zero, the distance is deterministic");
    }
    // Folded-normal form; algebraically identical to the two-exponential sum
    // but free of overflow for small sigma.
    return (normal_pdf((r_k - params.r0) / sigma) + normal_pdf((r_k + params.r0) / sigma)) / sigma;
}

double distance_tail(double r, const MobileChannelParams& params) {
    params.validate();
    const double sigma = params.sigma_k();
    if (!(sigma > 0.0)) return r < params.r0 ? 1.0 : 0.0;
    const double s = std::sqrt(2.0) * sigma;
    return 0.5 * (erf_pair((r - params.r0) / s).erfc + erf_pair((r + params.r0) / s).erfc);
}

double mobile_fhtd_quadrature(double t_h, const MobileChannelParams& params, FhtdVariant variant,
                              const QuadratureSettings& quad) {
    params.validate();
    if (!(t_h > 0.0)) throw std::invalid_argument("mobile_fhtd_quadrature: t_h must be positive");
    if (params.devices_static()) {
        return static_fhtd(t_h, params.r0, params.D_mr(), params.alpha, variant);
    }
    const double sigma = params.sigma_k();
    const double D_mr = params.D_mr();
    const auto integrand = [&](double r) {
        if (!(r > 0.0)) return 0.0;
        return static_fhtd(t_h, r, D_mr, params.alpha, variant) * distance_pdf(r, params);
    };
    // Both Gaussian components are negligible outside r0 +- 12 sigma.
    const double lo = std::max(0.0, params.r0 - kTruncationSigmas * sigma);
    const double hi = params.r0 + kTruncationSigmas * sigma;
    return adaptive_quad(integrand, lo, params.r0, quad).value +
           adaptive_quad(integrand, params.r0, hi, quad).value;
}

double closed_form_erf_argument(double r0, double a, double b) {
    return 0.5 * r0 * std::sqrt(a / (b * (a + b)));
}

double mobile_fhtd_printed(double t_h, const MobileChannelParams& params) {
    params.validate();
    if (!(t_h > 0.0)) throw std::invalid_argument("mobile_fhtd_printed: t_h must be positive");
    const double b = params.b();
    if (!(b > 0.0)) throw std::invalid_argument("mobile_fhtd_printed: singular at b = 0");
    const double a = params.a(t_h);
    const double r0 = params.r0;
    const double s = a + b;
    const double first = a * b * std::exp(-r0 * r0 / (2.0 * b)) / (t_h * kPi * s);
    const double second = (r0 / t_h) * std::sqrt(1.0 / (4.0 * kPi * s * s * s)) *
                          std::exp(-r0 * r0 / (4.0 * s)) *
                          erf_pair(closed_form_erf_argument(r0, a, b)).erf;
    return first + second;
}

double mobile_fhtd_corrected(double t_h, const MobileChannelParams& params, FhtdVariant variant) {
    params.validate();
    if (!(t_h > 0.0)) throw std::invalid_argument("mobile_fhtd_corrected: t_h must be positive");
    const double b = params.b();
    if (b == 0.0) return static_fhtd(t_h, params.r0, params.D_mr(), params.alpha, variant);
    const double a = params.a(t_h);
    const double r0 = params.r0;
    const double s = a + b;
    const double first = std::sqrt(a * b) * std::exp(-r0 * r0 / (4.0 * b)) / (kPi * t_h * s);
    const double second = r0 * a / (2.0 * std::sqrt(kPi) * t_h * s * std::sqrt(s)) *
                          std::exp(-r0 * r0 / (4.0 * s)) *
                          erf_pair(closed_form_erf_argument(r0, a, b)).erf;
    return variant_factor(params.alpha, variant) * (first + second);
}

double mobile_fhtd(double t_h, const MobileChannelParams& params, FhtdVariant variant,
                   ClosedForm form) {
    if (params.devices_static()) {
        params.validate();
        return static_fhtd(t_h, params.r0, params.D_mr(), params.alpha, variant);
    }
    if (form == ClosedForm::Printed) {
        return variant_factor(params.alpha, variant) * mobile_fhtd_printed(t_h, params);
    }
    return mobile_fhtd_corrected(t_h, params, variant);
}

double hitting_cdf(double t, const MobileChannelParams& params, FhtdVariant variant,
                   const QuadratureSettings& quad, ClosedForm form) {
    params.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("hitting_cdf: t must be non-negative");
    if (params.devices_static()) {
        return static_hitting_cdf(t, params.r0, params.D_mr(), params.alpha, variant);
    }
    const auto f = [&](double th) { return mobile_fhtd(th, params, variant, form); };
    return integrate_from_zero(f, t, params.alpha, quad);
}

HittingTotal hitting_prob_total(const MobileChannelParams& params, FhtdVariant variant,
                                const QuadratureSettings& quad, ClosedForm form,
                                double increment_tol) {
    params.validate();
    const double start = std::max(1.0, params.T_s);
    const auto f = [&](double th) { return mobile_fhtd(th, params, variant, form); };
    HittingTotal out;
    const double head = integrate_from_zero(f, start, params.alpha, quad);
    const ImproperResult rest =
        improper_quad(f, start, quad, HorizonOptions{start, increment_tol, 256});
    out.value = head + rest.value;
    out.tail_estimate = rest.tail_estimate;
    out.horizon = rest.horizon;
    return out;
}

HittingCurve tabulate_hitting_curve(const MobileChannelParams& params, FhtdVariant variant,
                                    const std::vector<double>& grid,
                                    const QuadratureSettings& quad, ClosedForm form) {
    params.validate();
    HittingCurve curve;
    curve.grid = grid;
    curve.values.reserve(grid.size());
    const auto f = [&](double th) { return mobile_fhtd(th, params, variant, form); };
    double previous_t = 0.0;
    double accumulated = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        if (!(t >= previous_t)) {
            throw std::invalid_argument("hitting curve grid must be ascending and non-negative");
        }
        if (params.devices_static()) {
            accumulated = std::max(
                accumulated, static_hitting_cdf(t, params.r0, params.D_mr(), params.alpha, variant));
        } else if (previous_t == 0.0) {
            accumulated = integrate_from_zero(f, t, params.alpha, quad);
        } else if (t > previous_t) {
            accumulated += adaptive_quad(f, previous_t, t, quad).value;
        }
        curve.values.push_back(accumulated);
        previous_t = t;
    }
    try {
        const HittingTotal total = hitting_prob_total(params, variant, quad, form);
        curve.tail_mass = grid.empty() ? total.total() : total.total() - curve.values.back();
    } catch (const QuadratureError&) {
        // No finite total mass (the printed closed form has a 1/t tail).
        curve.tail_mass = std::nan("");
    }
    return curve;
}

double decision_threshold_eta(const MobileChannelParams& params, FhtdVariant variant,
                              const QuadratureSettings& quad, EtaMode mode, ClosedForm form) {
    params.validate();
    const auto moment = [&](double th) { return th * mobile_fhtd(th, params, variant, form); };
    const double eta = integrate_from_zero(moment, params.T_s, params.alpha, quad);
    if (mode == EtaMode::TruncatedMoment) return eta;
    const double mass = hitting_cdf(params.T_s, params, variant, quad, form);
    if (!(mass > 0.0)) {
        throw std::domain_error("conditional-mean threshold undefined: F_h(T_s) is zero");
    }
    return eta / mass;
}

} // namespace amc
