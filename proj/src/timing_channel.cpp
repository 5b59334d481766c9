#include "amc/timing_channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace amc {

namespace {

constexpr double kProbTol = 1e-9;
// Quadrature overshoot of a normalized curve is not reported as clipping.
constexpr double kClipTolerance = 1e-6;

bool is_probability(double p) {
    return p >= -kProbTol && p <= 1.0 + kProbTol;
}

double clamp01(double p) {
    return std::clamp(p, 0.0, 1.0);
}

double entropy_term(double p) {
    return p > 0.0 ? -p * std::log2(p) : 0.0;
}

} // namespace

void TimingScheme::validate() const {
    if (T0 != 0.0) throw std::invalid_argument("timing scheme requires T0 = 0");
    if (!(T1 > T0)) throw std::invalid_argument("timing scheme requires T1 > 0");
    if (!(Tu > T1)) throw std::invalid_argument("timing scheme requires Tu > T1");
    if (!(eta > 0.0 && eta < Tu)) throw std::invalid_argument("eta must lie in (0, Tu)");
}

void TransitionProbs::validate() const {
    for (const double p : {p0, p1, eps0, eps1}) {
        if (!is_probability(p)) {
            std::ostringstream msg;
            msg << "transition probability " << p << " outside [0, 1]";
            throw std::invalid_argument(msg.str());
        }
    }
    if (p0 + eps0 > 1.0 + kProbTol || p1 + eps1 > 1.0 + kProbTol) {
        throw std::invalid_argument("transition probabilities exceed unit mass");
    }
}

TransitionProbs transition_probs(const TimingScheme& scheme, const CdfAccessor& F, double F_total) {
    scheme.validate();
    const auto cdf = [&](double x) { return x <= 0.0 ? 0.0 : F(x); };

    const double F_eta = cdf(scheme.eta);
    const double F_u = cdf(scheme.Tu);
    const double F_u1 = cdf(scheme.Tu - scheme.T1);
    const double F_eta1 = cdf(scheme.eta - scheme.T1);

    constexpr double kCurveTol = 1e-6;
    if (F_total < F_u - kCurveTol) {
        std::ostringstream msg;
        msg << "inconsistent hitting curve: F(inf) = " << F_total << " < F(Tu) = " << F_u;
        throw std::invalid_argument(msg.str());
    }

    TransitionProbs out;
    out.p0 = F_eta;
    out.p1 = std::max(0.0, F_u1 - F_eta1);
    out.eps0 = std::max(0.0, F_total - F_u);
    out.eps1 = std::max(0.0, F_total - F_u1);
    out.validate();
    return out;
}

OutputDist output_distribution(const TransitionProbs& probs, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
    OutputDist d;
    d.pr0 = beta * probs.p0 + (1.0 - beta) * probs.cross1();
    d.pr1 = (1.0 - beta) * probs.p1 + beta * probs.cross0();
    d.pr_eps = (1.0 - beta) * probs.eps1 + beta * probs.eps0;
    return d;
}

double ternary_entropy(const std::array<double, 3>& dist) {
    double sum = 0.0;
    for (const double p : dist) {
        if (!(p >= -kProbTol)) throw std::invalid_argument("entropy of a negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbTol) {
        std::ostringstream msg;
        msg << "entropy of a distribution summing to " << sum;
        throw std::invalid_argument(msg.str());
    }
    double h = 0.0;
    for (const double p : dist) h += entropy_term(p);
    return h;
}

double mutual_information(const TransitionProbs& probs, double beta) {
    const OutputDist out = output_distribution(probs, beta);
    const double h_out = ternary_entropy(out.as_array());
    const double h0 = ternary_entropy({probs.p0, probs.cross0(), probs.eps0});
    const double h1 = ternary_entropy({probs.cross1(), probs.p1, probs.eps1});
    return std::max(0.0, h_out - beta * h0 - (1.0 - beta) * h1);
}

AirResult maximize_air(const TransitionProbs& probs, double tol) {
    probs.validate();
    const auto objective = [&](double beta) { return mutual_information(probs, beta); };
    const MaximizeResult m = maximize_unimodal(objective, 0.0, 1.0, tol);
    return {m.argmax, m.max};
}

ChannelAnalysis analyze_channel(const MobileChannelParams& params, const ChannelSetup& setup,
                                const QuadratureSettings& quad) {
    params.validate();
    ChannelAnalysis out;
    out.scheme.T1 = setup.T1;
    out.scheme.Tu = setup.Tu;
    out.scheme.eta = setup.eta_override > 0.0
                         ? setup.eta_override
                         : decision_threshold_eta(params, setup.variant, quad, setup.eta_mode,
                                                  setup.closed_form);
    out.scheme.validate();

    const auto raw = [&](double t) {
        return hitting_cdf(t, params, setup.variant, quad, setup.closed_form);
    };
    const auto clipped = [&](double t) {
        const double v = raw(t);
        if (v > 1.0 + kClipTolerance) out.clipped = true;
        return clamp01(v);
    };
    const HittingTotal total = hitting_prob_total(params, setup.variant, quad, setup.closed_form);
    out.F_total = total.total();
    if (out.F_total > 1.0 + kClipTolerance) out.clipped = true;
    out.F_total = clamp01(out.F_total);
    out.probs = transition_probs(out.scheme, clipped, out.F_total);
    return out;
}

} // namespace amc
