#include "amc/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace amc {

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double rel_err(double value, double reference) {
    return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

} // namespace

std::vector<OracleGridPoint> oracle_grid() {
    std::vector<OracleGridPoint> grid;
    for (const double alpha : {0.5, 1.0, 1.1, 1.5}) {
        for (const double t : {0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
            for (const int k : {1, 5}) {
                for (const auto& [dm, dtx, drx] :
                     {std::tuple{5.0, 1.0, 1.0}, std::tuple{5.0, 5.0, 5.0}, std::tuple{5.0, 0.0, 5.0}}) {
                    grid.push_back({alpha, t, k, dm, dtx, drx});
                }
            }
        }
    }
    return grid;
}

MobileChannelParams params_at(const OracleGridPoint& point) {
    MobileChannelParams p;
    p.alpha = point.alpha;
    p.k = point.k;
    p.D_m = point.D_m;
    p.D_tx = point.D_tx;
    p.D_rx = point.D_rx;
    p.T_s = 1.0;
    p.r0 = 10.0;
    return p;
}

ClosedFormDeviation closed_form_deviation(const QuadratureSettings& quad) {
    ClosedFormDeviation d;
    std::vector<double> ratios;
    for (const auto& point : oracle_grid()) {
        const MobileChannelParams p = params_at(point);
        const double oracle = mobile_fhtd_quadrature(point.t, p, FhtdVariant::Printed, quad);
        const double corrected = mobile_fhtd_corrected(point.t, p, FhtdVariant::Printed);
        const double printed = mobile_fhtd_printed(point.t, p);
        d.max_rel_corrected = std::max(d.max_rel_corrected, rel_err(corrected, oracle));
        d.max_rel_printed = std::max(d.max_rel_printed, rel_err(printed, oracle));
        ratios.push_back(oracle / printed);
        ++d.points;
    }
    std::sort(ratios.begin(), ratios.end());
    d.median_ratio_printed = ratios[ratios.size() / 2];
    return d;
}

CheckResult check_closed_form_oracle(const ClosedFormDeviation& d, double tol) {
    return {"corrected closed form vs quadrature", d.max_rel_corrected <= tol,
            "max rel err " + sci(d.max_rel_corrected) + " over " + std::to_string(d.points) +
                " points (tol " + sci(tol) + ")"};
}

CheckResult report_printed_form(const ClosedFormDeviation& d) {
    MobileChannelParams p;
    p.D_m = p.D_tx = p.D_rx = 5.0;
    const double oracle = mobile_fhtd_quadrature(5.0, p, FhtdVariant::Printed);
    const double printed = mobile_fhtd_printed(5.0, p);
    CheckResult r{"printed closed form vs quadrature", true,
                  "max rel err " + sci(d.max_rel_printed) + ", median oracle/printed ratio " +
                      sci(d.median_ratio_printed) + "; at t=5, D_m=D_tx=D_rx=5: oracle " +
                      sci(oracle) + ", printed " + sci(printed) + " (ratio " +
                      sci(oracle / printed) + ")"};
    r.informational = true;
    return r;
}

CheckResult check_reduction() {
    double worst_static = 0.0;
    double worst_limit = 0.0;
    for (const double alpha : {0.5, 1.0, 1.5}) {
        for (const double t : {0.5, 2.0, 10.0}) {
            MobileChannelParams p;
            p.alpha = alpha;
            p.D_rx = 0.0;
            p.D_tx = 0.0;
            const double reference = static_fhtd(t, p.r0, p.D_mr(), alpha, FhtdVariant::Printed);
            worst_static = std::max(
                worst_static, rel_err(mobile_fhtd_corrected(t, p, FhtdVariant::Printed), reference));
            // b = D_tx T_s^alpha with k = 1 and T_s = 1.
            p.D_tx = 1e-8 * p.a(t);
            worst_limit = std::max(
                worst_limit, rel_err(mobile_fhtd_corrected(t, p, FhtdVariant::Printed), reference));
        }
    }
    const bool ok = worst_static <= 1e-12 && worst_limit <= 1e-6;
    return {"b = 0 reduction and continuity", ok,
            "b=0 rel err " + sci(worst_static) + " (tol 1e-12); b=1e-8 a rel err " +
                sci(worst_limit) + " (tol 1e-6)"};
}

CheckResult check_normalization() {
    QuadratureSettings quad;
    std::string detail;
    bool ok = true;
    for (const double alpha : {0.5, 1.0, 1.5}) {
        for (const FhtdVariant v : {FhtdVariant::Printed, FhtdVariant::Normalized}) {
            const auto f = [&](double t) {
                return t > 0.0 ? static_fhtd(t, 10.0, 5.0, alpha, v) : 0.0;
            };
            const double head = adaptive_quad(f, 0.0, 1.0, quad).value;
            const ImproperResult tail = improper_quad(f, 1.0, quad, HorizonOptions{1.0, 1e-6, 512});
            const double total = head + tail.total();
            const double expected = v == FhtdVariant::Printed ? 1.0 / alpha : 1.0;
            const double err = std::abs(total - expected);
            ok = ok && err <= 1e-3;
            char buf[96];
            std::snprintf(buf, sizeof buf, "%salpha=%g %s: %.6f (expect %.6f)", detail.empty() ? "" : "; ",
                          alpha, to_string(v).c_str(), total, expected);
            detail += buf;
        }
    }
    return {"static density normalization", ok, detail};
}

CheckResult check_channel_sanity() {
    bool ok = true;
    double worst_bec = 0.0;
    double worst_air = 0.0;
    double worst_edge = 0.0;
    double worst_concavity = -1.0;
    for (const double eps : {0.0, 0.2, 0.5, 0.9}) {
        const TransitionProbs bec{1.0 - eps, 1.0 - eps, eps, eps};
        for (int i = 0; i <= 20; ++i) {
            const double beta = i / 20.0;
            worst_bec = std::max(worst_bec, std::abs(mutual_information(bec, beta) -
                                                     (1.0 - eps) * binary_entropy(beta)));
        }
        if (eps < 1.0) {
            const AirResult air = maximize_air(bec);
            worst_air = std::max({worst_air, std::abs(air.beta_star - 0.5),
                                  std::abs(air.air_bits - (1.0 - eps))});
        }
    }
    RandomStream rng(20240607);
    for (int trial = 0; trial < 50; ++trial) {
        TransitionProbs p;
        // Uniform points of the two probability simplices.
        const auto simplex = [&](double& a, double& b) {
            double u = rng.uniform();
            double v = rng.uniform();
            if (u + v > 1.0) {
                u = 1.0 - u;
                v = 1.0 - v;
            }
            a = u;
            b = v;
        };
        simplex(p.p0, p.eps0);
        simplex(p.p1, p.eps1);
        worst_edge = std::max({worst_edge, std::abs(mutual_information(p, 0.0)),
                               std::abs(mutual_information(p, 1.0))});
        std::vector<double> I(101);
        for (int i = 0; i <= 100; ++i) I[static_cast<std::size_t>(i)] = mutual_information(p, i / 100.0);
        for (std::size_t i = 1; i + 1 < I.size(); ++i) {
            worst_concavity = std::max(worst_concavity, I[i - 1] - 2.0 * I[i] + I[i + 1]);
        }
    }
    ok = worst_bec <= 1e-9 && worst_air <= 1e-6 && worst_edge <= 1e-12 && worst_concavity <= 1e-9;
    return {"erasure channel sanity", ok,
            "BEC identity err " + sci(worst_bec) + ", AIR argmax/value err " + sci(worst_air) +
                ", |I(0)|,|I(1)| " + sci(worst_edge) + ", max second difference " +
                sci(worst_concavity)};
}

CheckResult check_spbs_static(std::size_t n_particles, std::uint64_t seed, unsigned threads,
                              double bias_budget) {
    SimConfig sim;
    sim.params.D_m = 5.0;
    sim.params.r0 = 10.0;
    sim.dt = 0.01;
    sim.horizon = 20.0;
    sim.release_time = 0.0;
    sim.n_particles = n_particles;
    sim.seed = seed;
    sim.threads = threads;
    sim.bridge_correction = true;
    const SimOutcome out = simulate_fhtd(sim);
    std::vector<double> grid;
    for (int j = 1; j <= 2000; ++j) grid.push_back(j * sim.dt);
    const std::vector<double> cdf = empirical_cdf(out, grid);
    double sup = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        sup = std::max(sup, std::abs(cdf[j] - static_hitting_cdf(grid[j], 10.0, 5.0, 1.0,
                                                                 FhtdVariant::Normalized)));
    }
    const double tol = 4.0 * std::sqrt(0.25 / static_cast<double>(n_particles)) + bias_budget;
    return {"particle simulation vs erfc law", sup <= tol,
            "sup distance " + sci(sup) + " at n=" + std::to_string(n_particles) + " (tol " +
                sci(tol) + ")"};
}

std::vector<CheckResult> run_validation_suite(const ExperimentConfig& config) {
    std::vector<CheckResult> results;
    const ClosedFormDeviation d = closed_form_deviation();
    results.push_back(check_closed_form_oracle(d));
    results.push_back(report_printed_form(d));
    results.push_back(check_reduction());
    results.push_back(check_normalization());
    results.push_back(check_channel_sanity());
    results.push_back(check_spbs_static(config.n_particles, config.seed, config.threads));
    return results;
}

} // namespace amc
