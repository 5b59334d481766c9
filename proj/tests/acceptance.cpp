// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include "amc/commands.hpp"
#include "amc/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace amc;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool passed, const std::string& detail) {
    std::printf("%s criterion %d (%s): %s\n", passed ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!passed) ++failures;
}

void report(int id, const CheckResult& r) { report(id, r.name, r.passed, r.detail); }

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void criteria_1_and_2() {
    const auto start = std::chrono::steady_clock::now();
    const ClosedFormDeviation d = closed_form_deviation();
    const double elapsed = seconds_since(start);
    CheckResult oracle = check_closed_form_oracle(d);
    oracle.passed = oracle.passed && elapsed <= 60.0;
    oracle.detail += fmt(", %.1f s (limit 60 s)", elapsed);
    report(1, oracle);
    // The printed form is audited, never gated.
    const CheckResult printed = report_printed_form(d);
    report(2, printed.name, std::isfinite(d.max_rel_printed) && d.points == 144, printed.detail);
}

void criterion_5() {
    const auto start = std::chrono::steady_clock::now();
    SimConfig sim;
    sim.params.D_m = 5.0;
    sim.params.r0 = 10.0;
    sim.dt = 0.01;
    sim.n_particles = 200000;
    sim.release_time = 0.0;
    sim.horizon = 20.0;
    sim.seed = 5;
    sim.bridge_correction = true;
    const SimOutcome fixed = simulate_fhtd(sim);
    double sup = 0.0;
    for (int j = 1; j <= 2000; ++j) {
        const double t = j * sim.dt;
        sup = std::max(sup, std::abs(empirical_cdf(fixed, t) -
                                     static_hitting_cdf(t, 10.0, 5.0, 1.0, FhtdVariant::Normalized)));
    }

    sim.params.D_tx = 5.0;
    sim.params.D_rx = 5.0;
    sim.release_time.reset();
    sim.seed = 6;
    const SimOutcome mobile = simulate_fhtd(sim);
    double worst = 0.0;
    std::string mobile_detail;
    for (const double t : {2.0, 5.0, 10.0, 20.0}) {
        const double sim_cdf = empirical_cdf(mobile, t);
        const double analytic = hitting_cdf(t, sim.params, FhtdVariant::Normalized);
        worst = std::max(worst, std::abs(sim_cdf - analytic));
        mobile_detail += fmt(" t=%g: %.4f vs %.4f;", t, sim_cdf, analytic);
    }
    const double elapsed = seconds_since(start);
    const bool ok = sup <= 0.01 && worst <= 0.015 && elapsed <= 300.0;
    report(5, "particle simulation vs analytic laws", ok,
           fmt("static sup distance %.4f (tol 0.01); mobile max gap %.4f (tol 0.015);", sup, worst) +
               mobile_detail + fmt(" reverts %.0f; %.1f s", static_cast<double>(mobile.n_collision_reverts),
                                   elapsed));
}

double ks_distance(std::vector<double> samples, const MobileChannelParams& params) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = 1.0 - distance_tail(samples[i], params);
        ks = std::max({ks, std::abs(F - static_cast<double>(i) / n),
                       std::abs(static_cast<double>(i + 1) / n - F)});
    }
    return ks;
}

void criterion_6() {
    SimConfig sim;
    sim.scheme = IncrementScheme::PaperIID;
    sim.dt = 1.0;
    sim.n_particles = 100000;
    sim.seed = 7;
    sim.params.D_tx = 1.0;
    sim.params.D_rx = 1.0;
    const double ks = ks_distance(simulate_release_distance(sim), sim.params);

    // Larger devices diffusivities trigger collision reverts; reported only.
    SimConfig fast = sim;
    fast.params.D_tx = 5.0;
    fast.params.D_rx = 5.0;
    const double ks_fast = ks_distance(simulate_release_distance(fast), fast.params);

    bool integrates = true;
    bool positive_at_zero = true;
    double worst_integral = 0.0;
    for (const DeviceSet dev : {DeviceSet{1.0, 1.0}, DeviceSet{5.0, 5.0}}) {
        MobileChannelParams p;
        p.D_tx = dev.D_tx;
        p.D_rx = dev.D_rx;
        double integral = 0.0;
        const double h = 0.01;
        for (int i = 1; i <= 6000; ++i) {
            integral += 0.5 * h * (distance_pdf((i - 1) * h, p) + distance_pdf(i * h, p));
        }
        integral += distance_tail(60.0, p);
        worst_integral = std::max(worst_integral, std::abs(integral - 1.0));
        integrates = integrates && std::abs(integral - 1.0) <= 1e-6;
        positive_at_zero = positive_at_zero && distance_pdf(0.0, p) > 0.0;
    }
    report(6, "distance law", ks <= 0.01 && integrates && positive_at_zero,
           fmt("KS %.4f at D_tx=D_rx=1 (tol 0.01); integral err %.2e; pdf(0)>0: ", ks,
               worst_integral) +
               (positive_at_zero ? "yes" : "no") +
               fmt("; diagnostic KS %.4f at D_tx=D_rx=5", ks_fast));
}

void criterion_7() {
    const std::vector<double> alphas{0.8, 1.0, 1.1};
    std::vector<double> window;
    for (int i = 2; i <= 20; ++i) window.push_back(i);
    bool low_ok = true;
    bool high_ok = true;
    bool monotone = true;
    for (const double D_rx : {0.5, 50.0}) {
        std::vector<HittingCurve> curves;
        for (const double alpha : alphas) {
            MobileChannelParams p;
            p.alpha = alpha;
            p.D_rx = D_rx;
            curves.push_back(tabulate_hitting_curve(p, FhtdVariant::Printed, window));
            std::vector<double> fine;
            for (int i = 0; i <= 400; ++i) fine.push_back(0.1 * i);
            const HittingCurve full = tabulate_hitting_curve(p, FhtdVariant::Printed, fine);
            for (std::size_t i = 1; i < full.values.size(); ++i) {
                monotone = monotone && full.values[i] >= full.values[i - 1];
            }
        }
        for (std::size_t j = 0; j < window.size(); ++j) {
            for (std::size_t a = 1; a < alphas.size(); ++a) {
                const double prev = curves[a - 1].values[j];
                const double next = curves[a].values[j];
                if (D_rx < 1.0) low_ok = low_ok && next > prev;
                else high_ok = high_ok && next < prev;
            }
        }
    }
    report(7, "hitting probability orderings", low_ok && high_ok && monotone,
           std::string("t in [2, 20] s, unnormalized density; increasing in alpha at D_rx=0.5: ") +
               (low_ok ? "yes" : "no") + "; decreasing at D_rx=50: " + (high_ok ? "yes" : "no") +
               "; non-decreasing in t: " + (monotone ? "yes" : "no"));
}

void criterion_9() {
    const ExperimentConfig config;
    const ChannelSetup setup = config.channel_setup();
    const auto air = [&](double alpha, double mobility) {
        const ChannelAnalysis ch = analyze_channel(air_params(config, alpha, mobility), setup);
        return maximize_air(ch.probs).air_bits;
    };
    const double a10 = air(1.0, 0.5);
    const double a11 = air(1.1, 0.5);
    const bool alpha_ok = a11 < a10;
    bool mobility_ok = true;
    std::string detail = fmt("AIR(1.1)=%.6g < AIR(1.0)=%.6g at mobility 0.5: ", a11, a10) +
                         (alpha_ok ? "yes" : "no") + "; mobility 0.5 -> 5:";
    for (const double alpha : config.alphas) {
        const double lo = air(alpha, 0.5);
        const double hi = air(alpha, 5.0);
        mobility_ok = mobility_ok && hi < lo;
        detail += fmt(" alpha=%g %.6g -> %.6g;", alpha, lo, hi);
    }
    report(9, "achievable rate orderings", alpha_ok && mobility_ok, detail);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_10() {
    const fs::path root = fs::temp_directory_path() / "amc_acceptance_determinism";
    fs::remove_all(root);
    const char* names[] = {"simulate_hist.csv", "simulate_cdf.csv", "simulate_summary.txt"};
    std::vector<std::string> reference;
    bool identical = true;
    int runs = 0;
    for (const unsigned threads : {1u, 1u, 4u}) {
        ExperimentConfig config;
        config.channel.D_tx = 5.0;
        config.channel.D_rx = 5.0;
        config.n_particles = 20000;
        config.seed = 42;
        config.threads = threads;
        config.out_dir = (root / std::to_string(runs)).string();
        std::ostringstream log;
        if (cmd_simulate(config, log).exit_code != kExitOk) identical = false;
        std::vector<std::string> contents;
        for (const char* name : names) contents.push_back(slurp(fs::path(config.out_dir) / name));
        if (reference.empty()) reference = contents;
        else identical = identical && contents == reference;
        ++runs;
    }
    fs::remove_all(root);
    report(10, "simulation determinism", identical,
           "3 runs (threads 1, 1, 4), seed 42: outputs byte-identical: " +
               std::string(identical ? "yes" : "no"));
}

} // namespace

int main() {
    criteria_1_and_2();
    report(3, check_reduction());
    report(4, check_normalization());
    criterion_5();
    criterion_6();
    criterion_7();
    report(8, check_channel_sanity());
    criterion_9();
    criterion_10();
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
