#include "amc/commands.hpp"

#include "amc/validation.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace amc {

namespace fs = std::filesystem;

namespace {

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

class CsvBuilder {
  public:
    explicit CsvBuilder(const std::vector<std::string>& header) : columns_(header.size()) {
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) throw std::logic_error("CSV row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

  private:
    std::size_t columns_;
    std::ostringstream out_;
};

MobileChannelParams with_devices(MobileChannelParams p, double alpha, double D_tx, double D_rx) {
    p.alpha = alpha;
    p.D_tx = D_tx;
    p.D_rx = D_rx;
    return p;
}

std::vector<double> uniform_grid(double step, double end) {
    const auto n = static_cast<std::int64_t>(std::llround(end / step));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n) + 1);
    for (std::int64_t i = 0; i <= n; ++i) grid.push_back(static_cast<double>(i) * step);
    return grid;
}

CommandResult finish(const OutputSet& files, const ExperimentConfig& config, std::ostream& log) {
    CommandResult result;
    result.files = files.commit(config.out_dir);
    for (const auto& f : result.files) log << "wrote " << f << '\n';
    return result;
}

} // namespace

void OutputSet::add(std::string name, std::string content) {
    files_.emplace_back(std::move(name), std::move(content));
}

std::vector<std::string> OutputSet::commit(const std::string& dir) const {
    std::vector<fs::path> staged;
    std::vector<std::string> placed;
    // Leaves no temporary file behind and removes every file already placed.
    const auto rollback = [&] {
        std::error_code ec;
        for (const auto& p : staged) fs::remove(p, ec);
        for (const auto& p : placed) fs::remove(p, ec);
    };
    try {
        fs::create_directories(dir);
        // All content reaches disk before any final name is touched.
        for (const auto& [name, content] : files_) {
            const fs::path tmp = fs::path(dir) / (name + ".partial");
            staged.push_back(tmp);
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out.write(content.data(), static_cast<std::streamsize>(content.size()));
            out.close();
            if (!out) throw std::runtime_error("cannot write " + tmp.string());
        }
        for (std::size_t i = 0; i < files_.size(); ++i) {
            const fs::path target = fs::path(dir) / files_[i].first;
            fs::rename(staged[i], target);
            placed.push_back(target.string());
        }
    } catch (const fs::filesystem_error& e) {
        rollback();
        throw std::runtime_error(e.what());
    } catch (...) {
        rollback();
        throw;
    }
    return placed;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

MobileChannelParams air_params(const ExperimentConfig& config, double alpha, double mobility) {
    switch (config.mobility_device) {
    case MobileDevice::Tx:
        return with_devices(config.channel, alpha, mobility, config.air_fixed_D_rx);
    case MobileDevice::Rx:
        return with_devices(config.channel, alpha, config.channel.D_tx, mobility);
    case MobileDevice::Both:
        return with_devices(config.channel, alpha, mobility, mobility);
    }
    throw std::logic_error("unknown mobile device");
}

CommandResult cmd_fhtd(const ExperimentConfig& config, std::ostream& log) {
    std::vector<std::string> header{"alpha",
                                    "D_tx_um2_per_s",
                                    "D_rx_um2_per_s",
                                    "t_s",
                                    "fhtd_printed_closed_form_per_s",
                                    "fhtd_corrected_per_s",
                                    "fhtd_quadrature_per_s"};
    if (config.fhtd_spbs) header.push_back("fhtd_spbs_per_s");
    header.push_back("variant");
    CsvBuilder csv(header);

    const std::vector<double> grid = config.fhtd_grid.points();
    const double bin = config.fhtd_grid.t_step;
    double worst = 0.0;
    for (const double alpha : config.alphas) {
        for (const auto& devices : config.fhtd_devices) {
            const MobileChannelParams p =
                with_devices(config.channel, alpha, devices.D_tx, devices.D_rx);
            SimOutcome sim;
            if (config.fhtd_spbs) sim = simulate_fhtd(config.sim_config(p));
            for (const double t : grid) {
                const double printed = mobile_fhtd(t, p, config.variant, ClosedForm::Printed);
                const double corrected = mobile_fhtd(t, p, config.variant, ClosedForm::Corrected);
                const double oracle = mobile_fhtd_quadrature(t, p, config.variant);
                if (oracle > 0.0) worst = std::max(worst, std::abs(corrected - oracle) / oracle);
                std::vector<std::string> row{label(alpha), format_number(p.D_tx),
                                             format_number(p.D_rx), format_number(t),
                                             format_number(printed), format_number(corrected),
                                             format_number(oracle)};
                if (config.fhtd_spbs) {
                    // Hits in (t - bin, t] per unit time.
                    const double mass = empirical_cdf(sim, t) - empirical_cdf(sim, std::max(0.0, t - bin));
                    row.push_back(format_number(mass / bin));
                }
                row.push_back(to_string(config.variant));
                csv.row(row);
            }
        }
    }
    log << "corrected vs quadrature: max rel err " << format_number(worst) << '\n';
    if (worst > 1e-8) {
        log << "error: corrected closed form deviates from quadrature beyond 1e-8\n";
        return {kExitValidation, {}};
    }
    OutputSet files;
    files.add("fhtd.csv", csv.str());
    return finish(files, config, log);
}

CommandResult cmd_hitting(const ExperimentConfig& config, std::ostream& log) {
    const std::vector<double> grid = config.hitting_grid.points();
    std::vector<std::string> header{"t_s"};
    std::vector<std::string> names;
    std::vector<HittingCurve> curves;
    for (const double alpha : config.alphas) {
        for (const double d : config.hitting_D_rx) {
            const MobileChannelParams p = with_devices(config.channel, alpha, config.channel.D_tx, d);
            curves.push_back(tabulate_hitting_curve(p, config.variant, grid, {}, config.closed_form));
            names.push_back("alpha=" + label(alpha) + ";D_rx=" + label(d) + "um2/s");
            header.push_back("F_h(" + names.back() + ")");
            const double total = curves.back().values.empty()
                                     ? curves.back().tail_mass
                                     : curves.back().values.back() + curves.back().tail_mass;
            log << "F_h(inf) for " << names.back() << ": " << format_number(total) << '\n';
        }
    }
    header.push_back("warning");
    CsvBuilder csv(header);
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<std::string> row{format_number(grid[i])};
        std::string warning;
        for (std::size_t c = 0; c < curves.size(); ++c) {
            const double v = curves[c].values[i];
            row.push_back(format_number(v));
            if (v < 0.0 || v > 1.0) {
                warning += (warning.empty() ? "" : " ") + std::string("out_of_[0;1]:") + names[c];
            }
        }
        if (!warning.empty()) ++flagged;
        row.push_back(warning);
        csv.row(row);
    }
    if (flagged) log << "warning: " << flagged << " rows carry probabilities outside [0, 1]\n";
    OutputSet files;
    files.add("hitting.csv", csv.str());
    return finish(files, config, log);
}

CommandResult cmd_distance_pdf(const ExperimentConfig& config, std::ostream& log) {
    const std::vector<double> grid = uniform_grid(config.r_step, config.r_max);
    std::vector<std::string> header{"r_um"};
    std::vector<std::vector<double>> columns;
    bool ok = true;
    for (const auto& devices : config.distance_devices) {
        const MobileChannelParams p =
            with_devices(config.channel, config.channel.alpha, devices.D_tx, devices.D_rx);
        std::vector<double> pdf;
        pdf.reserve(grid.size());
        for (const double r : grid) pdf.push_back(distance_pdf(r, p));
        double integral = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            integral += 0.5 * (pdf[i] + pdf[i - 1]) * (grid[i] - grid[i - 1]);
        }
        integral += distance_tail(grid.back(), p);
        const std::string name =
            "D_tx=" + label(devices.D_tx) + ";D_rx=" + label(devices.D_rx) + "um2/s";
        log << "pdf(" << name << "): integral " << format_number(integral) << ", pdf(0) "
            << format_number(pdf.front()) << '\n';
        if (std::abs(integral - 1.0) > 1e-6) {
            log << "error: " << name << " integrates to " << format_number(integral) << '\n';
            ok = false;
        }
        header.push_back("pdf(" + name + ")_per_um");
        columns.push_back(std::move(pdf));
    }
    if (!ok) return {kExitValidation, {}};
    CsvBuilder csv(header);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<std::string> row{format_number(grid[i])};
        for (const auto& col : columns) row.push_back(format_number(col[i]));
        csv.row(row);
    }
    OutputSet files;
    files.add("distance_pdf.csv", csv.str());
    return finish(files, config, log);
}

CommandResult cmd_simulate(const ExperimentConfig& config, std::ostream& log) {
    const SimConfig sim = config.sim_config();
    const SimOutcome out = simulate_fhtd(sim);
    const double window = sim.horizon - sim.effective_release_time();

    const double bin = config.hist_bin > 0.0 ? config.hist_bin : sim.dt;
    const auto n_bins = static_cast<std::size_t>(std::ceil(window / bin - 1e-9));
    std::vector<std::size_t> counts(n_bins, 0);
    for (const double t : out.hit_times) {
        // Bin i covers (i bin, (i + 1) bin].
        auto i = static_cast<std::int64_t>(std::ceil(t / bin - 1e-9)) - 1;
        i = std::clamp<std::int64_t>(i, 0, static_cast<std::int64_t>(n_bins) - 1);
        ++counts[static_cast<std::size_t>(i)];
    }
    CsvBuilder hist({"bin_start_s", "bin_end_s", "count", "density_per_s"});
    const double n = static_cast<double>(out.n_particles);
    for (std::size_t i = 0; i < n_bins; ++i) {
        const double lo = static_cast<double>(i) * bin;
        const double hi = std::min(window, static_cast<double>(i + 1) * bin);
        hist.row({format_number(lo), format_number(hi), std::to_string(counts[i]),
                  format_number(static_cast<double>(counts[i]) / (n * (hi - lo)))});
    }

    std::vector<double> grid;
    const auto steps = static_cast<std::int64_t>(std::floor(window / sim.dt + 1e-9));
    for (std::int64_t j = 0; j <= steps; ++j) grid.push_back(static_cast<double>(j) * sim.dt);
    const std::vector<double> cdf = empirical_cdf(out, grid);
    CsvBuilder cdf_csv({"t_since_release_s", "empirical_cdf"});
    for (std::size_t j = 0; j < grid.size(); ++j) {
        cdf_csv.row({format_number(grid[j]), format_number(cdf[j])});
    }

    std::ostringstream summary;
    summary << "tool_version = " << kToolVersion << '\n'
            << "config_hash = " << hex64(config_hash(config)) << '\n'
            << "seed = " << sim.seed << '\n'
            << "n_particles = " << out.n_particles << '\n'
            << "n_hits = " << out.hit_times.size() << '\n'
            << "n_censored = " << out.n_censored << '\n'
            << "censor_fraction = " << format_number(static_cast<double>(out.n_censored) / n) << '\n'
            << "collision_reverts = " << out.n_collision_reverts << '\n'
            << "release_time_s = " << format_number(out.release_time) << '\n'
            << "horizon_s = " << format_number(out.horizon) << '\n'
            << "\n# exact configuration\n"
            << dump_config(config, false);
    log << "hits " << out.hit_times.size() << ", censored " << out.n_censored << ", reverts "
        << out.n_collision_reverts << '\n';

    OutputSet files;
    files.add("simulate_hist.csv", hist.str());
    files.add("simulate_cdf.csv", cdf_csv.str());
    files.add("simulate_summary.txt", summary.str());
    return finish(files, config, log);
}

CommandResult cmd_air(const ExperimentConfig& config, std::ostream& log) {
    const ChannelSetup setup = config.channel_setup();
    const std::vector<double> betas = uniform_grid(config.beta_step, 1.0);
    std::vector<std::string> header{"beta"};
    std::vector<std::vector<double>> curves;
    std::vector<AirResult> optima;
    CsvBuilder channels({"alpha", "mobility_um2_per_s", "D_tx_um2_per_s", "D_rx_um2_per_s",
                         "eta_s", "p0", "p1", "eps0", "eps1", "F_total", "beta_star",
                         "air_bits", "warning"});
    for (const double alpha : config.alphas) {
        for (const double m : config.mobility) {
            const MobileChannelParams p = air_params(config, alpha, m);
            const ChannelAnalysis a = analyze_channel(p, setup);
            std::vector<double> curve;
            curve.reserve(betas.size());
            for (const double beta : betas) curve.push_back(mutual_information(a.probs, beta));
            const AirResult best = maximize_air(a.probs);
            std::string warning;
            if (a.clipped) warning = "F_clipped_to_[0;1]";
            if (a.scheme.slot_overlap()) warning += std::string(warning.empty() ? "" : " ") + "eta>=T1";
            if (!warning.empty()) {
                log << "warning: alpha=" << label(alpha) << " mobility=" << label(m) << ": "
                    << warning << '\n';
            }
            channels.row({label(alpha), format_number(m), format_number(p.D_tx),
                          format_number(p.D_rx), format_number(a.scheme.eta),
                          format_number(a.probs.p0), format_number(a.probs.p1),
                          format_number(a.probs.eps0), format_number(a.probs.eps1),
                          format_number(a.F_total), format_number(best.beta_star),
                          format_number(best.air_bits), warning});
            header.push_back("I_bits(alpha=" + label(alpha) + ";mobility=" + label(m) + "um2/s)");
            curves.push_back(std::move(curve));
            optima.push_back(best);
            log << "AIR alpha=" << label(alpha) << " mobility=" << label(m) << ": "
                << format_number(best.air_bits) << " bits at beta=" << format_number(best.beta_star)
                << '\n';
        }
    }
    CsvBuilder csv(header);
    for (std::size_t i = 0; i < betas.size(); ++i) {
        std::vector<std::string> row{format_number(betas[i])};
        for (const auto& c : curves) row.push_back(format_number(c[i]));
        csv.row(row);
    }
    std::vector<std::string> star{"beta_star"};
    std::vector<std::string> air{"air_bits"};
    for (const auto& o : optima) {
        star.push_back(format_number(o.beta_star));
        air.push_back(format_number(o.air_bits));
    }
    csv.row(star);
    csv.row(air);

    OutputSet files;
    files.add("air.csv", csv.str());
    files.add("air_channels.csv", channels.str());
    return finish(files, config, log);
}

CommandResult cmd_validate(const ExperimentConfig& config, std::ostream& log) {
    const std::vector<CheckResult> results = run_validation_suite(config);
    std::ostringstream report;
    report << "tool_version = " << kToolVersion << '\n'
           << "config_hash = " << hex64(config_hash(config)) << '\n';
    bool ok = true;
    for (const auto& r : results) {
        const char* tag = r.informational ? "INFO" : (r.passed ? "PASS" : "FAIL");
        if (!r.informational && !r.passed) ok = false;
        report << tag << "  " << r.name << ": " << r.detail << '\n';
        log << tag << "  " << r.name << '\n';
    }
    report << "result = " << (ok ? "pass" : "fail") << '\n';
    OutputSet files;
    files.add("validate_report.txt", report.str());
    CommandResult result = finish(files, config, log);
    result.exit_code = ok ? kExitOk : kExitValidation;
    return result;
}

} // namespace amc
