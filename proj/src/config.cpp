#include "amc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace amc {

namespace {

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool parse_number(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

// A value is a comma-separated list of numbers optionally followed by a
// single unit token: "0.5, 50 um2/s".
struct Quantity {
    std::vector<std::string> items;
    std::string unit;
};

Quantity split_quantity(const std::string& raw) {
    Quantity q;
    std::string body = trim(raw);
    const auto space = body.find_last_of(" \t");
    if (space != std::string::npos) {
        std::string tail = trim(body.substr(space + 1));
        double probe = 0.0;
        if (!tail.empty() && !parse_number(tail, probe) && tail.find(',') == std::string::npos &&
            tail.find(':') == std::string::npos) {
            q.unit = tail;
            body = trim(body.substr(0, space));
        }
    }
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) q.items.push_back(item);
    }
    return q;
}

struct Entry {
    std::string value;
    int line = 0;
};

using Converter = std::function<double(double, const std::string&)>;

class Reader {
  public:
    explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    const std::string& raw(const std::string& key) {
        used_.push_back(key);
        return entries_.at(key).value;
    }

    void reject_unused() const {
        for (const auto& [key, entry] : entries_) {
            if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
                throw ConfigError(key, "unknown key (line " + std::to_string(entry.line) + ")");
            }
        }
    }

    std::vector<double> numbers(const std::string& key, const Converter& convert) {
        const Quantity q = split_quantity(raw(key));
        if (q.items.empty()) throw ConfigError(key, "empty value");
        std::vector<double> out;
        for (const auto& item : q.items) {
            double v = 0.0;
            if (!parse_number(item, v)) throw ConfigError(key, "not a number: '" + item + "'");
            out.push_back(convert ? convert(v, q.unit) : v);
        }
        if (!convert && !q.unit.empty()) {
            throw ConfigError(key, "dimensionless value must not carry a unit ('" + q.unit + "')");
        }
        return out;
    }

    double number(const std::string& key, const Converter& convert = {}) {
        const auto values = numbers(key, convert);
        if (values.size() != 1) throw ConfigError(key, "expected a single value");
        return values.front();
    }

    template <typename T>
    void set(const std::string& key, T& target, const Converter& convert = {}) {
        if (!has(key)) return;
        if constexpr (std::is_integral_v<T>) {
            // Exact digits first: doubles cannot hold every 64-bit seed.
            const std::string text = trim(raw(key));
            unsigned long long exact = 0;
            const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), exact);
            if (ec == std::errc() && end == text.data() + text.size() &&
                exact <= static_cast<unsigned long long>(std::numeric_limits<T>::max())) {
                target = static_cast<T>(exact);
                return;
            }
            const double v = number(key, convert);
            if (v != std::floor(v)) throw ConfigError(key, "expected an integer");
            if (v < 0.0) throw ConfigError(key, "expected a non-negative integer");
            if (v >= std::ldexp(static_cast<double>(std::numeric_limits<T>::max() / 2 + 1), 1)) {
                throw ConfigError(key, "integer out of range");
            }
            target = static_cast<T>(v);
        } else {
            target = number(key, convert);
        }
    }

    void set_bool(const std::string& key, bool& target) {
        if (!has(key)) return;
        const std::string v = lower(trim(raw(key)));
        if (v == "true" || v == "yes" || v == "1") {
            target = true;
        } else if (v == "false" || v == "no" || v == "0") {
            target = false;
        } else {
            throw ConfigError(key, "expected true or false");
        }
    }

    std::string word(const std::string& key) { return lower(trim(raw(key))); }

  private:
    std::map<std::string, Entry> entries_;
    std::vector<std::string> used_;
};

Converter with_key(const std::string& key, double (*fn)(double, const std::string&)) {
    return [key, fn](double v, const std::string& unit) {
        try {
            return fn(v, unit);
        } catch (const ConfigError& e) {
            throw ConfigError(key, e.what());
        }
    };
}

std::vector<DeviceSet> parse_device_sets(Reader& reader, const std::string& key) {
    const Quantity q = split_quantity(reader.raw(key));
    if (q.items.empty()) throw ConfigError(key, "empty value");
    const auto convert = with_key(key, diffusion_to_um2_per_s);
    std::vector<DeviceSet> out;
    for (const auto& item : q.items) {
        const auto colon = item.find(':');
        double tx = 0.0;
        double rx = 0.0;
        if (colon == std::string::npos || !parse_number(trim(item.substr(0, colon)), tx) ||
            !parse_number(trim(item.substr(colon + 1)), rx)) {
            throw ConfigError(key, "expected D_tx:D_rx pairs, got '" + item + "'");
        }
        out.push_back({convert(tx, q.unit), convert(rx, q.unit)});
    }
    return out;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += fmt_double(values[i]);
    }
    return out;
}

std::string join(const std::vector<DeviceSet>& sets) {
    std::string out;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (i) out += ", ";
        out += fmt_double(sets[i].D_tx) + ":" + fmt_double(sets[i].D_rx);
    }
    return out;
}

void validate_grid(const TimeGrid& g, const std::string& key) {
    if (!(g.t_min >= 0.0) || !(g.t_max >= g.t_min) || !(g.t_step > 0.0)) {
        throw ConfigError(key, "grid requires 0 <= t_min <= t_max and t_step > 0");
    }
}

} // namespace

double diffusion_to_um2_per_s(double value, const std::string& unit) {
    static const std::map<std::string, double> factors = {
        {"um2/s", 1.0},  {"um^2/s", 1.0}, {"µm2/s", 1.0},   {"µm^2/s", 1.0},
        {"µm²/s", 1.0},  {"m2/s", 1e12},  {"m^2/s", 1e12},  {"m²/s", 1e12},
    };
    if (unit.empty()) throw ConfigError("", "diffusion coefficient needs a unit (um2/s or m2/s)");
    const auto it = factors.find(unit);
    if (it == factors.end()) throw ConfigError("", "unknown diffusion unit '" + unit + "'");
    return value * it->second;
}

double length_to_um(double value, const std::string& unit) {
    static const std::map<std::string, double> factors = {
        {"um", 1.0}, {"µm", 1.0}, {"nm", 1e-3}, {"mm", 1e3}, {"m", 1e6}};
    if (unit.empty()) throw ConfigError("", "length needs a unit (um, mm or m)");
    const auto it = factors.find(unit);
    if (it == factors.end()) throw ConfigError("", "unknown length unit '" + unit + "'");
    return value * it->second;
}

double time_to_s(double value, const std::string& unit) {
    static const std::map<std::string, double> factors = {{"s", 1.0}, {"ms", 1e-3}, {"min", 60.0}};
    if (unit.empty()) throw ConfigError("", "time needs a unit (s, ms or min)");
    const auto it = factors.find(unit);
    if (it == factors.end()) throw ConfigError("", "unknown time unit '" + unit + "'");
    return value * it->second;
}

FhtdVariant parse_variant(const std::string& text) {
    const std::string v = lower(trim(text));
    if (v == "printed") return FhtdVariant::Printed;
    if (v == "normalized") return FhtdVariant::Normalized;
    throw ConfigError("", "variant must be printed or normalized, got '" + text + "'");
}

ClosedForm parse_closed_form(const std::string& text) {
    const std::string v = lower(trim(text));
    if (v == "printed") return ClosedForm::Printed;
    if (v == "corrected") return ClosedForm::Corrected;
    throw ConfigError("", "closed form must be printed or corrected, got '" + text + "'");
}

IncrementScheme parse_scheme(const std::string& text) {
    const std::string v = lower(trim(text));
    if (v == "paper-iid") return IncrementScheme::PaperIID;
    if (v == "exact") return IncrementScheme::ExactTimeChange;
    throw ConfigError("", "scheme must be paper-iid or exact, got '" + text + "'");
}

std::string to_string(FhtdVariant v) {
    return v == FhtdVariant::Printed ? "printed" : "normalized";
}

std::string to_string(ClosedForm f) {
    return f == ClosedForm::Printed ? "printed" : "corrected";
}

std::string to_string(IncrementScheme s) {
    return s == IncrementScheme::PaperIID ? "paper-iid" : "exact";
}

std::vector<double> TimeGrid::points() const {
    std::vector<double> out;
    const auto n = static_cast<std::int64_t>(std::floor((t_max - t_min) / t_step + 1e-9));
    for (std::int64_t i = 0; i <= n; ++i) out.push_back(t_min + static_cast<double>(i) * t_step);
    return out;
}

void ExperimentConfig::validate() const {
    try {
        channel.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("channel", e.what());
    }
    if (!(T1 > 0.0)) throw ConfigError("timing.T1", "must be positive");
    if (!(Tu > T1)) throw ConfigError("timing.Tu", "must exceed T1");
    if (eta_override < 0.0 || eta_override >= Tu) throw ConfigError("timing.eta", "must lie in (0, Tu)");
    try {
        sim_config().validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("simulation", e.what());
    }
    if (hist_bin < 0.0) throw ConfigError("simulation.hist_bin", "must be non-negative");
    validate_grid(fhtd_grid, "grid.fhtd");
    validate_grid(hitting_grid, "grid.hitting");
    if (!(fhtd_grid.t_min > 0.0)) throw ConfigError("grid.fhtd_t_min", "density grid must start above 0");
    if (!(r_max > 0.0) || !(r_step > 0.0) || r_step > r_max) {
        throw ConfigError("grid.r_max", "distance grid requires 0 < r_step <= r_max");
    }
    if (!(beta_step > 0.0 && beta_step <= 0.5)) throw ConfigError("grid.beta_step", "must lie in (0, 0.5]");
    for (const double a : alphas) {
        if (!(a > 0.0 && a <= 2.0)) throw ConfigError("sweep.alpha", "alpha must lie in (0, 2]");
    }
    for (const double d : hitting_D_rx) {
        if (!(d >= 0.0)) throw ConfigError("sweep.D_rx", "must be non-negative");
    }
    for (const double d : mobility) {
        if (!(d >= 0.0)) throw ConfigError("sweep.mobility", "must be non-negative");
    }
    for (const auto& s : distance_devices) {
        if (!(s.D_tx + s.D_rx > 0.0)) {
            throw ConfigError("sweep.distance_devices", "distance law needs D_tx + D_rx > 0");
        }
    }
    if (alphas.empty() || hitting_D_rx.empty() || fhtd_devices.empty() ||
        distance_devices.empty() || mobility.empty()) {
        throw ConfigError("sweep", "sweep lists must not be empty");
    }
}

SimConfig ExperimentConfig::sim_config() const {
    return sim_config(channel);
}

SimConfig ExperimentConfig::sim_config(const MobileChannelParams& params) const {
    SimConfig sim;
    sim.params = params;
    sim.dt = dt;
    sim.n_particles = n_particles;
    sim.horizon = horizon;
    sim.seed = seed;
    sim.scheme = scheme;
    if (release_time >= 0.0) sim.release_time = release_time;
    sim.bridge_correction = bridge;
    sim.delay_release_after_collision = delay_release;
    sim.threads = threads;
    return sim;
}

ChannelSetup ExperimentConfig::channel_setup() const {
    ChannelSetup setup;
    setup.variant = variant;
    setup.closed_form = closed_form;
    setup.eta_mode = eta_mode;
    setup.T1 = T1;
    setup.Tu = Tu;
    setup.eta_override = eta_override;
    return setup;
}

ExperimentConfig parse_config(const std::string& text) {
    std::map<std::string, Entry> entries;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    static const std::vector<std::string> sections = {"channel", "timing", "simulation", "analysis",
                                                      "grid",    "sweep",  "fhtd",       "output"};
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find_first_of("#;");
        std::string content = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (content.empty()) continue;
        if (content.front() == '[') {
            if (content.back() != ']') {
                throw ConfigError("", "line " + std::to_string(line_no) + ": malformed section header");
            }
            section = trim(content.substr(1, content.size() - 2));
            if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
                throw ConfigError(section, "unknown section (line " + std::to_string(line_no) + ")");
            }
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(section, "line " + std::to_string(line_no) + ": expected key = value");
        }
        if (section.empty()) {
            throw ConfigError(trim(content.substr(0, eq)),
                              "key outside of a section (line " + std::to_string(line_no) + ")");
        }
        const std::string key = section + "." + trim(content.substr(0, eq));
        const std::string value = trim(content.substr(eq + 1));
        if (value.empty()) throw ConfigError(key, "missing value");
        if (entries.count(key)) throw ConfigError(key, "duplicate key");
        entries[key] = {value, line_no};
    }

    ExperimentConfig c;
    Reader r(std::move(entries));
    const auto D = [](const std::string& key) { return with_key(key, diffusion_to_um2_per_s); };
    const auto L = [](const std::string& key) { return with_key(key, length_to_um); };
    const auto T = [](const std::string& key) { return with_key(key, time_to_s); };

    r.set("channel.D_m", c.channel.D_m, D("channel.D_m"));
    r.set("channel.D_tx", c.channel.D_tx, D("channel.D_tx"));
    r.set("channel.D_rx", c.channel.D_rx, D("channel.D_rx"));
    r.set("channel.alpha", c.channel.alpha);
    r.set("channel.T_s", c.channel.T_s, T("channel.T_s"));
    r.set("channel.k", c.channel.k);
    r.set("channel.r0", c.channel.r0, L("channel.r0"));

    r.set("timing.T1", c.T1, T("timing.T1"));
    r.set("timing.Tu", c.Tu, T("timing.Tu"));
    if (r.has("timing.eta")) {
        const std::string raw = trim(r.raw("timing.eta"));
        const std::string w = lower(raw);
        if (w == "truncated-mean") {
            c.eta_mode = EtaMode::TruncatedMoment;
        } else if (w == "conditional-mean") {
            c.eta_mode = EtaMode::ConditionalMean;
        } else {
            const Quantity q = split_quantity(raw);
            double v = 0.0;
            if (q.items.size() != 1 || !parse_number(q.items[0], v)) {
                throw ConfigError("timing.eta",
                                  "expected truncated-mean, conditional-mean or a time in seconds");
            }
            c.eta_override = T("timing.eta")(v, q.unit);
            if (!(c.eta_override > 0.0)) throw ConfigError("timing.eta", "must be positive");
        }
    }

    r.set("simulation.dt", c.dt, T("simulation.dt"));
    r.set("simulation.n_particles", c.n_particles);
    r.set("simulation.horizon", c.horizon, T("simulation.horizon"));
    r.set("simulation.seed", c.seed);
    if (r.has("simulation.scheme")) {
        try {
            c.scheme = parse_scheme(r.raw("simulation.scheme"));
        } catch (const ConfigError& e) {
            throw ConfigError("simulation.scheme", e.what());
        }
    }
    r.set("simulation.threads", c.threads);
    r.set_bool("simulation.bridge", c.bridge);
    r.set_bool("simulation.delay_release", c.delay_release);
    r.set("simulation.release_time", c.release_time, T("simulation.release_time"));
    r.set("simulation.hist_bin", c.hist_bin, T("simulation.hist_bin"));

    if (r.has("analysis.variant")) {
        try {
            c.variant = parse_variant(r.raw("analysis.variant"));
        } catch (const ConfigError& e) {
            throw ConfigError("analysis.variant", e.what());
        }
    }
    if (r.has("analysis.closed_form")) {
        try {
            c.closed_form = parse_closed_form(r.raw("analysis.closed_form"));
        } catch (const ConfigError& e) {
            throw ConfigError("analysis.closed_form", e.what());
        }
    }

    r.set("grid.fhtd_t_min", c.fhtd_grid.t_min, T("grid.fhtd_t_min"));
    r.set("grid.fhtd_t_max", c.fhtd_grid.t_max, T("grid.fhtd_t_max"));
    r.set("grid.fhtd_t_step", c.fhtd_grid.t_step, T("grid.fhtd_t_step"));
    r.set("grid.hitting_t_min", c.hitting_grid.t_min, T("grid.hitting_t_min"));
    r.set("grid.hitting_t_max", c.hitting_grid.t_max, T("grid.hitting_t_max"));
    r.set("grid.hitting_t_step", c.hitting_grid.t_step, T("grid.hitting_t_step"));
    r.set("grid.r_max", c.r_max, L("grid.r_max"));
    r.set("grid.r_step", c.r_step, L("grid.r_step"));
    r.set("grid.beta_step", c.beta_step);

    if (r.has("sweep.alpha")) c.alphas = r.numbers("sweep.alpha", {});
    if (r.has("sweep.D_rx")) c.hitting_D_rx = r.numbers("sweep.D_rx", D("sweep.D_rx"));
    if (r.has("sweep.fhtd_devices")) c.fhtd_devices = parse_device_sets(r, "sweep.fhtd_devices");
    if (r.has("sweep.distance_devices")) {
        c.distance_devices = parse_device_sets(r, "sweep.distance_devices");
    }
    if (r.has("sweep.mobility")) c.mobility = r.numbers("sweep.mobility", D("sweep.mobility"));
    if (r.has("sweep.mobility_device")) {
        const std::string w = r.word("sweep.mobility_device");
        if (w == "tx") {
            c.mobility_device = MobileDevice::Tx;
        } else if (w == "rx") {
            c.mobility_device = MobileDevice::Rx;
        } else if (w == "both") {
            c.mobility_device = MobileDevice::Both;
        } else {
            throw ConfigError("sweep.mobility_device", "expected tx, rx or both");
        }
    }
    r.set("sweep.air_fixed_D_rx", c.air_fixed_D_rx, D("sweep.air_fixed_D_rx"));

    r.set_bool("fhtd.spbs", c.fhtd_spbs);
    if (r.has("output.dir")) c.out_dir = trim(r.raw("output.dir"));

    r.reject_unused();
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c, bool include_runtime) {
    std::ostringstream o;
    const auto eta = [&] {
        if (c.eta_override > 0.0) return fmt_double(c.eta_override) + " s";
        return std::string(c.eta_mode == EtaMode::TruncatedMoment ? "truncated-mean"
                                                                  : "conditional-mean");
    };
    const auto device = [&] {
        switch (c.mobility_device) {
        case MobileDevice::Tx: return "tx";
        case MobileDevice::Rx: return "rx";
        case MobileDevice::Both: return "both";
        }
        return "tx";
    };
    o << "[channel]\n"
      << "D_m = " << fmt_double(c.channel.D_m) << " um2/s\n"
      << "D_tx = " << fmt_double(c.channel.D_tx) << " um2/s\n"
      << "D_rx = " << fmt_double(c.channel.D_rx) << " um2/s\n"
      << "alpha = " << fmt_double(c.channel.alpha) << "\n"
      << "T_s = " << fmt_double(c.channel.T_s) << " s\n"
      << "k = " << c.channel.k << "\n"
      << "r0 = " << fmt_double(c.channel.r0) << " um\n"
      << "\n[timing]\n"
      << "T1 = " << fmt_double(c.T1) << " s\n"
      << "Tu = " << fmt_double(c.Tu) << " s\n"
      << "eta = " << eta() << "\n"
      << "\n[simulation]\n"
      << "dt = " << fmt_double(c.dt) << " s\n"
      << "n_particles = " << c.n_particles << "\n"
      << "horizon = " << fmt_double(c.horizon) << " s\n"
      << "seed = " << c.seed << "\n"
      << "scheme = " << to_string(c.scheme) << "\n"
      << "bridge = " << (c.bridge ? "true" : "false") << "\n"
      << "delay_release = " << (c.delay_release ? "true" : "false") << "\n";
    if (include_runtime) o << "threads = " << c.threads << "\n";
    if (c.release_time >= 0.0) o << "release_time = " << fmt_double(c.release_time) << " s\n";
    if (c.hist_bin > 0.0) o << "hist_bin = " << fmt_double(c.hist_bin) << " s\n";
    o << "\n[analysis]\n"
      << "variant = " << to_string(c.variant) << "\n"
      << "closed_form = " << to_string(c.closed_form) << "\n"
      << "\n[grid]\n"
      << "fhtd_t_min = " << fmt_double(c.fhtd_grid.t_min) << " s\n"
      << "fhtd_t_max = " << fmt_double(c.fhtd_grid.t_max) << " s\n"
      << "fhtd_t_step = " << fmt_double(c.fhtd_grid.t_step) << " s\n"
      << "hitting_t_min = " << fmt_double(c.hitting_grid.t_min) << " s\n"
      << "hitting_t_max = " << fmt_double(c.hitting_grid.t_max) << " s\n"
      << "hitting_t_step = " << fmt_double(c.hitting_grid.t_step) << " s\n"
      << "r_max = " << fmt_double(c.r_max) << " um\n"
      << "r_step = " << fmt_double(c.r_step) << " um\n"
      << "beta_step = " << fmt_double(c.beta_step) << "\n"
      << "\n[sweep]\n"
      << "alpha = " << join(c.alphas) << "\n"
      << "D_rx = " << join(c.hitting_D_rx) << " um2/s\n"
      << "fhtd_devices = " << join(c.fhtd_devices) << " um2/s\n"
      << "distance_devices = " << join(c.distance_devices) << " um2/s\n"
      << "mobility = " << join(c.mobility) << " um2/s\n"
      << "mobility_device = " << device() << "\n"
      << "air_fixed_D_rx = " << fmt_double(c.air_fixed_D_rx) << " um2/s\n"
      << "\n[fhtd]\n"
      << "spbs = " << (c.fhtd_spbs ? "true" : "false") << "\n";
    if (include_runtime) o << "\n[output]\n" << "dir = " << c.out_dir << "\n";
    return o.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : dump_config(config, false)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace amc
