#pragma once

// Run configuration and its flat key-value file format.
//
//   # comment            ; comment
//   [scenario]
//   d_af = 50
//   sweep.points = 25    # dotted keys work outside sections too
//
// Unknown keys produce warnings; malformed values raise ConfigError with the
// line number and key.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <vector>

#include "fris/analytics.hpp"
#include "fris/channel.hpp"
#include "fris/error.hpp"
#include "fris/montecarlo.hpp"
#include "fris/surface.hpp"

namespace fris {

inline constexpr double kSpeedOfLight = 3e8;

enum class SweepVariable { PaDbm, MuFactor, ActivePorts };
enum class SweepScale { LinearInDb, Linear };

inline std::string_view to_string(SweepVariable v) {
    switch (v) {
    case SweepVariable::PaDbm: return "P_A_dBm";
    case SweepVariable::MuFactor: return "mu_factor";
    case SweepVariable::ActivePorts: return "M_O";
    }
    return "?";
}

inline std::string_view to_string(SweepScale s) { return s == SweepScale::LinearInDb ? "linear-in-dB" : "linear"; }

/// Swept variable and range, plus the curve families drawn at every point.
struct SweepSpec {
    SweepVariable variable = SweepVariable::PaDbm;
    double start = -70.0;
    double stop = -10.0;
    std::size_t points = 25;
    SweepScale scale = SweepScale::LinearInDb;
    std::vector<std::size_t> m_o_values{16, 36};
    std::vector<double> mu_factors{0.5, 1.0, 2.0, 5.0};

    void validate() const {
        if (points == 0) throw ConfigError("sweep.points", "must be at least 1");
        if (!std::isfinite(start) || !std::isfinite(stop)) throw ConfigError("sweep.start", "range must be finite");
        if (points >= 2 && !(start < stop)) throw ConfigError("sweep.start", "must be below sweep.stop");
        if (variable != SweepVariable::PaDbm && scale == SweepScale::LinearInDb && !(start > 0.0))
            throw ConfigError("sweep.start", "logarithmic spacing needs a positive start");
        if (variable == SweepVariable::ActivePorts && !(start >= 1.0))
            throw ConfigError("sweep.start", "M_O sweep must start at 1 or above");
        for (double f : mu_factors)
            if (!(f > 0.0)) throw ConfigError("sweep.mu_factors", "entries must be positive");
        for (std::size_t m : m_o_values)
            if (m == 0) throw ConfigError("sweep.m_o_values", "entries must be positive");
    }

    /// Sweep abscissae. P_A in dBm is already logarithmic, so linear-in-dB spaces it
    /// evenly in dB and `linear` spaces it evenly in watts; other variables are
    /// spaced geometrically (linear-in-dB) or arithmetically.
    std::vector<double> values() const {
        std::vector<double> xs(points);
        if (points == 1) {
            xs[0] = start;
            return xs;
        }
        const double steps = static_cast<double>(points - 1);
        for (std::size_t k = 0; k < points; ++k) {
            const double f = static_cast<double>(k) / steps;
            if (variable == SweepVariable::PaDbm) {
                if (scale == SweepScale::LinearInDb) {
                    xs[k] = start + f * (stop - start);
                } else {
                    const double lo = dbm_to_watt(start);
                    const double hi = dbm_to_watt(stop);
                    xs[k] = watt_to_dbm(lo + f * (hi - lo));
                }
            } else if (scale == SweepScale::LinearInDb) {
                xs[k] = start * std::pow(stop / start, f);
            } else {
                xs[k] = start + f * (stop - start);
            }
        }
        xs.front() = start;
        xs.back() = stop;
        if (variable == SweepVariable::ActivePorts)
            for (double& x : xs) x = std::round(x);
        return xs;
    }
};

struct ModeFlags {
    bool fixed = true; ///< FIXED preset, static phases (matches the closed forms)
    bool fris = true;  ///< best-product selection, coherent phases
    bool ris = true;   ///< fixed-position RIS baseline, coherent phases

    bool any() const noexcept { return fixed || fris || ris; }
};

enum class PlotMetric { Op, Cop, Success };

struct PlotOptions {
    bool enabled = true;
    PlotMetric metric = PlotMetric::Success;
    bool log_y = false;
};

/// Everything a run needs; unset keys keep the defaults below.
struct RunConfig {
    ScenarioConfig scenario;
    SurfaceGeometry surface;
    MCConfig mc;
    SweepSpec sweep;
    ModeFlags modes;
    PlotOptions plot;
    /// Threshold offset mu as a multiple of sigma2_w for single-point evaluation.
    double mu_factor = 1.0;
    double carrier_hz = 2.4e9;

    RunConfig() {
        mc.workers = std::max(1u, std::thread::hardware_concurrency());
        apply_derived();
    }

    /// Recomputes quantities derived from other fields (mu offset).
    void apply_derived() { scenario.mu_offset = mu_factor * scenario.sigma2_w; }

    void validate() const {
        scenario.validate();
        surface.validate();
        mc.validate();
        sweep.validate();
        if (!(mu_factor > 0.0)) throw ConfigError("scenario.mu_factor", "must be positive");
        const std::size_t m = surface.element_count();
        if (scenario.active_ports > m)
            throw ConfigError("scenario.m_o", "active ports M_O = " + std::to_string(scenario.active_ports) +
                                                  " exceeds M = " + std::to_string(m));
        for (std::size_t mo : sweep.m_o_values)
            if (mo > m) throw ConfigError("sweep.m_o_values", "entry " + std::to_string(mo) + " exceeds M = " + std::to_string(m));
        if (sweep.variable == SweepVariable::ActivePorts && sweep.stop > static_cast<double>(m))
            throw ConfigError("sweep.stop", "M_O sweep exceeds M = " + std::to_string(m));
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

struct ConfigLine {
    std::size_t line = 0;
    std::string key;
    std::string value;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError(key, "line " + std::to_string(line) + ": " + what + " (got '" + value + "')");
    }

    double as_double() const {
        double v = 0.0;
        const char* first = value.data();
        const char* last = value.data() + value.size();
        if (*first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || !std::isfinite(v)) fail("expected a real number");
        return v;
    }

    std::uint64_t as_u64() const {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || ptr != value.data() + value.size()) fail("expected a non-negative integer");
        return v;
    }

    std::size_t as_size() const { return static_cast<std::size_t>(as_u64()); }

    bool as_bool() const {
        const std::string v = lower(value);
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        fail("expected a boolean");
    }

    template <typename T, typename Parse>
    std::vector<T> as_list(Parse parse) const {
        std::vector<T> out;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            ConfigLine sub{line, key, trim(item)};
            if (sub.value.empty()) continue;
            out.push_back(parse(sub));
        }
        return out;
    }
};

inline ModeFlags parse_modes(const std::string& text, const std::string& key, std::size_t line) {
    ModeFlags m{false, false, false};
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string mode = lower(trim(item));
        if (mode == "all") {
            m = ModeFlags{};
        } else if (mode == "none" || mode.empty()) {
        } else if (mode == "fixed") {
            m.fixed = true;
        } else if (mode == "fris") {
            m.fris = true;
        } else if (mode == "ris") {
            m.ris = true;
        } else {
            throw ConfigError(key, (line ? "line " + std::to_string(line) + ": " : std::string()) + "unknown mode '" + mode +
                                       "' (expected fris, fixed, ris, all or none)");
        }
    }
    return m;
}

inline void apply_entry(RunConfig& cfg, const ConfigLine& e, std::vector<std::string>& warnings) {
    auto& s = cfg.scenario;
    auto& g = cfg.surface;
    const std::string& k = e.key;

    if (k == "scenario.d_af") s.d_af = e.as_double();
    else if (k == "scenario.d_fb") s.d_fb = e.as_double();
    else if (k == "scenario.d_fw") s.d_fw = e.as_double();
    else if (k == "scenario.alpha") s.alpha = e.as_double();
    else if (k == "scenario.rho0") s.rho0 = e.as_double();
    else if (k == "scenario.r_b") s.r_b = e.as_double();
    else if (k == "scenario.sigma2_b_dbm") s.sigma2_b = dbm_to_watt(e.as_double());
    else if (k == "scenario.sigma2_w_dbm") s.sigma2_w = dbm_to_watt(e.as_double());
    else if (k == "scenario.p0") s.p0 = e.as_double();
    else if (k == "scenario.p1") s.p1 = e.as_double();
    else if (k == "scenario.mu_factor") cfg.mu_factor = e.as_double();
    else if (k == "scenario.p_a_dbm") s.p_a = dbm_to_watt(e.as_double());
    else if (k == "scenario.m_o") s.active_ports = e.as_size();
    else if (k == "scenario.m_hat") s.ris_elements = e.as_size();
    else if (k == "scenario.ris_max_density") s.ris_max_density = e.as_double();
    else if (k == "surface.m_x") g.m_x = e.as_size();
    else if (k == "surface.m_z") g.m_z = e.as_size();
    else if (k == "surface.w_x") g.w_x = e.as_double();
    else if (k == "surface.w_z") g.w_z = e.as_double();
    else if (k == "surface.carrier_hz") {
        cfg.carrier_hz = e.as_double();
        if (!(cfg.carrier_hz > 0.0)) e.fail("carrier frequency must be positive");
        g.wavelength = kSpeedOfLight / cfg.carrier_hz;
    } else if (k == "surface.wavelength") g.wavelength = e.as_double();
    else if (k == "montecarlo.trials") cfg.mc.trials = e.as_size();
    else if (k == "montecarlo.seed") cfg.mc.master_seed = e.as_u64();
    else if (k == "montecarlo.workers") cfg.mc.workers = e.as_size();
    else if (k == "montecarlo.modes") cfg.modes = parse_modes(e.value, k, e.line);
    else if (k == "montecarlo.phase") {
        const std::string v = lower(e.value);
        if (v == "static") cfg.mc.phase_mode = PhaseMode::Static;
        else if (v == "coherent") cfg.mc.phase_mode = PhaseMode::Coherent;
        else e.fail("expected static or coherent");
    } else if (k == "montecarlo.selection") {
        const std::string v = lower(e.value);
        if (v == "fixed") cfg.mc.selection_mode = SelectionMode::Fixed;
        else if (v == "best_product") cfg.mc.selection_mode = SelectionMode::BestProduct;
        else if (v == "ris_full") cfg.mc.selection_mode = SelectionMode::RisFull;
        else e.fail("expected fixed, best_product or ris_full");
    } else if (k == "sweep.variable") {
        const std::string v = lower(e.value);
        if (v == "p_a_dbm") cfg.sweep.variable = SweepVariable::PaDbm;
        else if (v == "mu_factor") cfg.sweep.variable = SweepVariable::MuFactor;
        else if (v == "m_o") cfg.sweep.variable = SweepVariable::ActivePorts;
        else e.fail("expected P_A_dBm, mu_factor or M_O");
    } else if (k == "sweep.start") cfg.sweep.start = e.as_double();
    else if (k == "sweep.stop") cfg.sweep.stop = e.as_double();
    else if (k == "sweep.points") cfg.sweep.points = e.as_size();
    else if (k == "sweep.scale") {
        const std::string v = lower(e.value);
        if (v == "linear-in-db") cfg.sweep.scale = SweepScale::LinearInDb;
        else if (v == "linear") cfg.sweep.scale = SweepScale::Linear;
        else e.fail("expected linear-in-dB or linear");
    } else if (k == "sweep.m_o_values") cfg.sweep.m_o_values = e.as_list<std::size_t>([](const ConfigLine& x) { return x.as_size(); });
    else if (k == "sweep.mu_factors") cfg.sweep.mu_factors = e.as_list<double>([](const ConfigLine& x) { return x.as_double(); });
    else if (k == "plot.enabled") cfg.plot.enabled = e.as_bool();
    else if (k == "plot.log_y") cfg.plot.log_y = e.as_bool();
    else if (k == "plot.metric") {
        const std::string v = lower(e.value);
        if (v == "op") cfg.plot.metric = PlotMetric::Op;
        else if (v == "cop") cfg.plot.metric = PlotMetric::Cop;
        else if (v == "suc") cfg.plot.metric = PlotMetric::Success;
        else e.fail("expected op, cop or suc");
    } else {
        warnings.push_back("line " + std::to_string(e.line) + ": unknown key '" + k + "' ignored");
    }
}

} // namespace detail

/// Parses configuration text; unknown keys are reported through `warnings`.
inline RunConfig parse_config(std::string_view text, std::vector<std::string>* warnings = nullptr) {
    RunConfig cfg;
    std::vector<std::string> local_warnings;
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto comment = raw.find_first_of("#;");
        const std::string line = detail::trim(comment == std::string::npos ? raw : raw.substr(0, comment));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("", "line " + std::to_string(line_no) + ": unterminated section header");
            section = detail::lower(detail::trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value', got '" + line + "'");
        std::string key = detail::lower(detail::trim(line.substr(0, eq)));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": missing key");
        if (key.find('.') == std::string::npos) {
            if (section.empty())
                throw ConfigError(key, "line " + std::to_string(line_no) + ": key outside a section needs a 'section.' prefix");
            key = section + "." + key;
        }
        if (value.empty()) throw ConfigError(key, "line " + std::to_string(line_no) + ": missing value");
        detail::apply_entry(cfg, detail::ConfigLine{line_no, key, value}, local_warnings);
    }
    cfg.apply_derived();
    cfg.validate();
    if (warnings) *warnings = std::move(local_warnings);
    return cfg;
}

/// Reads and validates a configuration file.
inline RunConfig load_config(const std::string& path, std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), warnings);
}

namespace detail {

inline std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace detail

/// Renders `cfg` in the file format. Noise and transmit powers are written in dBm,
/// so a re-parse matches up to the round-off of the dBm conversion.
inline std::string render_config(const RunConfig& cfg) {
    using detail::format_number;
    const auto& s = cfg.scenario;
    const auto& g = cfg.surface;
    std::ostringstream o;
    auto join_sizes = [](const std::vector<std::size_t>& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
        return out;
    };
    auto join_reals = [](const std::vector<double>& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
        return out;
    };
    std::string modes;
    if (cfg.modes.fixed) modes += "fixed,";
    if (cfg.modes.fris) modes += "fris,";
    if (cfg.modes.ris) modes += "ris,";
    modes = modes.empty() ? "none" : modes.substr(0, modes.size() - 1);

    o << "[scenario]\n"
      << "d_af = " << format_number(s.d_af) << "\n"
      << "d_fb = " << format_number(s.d_fb) << "\n"
      << "d_fw = " << format_number(s.d_fw) << "\n"
      << "alpha = " << format_number(s.alpha) << "\n"
      << "rho0 = " << format_number(s.rho0) << "\n"
      << "r_b = " << format_number(s.r_b) << "\n"
      << "sigma2_b_dbm = " << format_number(watt_to_dbm(s.sigma2_b)) << "\n"
      << "sigma2_w_dbm = " << format_number(watt_to_dbm(s.sigma2_w)) << "\n"
      << "p0 = " << format_number(s.p0) << "\n"
      << "p1 = " << format_number(s.p1) << "\n"
      << "mu_factor = " << format_number(cfg.mu_factor) << "\n"
      << "p_a_dbm = " << format_number(watt_to_dbm(s.p_a)) << "\n"
      << "m_o = " << s.active_ports << "\n"
      << "m_hat = " << s.ris_element_count() << "\n"
      << "ris_max_density = " << format_number(s.ris_max_density) << "\n"
      << "\n[surface]\n"
      << "m_x = " << g.m_x << "\n"
      << "m_z = " << g.m_z << "\n"
      << "w_x = " << format_number(g.w_x) << "\n"
      << "w_z = " << format_number(g.w_z) << "\n"
      << "wavelength = " << format_number(g.wavelength) << "\n"
      << "\n[montecarlo]\n"
      << "trials = " << cfg.mc.trials << "\n"
      << "seed = " << cfg.mc.master_seed << "\n"
      << "workers = " << cfg.mc.workers << "\n"
      << "modes = " << modes << "\n"
      << "phase = " << to_string(cfg.mc.phase_mode) << "\n"
      << "selection = " << to_string(cfg.mc.selection_mode) << "\n"
      << "\n[sweep]\n"
      << "variable = " << to_string(cfg.sweep.variable) << "\n"
      << "start = " << format_number(cfg.sweep.start) << "\n"
      << "stop = " << format_number(cfg.sweep.stop) << "\n"
      << "points = " << cfg.sweep.points << "\n"
      << "scale = " << to_string(cfg.sweep.scale) << "\n"
      << "m_o_values = " << join_sizes(cfg.sweep.m_o_values) << "\n"
      << "mu_factors = " << join_reals(cfg.sweep.mu_factors) << "\n"
      << "\n[plot]\n"
      << "enabled = " << (cfg.plot.enabled ? "true" : "false") << "\n"
      << "metric = " << (cfg.plot.metric == PlotMetric::Op ? "op" : cfg.plot.metric == PlotMetric::Cop ? "cop" : "suc") << "\n"
      << "log_y = " << (cfg.plot.log_y ? "true" : "false") << "\n";
    return o.str();
}

} // namespace fris
