#pragma once

// Parameter sweeps: closed-form and Monte Carlo metrics per sweep point,
// written as CSV and as a self-contained SVG chart.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fris/analytics.hpp"
#include "fris/config.hpp"
#include "fris/error.hpp"
#include "fris/montecarlo.hpp"
#include "fris/surface.hpp"

namespace fris {

struct ModeEstimates {
    EstimateWithCI op;
    EstimateWithCI cop;
    EstimateWithCI success;
};

/// One sweep point of one curve family (M_O, mu factor).
struct SweepRow {
    double x = 0.0;
    std::size_t m_o = 0;
    std::size_t m_hat = 0;
    double mu_factor = 0.0;
    double p_a_dbm = 0.0;
    AnalyticPoint analytic;
    std::optional<ModeEstimates> fixed;
    std::optional<ModeEstimates> fris;
    std::optional<ModeEstimates> ris;
};

struct SweepResult {
    SweepVariable variable = SweepVariable::PaDbm;
    std::vector<SweepRow> rows;
};

/// Progress callback: (completed steps, total steps, message).
using ProgressFn = std::function<void(std::size_t, std::size_t, const std::string&)>;

namespace detail {

inline constexpr std::array<Scheme, 3> kSweepSchemes = {
    Scheme{SelectionMode::Fixed, PhaseMode::Static},
    Scheme{SelectionMode::BestProduct, PhaseMode::Coherent},
    Scheme{SelectionMode::RisFull, PhaseMode::Coherent},
};

struct CurveSamples {
    GammaFit fit;
    std::size_t m_hat = 0;
    std::optional<GainSamples> fixed;
    std::optional<GainSamples> fris;
    std::optional<GainSamples> ris;
};

inline ModeEstimates estimate_all(const GainSamples& s, const ScenarioConfig& cfg, double zeta) {
    return ModeEstimates{op_from_samples(s, cfg), cop_from_samples(s, cfg, zeta), success_from_samples(s, cfg, zeta)};
}

} // namespace detail

/// Runs the configured sweep. Gains do not depend on P_A or mu, so each M_O is
/// simulated once and every sweep point reuses the same trials.
inline SweepResult run_sweep(const RunConfig& run, const ProgressFn& progress = {}) {
    run.validate();
    const SweepSpec& spec = run.sweep;
    const std::vector<double> xs = spec.values();

    std::vector<std::size_t> m_o_list = spec.m_o_values;
    std::vector<double> mu_list = spec.mu_factors;
    if (m_o_list.empty()) m_o_list = {run.scenario.active_ports};
    if (mu_list.empty()) mu_list = {run.mu_factor};
    if (spec.variable == SweepVariable::ActivePorts) {
        m_o_list.clear();
        for (double x : xs) m_o_list.push_back(static_cast<std::size_t>(x));
    }
    if (spec.variable == SweepVariable::MuFactor) mu_list = {0.0};

    std::vector<std::size_t> unique_m_o = m_o_list;
    std::sort(unique_m_o.begin(), unique_m_o.end());
    unique_m_o.erase(std::unique(unique_m_o.begin(), unique_m_o.end()), unique_m_o.end());

    std::vector<Scheme> schemes;
    if (run.modes.fixed) schemes.push_back(detail::kSweepSchemes[0]);
    if (run.modes.fris) schemes.push_back(detail::kSweepSchemes[1]);
    if (run.modes.ris) schemes.push_back(detail::kSweepSchemes[2]);

    const CorrelationMatrix j = correlation_matrix(run.surface);
    std::map<std::size_t, detail::CurveSamples> curves;
    std::size_t step = 0;
    for (std::size_t m_o : unique_m_o) {
        if (progress) progress(step, unique_m_o.size(), "simulating M_O = " + std::to_string(m_o));
        ScenarioConfig cfg = run.scenario;
        cfg.active_ports = m_o;
        detail::CurveSamples cs;
        try {
            cs.fit = gamma_moment_match(reduce(j, fixed_preset(run.surface, m_o)));
            cs.m_hat = cfg.ris_element_count();
            if (!schemes.empty()) {
                const LinkSimulator sim(run.surface, cfg);
                auto samples = sim.run(run.mc, schemes);
                for (auto& s : samples) {
                    if (s.scheme == detail::kSweepSchemes[0]) cs.fixed = std::move(s);
                    else if (s.scheme == detail::kSweepSchemes[1]) cs.fris = std::move(s);
                    else cs.ris = std::move(s);
                }
            }
        } catch (const Error& e) {
            throw Error("M_O = " + std::to_string(m_o) + ": " + e.what());
        }
        curves.emplace(m_o, std::move(cs));
        ++step;
    }
    if (progress) progress(step, unique_m_o.size(), "evaluating sweep points");

    SweepResult result;
    result.variable = spec.variable;
    auto emit_row_unchecked = [&](double x, std::size_t m_o, double mu_factor) {
        ScenarioConfig cfg = run.scenario;
        cfg.active_ports = m_o;
        cfg.mu_offset = mu_factor * cfg.sigma2_w;
        if (spec.variable == SweepVariable::PaDbm) cfg.p_a = dbm_to_watt(x);
        const auto& cs = curves.at(m_o);
        const double zeta = optimal_threshold(cfg);
        SweepRow row;
        row.x = x;
        row.m_o = m_o;
        row.m_hat = cs.m_hat;
        row.mu_factor = mu_factor;
        row.p_a_dbm = watt_to_dbm(cfg.p_a);
        row.analytic = evaluate_analytics(cs.fit, cfg, zeta);
        if (cs.fixed) row.fixed = detail::estimate_all(*cs.fixed, cfg, zeta);
        if (cs.fris) row.fris = detail::estimate_all(*cs.fris, cfg, zeta);
        if (cs.ris) row.ris = detail::estimate_all(*cs.ris, cfg, zeta);
        result.rows.push_back(std::move(row));
    };
    auto emit_row = [&](double x, std::size_t m_o, double mu_factor) {
        try {
            emit_row_unchecked(x, m_o, mu_factor);
        } catch (const Error& e) {
            throw Error("sweep point x = " + detail::format_number(x) + ", M_O = " + std::to_string(m_o) +
                        ", mu = " + detail::format_number(mu_factor) + ": " + e.what());
        }
    };

    switch (spec.variable) {
    case SweepVariable::PaDbm:
        for (std::size_t m_o : m_o_list)
            for (double mu : mu_list)
                for (double x : xs) emit_row(x, m_o, mu);
        break;
    case SweepVariable::MuFactor:
        for (std::size_t m_o : m_o_list)
            for (double x : xs) emit_row(x, m_o, x);
        break;
    case SweepVariable::ActivePorts:
        for (double mu : mu_list)
            for (double x : xs) emit_row(x, static_cast<std::size_t>(x), mu);
        break;
    }
    return result;
}

/// Fixed CSV schema; mode columns stay present (and empty) when a mode is disabled.
inline std::vector<std::string> csv_columns() {
    std::vector<std::string> cols = {"variable", "x",     "m_o",   "m_hat", "mu_factor", "p_a_dbm", "zeta_w",
                                     "kappa",    "theta", "eta",   "rbar",  "an_op",     "an_p_fa", "an_p_md",
                                     "an_cop",   "an_xi", "an_suc"};
    for (const char* mode : {"fixed", "fris", "ris"})
        for (const char* metric : {"op", "cop", "suc"})
            for (const char* part : {"", "_lo", "_hi"}) cols.push_back(std::string(mode) + "_" + metric + part);
    cols.push_back("trials");
    return cols;
}

inline std::string render_csv(const SweepResult& result) {
    using detail::format_number;
    std::string out;
    const auto cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += "\n";
    for (const auto& r : result.rows) {
        const auto& a = r.analytic;
        std::vector<std::string> cells = {std::string(to_string(result.variable)),
                                          format_number(r.x),
                                          std::to_string(r.m_o),
                                          std::to_string(r.m_hat),
                                          format_number(r.mu_factor),
                                          format_number(r.p_a_dbm),
                                          format_number(a.zeta),
                                          format_number(a.fit.kappa),
                                          format_number(a.fit.theta),
                                          format_number(a.eta),
                                          format_number(a.rbar),
                                          format_number(a.op),
                                          format_number(a.p_fa),
                                          format_number(a.p_md),
                                          format_number(a.cop),
                                          format_number(a.xi),
                                          format_number(a.success)};
        std::size_t trials = 0;
        for (const auto* mode : {&r.fixed, &r.fris, &r.ris}) {
            for (int metric = 0; metric < 3; ++metric) {
                if (!mode->has_value()) {
                    cells.insert(cells.end(), 3, "");
                    continue;
                }
                const EstimateWithCI& e = metric == 0 ? (*mode)->op : metric == 1 ? (*mode)->cop : (*mode)->success;
                cells.push_back(format_number(e.value));
                cells.push_back(format_number(e.ci_low));
                cells.push_back(format_number(e.ci_high));
                trials = e.trials;
            }
        }
        cells.push_back(trials ? std::to_string(trials) : "");
        for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
        out += "\n";
    }
    return out;
}

namespace detail {

inline void write_file(const std::string& path, const std::string& bytes) {
    const std::filesystem::path p(path);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << bytes;
    out.close();
    if (!out) throw IoError("failed writing '" + path + "'");
}

inline std::string svg_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace detail

inline void emit_csv(const SweepResult& result, const std::string& path) { detail::write_file(path, render_csv(result)); }

/// SVG chart of one metric against the swept variable: an analytic line per
/// curve family plus one simulated curve per enabled surface mode.
inline std::string render_plot(const SweepResult& result, const PlotOptions& options) {
    using detail::svg_number;
    if (result.rows.empty()) throw DomainError("render_plot: empty sweep result");

    struct Series {
        std::string label;
        std::string colour;
        std::string dash;
        char marker = 0;
        std::vector<std::pair<double, double>> points;
    };

    auto metric_of = [&](const AnalyticPoint& a) {
        return options.metric == PlotMetric::Op ? a.op : options.metric == PlotMetric::Cop ? a.cop : a.success;
    };
    auto est_of = [&](const ModeEstimates& m) {
        return options.metric == PlotMetric::Op ? m.op.value : options.metric == PlotMetric::Cop ? m.cop.value : m.success.value;
    };
    const char* metric_name = options.metric == PlotMetric::Op ? "Outage probability"
                              : options.metric == PlotMetric::Cop ? "Covertness outage probability"
                                                                  : "Success probability";

    static constexpr std::array<const char*, 8> palette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                           "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
    std::vector<Series> series;
    std::map<std::pair<std::size_t, double>, std::size_t> family_index;
    for (const auto& r : result.rows) {
        const bool m_o_is_x = result.variable == SweepVariable::ActivePorts;
        const bool mu_is_x = result.variable == SweepVariable::MuFactor;
        const std::pair<std::size_t, double> family{m_o_is_x ? 0 : r.m_o, mu_is_x ? 0.0 : r.mu_factor};
        auto [it, inserted] = family_index.emplace(family, family_index.size());
        const std::size_t f = it->second;
        std::string tag;
        if (!m_o_is_x) tag += "M_O=" + std::to_string(r.m_o);
        if (!mu_is_x) tag += std::string(tag.empty() ? "" : ", ") + "mu=" + detail::format_number(r.mu_factor) + " sigma2_w";
        const std::string colour = palette[f % palette.size()];
        const std::size_t base = f * 4;
        if (series.size() < base + 4) {
            series.resize(base + 4);
            series[base] = Series{"FRIS analytic, " + tag, colour, "", 0, {}};
            series[base + 1] = Series{"FRIS fixed (sim), " + tag, colour, "", 'o', {}};
            series[base + 2] = Series{"FRIS selected (sim), " + tag, colour, "6,3", 's', {}};
            series[base + 3] = Series{"RIS M_hat=" + std::to_string(r.m_hat) + " (sim), " + tag, colour, "2,3", '^', {}};
        }
        series[base].points.emplace_back(r.x, metric_of(r.analytic));
        if (r.fixed) series[base + 1].points.emplace_back(r.x, est_of(*r.fixed));
        if (r.fris) series[base + 2].points.emplace_back(r.x, est_of(*r.fris));
        if (r.ris) series[base + 3].points.emplace_back(r.x, est_of(*r.ris));
    }
    std::erase_if(series, [](const Series& s) { return s.points.empty(); });

    double x_min = result.rows.front().x;
    double x_max = x_min;
    for (const auto& r : result.rows) {
        x_min = std::min(x_min, r.x);
        x_max = std::max(x_max, r.x);
    }
    if (x_max == x_min) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    constexpr double width = 900.0, height = 560.0;
    constexpr double left = 70.0, right = 330.0, top = 40.0, bottom = 60.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    constexpr double log_floor = 1e-4;
    auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    auto sy = [&](double y) {
        double f = 0.0;
        if (options.log_y) {
            f = (std::log10(std::clamp(y, log_floor, 1.0)) - std::log10(log_floor)) / -std::log10(log_floor);
        } else {
            f = std::clamp(y, 0.0, 1.0);
        }
        return top + (1.0 - f) * plot_h;
    };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_number(width) << "\" height=\"" << svg_number(height)
      << "\" viewBox=\"0 0 " << svg_number(width) << " " << svg_number(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << svg_number(left + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << metric_name
      << "</text>\n";
    o << "<rect x=\"" << svg_number(left) << "\" y=\"" << svg_number(top) << "\" width=\"" << svg_number(plot_w) << "\" height=\""
      << svg_number(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

    // y grid
    std::vector<double> y_ticks;
    if (options.log_y) {
        for (double v = log_floor; v <= 1.0 + 1e-12; v *= 10.0) y_ticks.push_back(v);
    } else {
        for (int k = 0; k <= 5; ++k) y_ticks.push_back(k / 5.0);
    }
    for (double v : y_ticks) {
        o << "<line x1=\"" << svg_number(left) << "\" y1=\"" << svg_number(sy(v)) << "\" x2=\"" << svg_number(left + plot_w)
          << "\" y2=\"" << svg_number(sy(v)) << "\" stroke=\"#dddddd\"/>\n";
        char label[32];
        std::snprintf(label, sizeof label, options.log_y ? "%.0e" : "%.1f", v);
        o << "<text x=\"" << svg_number(left - 6) << "\" y=\"" << svg_number(sy(v) + 4) << "\" text-anchor=\"end\">" << label
          << "</text>\n";
    }
    for (int k = 0; k <= 6; ++k) {
        const double v = x_min + (x_max - x_min) * k / 6.0;
        o << "<line x1=\"" << svg_number(sx(v)) << "\" y1=\"" << svg_number(top) << "\" x2=\"" << svg_number(sx(v)) << "\" y2=\""
          << svg_number(top + plot_h) << "\" stroke=\"#eeeeee\"/>\n";
        char label[32];
        std::snprintf(label, sizeof label, "%.3g", v);
        o << "<text x=\"" << svg_number(sx(v)) << "\" y=\"" << svg_number(top + plot_h + 18) << "\" text-anchor=\"middle\">"
          << label << "</text>\n";
    }
    const std::string x_label = result.variable == SweepVariable::PaDbm     ? "Transmit power P_A (dBm)"
                                : result.variable == SweepVariable::MuFactor ? "Threshold offset mu / sigma2_w"
                                                                             : "Active ports M_O";
    o << "<text x=\"" << svg_number(left + plot_w / 2) << "\" y=\"" << svg_number(height - 18) << "\" text-anchor=\"middle\">"
      << x_label << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const Series& ser = series[s];
        if (ser.marker == 0 || ser.dash.size()) {
            o << "<polyline fill=\"none\" stroke=\"" << ser.colour << "\" stroke-width=\"1.6\"";
            if (!ser.dash.empty()) o << " stroke-dasharray=\"" << ser.dash << "\"";
            o << " points=\"";
            for (std::size_t k = 0; k < ser.points.size(); ++k)
                o << (k ? " " : "") << svg_number(sx(ser.points[k].first)) << "," << svg_number(sy(ser.points[k].second));
            o << "\"/>\n";
        }
        for (const auto& [x, y] : ser.points) {
            const double px = sx(x), py = sy(y);
            if (ser.marker == 'o') {
                o << "<circle cx=\"" << svg_number(px) << "\" cy=\"" << svg_number(py) << "\" r=\"3\" fill=\"none\" stroke=\""
                  << ser.colour << "\"/>\n";
            } else if (ser.marker == 's') {
                o << "<rect x=\"" << svg_number(px - 3) << "\" y=\"" << svg_number(py - 3)
                  << "\" width=\"6\" height=\"6\" fill=\"none\" stroke=\"" << ser.colour << "\"/>\n";
            } else if (ser.marker == '^') {
                o << "<polygon points=\"" << svg_number(px) << "," << svg_number(py - 4) << " " << svg_number(px - 4) << ","
                  << svg_number(py + 3) << " " << svg_number(px + 4) << "," << svg_number(py + 3)
                  << "\" fill=\"none\" stroke=\"" << ser.colour << "\"/>\n";
            }
        }
        const double ly = top + 10.0 + 16.0 * static_cast<double>(s);
        const double lx = left + plot_w + 14.0;
        o << "<line x1=\"" << svg_number(lx) << "\" y1=\"" << svg_number(ly) << "\" x2=\"" << svg_number(lx + 22) << "\" y2=\""
          << svg_number(ly) << "\" stroke=\"" << ser.colour << "\"";
        if (!ser.dash.empty()) o << " stroke-dasharray=\"" << ser.dash << "\"";
        if (ser.marker != 0 && ser.dash.empty()) o << " stroke-opacity=\"0\"";
        o << "/>\n";
        if (ser.marker == 'o')
            o << "<circle cx=\"" << svg_number(lx + 11) << "\" cy=\"" << svg_number(ly) << "\" r=\"3\" fill=\"none\" stroke=\""
              << ser.colour << "\"/>\n";
        o << "<text x=\"" << svg_number(lx + 28) << "\" y=\"" << svg_number(ly + 4) << "\">" << detail::xml_escape(ser.label)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

inline void emit_plot(const SweepResult& result, const std::string& path, const PlotOptions& options = {}) {
    const std::string svg = render_plot(result, options);
    detail::write_file(path, svg);
}

} // namespace fris
