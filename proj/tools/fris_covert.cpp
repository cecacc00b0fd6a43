// Command-line front end: parameter sweeps, closed-form validation, config dump.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fris/fris.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> workers;
    std::optional<std::string> mode;
    std::string out_dir = "out";
    bool no_plot = false;
    bool quiet = false;
};

fris::RunConfig load(const Options& opt) {
    std::vector<std::string> warnings;
    fris::RunConfig cfg = opt.config_path.empty() ? fris::RunConfig{} : fris::load_config(opt.config_path, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    if (opt.seed) cfg.mc.master_seed = *opt.seed;
    if (opt.trials) cfg.mc.trials = *opt.trials;
    if (opt.workers) cfg.mc.workers = *opt.workers;
    if (opt.mode) cfg.modes = fris::detail::parse_modes(*opt.mode, "--mode", 0);
    if (opt.no_plot) cfg.plot.enabled = false;
    cfg.validate();
    return cfg;
}

fris::ProgressFn progress_printer(bool quiet) {
    if (quiet) return {};
    return [](std::size_t step, std::size_t total, const std::string& what) {
        std::cerr << "[" << step << "/" << total << "] " << what << '\n';
    };
}

int run_sweep_command(const Options& opt) {
    const fris::RunConfig cfg = load(opt);
    const fris::SweepResult result = fris::run_sweep(cfg, progress_printer(opt.quiet));
    std::filesystem::create_directories(opt.out_dir);
    const auto csv_path = (std::filesystem::path(opt.out_dir) / "sweep.csv").string();
    fris::emit_csv(result, csv_path);
    std::cout << "wrote " << csv_path << " (" << result.rows.size() << " rows)\n";
    if (cfg.plot.enabled) {
        const auto svg_path = (std::filesystem::path(opt.out_dir) / "plot.svg").string();
        fris::emit_plot(result, svg_path, cfg.plot);
        std::cout << "wrote " << svg_path << '\n';
    }
    return kExitOk;
}

void report(const fris::validation::CheckResult& r, bool& all_ok) {
    all_ok = all_ok && r.passed;
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << "\n      " << r.detail << '\n';
}

// Runs the oracle comparisons against the configured scenario. The Gamma bridge
// uses ten times the configured trial count for the mean and the first
// min(trials, 1e5) draws for the KS distance.
int run_validate_command(const Options& opt) {
    namespace v = fris::validation;
    fris::RunConfig cfg = load(opt);
    cfg.modes = fris::ModeFlags{};
    const auto progress = progress_printer(opt.quiet);

    bool all_ok = true;
    std::vector<v::GammaBridge> bridges;
    std::vector<std::size_t> m_o_values = cfg.sweep.m_o_values;
    if (m_o_values.empty()) m_o_values = {cfg.scenario.active_ports};
    for (std::size_t m_o : m_o_values) {
        if (progress) progress(bridges.size(), m_o_values.size(), "gamma bridge at M_O = " + std::to_string(m_o));
        bridges.push_back(v::gamma_bridge(cfg, m_o, 10 * cfg.mc.trials, std::min<std::size_t>(cfg.mc.trials, 100000)));
    }
    report(v::check_gamma_bridge(bridges), all_ok);

    const fris::SweepResult sweep = fris::run_sweep(cfg, progress);
    const auto dev = v::closed_form_deviation(sweep);
    report(v::check_closed_form_op(dev), all_ok);
    report(v::check_closed_form_cop_success(dev), all_ok);
    if (cfg.sweep.variable == fris::SweepVariable::PaDbm) {
        report(v::check_op_shape(sweep), all_ok);
        report(v::check_cop_shape(sweep), all_ok);
        report(v::check_success_shape(sweep, cfg.mu_factor), all_ok);
        const std::size_t m_o = *std::max_element(m_o_values.begin(), m_o_values.end());
        report(v::check_fris_vs_ris(sweep, m_o, cfg.mu_factor), all_ok);
    }
    std::cout << (all_ok ? "all checks passed\n" : "some checks failed\n");
    return all_ok ? kExitOk : kExitValidationFailed;
}

int run_show_config_command(const Options& opt) {
    std::cout << fris::render_config(load(opt));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Covert communication through a fluid reconfigurable surface: closed forms and Monte Carlo"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "Configuration file (key = value, [section] headers)");
        sub->add_option("--seed", opt.seed, "Master seed of the Monte Carlo substreams");
        sub->add_option("--trials", opt.trials, "Monte Carlo trials per curve")->check(CLI::PositiveNumber);
        sub->add_option("--workers", opt.workers, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
        sub->add_option("--mode", opt.mode, "Simulated schemes: fris, fixed, ris, all or none (comma separated)");
        sub->add_flag("-q,--quiet", opt.quiet, "Suppress progress on stderr");
    };

    auto* sweep = app.add_subcommand("sweep", "Run the configured sweep and write sweep.csv and plot.svg");
    add_common(sweep);
    sweep->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    sweep->add_flag("--no-plot", opt.no_plot, "Skip the SVG plot");

    auto* validate = app.add_subcommand("validate", "Compare closed forms with Monte Carlo and check curve shapes");
    add_common(validate);

    auto* show = app.add_subcommand("show-config", "Print the effective configuration");
    add_common(show);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sweep->parsed()) return run_sweep_command(opt);
        if (validate->parsed()) return run_validate_command(opt);
        return run_show_config_command(opt);
    } catch (const fris::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
