// Command-line front end: parse a flat key=value config file plus flag
// overrides, run the selected experiment and serialize the results.
#include <atomic>
#include <csignal>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mmcs/config.hpp"

namespace {

std::atomic<bool> g_cancel{false};

void on_sigint(int) { g_cancel.store(true); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporally correlated mmWave channel tracking experiments"};

    std::string config_path, experiment, out, format, plot_out, scheme, scenarios;
    std::string m_list, snr_list;
    double delta_deg = 0, delta_est_deg = 0, rho = 0, step_size = 0, residual_tol = 0;
    double training_snr_db = 0, pathloss = 0;
    int n_t = 0, n_r = 0, l = 0, g_t = 0, g_r = 0, g_bar_t = 0, g_bar_r = 0;
    int cosamp_iters = 0, iht_iters = 0, blocks = 0, realizations = 0;
    std::uint64_t seed = 0;
    bool normalize_columns = false, safeguard_step = false, constant_modulus = false;

    app.add_option("--config", config_path, "flat key=value config file");
    auto* o_experiment =
        app.add_option("--experiment", experiment, "mse | rate | complexity");
    auto* o_out = app.add_option("--out", out, "output path");
    auto* o_format = app.add_option("--format", format, "csv | json");
    auto* o_plot = app.add_option("--plot-out", plot_out, "long-format plot table path");
    auto* o_seed = app.add_option("--seed", seed, "master seed");
    auto* o_reals = app.add_option("--realizations", realizations, "Monte Carlo realizations");
    auto* o_m = app.add_option("--m", m_list, "training sizes, comma separated");
    auto* o_snr = app.add_option("--snr-db", snr_list, "SNR points in dB, comma separated");
    auto* o_scen = app.add_option("--scenarios", scenarios, "noise scenario labels (high,low)");
    auto* o_delta = app.add_option("--delta-deg", delta_deg, "angle drift bound, degrees");
    auto* o_delta_est =
        app.add_option("--delta-est-deg", delta_est_deg, "tracker-side drift bound, degrees");
    auto* o_rho = app.add_option("--rho", rho, "temporal gain correlation");
    auto* o_pathloss = app.add_option("--pathloss", pathloss, "pathloss (0 -> n_t * n_r)");
    auto* o_blocks = app.add_option("--blocks", blocks, "blocks per realization");
    auto* o_nt = app.add_option("--n-t", n_t, "transmit antennas");
    auto* o_nr = app.add_option("--n-r", n_r, "receive antennas");
    auto* o_l = app.add_option("--l", l, "number of paths");
    auto* o_gt = app.add_option("--g-t", g_t, "full transmit grid size");
    auto* o_gr = app.add_option("--g-r", g_r, "full receive grid size");
    auto* o_gbt = app.add_option("--g-bar-t", g_bar_t, "reduced transmit grid size");
    auto* o_gbr = app.add_option("--g-bar-r", g_bar_r, "reduced receive grid size");
    auto* o_scheme = app.add_option("--scheme", scheme, "random-phase | dft-subset");
    auto* o_k = app.add_option("--cosamp-iters", cosamp_iters, "CoSaMP iteration cap");
    auto* o_i = app.add_option("--iht-iters", iht_iters, "IHT iteration count");
    auto* o_mu = app.add_option("--step-size", step_size, "IHT step size");
    auto* o_tol = app.add_option("--residual-tol", residual_tol, "relative residual tolerance");
    auto* o_norm = app.add_flag("--normalize-columns,!--no-normalize-columns",
                                normalize_columns, "solver column normalization");
    auto* o_safe = app.add_flag("--safeguard-step,!--no-safeguard-step", safeguard_step,
                                "IHT spectral-norm step safeguard");
    bool adaptive_step = false;
    auto* o_adapt = app.add_flag("--adaptive-step,!--no-adaptive-step", adaptive_step,
                                 "IHT exact line-search step rule");
    auto* o_cm = app.add_flag("--constant-modulus,!--no-constant-modulus", constant_modulus,
                              "phase-only beamformers in the rate experiment");
    auto* o_tsnr = app.add_option("--training-snr-db", training_snr_db,
                                  "training SNR for the rate experiment");
    bool include_full_greedy = false;
    auto* o_ifg =
        app.add_flag("--include-full-greedy,!--no-include-full-greedy", include_full_greedy,
                     "run the full-dictionary baseline at every rate-experiment block");

    CLI11_PARSE(app, argc, argv);

    mmcs::KeyValues flags;
    auto put = [&flags](const CLI::Option* o, const std::string& k, const std::string& v) {
        if (o->count() > 0) flags.emplace_back(k, v);
    };
    put(o_experiment, "experiment", experiment);
    put(o_out, "out", out);
    put(o_format, "format", format);
    put(o_plot, "plot_out", plot_out);
    put(o_seed, "seed", std::to_string(seed));
    put(o_reals, "realizations", std::to_string(realizations));
    put(o_m, "m", m_list);
    put(o_snr, "snr_db", snr_list);
    put(o_scen, "scenarios", scenarios);
    put(o_delta, "delta_deg", mmcs::format_double(delta_deg));
    put(o_delta_est, "delta_est_deg", mmcs::format_double(delta_est_deg));
    put(o_rho, "rho", mmcs::format_double(rho));
    put(o_pathloss, "pathloss", mmcs::format_double(pathloss));
    put(o_blocks, "blocks", std::to_string(blocks));
    put(o_nt, "n_t", std::to_string(n_t));
    put(o_nr, "n_r", std::to_string(n_r));
    put(o_l, "l", std::to_string(l));
    put(o_gt, "g_t", std::to_string(g_t));
    put(o_gr, "g_r", std::to_string(g_r));
    put(o_gbt, "g_bar_t", std::to_string(g_bar_t));
    put(o_gbr, "g_bar_r", std::to_string(g_bar_r));
    put(o_scheme, "scheme", scheme);
    put(o_k, "cosamp_iters", std::to_string(cosamp_iters));
    put(o_i, "iht_iters", std::to_string(iht_iters));
    put(o_mu, "step_size", mmcs::format_double(step_size));
    put(o_tol, "residual_tol", mmcs::format_double(residual_tol));
    put(o_norm, "normalize_columns", normalize_columns ? "true" : "false");
    put(o_safe, "safeguard_step", safeguard_step ? "true" : "false");
    put(o_adapt, "adaptive_step", adaptive_step ? "true" : "false");
    put(o_cm, "constant_modulus", constant_modulus ? "true" : "false");
    put(o_tsnr, "training_snr_db", mmcs::format_double(training_snr_db));
    put(o_ifg, "include_full_greedy", include_full_greedy ? "true" : "false");

    try {
        mmcs::KeyValues file_values;
        if (!config_path.empty()) file_values = mmcs::read_config_file(config_path);
        mmcs::RunConfig cfg = mmcs::parse_config(file_values, flags);
        std::signal(SIGINT, on_sigint);
        std::signal(SIGTERM, on_sigint);
        return mmcs::run_experiment(cfg, std::cout, &g_cancel);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
