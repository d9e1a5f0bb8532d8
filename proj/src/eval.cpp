#include "mmcs/eval.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "mmcs/rng.hpp"

namespace mmcs {

namespace {

constexpr double kDeg = kTwoPi / 360.0;

std::uint64_t fnv1a_update(std::uint64_t h, const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t channel_checksum(const std::vector<ChannelState>& states) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& s : states) {
        h = fnv1a_update(h, s.aods.data(), s.aods.size() * sizeof(double));
        h = fnv1a_update(h, s.aoas.data(), s.aoas.size() * sizeof(double));
        h = fnv1a_update(h, s.gains.data(), static_cast<std::size_t>(s.gains.size()) * sizeof(cplx));
    }
    return h;
}

int argmax_abs(const CVec& v) {
    int best = 0;
    double bm = std::abs(v(0));
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        double m = std::abs(v(i));
        if (m > bm) { bm = m; best = static_cast<int>(i); }
    }
    return best;
}

SolverConfig cosamp_config(const SolverSettings& s, int l) {
    SolverConfig c;
    c.sparsity = l;
    c.max_iters = s.cosamp_iters;
    c.residual_tol = s.residual_tol;
    c.normalize_columns = s.normalize_columns;
    return c;
}

SolverConfig iht_config(const SolverSettings& s, int l) {
    SolverConfig c;
    c.sparsity = l;
    c.max_iters = s.iht_iters;
    c.residual_tol = s.residual_tol;
    c.step_size = s.step_size;
    c.normalize_columns = s.normalize_columns;
    c.safeguard_step = s.safeguard_step;
    c.adaptive_step = s.adaptive_step;
    return c;
}

}  // namespace

NoiseScenario noise_scenario(const std::string& label) {
    if (label == "high") return {"high", -10.0};
    if (label == "low") return {"low", 0.0};
    throw std::invalid_argument("noise_scenario: unknown label '" + label + "'");
}

double achievable_rate(const CMat& h_true, const BeamformingLink& link) {
    cplx g = (link.u.adjoint() * h_true * link.v).value();
    return std::log2(1.0 + link.p / link.sigma2 * std::norm(g));
}

BeamformingLink make_beamformers(const CMat& h_hat, bool constant_modulus, double p,
                                 double sigma2) {
    PrincipalSvd svd = principal_svd(h_hat);
    BeamformingLink link;
    link.p = p;
    link.sigma2 = sigma2;
    link.u = svd.u;
    link.v = svd.v;
    if (constant_modulus) {
        auto project = [](const CVec& x) {
            CVec out(x.size());
            const double mag = 1.0 / std::sqrt(static_cast<double>(x.size()));
            for (Eigen::Index i = 0; i < x.size(); ++i)
                out(i) = std::polar(mag, std::arg(x(i)));
            out.normalize();
            return out;
        };
        link.u = project(link.u);
        link.v = project(link.v);
    }
    return link;
}

double mse(const std::vector<CVec>& z_true, const std::vector<CVec>& z_est) {
    if (z_true.size() != z_est.size() || z_true.empty())
        throw std::invalid_argument("mse: sequence length mismatch");
    double acc = 0.0;
    for (std::size_t n = 0; n < z_true.size(); ++n) {
        if (z_true[n].size() != z_est[n].size())
            throw std::invalid_argument("mse: block dimension mismatch");
        acc += (z_true[n] - z_est[n]).squaredNorm();
    }
    return acc / static_cast<double>(z_true.size());
}

CVec snap_true_sparse(const ChannelState& state, const Dictionary& dict) {
    CVec z = CVec::Zero(dict.phi.cols());
    const int n_t = static_cast<int>(dict.a_t.rows());
    const int n_r = static_cast<int>(dict.a_r.rows());
    for (std::size_t l = 0; l < state.aods.size(); ++l) {
        // Atom-level snap: the ULA response aliases angles symmetric about
        // pi/2, so nearest is measured by steering correlation, not raw angle.
        int i_tx = argmax_abs(dict.a_t.adjoint() * ula_response(n_t, state.aods[l]));
        int i_rx = argmax_abs(dict.a_r.adjoint() * ula_response(n_r, state.aoas[l]));
        z(dict.column_index(i_tx, i_rx)) += state.gains(static_cast<Eigen::Index>(l));
    }
    return z;
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double paired_t_statistic(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("paired_t_statistic: need matched samples, n >= 2");
    const std::size_t n = a.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
    double m = mean(d);
    double ss = 0.0;
    for (double x : d) ss += (x - m) * (x - m);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) return m > 0.0 ? 1e9 : (m < 0.0 ? -1e9 : 0.0);
    return m / (sd / std::sqrt(static_cast<double>(n)));
}

std::vector<ExperimentRecord> run_mse_experiment(const MseExperimentConfig& cfg) {
    const EstimatorKind kinds[3] = {EstimatorKind::FullGreedy, EstimatorKind::CorrelationCosamp,
                                    EstimatorKind::SparsityIht};
    const double delta = cfg.delta_deg * kDeg;
    const double delta_est = cfg.delta_est_deg < 0.0 ? delta : cfg.delta_est_deg * kDeg;

    ChannelParams cp;
    cp.n_t = cfg.n_t;
    cp.n_r = cfg.n_r;
    cp.l = cfg.l;
    cp.delta = delta;
    cp.rho = cfg.rho;
    cp.pathloss = cfg.pathloss;

    TrackerParams tp;
    tp.n_t = cfg.n_t;
    tp.n_r = cfg.n_r;
    tp.l = cfg.l;
    tp.delta_est = delta_est;
    tp.g_bar_t = cfg.g_bar_t;
    tp.g_bar_r = cfg.g_bar_r;

    const int n_cells = static_cast<int>(cfg.m_list.size() * cfg.scenarios.size());
    std::vector<ExperimentRecord> records(static_cast<std::size_t>(n_cells) * 3);
    std::vector<double> iters_init(records.size(), 0.0), iters_track(records.size(), 0.0);
    for (std::size_t mi = 0; mi < cfg.m_list.size(); ++mi)
        for (std::size_t si = 0; si < cfg.scenarios.size(); ++si)
            for (int e = 0; e < 3; ++e) {
                auto& rec = records[(mi * cfg.scenarios.size() + si) * 3 + e];
                rec.estimator = estimator_name(kinds[e]);
                rec.m = cfg.m_list[mi];
                rec.n_t = cfg.n_t;
                rec.n_r = cfg.n_r;
                rec.l = cfg.l;
                rec.g_t = cfg.g_t;
                rec.g_r = cfg.g_r;
                rec.g_bar_t = cfg.g_bar_t;
                rec.g_bar_r = cfg.g_bar_r;
                rec.scenario = cfg.scenarios[si].label;
                rec.snr_db = cfg.scenarios[si].snr_db;
                rec.blocks = cfg.blocks;
                rec.per_block_mse.assign(static_cast<std::size_t>(cfg.blocks), 0.0);
            }

    int done = 0;
    for (int r = 0; r < cfg.realizations; ++r) {
        if (cfg.cancel && cfg.cancel->load()) break;

        // Channel stream depends only on (seed, r): paired across every cell.
        auto chan_rng = child_rng(cfg.seed, {0xC4A11ULL, static_cast<std::uint64_t>(r)});
        std::vector<ChannelState> states;
        states.push_back(init_channel(cp, chan_rng));
        for (int n = 1; n < cfg.blocks; ++n)
            states.push_back(evolve_channel(states.back(), cp, chan_rng));
        const std::uint64_t csum = channel_checksum(states);

        for (std::size_t mi = 0; mi < cfg.m_list.size(); ++mi)
            for (std::size_t si = 0; si < cfg.scenarios.size(); ++si) {
                const std::size_t cell = mi * cfg.scenarios.size() + si;
                auto rng = child_rng(cfg.seed, {0x5E77ULL, cell, static_cast<std::uint64_t>(r)});
                const int m = cfg.m_list[mi];
                const double sigma2 = std::pow(10.0, -cfg.scenarios[si].snr_db / 10.0);
                SensingSetup setup =
                    make_training(cfg.n_t, cfg.n_r, m, m, cfg.scheme, 1.0, sigma2, rng);
                auto full_dict = std::make_shared<const Dictionary>(
                    full_dictionary(setup, cfg.n_t, cfg.n_r, cfg.g_t, cfg.g_r));

                const SolverConfig greedy_cfg = cosamp_config(cfg.solver, cfg.l);
                DictCache cache;
                Tracker full(EstimatorKind::FullGreedy, setup, full_dict, tp, greedy_cfg);
                Tracker alg1(EstimatorKind::CorrelationCosamp, setup, full_dict, tp, greedy_cfg,
                             &cache);
                Tracker alg2(EstimatorKind::SparsityIht, setup, full_dict, tp,
                             iht_config(cfg.solver, cfg.l), &cache, greedy_cfg);

                std::vector<double> real_mse(3, 0.0);
                for (int n = 0; n < cfg.blocks; ++n) {
                    CVec y = measure(states[static_cast<std::size_t>(n)].h, setup, rng);
                    cache.clear();
                    BlockEstimate ests[3];
                    if (n == 0) {
                        ests[0] = full.step(y);
                        alg1.seed(y, ests[0]);
                        alg2.seed(y, ests[0]);
                        ests[1] = ests[0];
                        ests[2] = ests[0];
                    } else {
                        ests[0] = full.step(y);
                        ests[1] = alg1.step(y);
                        ests[2] = alg2.step(y);
                    }
                    for (int e = 0; e < 3; ++e) {
                        auto& rec = records[cell * 3 + e];
                        CVec z_true =
                            snap_true_sparse(states[static_cast<std::size_t>(n)], *ests[e].dict);
                        double err = (z_true - ests[e].report.estimate).squaredNorm();
                        rec.per_block_mse[static_cast<std::size_t>(n)] += err;
                        real_mse[static_cast<std::size_t>(e)] += err / cfg.blocks;
                        if (n == 0) {
                            rec.op_count_init += ests[e].report.op_count;
                            iters_init[cell * 3 + e] += ests[e].report.iterations_used;
                        } else {
                            rec.op_count_tracking += ests[e].report.op_count;
                            iters_track[cell * 3 + e] += ests[e].report.iterations_used;
                        }
                    }
                }
                for (int e = 0; e < 3; ++e) {
                    auto& rec = records[cell * 3 + e];
                    rec.per_realization.push_back(real_mse[static_cast<std::size_t>(e)]);
                    rec.realization_checksums.push_back(csum);
                }
            }
        ++done;
    }

    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& rec = records[i];
        rec.realizations = done;
        if (done == 0) continue;
        for (double& v : rec.per_block_mse) v /= done;
        rec.mean_mse = mean(rec.per_realization);
        rec.mean_mse_db = 10.0 * std::log10(rec.mean_mse);
        rec.mean_iters_init = iters_init[i] / done;
        rec.mean_iters_track =
            cfg.blocks > 1 ? iters_track[i] / (static_cast<double>(done) * (cfg.blocks - 1)) : 0.0;
    }
    return records;
}

std::vector<ExperimentRecord> run_rate_experiment(const RateExperimentConfig& cfg) {
    // Estimator slots: tracked estimators first, then the perfect-CSI
    // reference.  The full-greedy baseline can be dropped from the per-block
    // loop (block 1 still uses it for initialization).
    std::vector<std::string> names;
    if (cfg.include_full_greedy) names.push_back("full_greedy");
    names.push_back("algorithm1");
    names.push_back("algorithm2");
    const int n_est = static_cast<int>(names.size());
    names.push_back("perfect");
    const int n_slots = n_est + 1;
    const double delta = cfg.delta_deg * kDeg;
    const double delta_est = cfg.delta_est_deg < 0.0 ? delta : cfg.delta_est_deg * kDeg;

    ChannelParams cp;
    cp.n_t = cfg.n_t;
    cp.n_r = cfg.n_r;
    cp.l = cfg.l;
    cp.delta = delta;
    cp.rho = cfg.rho;
    cp.pathloss = cfg.pathloss;

    TrackerParams tp;
    tp.n_t = cfg.n_t;
    tp.n_r = cfg.n_r;
    tp.l = cfg.l;
    tp.delta_est = delta_est;
    tp.g_bar_t = cfg.g_bar_t;
    tp.g_bar_r = cfg.g_bar_r;

    const std::size_t n_m = cfg.m_list.size();
    const std::size_t n_s = cfg.snr_db_list.size();
    std::vector<ExperimentRecord> records(n_m * n_s * n_slots);
    std::vector<double> iters_init(records.size(), 0.0), iters_track(records.size(), 0.0);
    for (std::size_t mi = 0; mi < n_m; ++mi)
        for (std::size_t si = 0; si < n_s; ++si)
            for (int e = 0; e < n_slots; ++e) {
                auto& rec = records[(mi * n_s + si) * n_slots + e];
                rec.estimator = names[e];
                rec.m = cfg.m_list[mi];
                rec.n_t = cfg.n_t;
                rec.n_r = cfg.n_r;
                rec.l = cfg.l;
                rec.g_t = cfg.g_t;
                rec.g_r = cfg.g_r;
                rec.g_bar_t = cfg.g_bar_t;
                rec.g_bar_r = cfg.g_bar_r;
                rec.snr_db = cfg.snr_db_list[si];
                rec.blocks = cfg.blocks;
            }

    std::vector<double> snr_lin(n_s);
    for (std::size_t si = 0; si < n_s; ++si)
        snr_lin[si] = std::pow(10.0, cfg.snr_db_list[si] / 10.0);

    int done = 0;
    for (int r = 0; r < cfg.realizations; ++r) {
        if (cfg.cancel && cfg.cancel->load()) break;

        auto chan_rng = child_rng(cfg.seed, {0xC4A11ULL, static_cast<std::uint64_t>(r)});
        std::vector<ChannelState> states;
        states.push_back(init_channel(cp, chan_rng));
        for (int n = 1; n < cfg.blocks; ++n)
            states.push_back(evolve_channel(states.back(), cp, chan_rng));
        const std::uint64_t csum = channel_checksum(states);

        // Perfect-CSI beamforming gain is sigma_1(H)^2.
        std::vector<double> perfect_gain(static_cast<std::size_t>(cfg.blocks));
        for (int n = 0; n < cfg.blocks; ++n) {
            double s = principal_svd(states[static_cast<std::size_t>(n)].h).sigma;
            perfect_gain[static_cast<std::size_t>(n)] = s * s;
        }

        for (std::size_t mi = 0; mi < n_m; ++mi) {
            auto rng = child_rng(cfg.seed, {0x4A7EULL, mi, static_cast<std::uint64_t>(r)});
            const int m = cfg.m_list[mi];
            const double sigma2 = std::pow(10.0, -cfg.training_snr_db / 10.0);
            SensingSetup setup = make_training(cfg.n_t, cfg.n_r, m, m, cfg.scheme, 1.0, sigma2, rng);
            auto full_dict = std::make_shared<const Dictionary>(
                full_dictionary(setup, cfg.n_t, cfg.n_r, cfg.g_t, cfg.g_r));

            const SolverConfig greedy_cfg = cosamp_config(cfg.solver, cfg.l);
            DictCache cache;
            Tracker full(EstimatorKind::FullGreedy, setup, full_dict, tp, greedy_cfg);
            Tracker alg1(EstimatorKind::CorrelationCosamp, setup, full_dict, tp, greedy_cfg,
                         &cache);
            Tracker alg2(EstimatorKind::SparsityIht, setup, full_dict, tp,
                         iht_config(cfg.solver, cfg.l), &cache, greedy_cfg);

            // rate_acc[e][si]: sum over blocks of log2(1 + snr * gain).
            std::vector<std::vector<double>> rate_acc(static_cast<std::size_t>(n_slots),
                                                      std::vector<double>(n_s, 0.0));
            for (int n = 0; n < cfg.blocks; ++n) {
                CVec y = measure(states[static_cast<std::size_t>(n)].h, setup, rng);
                cache.clear();
                BlockEstimate e_full, e_alg1, e_alg2;
                if (n == 0) {
                    e_full = full.step(y);
                    alg1.seed(y, e_full);
                    alg2.seed(y, e_full);
                    e_alg1 = e_full;
                    e_alg2 = e_full;
                } else {
                    if (cfg.include_full_greedy) e_full = full.step(y);
                    e_alg1 = alg1.step(y);
                    e_alg2 = alg2.step(y);
                }
                std::vector<const BlockEstimate*> ests;
                if (cfg.include_full_greedy) ests.push_back(&e_full);
                ests.push_back(&e_alg1);
                ests.push_back(&e_alg2);
                for (int e = 0; e < n_est; ++e) {
                    const BlockEstimate& be = *ests[static_cast<std::size_t>(e)];
                    BeamformingLink link = make_beamformers(be.h_hat, cfg.constant_modulus);
                    cplx g = (link.u.adjoint() * states[static_cast<std::size_t>(n)].h * link.v)
                                 .value();
                    double gain = std::norm(g);
                    for (std::size_t si = 0; si < n_s; ++si)
                        rate_acc[static_cast<std::size_t>(e)][si] +=
                            std::log2(1.0 + snr_lin[si] * gain);
                    // Op counts are SNR-independent; mirror them into every
                    // SNR record of this (m, estimator) cell.
                    for (std::size_t si = 0; si < n_s; ++si) {
                        auto& rec = records[(mi * n_s + si) * n_slots + e];
                        if (n == 0)
                            rec.op_count_init += be.report.op_count;
                        else
                            rec.op_count_tracking += be.report.op_count;
                    }
                    if (n == 0)
                        iters_init[(mi * n_s) * n_slots + static_cast<std::size_t>(e)] +=
                            be.report.iterations_used;
                    else
                        iters_track[(mi * n_s) * n_slots + static_cast<std::size_t>(e)] +=
                            be.report.iterations_used;
                }
                for (std::size_t si = 0; si < n_s; ++si)
                    rate_acc[static_cast<std::size_t>(n_est)][si] +=
                        std::log2(1.0 + snr_lin[si] * perfect_gain[static_cast<std::size_t>(n)]);
            }
            for (std::size_t si = 0; si < n_s; ++si)
                for (int e = 0; e < n_slots; ++e) {
                    auto& rec = records[(mi * n_s + si) * n_slots + e];
                    rec.per_realization.push_back(rate_acc[static_cast<std::size_t>(e)][si] /
                                                  cfg.blocks);
                    rec.realization_checksums.push_back(csum);
                }
        }
        ++done;
    }

    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& rec = records[i];
        rec.realizations = done;
        if (done == 0) continue;
        rec.mean_rate = mean(rec.per_realization);
        const std::size_t slots = static_cast<std::size_t>(n_slots);
        const std::size_t base = (i / slots) / n_s * n_s * slots + i % slots;
        rec.mean_iters_init = iters_init[base] / done;
        rec.mean_iters_track =
            cfg.blocks > 1
                ? iters_track[base] / (static_cast<double>(done) * (cfg.blocks - 1))
                : 0.0;
    }
    return records;
}

std::vector<ComplexityRow> complexity_report(const std::vector<ExperimentRecord>& records) {
    std::vector<ComplexityRow> rows;
    for (const auto& rec : records) {
        if (rec.estimator == "perfect" || rec.realizations == 0 || rec.blocks < 2) continue;
        ComplexityRow row;
        row.estimator = rec.estimator;
        row.m = rec.m;
        row.g_t = rec.g_t;
        row.g_r = rec.g_r;
        row.g_bar_t = rec.g_bar_t;
        row.g_bar_r = rec.g_bar_r;
        row.measured = static_cast<double>(rec.op_count_tracking) / rec.realizations;
        const double m2 = static_cast<double>(rec.m) * rec.m;
        const double big = static_cast<double>(rec.g_t) * rec.g_r;
        const double small = static_cast<double>(rec.l) * rec.l * rec.g_bar_t * rec.g_bar_r;
        const double b_track = rec.blocks - 1;
        const double iters = rec.mean_iters_track;
        if (rec.estimator == "full_greedy")
            row.predicted = b_track * iters * (big * (m2 + 1.0) + 2.0 * m2);
        else if (rec.estimator == "algorithm1")
            row.predicted = b_track * iters * (small * (m2 + 1.0) + 2.0 * m2);
        else
            row.predicted = b_track * iters * small * (m2 + 1.0);
        row.ratio = row.predicted > 0.0 ? row.measured / row.predicted : 0.0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace mmcs
