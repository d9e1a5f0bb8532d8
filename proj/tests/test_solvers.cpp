#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "mmcs/channel.hpp"
#include "mmcs/rng.hpp"
#include "mmcs/sensing.hpp"
#include "mmcs/solvers.hpp"
#include "properties.hpp"

using namespace mmcs;
using mmcs_props::random_cmat;
using mmcs_props::random_cvec;

namespace {

int argmax_correlation(const CMat& phi, const CVec& y) {
    int best = 0;
    double best_c = -1.0;
    for (int j = 0; j < phi.cols(); ++j) {
        double c = std::abs(phi.col(j).dot(y)) / phi.col(j).norm();
        if (c > best_c) { best_c = c; best = j; }
    }
    return best;
}

}  // namespace

TEST_CASE("cosamp solves a noiseless 1-sparse problem exactly") {
    auto rng = child_rng(4, {1});
    CMat phi = random_cmat(rng, 36, 100);
    cplx alpha(1.1, -0.4);
    CVec y = alpha * phi.col(37);
    SolverConfig cfg;
    cfg.sparsity = 1;
    SolverReport rep = cosamp(phi, y, cfg);
    CHECK(rep.final_residual <= 1e-9 * y.norm());
    CHECK(argmax_correlation(phi, y) == 37);
    CHECK(std::abs(rep.estimate(37) - alpha) <= 1e-9);
}

TEST_CASE("cosamp on a zero measurement returns zero in one iteration") {
    auto rng = child_rng(4, {2});
    CMat phi = random_cmat(rng, 8, 16);
    SolverConfig cfg;
    cfg.sparsity = 2;
    SolverReport rep = cosamp(phi, CVec::Zero(8), cfg);
    CHECK(rep.estimate.norm() == 0.0);
    CHECK(rep.iterations_used == 1);
}

TEST_CASE("cosamp recovers planted 3-sparse signals on random dictionaries") {
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto rng = child_rng(4, {3, static_cast<std::uint64_t>(trial)});
        CMat phi = random_cmat(rng, 64, 256);
        CVec z = CVec::Zero(256);
        z(5) = cplx(1.0, 0.2);
        z(100) = cplx(-0.8, 0.9);
        z(200) = cplx(0.3, -1.2);
        CVec y = phi * z;
        SolverConfig cfg;
        cfg.sparsity = 3;
        SolverReport rep = cosamp(phi, y, cfg);
        if ((rep.estimate - z).norm() <= 1e-6 * z.norm()) ++hits;
    }
    CHECK(hits >= 95);
}

TEST_CASE("cosamp validates its inputs") {
    auto rng = child_rng(4, {4});
    CMat phi = random_cmat(rng, 8, 16);
    SolverConfig cfg;
    cfg.sparsity = 0;
    CHECK_THROWS(cosamp(phi, random_cvec(rng, 8), cfg));
    cfg.sparsity = 1;
    CHECK_THROWS(cosamp(phi, random_cvec(rng, 7), cfg));
}

TEST_CASE("cosamp warns when the sparsity triple exceeds the rows") {
    auto rng = child_rng(4, {5});
    CMat phi = random_cmat(rng, 5, 12);
    SolverConfig cfg;
    cfg.sparsity = 2;
    CHECK(cosamp(phi, random_cvec(rng, 5), cfg).underdetermined_warning);
}

TEST_CASE("cosamp survives exactly duplicated columns") {
    auto rng = child_rng(4, {6});
    CMat phi = random_cmat(rng, 10, 8);
    phi.col(5) = phi.col(2);  // forced collision
    CVec y = phi.col(2) * cplx(2.0, 1.0);
    SolverConfig cfg;
    cfg.sparsity = 2;
    SolverReport rep = cosamp(phi, y, cfg);
    CHECK(rep.final_residual <= 1e-8 * y.norm());
}

TEST_CASE("iht with orthonormal columns recovers in one iteration") {
    auto rng = child_rng(4, {7});
    CMat base = random_cmat(rng, 12, 6);
    Eigen::HouseholderQR<CMat> qr(base);
    CMat phi = qr.householderQ() * CMat::Identity(12, 6);
    CVec z = CVec::Zero(6);
    z(4) = cplx(0.7, -0.9);
    CVec y = phi * z;
    SolverConfig cfg;
    cfg.sparsity = 1;
    cfg.max_iters = 1;
    SolverReport rep = iht(phi, y, CVec::Zero(6), cfg);
    CHECK((rep.estimate - z).norm() <= 1e-12);
}

TEST_CASE("iht at the true warm start is a fixed point") {
    auto rng = child_rng(4, {8});
    CMat phi = random_cmat(rng, 16, 24);
    CVec z = CVec::Zero(24);
    z(11) = cplx(1.5, 0.5);
    CVec y = phi * z;
    SolverConfig cfg;
    cfg.sparsity = 1;
    cfg.max_iters = 10;
    for (bool adaptive : {false, true}) {
        cfg.adaptive_step = adaptive;
        SolverReport rep = iht(phi, y, z, cfg);
        CHECK((rep.estimate - z).norm() <= 1e-12);
        CHECK(rep.final_residual <= 1e-12);
    }
}

TEST_CASE("iht runs exactly max_iters iterations and never inverts") {
    auto rng = child_rng(4, {9});
    CMat phi = random_cmat(rng, 16, 24);
    CVec y = random_cvec(rng, 16);
    SolverConfig cfg;
    cfg.sparsity = 2;
    cfg.max_iters = 7;
    SolverReport rep = iht(phi, y, CVec::Zero(24), cfg);
    CHECK(rep.iterations_used == 7);
    CHECK(rep.residual_history.size() == 7);
}

TEST_CASE("iht agrees with cosamp on reduced dictionaries at low noise") {
    int agree = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto rng = child_rng(4, {10, static_cast<std::uint64_t>(trial)});
        int n = 16, m = 8;
        double sigma2 = 1e-4;  // 40 dB: low enough that both should find the atom
        SensingSetup s = make_training(n, n, m, m, TrainingScheme::RandomPhase, 1.0, sigma2, rng);
        std::uniform_real_distribution<double> ang(0.0, kTwoPi);
        double aod = ang(rng), aoa = ang(rng);
        ReducedGrids grids = reduced_grids({aod}, {aoa}, 3.0 * kTwoPi / 360.0, 5, 4);
        Dictionary d = reduced_dictionary(s, n, n, grids);
        // truth on the center atom of the window
        ChannelParams p;
        p.n_t = n;
        p.n_r = n;
        p.l = 1;
        CVec gains(1);
        gains(0) = mmcs_props::random_cvec(rng, 1)(0);
        CMat h = assemble_channel(p, {d.tx_angles[2]}, {d.rx_angles[1]}, gains);
        CVec y = measure(h, s, rng);
        SolverConfig cfg;
        cfg.sparsity = 1;
        cfg.max_iters = 10;
        // the window columns differ in norm, so agreement on the exact atom
        // needs norm-free (normalized) selection in both solvers
        cfg.normalize_columns = true;
        SolverReport rc = cosamp(d.phi, y, cfg);
        SolverConfig icfg = cfg;
        icfg.adaptive_step = true;
        SolverReport ri = iht(d.phi, y, CVec::Zero(d.cols()), icfg);
        int sc = -1, si = -1;
        for (int j = 0; j < d.cols(); ++j) {
            if (rc.estimate(j) != cplx(0.0, 0.0)) sc = j;
            if (ri.estimate(j) != cplx(0.0, 0.0)) si = j;
        }
        if (sc == si) ++agree;
    }
    CHECK(agree >= 90);
}

TEST_CASE("iht divergence is reported, not thrown") {
    auto rng = child_rng(4, {11});
    CMat phi = 5.0 * random_cmat(rng, 8, 16);  // spectral norm far above 1
    CVec y = random_cvec(rng, 8);
    SolverConfig cfg;
    cfg.sparsity = 1;
    cfg.max_iters = 10;
    cfg.step_size = 1.0;
    SolverReport rep = iht(phi, y, CVec::Zero(16), cfg);
    CHECK(std::isfinite(rep.final_residual));
}

TEST_CASE("iht safeguarded step stops the blow-up") {
    auto rng = child_rng(4, {12});
    CMat phi = 5.0 * random_cmat(rng, 8, 16);
    CVec z = CVec::Zero(16);
    z(3) = cplx(1.0, 0.0);
    CVec y = phi * z;
    SolverConfig cfg;
    cfg.sparsity = 1;
    cfg.max_iters = 30;
    cfg.safeguard_step = true;
    SolverReport rep = iht(phi, y, CVec::Zero(16), cfg);
    CHECK(rep.final_residual <= 0.5 * y.norm());
}

TEST_CASE("solver reports recompute their final residual") {
    auto rng = child_rng(4, {13});
    CMat phi = random_cmat(rng, 12, 20);
    CVec y = random_cvec(rng, 12);
    SolverConfig cfg;
    cfg.sparsity = 2;
    for (auto rep : {cosamp(phi, y, cfg), iht(phi, y, CVec::Zero(20), cfg)}) {
        CHECK(std::abs((y - phi * rep.estimate).norm() - rep.final_residual) <=
              1e-9 * (rep.final_residual + 1e-30));
    }
}

TEST_CASE("op_count scales with the column count") {
    auto rng = child_rng(4, {14});
    CVec y = random_cvec(rng, 16);
    SolverConfig cfg;
    cfg.sparsity = 1;
    cfg.max_iters = 4;
    cfg.residual_tol = 0.0;  // force the full iteration count in both runs
    CMat small = random_cmat(rng, 16, 50), big = random_cmat(rng, 16, 200);
    double r_cosamp = static_cast<double>(cosamp(big, y, cfg).op_count) /
                      static_cast<double>(cosamp(small, y, cfg).op_count);
    double r_iht = static_cast<double>(iht(big, y, CVec::Zero(200), cfg).op_count) /
                   static_cast<double>(iht(small, y, CVec::Zero(50), cfg).op_count);
    CHECK(r_cosamp >= 2.0);
    CHECK(r_cosamp <= 8.0);
    CHECK(r_iht >= 2.0);
    CHECK(r_iht <= 8.0);
}

TEST_CASE("spectral_norm_sq matches the exact largest eigenvalue") {
    auto rng = child_rng(4, {15});
    CMat phi = random_cmat(rng, 10, 6);
    Eigen::JacobiSVD<CMat> svd(phi);
    double want = svd.singularValues()(0) * svd.singularValues()(0);
    // power iteration, so a percent-level match is all the safeguard needs
    CHECK(spectral_norm_sq(phi) == doctest::Approx(want).epsilon(0.02));
    CHECK(spectral_norm_sq(phi) <= want * (1.0 + 1e-9));
}

TEST_CASE("randomized solver properties") {
    CHECK(mmcs_props::prop_solver_sparsity_and_determinism(100, 42) == 0);
    CHECK(mmcs_props::prop_cosamp_residual_nonincreasing(100, 42) == 0);
    CHECK(mmcs_props::prop_iht_small_step_monotone(100, 42) == 0);
}
