#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <memory>

#include "mmcs/channel.hpp"
#include "mmcs/estimators.hpp"
#include "mmcs/rng.hpp"
#include "mmcs/sensing.hpp"
#include "properties.hpp"

using namespace mmcs;

namespace {

TrackerParams small_params() {
    TrackerParams tp;
    tp.n_t = 16;
    tp.n_r = 16;
    tp.l = 1;
    tp.delta_est = 3.0 * kTwoPi / 360.0;
    tp.g_bar_t = 5;
    tp.g_bar_r = 5;
    return tp;
}

SolverConfig tracking_cfg() {
    SolverConfig c;
    c.sparsity = 1;
    c.max_iters = 10;
    c.adaptive_step = true;
    return c;
}

TrackerState seeded_state(const std::vector<PathEstimate>& paths) {
    TrackerState s;
    s.block_index = 1;
    s.last_paths = paths;
    return s;
}

}  // namespace

TEST_CASE("estimator names are stable identifiers") {
    CHECK(estimator_name(EstimatorKind::FullGreedy) == std::string("full_greedy"));
    CHECK(estimator_name(EstimatorKind::CorrelationCosamp) == std::string("algorithm1"));
    CHECK(estimator_name(EstimatorKind::SparsityIht) == std::string("algorithm2"));
}

TEST_CASE("all trackers share the full-dictionary first block") {
    auto rng = child_rng(5, {1});
    int n = 16, m = 10;
    SensingSetup s = make_training(n, n, m, m, TrainingScheme::RandomPhase, 1.0, 0.01, rng);
    auto full = std::make_shared<const Dictionary>(full_dictionary(s, n, n, 24, 24));
    ChannelParams p;
    p.n_t = n;
    p.n_r = n;
    p.l = 1;
    ChannelState st = init_channel(p, rng);
    CVec y = measure(st.h, s, rng);
    SolverConfig cfg = tracking_cfg();
    TrackerParams tp = small_params();
    BlockEstimate want = full_greedy_step(y, full, tp, cfg);
    for (EstimatorKind kind : {EstimatorKind::FullGreedy, EstimatorKind::CorrelationCosamp,
                               EstimatorKind::SparsityIht}) {
        Tracker tr(kind, s, full, tp, cfg);
        BlockEstimate got = tr.step(y);
        CHECK((got.h_hat - want.h_hat).norm() == 0.0);
        CHECK(got.sparse.support == want.sparse.support);
    }
}

TEST_CASE("tracking dictionary has exactly L^2 GbarT GbarR columns") {
    auto rng = child_rng(5, {2});
    int n = 16, m = 8;
    SensingSetup s = make_training(n, n, m, m, TrainingScheme::RandomPhase, 1.0, 0.01, rng);
    TrackerParams tp = small_params();
    tp.l = 2;
    tp.g_bar_t = 7;
    tp.g_bar_r = 6;
    SolverConfig cfg = tracking_cfg();
    cfg.sparsity = 2;
    TrackerState state = seeded_state({{0.3, 1.1, cplx(1, 0)}, {2.0, 2.6, cplx(0, 1)}});
    CVec y = measure(CMat::Zero(n, n), s, rng);
    auto [est, next] = algorithm1_step(y, state, s, tp, cfg);
    CHECK(est.dict->cols() == 2 * 7 * 2 * 6);
    CHECK(static_cast<int>(est.dict->tx_angles.size()) == 2 * 7);
    CHECK(static_cast<int>(est.dict->rx_angles.size()) == 2 * 6);
    CHECK(static_cast<int>(next.last_paths.size()) == 2);
}

TEST_CASE("a collapsing search window pins the estimate to the previous angles") {
    auto rng = child_rng(5, {3});
    int n = 16, m = 10;
    SensingSetup s = make_training(n, n, m, m, TrainingScheme::RandomPhase, 1.0, 1e-6, rng);
    TrackerParams tp = small_params();
    tp.delta_est = 1e-9;
    tp.g_bar_t = 3;
    tp.g_bar_r = 3;
    TrackerState state = seeded_state({{0.7, 1.9, cplx(1, 0)}});
    ChannelParams p;
    p.n_t = n;
    p.n_r = n;
    p.l = 1;
    CVec gains(1);
    gains(0) = cplx(0.9, -0.5);
    CMat h = assemble_channel(p, {0.7}, {1.9}, gains);
    CVec y = measure(h, s, rng);
    auto [est, next] = algorithm1_step(y, state, s, tp, tracking_cfg());
    REQUIRE(est.sparse.paths.size() == 1);
    CHECK(wrapped_distance(est.sparse.paths[0].aod, 0.7) <= 1e-6);
    CHECK(wrapped_distance(est.sparse.paths[0].aoa, 1.9) <= 1e-6);
}

TEST_CASE("noiseless on-window channel is recovered exactly by both tracking steps") {
    auto rng = child_rng(5, {4});
    int n = 16, m = 12;
    SensingSetup s = make_training(n, n, m, m, TrainingScheme::RandomPhase, 1.0, 0.0, rng);
    TrackerParams tp = small_params();
    // build the same reduced dictionary the step will use, to plant the truth
    // on one of its off-center grid points
    ReducedGrids grids = reduced_grids({1.0}, {2.0}, tp.delta_est, tp.g_bar_t, tp.g_bar_r);
    Dictionary d = reduced_dictionary(s, n, n, grids);
    ChannelParams p;
    p.n_t = n;
    p.n_r = n;
    p.l = 1;
    CVec gains(1);
    gains(0) = cplx(-0.4, 1.3);
    CMat h = assemble_channel(p, {d.tx_angles[3]}, {d.rx_angles[1]}, gains);
    CVec y = measure(h, s, rng);
    TrackerState state = seeded_state({{1.0, 2.0, cplx(1, 0)}});
    // window columns are strongly correlated and unequal in norm; the exact
    // atom only wins the proxy selection when the columns are normalized
    SolverConfig cfg = tracking_cfg();
    cfg.normalize_columns = true;
    auto [e1, n1] = algorithm1_step(y, state, s, tp, cfg);
    auto [e2, n2] = algorithm2_step(y, state, s, tp, cfg);
    CHECK((e1.h_hat - h).norm() <= 1e-6 * h.norm());
    CHECK((e2.h_hat - h).norm() <= 1e-6 * h.norm());
}

TEST_CASE("warm start remap lands the gain on the nearest grid pair") {
    auto rng = child_rng(5, {5});
    int n = 16, m = 8;
    SensingSetup s = make_training(n, n, m, m, TrainingScheme::RandomPhase, 1.0, 0.01, rng);
    TrackerParams tp = small_params();
    ReducedGrids grids = reduced_grids({0.5}, {1.5}, tp.delta_est, tp.g_bar_t, tp.g_bar_r);
    Dictionary d = reduced_dictionary(s, n, n, grids);
    TrackerState state = seeded_state({{0.5 + 0.001, 1.5 - 0.001, cplx(2.0, -1.0)}});
    CVec z0 = remap_warm_start(state, d);
    REQUIRE(z0.size() == d.phi.cols());
    int nz = 0, where = -1;
    for (Eigen::Index j = 0; j < z0.size(); ++j)
        if (z0(j) != cplx(0, 0)) { ++nz; where = static_cast<int>(j); }
    REQUIRE(nz == 1);
    CHECK(z0(where) == cplx(2.0, -1.0));
    int i_tx = nearest_angle_index(d.tx_angles, 0.5 + 0.001);
    int i_rx = nearest_angle_index(d.rx_angles, 1.5 - 0.001);
    CHECK(where == d.column_index(i_tx, i_rx));
}

TEST_CASE("state_from_estimate pads the support up to L paths") {
    auto rng = child_rng(5, {6});
    int n = 16, m = 8;
    SensingSetup s = make_training(n, n, m, m, TrainingScheme::RandomPhase, 1.0, 0.01, rng);
    auto full = std::make_shared<const Dictionary>(full_dictionary(s, n, n, 12, 12));
    ChannelParams p;
    p.n_t = n;
    p.n_r = n;
    p.l = 1;
    ChannelState st = init_channel(p, rng);
    CVec y = measure(st.h, s, rng);
    TrackerParams tp = small_params();
    tp.l = 3;
    SolverConfig cfg = tracking_cfg();
    cfg.sparsity = 1;  // solver returns at most one path; state needs three
    BlockEstimate est = full_greedy_step(y, full, tp, cfg);
    REQUIRE(est.sparse.paths.size() == 1);
    TrackerState state = state_from_estimate(y, est, tp);
    REQUIRE(state.last_paths.size() == 3);
    CHECK(state.last_paths[0].gain != cplx(0, 0));
    CHECK(state.last_paths[1].gain == cplx(0, 0));
    CHECK(state.last_paths[2].gain == cplx(0, 0));
    // fill-in angles are distinct from the solved path
    bool distinct = wrapped_distance(state.last_paths[1].aod, state.last_paths[0].aod) > 1e-12 ||
                    wrapped_distance(state.last_paths[1].aoa, state.last_paths[0].aoa) > 1e-12;
    CHECK(distinct);
}

TEST_CASE("reconstructed channel has rank at most L") {
    CHECK(mmcs_props::prop_estimate_rank_at_most_l(50, 42) == 0);
}

TEST_CASE("tracking op_count shrinks with the dictionary ratio") {
    auto rng = child_rng(5, {7});
    int n = 16, m = 10, g = 24;
    SensingSetup s = make_training(n, n, m, m, TrainingScheme::RandomPhase, 1.0, 0.01, rng);
    auto full = std::make_shared<const Dictionary>(full_dictionary(s, n, n, g, g));
    ChannelParams p;
    p.n_t = n;
    p.n_r = n;
    p.l = 1;
    p.rho = 0.9;
    p.delta = 2.0 * kTwoPi / 360.0;
    ChannelState st = init_channel(p, rng);
    TrackerParams tp = small_params();
    SolverConfig cfg = tracking_cfg();
    CVec y1 = measure(st.h, s, rng);
    BlockEstimate first = full_greedy_step(y1, full, tp, cfg);
    TrackerState state = state_from_estimate(y1, first, tp);
    st = evolve_channel(st, p, rng);
    CVec y2 = measure(st.h, s, rng);
    auto [trk, next] = algorithm1_step(y2, state, s, tp, cfg);
    BlockEstimate fullb = full_greedy_step(y2, full, tp, cfg);
    double want = static_cast<double>(g) * g / (tp.g_bar_t * tp.g_bar_r);
    double got = static_cast<double>(fullb.report.op_count) /
                 static_cast<double>(trk.report.op_count);
    CHECK(got >= want / 2.0);
    CHECK(got <= want * 2.0);
}

TEST_CASE("dictionary cache is shared between the tracking steps") {
    auto rng = child_rng(5, {8});
    int n = 16, m = 8;
    SensingSetup s = make_training(n, n, m, m, TrainingScheme::RandomPhase, 1.0, 0.01, rng);
    TrackerParams tp = small_params();
    TrackerState state = seeded_state({{0.9, 2.1, cplx(1, 0)}});
    CVec y = measure(CMat::Zero(n, n), s, rng);
    DictCache cache;
    auto [e1, n1] = algorithm1_step(y, state, s, tp, tracking_cfg(), &cache);
    auto [e2, n2] = algorithm2_step(y, state, s, tp, tracking_cfg(), &cache);
    CHECK(e1.dict.get() == e2.dict.get());  // second step reuses the cached build
    cache.clear();
    auto [e3, n3] = algorithm2_step(y, state, s, tp, tracking_cfg(), &cache);
    CHECK(e3.dict.get() != e1.dict.get());
}

TEST_CASE("tracker degrades gracefully when the channel outruns the window") {
    CHECK(mmcs_props::prop_tracker_graceful_degradation(20, 42) == 0);
}

TEST_CASE("track rejects an empty measurement list") {
    auto rng = child_rng(5, {9});
    int n = 8, m = 5;
    SensingSetup s = make_training(n, n, m, m, TrainingScheme::RandomPhase, 1.0, 0.01, rng);
    auto full = std::make_shared<const Dictionary>(full_dictionary(s, n, n, 10, 10));
    CHECK_THROWS(track({}, EstimatorKind::FullGreedy, s, full, small_params(), tracking_cfg()));
}

TEST_CASE("track over several blocks is deterministic and block-1-consistent") {
    int n = 16, m = 8, blocks = 5;
    ChannelParams p;
    p.n_t = n;
    p.n_r = n;
    p.l = 1;
    p.rho = 0.9;
    p.delta = 2.0 * kTwoPi / 360.0;
    TrackerParams tp = small_params();
    SolverConfig cfg = tracking_cfg();
    for (EstimatorKind kind : {EstimatorKind::CorrelationCosamp, EstimatorKind::SparsityIht}) {
        std::vector<CMat> lasts;
        CMat first_block_a, first_block_b;
        for (int run = 0; run < 2; ++run) {
            auto rng = child_rng(5, {10});
            SensingSetup s = make_training(n, n, m, m, TrainingScheme::RandomPhase, 1.0, 0.01, rng);
            auto full = std::make_shared<const Dictionary>(full_dictionary(s, n, n, 20, 20));
            ChannelState st = init_channel(p, rng);
            std::vector<CVec> ys;
            for (int b = 0; b < blocks; ++b) {
                ys.push_back(measure(st.h, s, rng));
                st = evolve_channel(st, p, rng);
            }
            auto ests = track(ys, kind, s, full, tp, cfg);
            REQUIRE(static_cast<int>(ests.size()) == blocks);
            // block 1 must match the plain full-dictionary estimate
            BlockEstimate want = full_greedy_step(ys[0], full, tp, cfg);
            CHECK((ests[0].h_hat - want.h_hat).norm() == 0.0);
            lasts.push_back(ests.back().h_hat);
        }
        CHECK((lasts[0] - lasts[1]).norm() == 0.0);
    }
}

TEST_CASE("Tracker seed adopts an externally computed first block") {
    auto rng = child_rng(5, {11});
    int n = 16, m = 8;
    SensingSetup s = make_training(n, n, m, m, TrainingScheme::RandomPhase, 1.0, 0.01, rng);
    auto full = std::make_shared<const Dictionary>(full_dictionary(s, n, n, 16, 16));
    ChannelParams p;
    p.n_t = n;
    p.n_r = n;
    p.l = 1;
    p.rho = 0.95;
    p.delta = 0.01;
    ChannelState st = init_channel(p, rng);
    CVec y1 = measure(st.h, s, rng);
    TrackerParams tp = small_params();
    SolverConfig cfg = tracking_cfg();
    BlockEstimate first = full_greedy_step(y1, full, tp, cfg);

    // a seeded tracker and a tracker that computed block 1 itself agree on block 2
    Tracker direct(EstimatorKind::CorrelationCosamp, s, full, tp, cfg);
    direct.step(y1);
    Tracker seeded(EstimatorKind::CorrelationCosamp, s, full, tp, cfg);
    seeded.seed(y1, first);
    st = evolve_channel(st, p, rng);
    CVec y2 = measure(st.h, s, rng);
    BlockEstimate a = direct.step(y2);
    Tracker seeded_copy = seeded;
    BlockEstimate b = seeded_copy.step(y2);
    CHECK((a.h_hat - b.h_hat).norm() == 0.0);
}
