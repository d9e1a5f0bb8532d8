#include "mmcs/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace mmcs {

const char* estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::FullGreedy: return "full_greedy";
        case EstimatorKind::CorrelationCosamp: return "algorithm1";
        case EstimatorKind::SparsityIht: return "algorithm2";
    }
    return "?";
}

std::vector<long long> DictCache::key(const std::vector<double>& centers) {
    std::vector<long long> k;
    k.reserve(centers.size());
    for (double c : centers) k.push_back(std::llround(c * 1e12));
    return k;
}

std::shared_ptr<const Dictionary> DictCache::find(const std::vector<double>& centers) const {
    auto it = entries_.find(key(centers));
    return it == entries_.end() ? nullptr : it->second;
}

void DictCache::insert(const std::vector<double>& centers,
                       std::shared_ptr<const Dictionary> dict) {
    entries_[key(centers)] = std::move(dict);
}

namespace {

CMat reconstruct_channel(const SparseEstimate& sparse, const TrackerParams& params) {
    CMat h = CMat::Zero(params.n_r, params.n_t);
    for (const auto& p : sparse.paths)
        h += p.gain * ula_response(params.n_r, p.aoa) * ula_response(params.n_t, p.aod).adjoint();
    return h;
}

BlockEstimate finalize(SolverReport&& report, std::shared_ptr<const Dictionary> dict,
                       const TrackerParams& params) {
    BlockEstimate est;
    est.sparse = make_sparse_estimate(report.estimate, *dict);
    est.h_hat = reconstruct_channel(est.sparse, params);
    est.report = std::move(report);
    est.dict = std::move(dict);
    return est;
}

std::shared_ptr<const Dictionary> reduced_dict_for(const TrackerState& state,
                                                   const SensingSetup& setup,
                                                   const TrackerParams& params,
                                                   DictCache* cache) {
    std::vector<double> aods, aoas;
    for (const auto& p : state.last_paths) aods.push_back(p.aod);
    for (const auto& p : state.last_paths) aoas.push_back(p.aoa);

    std::vector<double> centers = aods;
    centers.insert(centers.end(), aoas.begin(), aoas.end());
    if (cache)
        if (auto hit = cache->find(centers)) return hit;

    auto grids = reduced_grids(aods, aoas, params.delta_est, params.g_bar_t, params.g_bar_r);
    auto dict = std::make_shared<const Dictionary>(
        reduced_dictionary(setup, params.n_t, params.n_r, grids, params.dedup));
    if (cache) cache->insert(centers, dict);
    return dict;
}

}  // namespace

TrackerState state_from_estimate(const CVec& y_v, const BlockEstimate& est,
                                 const TrackerParams& params) {
    TrackerState s;
    s.block_index = 1;  // caller overwrites for later blocks
    s.last_paths = est.sparse.paths;
    s.last_sparse = est.report.estimate;
    s.dict = est.dict;

    // The next block needs L angle seeds.  If the solver returned fewer
    // distinct paths, take the strongest residual-correlation atoms (gain 0).
    if (static_cast<int>(s.last_paths.size()) < params.l) {
        const Dictionary& d = *est.dict;
        CVec r = y_v;
        for (std::size_t k = 0; k < est.sparse.support.size(); ++k)
            r -= d.phi.col(est.sparse.support[k]) * est.sparse.gains(static_cast<Eigen::Index>(k));
        CVec proxy = d.phi.adjoint() * r;
        for (int idx : est.sparse.support) proxy(idx) = 0.0;
        for (int idx : largest_magnitude_indices(proxy, d.cols())) {
            if (static_cast<int>(s.last_paths.size()) >= params.l) break;
            auto [aod, aoa] = decode_support(idx, d);
            s.last_paths.push_back({aod, aoa, cplx(0.0, 0.0)});
        }
    }
    return s;
}

CVec remap_warm_start(const TrackerState& state, const Dictionary& new_dict) {
    CVec z0 = CVec::Zero(new_dict.phi.cols());
    for (const auto& p : state.last_paths) {
        int i_tx = nearest_angle_index(new_dict.tx_angles, p.aod);
        int i_rx = nearest_angle_index(new_dict.rx_angles, p.aoa);
        z0(new_dict.column_index(i_tx, i_rx)) += p.gain;
    }
    return z0;
}

BlockEstimate full_greedy_step(const CVec& y_v, std::shared_ptr<const Dictionary> full_dict,
                               const TrackerParams& params, const SolverConfig& cfg) {
    SolverReport rep = cosamp(full_dict->phi, y_v, cfg);
    return finalize(std::move(rep), std::move(full_dict), params);
}

std::pair<BlockEstimate, TrackerState> algorithm1_step(const CVec& y_v, const TrackerState& state,
                                                       const SensingSetup& setup,
                                                       const TrackerParams& params,
                                                       const SolverConfig& cfg, DictCache* cache) {
    auto dict = reduced_dict_for(state, setup, params, cache);
    SolverReport rep = cosamp(dict->phi, y_v, cfg);
    BlockEstimate est = finalize(std::move(rep), dict, params);
    TrackerState next = state_from_estimate(y_v, est, params);
    next.block_index = state.block_index + 1;
    return {std::move(est), std::move(next)};
}

std::pair<BlockEstimate, TrackerState> algorithm2_step(const CVec& y_v, const TrackerState& state,
                                                       const SensingSetup& setup,
                                                       const TrackerParams& params,
                                                       const SolverConfig& cfg, DictCache* cache) {
    auto dict = reduced_dict_for(state, setup, params, cache);
    CVec z0 = remap_warm_start(state, *dict);
    SolverReport rep = iht(dict->phi, y_v, z0, cfg);
    BlockEstimate est = finalize(std::move(rep), dict, params);
    TrackerState next = state_from_estimate(y_v, est, params);
    next.block_index = state.block_index + 1;
    return {std::move(est), std::move(next)};
}

Tracker::Tracker(EstimatorKind kind, const SensingSetup& setup,
                 std::shared_ptr<const Dictionary> full_dict, const TrackerParams& params,
                 const SolverConfig& cfg, DictCache* cache, std::optional<SolverConfig> init_cfg)
    : kind_(kind), setup_(&setup), full_dict_(std::move(full_dict)), params_(params), cfg_(cfg),
      init_cfg_(init_cfg ? *init_cfg : cfg), cache_(cache) {}

void Tracker::seed(const CVec& y_v, const BlockEstimate& first) {
    state_ = state_from_estimate(y_v, first, params_);
    initialized_ = true;
}

BlockEstimate Tracker::step(const CVec& y_v) {
    if (!initialized_) {
        BlockEstimate est = full_greedy_step(y_v, full_dict_, params_, init_cfg_);
        seed(y_v, est);
        return est;
    }
    if (kind_ == EstimatorKind::FullGreedy) {
        BlockEstimate est = full_greedy_step(y_v, full_dict_, params_, cfg_);
        TrackerState next = state_from_estimate(y_v, est, params_);
        next.block_index = state_.block_index + 1;
        state_ = std::move(next);
        return est;
    }
    auto [est, next] = kind_ == EstimatorKind::CorrelationCosamp
                           ? algorithm1_step(y_v, state_, *setup_, params_, cfg_, cache_)
                           : algorithm2_step(y_v, state_, *setup_, params_, cfg_, cache_);
    state_ = std::move(next);
    return est;
}

std::vector<BlockEstimate> track(const std::vector<CVec>& measurements, EstimatorKind kind,
                                 const SensingSetup& setup,
                                 std::shared_ptr<const Dictionary> full_dict,
                                 const TrackerParams& params, const SolverConfig& cfg) {
    if (measurements.empty()) throw std::invalid_argument("track: need at least one block");
    Tracker tracker(kind, setup, std::move(full_dict), params, cfg);
    std::vector<BlockEstimate> out;
    out.reserve(measurements.size());
    for (const CVec& y : measurements) out.push_back(tracker.step(y));
    return out;
}

}  // namespace mmcs
