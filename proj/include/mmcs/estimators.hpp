#ifndef MMCS_ESTIMATORS_HPP
#define MMCS_ESTIMATORS_HPP

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "mmcs/sensing.hpp"
#include "mmcs/solvers.hpp"

namespace mmcs {

enum class EstimatorKind { FullGreedy, CorrelationCosamp, SparsityIht };

const char* estimator_name(EstimatorKind kind);

struct TrackerParams {
    int n_t = 32;
    int n_r = 64;
    int l = 1;
    double delta_est = 0.0;  // tracker-side delta, radians (may differ from the channel's)
    int g_bar_t = 5;
    int g_bar_r = 4;
    bool dedup = false;
};

struct TrackerState {
    int block_index = 0;
    std::vector<PathEstimate> last_paths;  // exactly L entries after a successful step
    CVec last_sparse;                      // warm-start vector on `dict`
    std::shared_ptr<const Dictionary> dict;
};

struct BlockEstimate {
    SparseEstimate sparse;
    CMat h_hat;  // N_R x N_T reconstruction from the decoded paths
    SolverReport report;
    std::shared_ptr<const Dictionary> dict;  // dictionary the solve ran on
};

// Reduced dictionaries keyed by their grid centers.  Algorithm 1 and 2 often
// track the same angles within a block; the experiment loop owns the cache and
// clears it when the block advances.
class DictCache {
  public:
    std::shared_ptr<const Dictionary> find(const std::vector<double>& centers) const;
    void insert(const std::vector<double>& centers, std::shared_ptr<const Dictionary> dict);
    void clear() { entries_.clear(); }

  private:
    static std::vector<long long> key(const std::vector<double>& centers);
    std::map<std::vector<long long>, std::shared_ptr<const Dictionary>> entries_;
};

BlockEstimate full_greedy_step(const CVec& y_v, std::shared_ptr<const Dictionary> full_dict,
                               const TrackerParams& params, const SolverConfig& cfg);

// Correlation-aware step: reduced grids around the previous paths, CoSaMP.
std::pair<BlockEstimate, TrackerState> algorithm1_step(const CVec& y_v, const TrackerState& state,
                                                       const SensingSetup& setup,
                                                       const TrackerParams& params,
                                                       const SolverConfig& cfg,
                                                       DictCache* cache = nullptr);

// Sparsity-aware step: same reduced dictionary, IHT warm-started from the
// previous estimate remapped onto the new grid.
std::pair<BlockEstimate, TrackerState> algorithm2_step(const CVec& y_v, const TrackerState& state,
                                                       const SensingSetup& setup,
                                                       const TrackerParams& params,
                                                       const SolverConfig& cfg,
                                                       DictCache* cache = nullptr);

// Remap a previous estimate onto a new dictionary: each path's angle pair goes
// to the nearest grid pair (wrapped distance), carrying the gain.
CVec remap_warm_start(const TrackerState& state, const Dictionary& new_dict);

// Build the L-entry tracker state from a block estimate (fills missing paths
// with the strongest residual-correlation atoms, gain 0).
TrackerState state_from_estimate(const CVec& y_v, const BlockEstimate& est,
                                 const TrackerParams& params);

// Sequential per-realization tracker.  Block 1 is always the full greedy step.
class Tracker {
  public:
    // `init_cfg`, when given, configures the block-1 full greedy solve; later
    // blocks use `cfg`.  Useful when the tracking solver is IHT but the
    // initialization is still CoSaMP.
    Tracker(EstimatorKind kind, const SensingSetup& setup,
            std::shared_ptr<const Dictionary> full_dict, const TrackerParams& params,
            const SolverConfig& cfg, DictCache* cache = nullptr,
            std::optional<SolverConfig> init_cfg = std::nullopt);

    BlockEstimate step(const CVec& y_v);

    // Adopt a block-1 estimate computed elsewhere (the three estimators share
    // the same initialization code path).
    void seed(const CVec& y_v, const BlockEstimate& first);

    const TrackerState& state() const { return state_; }

  private:
    EstimatorKind kind_;
    const SensingSetup* setup_;
    std::shared_ptr<const Dictionary> full_dict_;
    TrackerParams params_;
    SolverConfig cfg_;
    SolverConfig init_cfg_;
    DictCache* cache_;
    TrackerState state_;
    bool initialized_ = false;
};

std::vector<BlockEstimate> track(const std::vector<CVec>& measurements, EstimatorKind kind,
                                 const SensingSetup& setup,
                                 std::shared_ptr<const Dictionary> full_dict,
                                 const TrackerParams& params, const SolverConfig& cfg);

}  // namespace mmcs

#endif
