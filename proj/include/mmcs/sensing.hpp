#ifndef MMCS_SENSING_HPP
#define MMCS_SENSING_HPP

#include <random>
#include <utility>
#include <vector>

#include "mmcs/channel.hpp"
#include "mmcs/numerics.hpp"

namespace mmcs {

enum class TrainingScheme { RandomPhase, DftSubset };

// Training beamformers F (N_T x M_T), measurement vectors W (N_R x M_R),
// and the block-independent product F^T (x) W^H cached once.
struct SensingSetup {
    CMat f;
    CMat w;
    double p_tr = 1.0;    // training power, linear
    double sigma2 = 0.0;  // noise variance, linear
    CMat cached_kron;     // M_T M_R x N_T N_R
};

SensingSetup make_training(int n_t, int n_r, int m_t, int m_r, TrainingScheme scheme,
                           double p_tr, double sigma2, std::mt19937_64& rng);

// g equally spaced angles starting at 0, spacing 2*pi/g.
std::vector<double> uniform_grid(int g);

// Angle-pair dictionary.  Column k encodes grid pair (i_tx, i_rx) with
// k = i_tx * rx_angles.size() + i_rx, the ordering induced by
// kron(F^T A_T^*, W^H A_R).
struct Dictionary {
    std::vector<double> tx_angles;
    std::vector<double> rx_angles;
    CMat a_t;   // N_T x |tx_angles|
    CMat a_r;   // N_R x |rx_angles|
    CMat phi;   // M_T M_R x |tx_angles| * |rx_angles|

    int cols() const { return static_cast<int>(phi.cols()); }
    int column_index(int i_tx, int i_rx) const {
        return i_tx * static_cast<int>(rx_angles.size()) + i_rx;
    }
};

Dictionary full_dictionary(const SensingSetup& setup, int n_t, int n_r, int g_t, int g_r);

// Per-path angle windows [prev - delta, prev + delta], endpoints included.
struct ReducedGrids {
    std::vector<std::vector<double>> tx;  // one grid of size g_bar_t per path
    std::vector<std::vector<double>> rx;  // one grid of size g_bar_r per path
};
ReducedGrids reduced_grids(const std::vector<double>& prev_aods,
                           const std::vector<double>& prev_aoas,
                           double delta, int g_bar_t, int g_bar_r);

// Concatenates the per-path grids and builds phi by reusing setup.cached_kron.
// With dedup set, repeated concatenated angles are dropped (defaults off so the
// column count stays exactly L^2 * g_bar_t * g_bar_r).
Dictionary reduced_dictionary(const SensingSetup& setup, int n_t, int n_r,
                              const ReducedGrids& grids, bool dedup = false);

// y_v = vec(sqrt(P_tr) W^H H F + N), with [N]_{q,p} = w_q^H n_{q,p} and
// n_{q,p} ~ CN(0, sigma2 I_{N_R}) drawn independently per measurement.
CVec measure(const CMat& h, const SensingSetup& setup, std::mt19937_64& rng);

// (aod, aoa) of a dictionary column.
std::pair<double, double> decode_support(int index, const Dictionary& dict);

struct PathEstimate {
    double aod = 0.0;
    double aoa = 0.0;
    cplx gain{0.0, 0.0};
};

struct SparseEstimate {
    std::vector<int> support;         // strictly increasing
    CVec gains;                       // gain per support element
    std::vector<PathEstimate> paths;  // paths[i] decodes support[i]
};

SparseEstimate make_sparse_estimate(const CVec& dense, const Dictionary& dict);

// Index of the wrapped-distance-nearest angle (ties: lowest index).
int nearest_angle_index(const std::vector<double>& angles, double target);

}  // namespace mmcs

#endif
