#ifndef MMCS_SOLVERS_HPP
#define MMCS_SOLVERS_HPP

#include <vector>

#include "mmcs/numerics.hpp"

namespace mmcs {

struct SolverConfig {
    int sparsity = 1;            // L
    int max_iters = 10;          // K for cosamp, I for iht
    double residual_tol = 1e-6;  // relative stopping threshold (cosamp only)
    double step_size = 1.0;      // IHT step mu
    bool normalize_columns = false;
    bool safeguard_step = false; // rescale mu by 1/||phi||_2^2 if the residual grows
    // Normalized-IHT step rule: mu_k = ||g_S||^2 / ||phi_S g_S||^2 with g the
    // gradient and S the current support (scalar norms only, no inversions).
    // A fixed mu small enough to be stable on a dictionary with strongly
    // correlated columns can never move the support; the adaptive step can.
    bool adaptive_step = false;
};

struct SolverReport {
    CVec estimate;                        // dense, at most `sparsity` nonzeros
    int iterations_used = 0;
    double final_residual = 0.0;          // ||y - phi * estimate||
    long long op_count = 0;               // complex multiply-accumulate tally
    std::vector<double> residual_history; // one entry per iteration
    bool underdetermined_warning = false; // 3L > rows
};

// Greedy support pursuit: proxy, merge 2L candidates, least squares on the
// merged support, prune to L.  Keeps the best iterate seen, so the reported
// residual history is non-increasing.
SolverReport cosamp(const CMat& phi, const CVec& y, const SolverConfig& cfg);

// Iterative hard thresholding from warm start z0; runs exactly max_iters
// gradient + H_L steps and never inverts a matrix.
SolverReport iht(const CMat& phi, const CVec& y, const CVec& z0, const SolverConfig& cfg);

// Largest eigenvalue of phi^H phi by power iteration (20 steps).
double spectral_norm_sq(const CMat& phi);

}  // namespace mmcs

#endif
