#include "mmcs/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmcs {

double spectral_norm_sq(const CMat& phi) {
    if (phi.size() == 0) return 0.0;
    CVec v = CVec::Ones(phi.cols());
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 20; ++it) {
        CVec w = phi.adjoint() * (phi * v);
        lambda = w.norm();
        if (lambda == 0.0) return 0.0;
        v = w / lambda;
    }
    return lambda;
}

namespace {

CVec column_inv_norms(const CMat& phi) {
    CVec inv(phi.cols());
    for (Eigen::Index j = 0; j < phi.cols(); ++j) {
        double n = phi.col(j).norm();
        inv(j) = n > 0.0 ? 1.0 / n : 0.0;
    }
    return inv;
}

// y - phi(:, support) * gains, counting rows * |support| MACs.
CVec support_residual(const CMat& phi, const CVec& y, const std::vector<int>& support,
                      const CVec& gains, long long& ops) {
    CVec r = y;
    for (std::size_t k = 0; k < support.size(); ++k)
        r -= phi.col(support[k]) * gains(static_cast<Eigen::Index>(k));
    ops += static_cast<long long>(phi.rows()) * static_cast<long long>(support.size());
    return r;
}

}  // namespace

SolverReport cosamp(const CMat& phi, const CVec& y, const SolverConfig& cfg) {
    if (phi.rows() != y.size())
        throw std::invalid_argument("cosamp: phi.rows() != y.len");
    if (cfg.sparsity < 1 || cfg.max_iters < 1)
        throw std::invalid_argument("cosamp: bad config");

    const Eigen::Index rows = phi.rows(), cols = phi.cols();
    const int l = cfg.sparsity;

    SolverReport rep;
    rep.underdetermined_warning = 3LL * l > rows;
    rep.estimate = CVec::Zero(cols);

    const double ynorm = y.norm();
    if (ynorm == 0.0) {
        rep.iterations_used = 1;
        rep.residual_history.push_back(0.0);
        return rep;
    }

    CVec inv_norms;
    if (cfg.normalize_columns) {
        inv_norms = column_inv_norms(phi);
        rep.op_count += static_cast<long long>(rows) * cols;
    }

    std::vector<int> support;      // current pruned support, ascending
    CVec gains(0);
    CVec residual = y;
    double resnorm = ynorm;

    CVec best_estimate = rep.estimate;
    double best_resnorm = ynorm;

    int it = 0;
    while (it < cfg.max_iters) {
        ++it;
        CVec proxy = phi.adjoint() * residual;
        rep.op_count += static_cast<long long>(rows) * cols;
        if (cfg.normalize_columns) {
            proxy.array() *= inv_norms.array();
            rep.op_count += cols;
        }

        // Merged support: previous support first, then the 2L strongest new
        // candidates; the tail ordering gives the deterministic drop rule.
        // Candidates nearly collinear with an already-merged column are
        // skipped: uniform sin-space grids contain angle pairs (theta,
        // pi - theta) whose atoms coincide to rounding error, and feeding
        // both into the LS step produces arbitrarily large cancelling
        // coefficients.
        std::vector<int> merged = support;
        for (int idx : largest_magnitude_indices(proxy, 2 * l)) {
            if (std::find(merged.begin(), merged.end(), idx) != merged.end()) continue;
            bool duplicate = false;
            for (int m : merged) {
                double c = std::abs(phi.col(m).dot(phi.col(idx)));
                double denom = phi.col(m).norm() * phi.col(idx).norm();
                rep.op_count += 3 * rows;
                if (denom > 0.0 && c >= denom * (1.0 - 1e-9)) { duplicate = true; break; }
            }
            if (!duplicate) merged.push_back(idx);
        }

        // Least squares on the merged columns.  Rank-deficient (e.g. aliased
        // duplicate atoms): drop the newest colliding index and retry.
        CVec x;
        while (true) {
            CMat sub(rows, static_cast<Eigen::Index>(merged.size()));
            for (std::size_t k = 0; k < merged.size(); ++k)
                sub.col(static_cast<Eigen::Index>(k)) = phi.col(merged[k]);
            Eigen::ColPivHouseholderQR<CMat> qr(sub);
            rep.op_count += static_cast<long long>(rows) * merged.size() * merged.size();
            if (qr.rank() == static_cast<Eigen::Index>(merged.size())) {
                x = qr.solve(y);
                break;
            }
            if (merged.size() <= 1)
                throw std::runtime_error("cosamp: degenerate dictionary column");
            merged.pop_back();
        }

        // Prune to the L largest and re-sort the support ascending.
        std::vector<int> keep = largest_magnitude_indices(x, l);
        std::vector<std::pair<int, cplx>> pruned;
        for (int k : keep) pruned.emplace_back(merged[k], x(k));
        std::sort(pruned.begin(), pruned.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        support.clear();
        for (std::size_t k = 0; k < pruned.size(); ++k) support.push_back(pruned[k].first);

        // Re-fit the gains on the pruned support.  The merged-support LS
        // coefficients of strongly correlated columns are large and mutually
        // cancelling; keeping one of them verbatim after the prune would leave
        // an iterate far worse than zero.
        {
            CMat sub(rows, static_cast<Eigen::Index>(support.size()));
            for (std::size_t k = 0; k < support.size(); ++k)
                sub.col(static_cast<Eigen::Index>(k)) = phi.col(support[k]);
            gains = Eigen::ColPivHouseholderQR<CMat>(sub).solve(y);
            rep.op_count += static_cast<long long>(rows) * support.size() * support.size();
        }

        residual = support_residual(phi, y, support, gains, rep.op_count);
        resnorm = residual.norm();

        if (resnorm < best_resnorm) {
            best_resnorm = resnorm;
            best_estimate = CVec::Zero(cols);
            for (std::size_t k = 0; k < support.size(); ++k)
                best_estimate(support[k]) = gains(static_cast<Eigen::Index>(k));
        }
        rep.residual_history.push_back(best_resnorm);
        if (best_resnorm <= cfg.residual_tol * ynorm) break;
    }

    rep.estimate = best_estimate;
    rep.iterations_used = it;
    rep.final_residual = best_resnorm;
    return rep;
}

SolverReport iht(const CMat& phi, const CVec& y, const CVec& z0, const SolverConfig& cfg) {
    if (phi.rows() != y.size())
        throw std::invalid_argument("iht: phi.rows() != y.len");
    if (z0.size() != phi.cols())
        throw std::invalid_argument("iht: z0.len != phi.cols");
    if (cfg.sparsity < 1 || cfg.max_iters < 1 || cfg.step_size <= 0.0)
        throw std::invalid_argument("iht: bad config");

    const Eigen::Index rows = phi.rows(), cols = phi.cols();
    SolverReport rep;
    rep.underdetermined_warning = 3LL * cfg.sparsity > rows;

    CVec inv_norms = CVec::Ones(cols);
    CVec norms = CVec::Ones(cols);
    if (cfg.normalize_columns) {
        inv_norms = column_inv_norms(phi);
        for (Eigen::Index j = 0; j < cols; ++j)
            norms(j) = inv_norms(j).real() > 0.0 ? 1.0 / inv_norms(j).real() : 0.0;
        rep.op_count += static_cast<long long>(rows) * cols;
    }

    // Work in normalized coordinates zn = diag(1/inv_norms) z, so that mu = 1
    // with normalize_columns behaves like a unit-column dictionary.
    CVec zn = z0.cwiseProduct(norms);
    zn = hard_threshold(zn, cfg.sparsity);  // warm starts are at most L-sparse anyway

    double mu = cfg.step_size;
    double specsq = -1.0;
    double prev_resnorm = -1.0;

    for (int k = 1; k <= cfg.max_iters; ++k) {
        std::vector<int> nz;
        for (Eigen::Index j = 0; j < cols; ++j)
            if (zn(j) != cplx(0.0, 0.0)) nz.push_back(static_cast<int>(j));
        CVec r = y;
        for (int j : nz) r -= phi.col(j) * (zn(j) * inv_norms(j));
        rep.op_count += static_cast<long long>(rows) * nz.size();

        double resnorm = r.norm();
        if (cfg.safeguard_step && prev_resnorm >= 0.0 && resnorm > prev_resnorm) {
            if (specsq < 0.0) {
                CMat scaled = phi * inv_norms.asDiagonal();
                specsq = spectral_norm_sq(cfg.normalize_columns ? scaled : phi);
            }
            mu = cfg.step_size / specsq;
        }
        prev_resnorm = resnorm;
        rep.residual_history.push_back(resnorm);

        CVec g = phi.adjoint() * r;
        rep.op_count += static_cast<long long>(rows) * cols;
        g.array() *= inv_norms.array();
        if (cfg.adaptive_step) {
            // mu_k = ||g_S||^2 / ||phi_S g_S||^2, S = current support (or the
            // L strongest gradient entries when starting cold).  Exact line
            // search along the gradient restricted to S; never needs the
            // global spectral norm, so the step stays large enough to move
            // the support even on dictionaries with correlated columns.
            std::vector<int> s = nz;
            if (s.empty()) s = largest_magnitude_indices(g, cfg.sparsity);
            CVec w = CVec::Zero(rows);
            double gs_sq = 0.0;
            for (int j : s) {
                w += phi.col(j) * (g(j) * inv_norms(j));
                gs_sq += std::norm(g(j));
            }
            rep.op_count += static_cast<long long>(rows) * s.size();
            double denom = w.squaredNorm();
            mu = denom > 0.0 ? gs_sq / denom : cfg.step_size;

            // Acceptance test: when the thresholded candidate would raise the
            // residual (a warm-start coefficient whose phase went stale can
            // poison every correlated neighbor's gradient entry), halve the
            // step until the move is non-increasing.
            for (int halvings = 0; halvings < 15; ++halvings) {
                CVec cand = hard_threshold(zn + mu * g, cfg.sparsity);
                CVec rc = y;
                for (Eigen::Index j = 0; j < cols; ++j)
                    if (cand(j) != cplx(0.0, 0.0)) rc -= phi.col(j) * (cand(j) * inv_norms(j));
                rep.op_count += static_cast<long long>(rows) * cfg.sparsity;
                if (rc.norm() <= resnorm) break;
                mu *= 0.5;
            }
        }
        zn = hard_threshold(zn + mu * g, cfg.sparsity);
        rep.op_count += cols;
        rep.iterations_used = k;
    }

    rep.estimate = zn.cwiseProduct(inv_norms);
    CVec r = y;
    for (Eigen::Index j = 0; j < cols; ++j)
        if (rep.estimate(j) != cplx(0.0, 0.0)) r -= phi.col(j) * rep.estimate(j);
    rep.final_residual = r.norm();
    return rep;
}

}  // namespace mmcs
