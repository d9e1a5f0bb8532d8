#include "mmcs/sensing.hpp"

#include <cmath>
#include <stdexcept>

namespace mmcs {

SensingSetup make_training(int n_t, int n_r, int m_t, int m_r, TrainingScheme scheme,
                           double p_tr, double sigma2, std::mt19937_64& rng) {
    if (n_t < 1 || n_r < 1 || m_t < 1 || m_r < 1)
        throw std::invalid_argument("make_training: dimensions must be positive");
    if (p_tr < 0.0 || sigma2 < 0.0)
        throw std::invalid_argument("make_training: p_tr and sigma2 must be nonnegative");

    auto build = [&](int n, int m) {
        CMat a(n, m);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        if (scheme == TrainingScheme::RandomPhase) {
            std::uniform_real_distribution<double> uni(0.0, kTwoPi);
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < n; ++k)
                    a(k, j) = std::polar(scale, uni(rng));
        } else {
            if (m > n)
                throw std::invalid_argument("make_training: dft-subset needs M <= N");
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < n; ++k)
                    a(k, j) = std::polar(scale, -kTwoPi * k * j / n);
        }
        return a;
    };

    SensingSetup s;
    s.f = build(n_t, m_t);
    s.w = build(n_r, m_r);
    s.p_tr = p_tr;
    s.sigma2 = sigma2;
    s.cached_kron = kron(s.f.transpose(), s.w.adjoint());
    return s;
}

std::vector<double> uniform_grid(int g) {
    if (g < 1) throw std::invalid_argument("uniform_grid: g < 1");
    std::vector<double> angles(g);
    for (int i = 0; i < g; ++i) angles[i] = kTwoPi * i / g;
    return angles;
}

Dictionary full_dictionary(const SensingSetup& setup, int n_t, int n_r, int g_t, int g_r) {
    Dictionary d;
    d.tx_angles = uniform_grid(g_t);
    d.rx_angles = uniform_grid(g_r);
    d.a_t = steering_matrix(n_t, d.tx_angles);
    d.a_r = steering_matrix(n_r, d.rx_angles);
    const double s_tr = std::sqrt(setup.p_tr);
    d.phi = s_tr * kron((setup.f.transpose() * d.a_t.conjugate()).eval(),
                        (setup.w.adjoint() * d.a_r).eval());
    return d;
}

ReducedGrids reduced_grids(const std::vector<double>& prev_aods,
                           const std::vector<double>& prev_aoas,
                           double delta, int g_bar_t, int g_bar_r) {
    if (prev_aods.size() != prev_aoas.size())
        throw std::invalid_argument("reduced_grids: path count mismatch");
    if (delta <= 0.0) throw std::invalid_argument("reduced_grids: delta must be positive");
    if (g_bar_t < 2 || g_bar_r < 2)
        throw std::invalid_argument("reduced_grids: g_bar must be >= 2");

    auto window = [&](double center, int g) {
        std::vector<double> grid(g);
        for (int i = 0; i < g; ++i)
            grid[i] = wrap_angle(center - delta + 2.0 * delta * i / (g - 1));
        return grid;
    };
    ReducedGrids out;
    for (double a : prev_aods) out.tx.push_back(window(a, g_bar_t));
    for (double a : prev_aoas) out.rx.push_back(window(a, g_bar_r));
    return out;
}

namespace {

std::vector<double> concat_grids(const std::vector<std::vector<double>>& grids, bool dedup) {
    std::vector<double> all;
    for (const auto& g : grids)
        for (double a : g) {
            if (dedup) {
                bool seen = false;
                for (double b : all)
                    if (wrapped_distance(a, b) < 1e-12) { seen = true; break; }
                if (seen) continue;
            }
            all.push_back(a);
        }
    return all;
}

}  // namespace

Dictionary reduced_dictionary(const SensingSetup& setup, int n_t, int n_r,
                              const ReducedGrids& grids, bool dedup) {
    Dictionary d;
    d.tx_angles = concat_grids(grids.tx, dedup);
    d.rx_angles = concat_grids(grids.rx, dedup);
    d.a_t = steering_matrix(n_t, d.tx_angles);
    d.a_r = steering_matrix(n_r, d.rx_angles);

    const int nt_cols = static_cast<int>(d.tx_angles.size());
    const int nr_cols = static_cast<int>(d.rx_angles.size());
    // Column (i, j) of the N_T N_R x cols Khatri-Rao expansion is
    // kron(conj(a_t_i), a_r_j); phi reuses the cached F^T (x) W^H product.
    CMat kr(static_cast<Eigen::Index>(n_t) * n_r, static_cast<Eigen::Index>(nt_cols) * nr_cols);
    for (int i = 0; i < nt_cols; ++i)
        for (int j = 0; j < nr_cols; ++j) {
            auto col = kr.col(static_cast<Eigen::Index>(i) * nr_cols + j);
            for (int t = 0; t < n_t; ++t)
                col.segment(static_cast<Eigen::Index>(t) * n_r, n_r) =
                    std::conj(d.a_t(t, i)) * d.a_r.col(j);
        }
    const double s_tr = std::sqrt(setup.p_tr);
    d.phi = s_tr * (setup.cached_kron * kr);
    return d;
}

CVec measure(const CMat& h, const SensingSetup& setup, std::mt19937_64& rng) {
    if (h.rows() != setup.w.rows() || h.cols() != setup.f.rows())
        throw std::invalid_argument("measure: channel dimensions do not match setup");
    const double s_tr = std::sqrt(setup.p_tr);
    CMat y = s_tr * (setup.w.adjoint() * h * setup.f);
    if (setup.sigma2 > 0.0) {
        const int n_r = static_cast<int>(setup.w.rows());
        CVec noise(n_r);
        for (Eigen::Index p = 0; p < y.cols(); ++p)
            for (Eigen::Index q = 0; q < y.rows(); ++q) {
                for (int k = 0; k < n_r; ++k)
                    noise(k) = complex_normal(rng, setup.sigma2);
                y(q, p) += setup.w.col(q).dot(noise);  // w_q^H n_{q,p}
            }
    }
    return vectorize(y);
}

std::pair<double, double> decode_support(int index, const Dictionary& dict) {
    const int nr = static_cast<int>(dict.rx_angles.size());
    if (index < 0 || index >= dict.cols())
        throw std::out_of_range("decode_support: index out of range");
    return {dict.tx_angles[index / nr], dict.rx_angles[index % nr]};
}

SparseEstimate make_sparse_estimate(const CVec& dense, const Dictionary& dict) {
    if (dense.size() != dict.phi.cols())
        throw std::invalid_argument("make_sparse_estimate: length mismatch");
    SparseEstimate e;
    for (Eigen::Index i = 0; i < dense.size(); ++i)
        if (dense(i) != cplx(0.0, 0.0)) e.support.push_back(static_cast<int>(i));
    e.gains = CVec(e.support.size());
    for (std::size_t k = 0; k < e.support.size(); ++k) {
        e.gains(static_cast<Eigen::Index>(k)) = dense(e.support[k]);
        auto [aod, aoa] = decode_support(e.support[k], dict);
        e.paths.push_back({aod, aoa, dense(e.support[k])});
    }
    return e;
}

int nearest_angle_index(const std::vector<double>& angles, double target) {
    if (angles.empty()) throw std::invalid_argument("nearest_angle_index: empty grid");
    int best = 0;
    double best_d = wrapped_distance(angles[0], target);
    for (std::size_t i = 1; i < angles.size(); ++i) {
        double d = wrapped_distance(angles[i], target);
        if (d < best_d) { best_d = d; best = static_cast<int>(i); }
    }
    return best;
}

}  // namespace mmcs
