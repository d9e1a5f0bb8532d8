#include "mmcs/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mmcs {

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMat khatri_rao(const CMat& a, const CMat& b) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("khatri_rao: column counts differ");
    CMat out(a.rows() * b.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out.col(j).segment(i * b.rows(), b.rows()) = a(i, j) * b.col(j);
    return out;
}

CVec vectorize(const CMat& a) {
    return Eigen::Map<const CVec>(a.data(), a.size());
}

CVec least_squares(const CMat& a, const CVec& y) {
    if (a.rows() != y.size())
        throw std::invalid_argument("least_squares: a.rows() != y.len");
    Eigen::ColPivHouseholderQR<CMat> qr(a);
    if (qr.rank() < a.cols())
        throw std::runtime_error("least_squares: rank-deficient system");
    return qr.solve(y);
}

PrincipalSvd principal_svd(const CMat& h) {
    PrincipalSvd out;
    if (h.size() == 0 || h.norm() == 0.0) {
        out.u = CVec::Zero(std::max<Eigen::Index>(h.rows(), 1));
        out.v = CVec::Zero(std::max<Eigen::Index>(h.cols(), 1));
        out.u(0) = 1.0;
        out.v(0) = 1.0;
        out.sigma = 0.0;
        return out;
    }
    Eigen::JacobiSVD<CMat> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU().col(0);
    out.v = svd.matrixV().col(0);
    out.sigma = svd.singularValues()(0);
    // Phase convention: first nonzero entry of v made real nonnegative.  The
    // common phase cancels in u sigma v^H, so the factorization is unchanged.
    for (Eigen::Index k = 0; k < out.v.size(); ++k) {
        double m = std::abs(out.v(k));
        if (m > 1e-14) {
            cplx phase = out.v(k) / m;
            out.v *= std::conj(phase);
            out.u *= std::conj(phase);
            break;
        }
    }
    return out;
}

double bessel_j0(double x) {
    return std::cyl_bessel_j(0.0, std::fabs(x));
}

std::vector<int> largest_magnitude_indices(const CVec& v, int count) {
    const int n = static_cast<int>(v.size());
    count = std::min(count, n);
    if (count < 0) count = 0;
    std::vector<double> mag(n);
    for (int i = 0; i < n; ++i) mag[i] = std::norm(v(i));
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + count, idx.end(), [&](int a, int b) {
        if (mag[a] != mag[b]) return mag[a] > mag[b];
        return a < b;  // ties: lowest index wins
    });
    idx.resize(count);
    return idx;
}

CVec hard_threshold(const CVec& v, int l) {
    CVec out = CVec::Zero(v.size());
    for (int i : largest_magnitude_indices(v, l)) out(i) = v(i);
    return out;
}

}  // namespace mmcs
