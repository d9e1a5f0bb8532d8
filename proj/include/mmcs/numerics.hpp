#ifndef MMCS_NUMERICS_HPP
#define MMCS_NUMERICS_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace mmcs {

using cplx = std::complex<double>;

// Column-major storage throughout.  vectorize() stacks columns, which is what
// makes vec(B X A^T) == (A (x) B) vec(X) hold with this kron().
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

CMat kron(const CMat& a, const CMat& b);

// Column-wise Kronecker product; requires a.cols() == b.cols().
CMat khatri_rao(const CMat& a, const CMat& b);

CVec vectorize(const CMat& a);

// Minimum-norm residual solution of min_x ||y - a x|| via Householder QR.
// Throws std::runtime_error if a is rank deficient (no silent pseudo-inverse).
CVec least_squares(const CMat& a, const CVec& y);

struct PrincipalSvd {
    CVec u;        // left singular vector, unit norm
    double sigma;  // largest singular value
    CVec v;        // right singular vector, unit norm, first nonzero entry real >= 0
};
PrincipalSvd principal_svd(const CMat& h);

// Zeroth-order Bessel function of the first kind.
double bessel_j0(double x);

// Indices of the `count` largest-magnitude entries, ties broken by lowest index.
std::vector<int> largest_magnitude_indices(const CVec& v, int count);

// Keep the l largest-magnitude entries at their positions, zero the rest.
CVec hard_threshold(const CVec& v, int l);

}  // namespace mmcs

#endif
