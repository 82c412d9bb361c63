#pragma once

// Dense complex linear algebra used throughout the ZGV solver.
//
// Everything is complex double precision in Eigen's column-major layout, so
// vec(X) is simply the column-major buffer of X. Real inputs are promoted by
// the callers (see QuadraticPencil).

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "zgv/errors.hpp"

namespace zgv {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Block matrix [a_ij * B].
ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B);

/// Column stacking of X.
ComplexVector vec(const ComplexMatrix& X);

/// Inverse of vec for an r-by-c matrix.
ComplexMatrix unvec(const ComplexVector& x, Index rows, Index cols);

/// A = Q R Q^H with Q unitary and R upper triangular.
struct SchurFactorization {
    ComplexMatrix Q;
    ComplexMatrix R;

    ComplexVector eigenvalues() const { return R.diagonal(); }
};

/// Complex Schur form by Householder-Hessenberg reduction followed by
/// single-shift (Wilkinson) QR sweeps with deflation.
///
/// Throws SchurNoConvergence when more than sweeps_per_dim * n QR sweeps are
/// needed in total.
SchurFactorization schur(const ComplexMatrix& A, int sweeps_per_dim = 30);

/// Exchange the diagonal entries k and k+1 of a Schur form with one Givens
/// rotation, updating Q so that A = Q R Q^H still holds.
void swap_schur_diagonal(SchurFactorization& f, Index k);

/// Reorder a Schur form so that its diagonal is sorted by `before`
/// (a strict weak ordering on eigenvalues). Uses adjacent swaps only.
void sort_schur(SchurFactorization& f, const std::function<bool(cplx, cplx)>& before);

/// Bartels-Stewart solver for A X + X B = C with Schur factors of A and B
/// computed once and reused for many right-hand sides.
class SylvesterSolver {
public:
    /// Throws SingularSylvester if some |r_ii + s_jj| < 1e-12 (|A|_F + |B|_F).
    SylvesterSolver(SchurFactorization a, SchurFactorization b);

    ComplexMatrix solve(const ComplexMatrix& C) const;

    const SchurFactorization& left() const noexcept { return a_; }
    const SchurFactorization& right() const noexcept { return b_; }

    /// min_{i,j} |r_ii + s_jj|
    double separation() const noexcept { return separation_; }

private:
    SchurFactorization a_;
    SchurFactorization b_;
    double separation_ = 0.0;
};

/// Solve A X + X B = C (A m-by-m, B n-by-n, C m-by-n).
ComplexMatrix solve_sylvester(const ComplexMatrix& A, const ComplexMatrix& B, const ComplexMatrix& C);

struct EigenPair {
    cplx value;
    ComplexVector vector; ///< unit 2-norm
};

/// Unit eigenvector of the upper triangular T for its k-th diagonal entry.
/// Entries beyond k are zero.
ComplexVector triangular_eigenvector(const ComplexMatrix& T, Index k);

/// All eigenpairs of a square matrix. Eigenvalues are the Schur diagonal;
/// eigenvectors come from back substitution on the triangular factor.
std::vector<EigenPair> eig_dense(const ComplexMatrix& A);

struct SingularTriplet {
    double sigma = 0.0;
    ComplexVector u_left;
    ComplexVector v_right;
};

/// The `count` smallest singular triplets, ascending in sigma.
std::vector<SingularTriplet> smallest_singular_triplets(const ComplexMatrix& A, Index count);

/// Least-squares solution of min |A x - b| for a tall or square A.
/// Throws RankDeficient if the pivoted triangular factor is numerically singular.
ComplexVector lstsq(const ComplexMatrix& A, const ComplexVector& b);

} // namespace zgv
