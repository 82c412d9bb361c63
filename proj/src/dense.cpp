#include "zgv/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace zgv {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Plane rotation G = [[c, s], [-conj(s), c]] with c real, chosen so that
// G * [x; y] = [r; 0].
struct Givens {
    double c = 1.0;
    cplx s = 0.0;

    static Givens zeroing(cplx x, cplx y) {
        Givens g;
        const double ax = std::abs(x);
        const double ay = std::abs(y);
        if (ay == 0.0) {
            return g;
        }
        if (ax == 0.0) {
            g.c = 0.0;
            g.s = std::conj(y) / ay;
            return g;
        }
        const double rho = std::hypot(ax, ay);
        g.c = ax / rho;
        g.s = (x / ax) * std::conj(y) / rho;
        return g;
    }

    // rows i, i+1 of M over columns [c0, c1)
    void apply_rows(ComplexMatrix& M, Index i, Index c0, Index c1) const {
        for (Index j = c0; j < c1; ++j) {
            const cplx p = M(i, j);
            const cplx q = M(i + 1, j);
            M(i, j) = c * p + s * q;
            M(i + 1, j) = -std::conj(s) * p + c * q;
        }
    }

    // columns i, i+1 of M (multiplied by G^H from the right) over rows [r0, r1)
    void apply_cols(ComplexMatrix& M, Index i, Index r0, Index r1) const {
        for (Index k = r0; k < r1; ++k) {
            const cplx p = M(k, i);
            const cplx q = M(k, i + 1);
            M(k, i) = c * p + std::conj(s) * q;
            M(k, i + 1) = -s * p + c * q;
        }
    }
};

void hessenberg(ComplexMatrix& H, ComplexMatrix& Q) {
    const Index n = H.rows();
    for (Index k = 0; k + 2 < n; ++k) {
        const Index len = n - k - 1;
        ComplexVector v = H.col(k).tail(len);
        const double xnorm = v.norm();
        if (xnorm == 0.0) {
            continue;
        }
        const cplx x0 = v(0);
        const cplx phase = (std::abs(x0) == 0.0) ? cplx(1.0) : x0 / std::abs(x0);
        const cplx alpha = -phase * xnorm;
        v(0) -= alpha;
        const double vnorm = v.norm();
        if (vnorm == 0.0) {
            continue;
        }
        v /= vnorm;
        // H <- P H P with P = I - 2 v v^H acting on indices k+1..n-1
        auto rows = H.bottomRows(len);
        rows.noalias() -= 2.0 * v * (v.adjoint() * rows);
        auto cols = H.rightCols(len);
        cols.noalias() -= 2.0 * (cols * v) * v.adjoint();
        auto qcols = Q.rightCols(len);
        qcols.noalias() -= 2.0 * (qcols * v) * v.adjoint();
        H(k + 1, k) = alpha;
        H.col(k).tail(len - 1).setZero();
    }
}

cplx wilkinson_shift(const ComplexMatrix& T, Index hi) {
    const cplx a = T(hi - 1, hi - 1);
    const cplx b = T(hi - 1, hi);
    const cplx c = T(hi, hi - 1);
    const cplx d = T(hi, hi);
    const cplx half_tr = 0.5 * (a + d);
    const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
    const cplx e1 = half_tr + disc;
    const cplx e2 = half_tr - disc;
    return (std::abs(e1 - d) <= std::abs(e2 - d)) ? e1 : e2;
}

} // namespace

ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
    ComplexMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Index j = 0; j < A.cols(); ++j) {
        for (Index i = 0; i < A.rows(); ++i) {
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        }
    }
    return K;
}

ComplexVector vec(const ComplexMatrix& X) {
    return Eigen::Map<const ComplexVector>(X.data(), X.size());
}

ComplexMatrix unvec(const ComplexVector& x, Index rows, Index cols) {
    if (x.size() != rows * cols) {
        throw DimensionMismatch("unvec: vector length " + std::to_string(x.size()) + " is not " +
                                std::to_string(rows) + "x" + std::to_string(cols));
    }
    return Eigen::Map<const ComplexMatrix>(x.data(), rows, cols);
}

SchurFactorization schur(const ComplexMatrix& A, int sweeps_per_dim) {
    if (A.rows() != A.cols()) {
        throw DimensionMismatch("schur: matrix is not square");
    }
    if (!A.allFinite()) {
        throw SchurNoConvergence("schur: matrix has non-finite entries");
    }
    const Index n = A.rows();
    SchurFactorization f{ComplexMatrix::Identity(n, n), A};
    if (n <= 1) {
        return f;
    }
    ComplexMatrix& T = f.R;
    ComplexMatrix& Q = f.Q;
    hessenberg(T, Q);

    const double norm = T.norm();
    const long budget = static_cast<long>(sweeps_per_dim) * n;
    long sweeps = 0;
    int since_deflation = 0;
    Index hi = n - 1;
    while (hi > 0) {
        Index l = hi;
        for (; l > 0; --l) {
            const double sd = std::abs(T(l, l - 1));
            double thr = kEps * (std::abs(T(l - 1, l - 1)) + std::abs(T(l, l)));
            if (thr == 0.0) {
                thr = kEps * norm;
            }
            if (sd <= thr) {
                T(l, l - 1) = 0.0;
                break;
            }
        }
        if (l == hi) {
            --hi;
            since_deflation = 0;
            continue;
        }
        if (++sweeps > budget) {
            throw SchurNoConvergence("schur: QR iteration did not converge within " +
                                     std::to_string(budget) + " sweeps");
        }
        ++since_deflation;

        cplx shift;
        if (since_deflation % 10 == 0) {
            // exceptional shift to break cycles
            shift = T(hi, hi) + std::abs(T(hi, hi - 1).real());
            if (hi >= 2) {
                shift += std::abs(T(hi - 1, hi - 2).real());
            }
        } else {
            shift = wilkinson_shift(T, hi);
        }

        Givens g = Givens::zeroing(T(l, l) - shift, T(l + 1, l));
        g.apply_rows(T, l, l, n);
        g.apply_cols(T, l, 0, std::min(hi, l + 2) + 1);
        g.apply_cols(Q, l, 0, n);
        for (Index k = l + 1; k < hi; ++k) {
            g = Givens::zeroing(T(k, k - 1), T(k + 1, k - 1));
            g.apply_rows(T, k, k - 1, n);
            T(k + 1, k - 1) = 0.0;
            g.apply_cols(T, k, 0, std::min(hi, k + 2) + 1);
            g.apply_cols(Q, k, 0, n);
        }
    }
    T.triangularView<Eigen::StrictlyLower>().setZero();
    return f;
}

void swap_schur_diagonal(SchurFactorization& f, Index k) {
    ComplexMatrix& T = f.R;
    const Index n = T.rows();
    const cplx t11 = T(k, k);
    const cplx t22 = T(k + 1, k + 1);
    if (t11 == t22) {
        return;
    }
    const Givens g = Givens::zeroing(T(k, k + 1), t22 - t11);
    g.apply_rows(T, k, k, n);
    g.apply_cols(T, k, 0, k + 2);
    g.apply_cols(f.Q, k, 0, f.Q.rows());
    T(k + 1, k) = 0.0;
    T(k, k) = t22;
    T(k + 1, k + 1) = t11;
}

void sort_schur(SchurFactorization& f, const std::function<bool(cplx, cplx)>& before) {
    const Index n = f.R.rows();
    for (Index i = 0; i < n; ++i) {
        Index best = i;
        for (Index j = i + 1; j < n; ++j) {
            if (before(f.R(j, j), f.R(best, best))) {
                best = j;
            }
        }
        for (Index j = best; j > i; --j) {
            swap_schur_diagonal(f, j - 1);
        }
    }
}

SylvesterSolver::SylvesterSolver(SchurFactorization a, SchurFactorization b)
    : a_(std::move(a)), b_(std::move(b)) {
    const double scale = a_.R.norm() + b_.R.norm();
    separation_ = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < a_.R.rows(); ++i) {
        for (Index j = 0; j < b_.R.rows(); ++j) {
            separation_ = std::min(separation_, std::abs(a_.R(i, i) + b_.R(j, j)));
        }
    }
    if (separation_ < 1e-12 * scale) {
        throw SingularSylvester("Sylvester operator is singular: min |r_ii + s_jj| = " +
                                std::to_string(separation_));
    }
}

ComplexMatrix SylvesterSolver::solve(const ComplexMatrix& C) const {
    const ComplexMatrix& R = a_.R;
    const ComplexMatrix& S = b_.R;
    const Index m = R.rows();
    const Index n = S.rows();
    if (C.rows() != m || C.cols() != n) {
        throw DimensionMismatch("Sylvester right-hand side has wrong shape");
    }
    ComplexMatrix Y = a_.Q.adjoint() * C * b_.Q;
    ComplexMatrix shifted = R;
    const ComplexVector diag = R.diagonal();
    for (Index i = 0; i < n; ++i) {
        if (i > 0) {
            Y.col(i).noalias() -= Y.leftCols(i) * S.col(i).head(i);
        }
        shifted.diagonal() = diag.array() + S(i, i);
        shifted.triangularView<Eigen::Upper>().solveInPlace(Y.col(i));
    }
    return a_.Q * Y * b_.Q.adjoint();
}

ComplexMatrix solve_sylvester(const ComplexMatrix& A, const ComplexMatrix& B, const ComplexMatrix& C) {
    return SylvesterSolver(schur(A), schur(B)).solve(C);
}

ComplexVector triangular_eigenvector(const ComplexMatrix& T, Index k) {
    const double small = std::max(kEps * T.norm(), std::numeric_limits<double>::min());
    const cplx lambda = T(k, k);
    ComplexVector x = ComplexVector::Zero(T.rows());
    x(k) = 1.0;
    for (Index i = k - 1; i >= 0; --i) {
        const cplx acc = T.row(i).segment(i + 1, k - i).transpose().cwiseProduct(x.segment(i + 1, k - i)).sum();
        cplx d = T(i, i) - lambda;
        if (std::abs(d) < small) {
            d = small;
        }
        x(i) = -acc / d;
        if (std::abs(x(i)) > 1e100) {
            x.head(k + 1) /= std::abs(x(i));
        }
    }
    return x / x.norm();
}

std::vector<EigenPair> eig_dense(const ComplexMatrix& A) {
    const SchurFactorization f = schur(A);
    const Index n = f.R.rows();
    std::vector<EigenPair> pairs;
    pairs.reserve(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) {
        const ComplexVector x = triangular_eigenvector(f.R, k);
        ComplexVector v = f.Q.leftCols(k + 1) * x.head(k + 1);
        v.normalize();
        pairs.push_back({f.R(k, k), std::move(v)});
    }
    return pairs;
}

std::vector<SingularTriplet> smallest_singular_triplets(const ComplexMatrix& A, Index count) {
    const Index p = std::min(A.rows(), A.cols());
    if (count < 1 || count > p) {
        throw DimensionMismatch("smallest_singular_triplets: count out of range");
    }
    Eigen::BDCSVD<ComplexMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues(); // descending
    std::vector<SingularTriplet> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) {
        const Index j = p - 1 - i;
        out.push_back({s(j), svd.matrixU().col(j), svd.matrixV().col(j)});
    }
    return out;
}

ComplexVector lstsq(const ComplexMatrix& A, const ComplexVector& b) {
    if (A.rows() < A.cols()) {
        throw DimensionMismatch("lstsq: system is underdetermined");
    }
    if (b.size() != A.rows()) {
        throw DimensionMismatch("lstsq: right-hand side has wrong length");
    }
    Eigen::ColPivHouseholderQR<ComplexMatrix> qr(A);
    const auto R = qr.matrixR();
    const Index q = A.cols();
    if (q == 0) {
        return ComplexVector(0);
    }
    const double r0 = std::abs(R(0, 0));
    const double thr = 64.0 * kEps * static_cast<double>(std::max(A.rows(), q)) * r0;
    for (Index i = 0; i < q; ++i) {
        if (!(std::abs(R(i, i)) > thr)) {
            throw RankDeficient("lstsq: triangular factor is numerically singular at column " +
                                std::to_string(i));
        }
    }
    return qr.solve(b);
}

} // namespace zgv
