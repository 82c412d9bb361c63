#include "zgv/arnoldi.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace zgv {

void ArnoldiOptions::validate() const {
    if (m < 1) {
        throw InputError("Arnoldi: m must be at least 1");
    }
    if (subspace() < 2 * m + 2) {
        throw InputError("Arnoldi: max_subspace must be at least 2m + 2");
    }
    if (!(tol > 0.0)) {
        throw InputError("Arnoldi: tol must be positive");
    }
    if (max_restarts < 0) {
        throw InputError("Arnoldi: max_restarts must be nonnegative");
    }
}

namespace {

ComplexVector start_vector(Index dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    ComplexVector v(dim);
    for (Index i = 0; i < dim; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = cplx(re, im);
    }
    return v / v.norm();
}

} // namespace

ArnoldiResult krylov_schur(const LinearOperator& op, Index dim, const ArnoldiOptions& opts,
                           const KrylovObserver& observer) {
    opts.validate();
    ArnoldiResult result;
    if (dim == 0) {
        return result;
    }
    const Index want = std::min(opts.m, dim);
    const Index maxv = std::min(opts.subspace(), dim);
    const Index keep = std::min(std::max(2 * opts.m, want), maxv - 1);

    ComplexMatrix V = ComplexMatrix::Zero(dim, maxv + 1);
    ComplexMatrix H = ComplexMatrix::Zero(maxv + 1, maxv);
    V.col(0) = start_vector(dim, opts.seed);
    Index k = 0;

    for (int restart = 0;; ++restart) {
        Index size = maxv;
        bool invariant = false;
        for (Index j = k; j < maxv; ++j) {
            ComplexVector w = op(V.col(j));
            ++result.applications;
            const double wnorm0 = w.norm();
            auto basis = V.leftCols(j + 1);
            // classical Gram-Schmidt with one full reorthogonalization
            ComplexVector h = basis.adjoint() * w;
            w.noalias() -= basis * h;
            const ComplexVector h2 = basis.adjoint() * w;
            w.noalias() -= basis * h2;
            h += h2;
            const double beta = w.norm();
            H.col(j).head(j + 1) = h;
            if (beta <= 1e-13 * std::max(wnorm0, h.norm()) || j + 1 == dim) {
                H(j + 1, j) = 0.0;
                size = j + 1;
                invariant = true;
                break;
            }
            H(j + 1, j) = beta;
            V.col(j + 1) = w / beta;
        }
        if (observer) {
            observer(V.leftCols(size + 1), H.topLeftCorner(size + 1, size));
        }

        SchurFactorization f = schur(H.topLeftCorner(size, size));
        sort_schur(f, [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
        const ComplexVector b = invariant ? ComplexVector::Zero(size).eval()
                                          : H.row(size).head(size).transpose().eval();

        const Index report = std::min(want, size);
        std::vector<RitzPair> pairs;
        bool all_converged = true;
        for (Index i = 0; i < report; ++i) {
            const ComplexVector x = triangular_eigenvector(f.R, i);
            const ComplexVector y = f.Q.leftCols(i + 1) * x.head(i + 1);
            RitzPair p;
            p.nu = f.R(i, i);
            p.lambda = p.nu;
            p.residual_estimate = std::abs((b.transpose() * y).value());
            p.converged = p.residual_estimate <= opts.tol * std::abs(p.nu);
            all_converged = all_converged && p.converged;
            p.z = V.leftCols(size) * y;
            p.z.normalize();
            pairs.push_back(std::move(p));
        }

        const bool done = all_converged || invariant || restart >= opts.max_restarts;
        if (done) {
            result.pairs = std::move(pairs);
            result.restarts = restart;
            if (invariant && size < want) {
                result.status = ArnoldiStatus::breakdown;
            } else if (!all_converged && !invariant) {
                result.status = ArnoldiStatus::no_convergence;
            } else {
                result.status = ArnoldiStatus::converged;
            }
            return result;
        }

        // thick restart: keep the leading Schur vectors
        const Index p = std::min(keep, size - 1);
        const ComplexMatrix Vp = V.leftCols(size) * f.Q.leftCols(p);
        const ComplexVector next = V.col(size);
        V.leftCols(p) = Vp;
        V.col(p) = next;
        const ComplexVector bp = (b.transpose() * f.Q.leftCols(p)).transpose();
        H.setZero();
        H.topLeftCorner(p, p) = f.R.topLeftCorner(p, p);
        H.row(p).head(p) = bp.transpose();
        k = p;
    }
}

ArnoldiResult eigs_closest(const ShiftInvertCache& cache, const ArnoldiOptions& opts,
                           const KrylovObserver& observer) {
    const LinearOperator op = [&cache](const ComplexVector& y) { return cache.apply(y); };
    ArnoldiResult result = krylov_schur(op, cache.dimension(), opts, observer);
    const cplx sigma = cache.sigma();
    std::erase_if(result.pairs, [](const RitzPair& p) { return p.nu == cplx(0.0); });
    for (RitzPair& p : result.pairs) {
        p.lambda = sigma + 1.0 / p.nu;
    }
    std::stable_sort(result.pairs.begin(), result.pairs.end(), [sigma](const RitzPair& a, const RitzPair& b) {
        return std::abs(a.lambda - sigma) < std::abs(b.lambda - sigma);
    });
    return result;
}

} // namespace zgv
