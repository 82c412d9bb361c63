#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "zgv/dense.hpp"
#include "zgv/mfrd.hpp"

namespace zgv {

struct ArnoldiOptions {
    Index m = 8;             ///< requested eigenvalue count
    Index max_subspace = 0;  ///< Krylov dimension bound; 0 selects 4m + 4
    int max_restarts = 40;
    double tol = 1e-8;       ///< relative Ritz residual tolerance
    std::uint64_t seed = 0x5eed'2024'0001ULL;

    Index subspace() const noexcept { return max_subspace > 0 ? max_subspace : 4 * m + 4; }
    /// Throws InputError unless m >= 1, subspace >= 2m + 2 and tol > 0.
    void validate() const;
};

enum class ArnoldiStatus { converged, breakdown, no_convergence };

/// Ritz pair of the shift-inverted operator mapped back to the pencil.
struct RitzPair {
    cplx lambda;   ///< sigma + 1 / nu
    cplx nu;       ///< Ritz value of (Delta1 - sigma Delta0)^{-1} Delta0
    ComplexVector z;
    double residual_estimate = 0.0; ///< |Op z - nu z|
    bool converged = false;
};

struct ArnoldiResult {
    std::vector<RitzPair> pairs; ///< sorted by |lambda - sigma| ascending
    ArnoldiStatus status = ArnoldiStatus::converged;
    int restarts = 0;
    long applications = 0;
};

using LinearOperator = std::function<ComplexVector(const ComplexVector&)>;

/// Called after every expansion phase with the basis V (dim x (k+1)) and the
/// projected matrix H ((k+1) x k) satisfying Op V_k = V_{k+1} H.
using KrylovObserver = std::function<void(const ComplexMatrix& V, const ComplexMatrix& H)>;

/// Krylov-Schur iteration for the `opts.m` eigenvalues of largest modulus of a
/// general linear operator. The returned pairs carry nu = lambda (no shift
/// mapping); they are sorted by |nu| descending.
ArnoldiResult krylov_schur(const LinearOperator& op, Index dim, const ArnoldiOptions& opts,
                           const KrylovObserver& observer = {});

/// The m eigenvalues of Delta1 z = lambda Delta0 z closest to cache.sigma().
ArnoldiResult eigs_closest(const ShiftInvertCache& cache, const ArnoldiOptions& opts,
                           const KrylovObserver& observer = {});

} // namespace zgv
