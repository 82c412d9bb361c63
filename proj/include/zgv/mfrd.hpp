#pragma once

// Structured operators of the fixed-relative-distance three-parameter
// problem
//
//     (eta C2 + lambda C1 + C0) w = 0
//     (eta L2 + lambda L1 + L0 + mu M) u = 0
//     (eta (1+delta)^2 L2 + lambda (1+delta) L1 + L0 + mu M) v = 0
//
// whose operator determinants Delta0, Delta1, DeltaM are 2n^2 x 2n^2. The
// shift-invert solve (Delta1 - sigma Delta0) z = Delta0 y and the Rayleigh
// quotient for mu are carried out with n x n matrices only.

#include <array>
#include <optional>

#include <Eigen/LU>

#include "zgv/dense.hpp"
#include "zgv/pencil.hpp"

namespace zgv {

/// Precomputed factors for repeated application of (Delta1 - sigma Delta0)^{-1} Delta0.
///
/// Immutable after construction; apply() may be called concurrently.
class ShiftInvertCache {
public:
    /// Throws SingularMass if M is singular, EigenvalueCollision if the
    /// reduced Sylvester operator is singular at this shift.
    ShiftInvertCache(const QuadraticPencil& pencil, cplx sigma, double delta);

    /// z = (Delta1 - sigma Delta0)^{-1} Delta0 y for y of length 2n^2.
    ComplexVector apply(const ComplexVector& y) const;

    Index n() const noexcept { return n_; }
    Index dimension() const noexcept { return 2 * n_ * n_; }
    cplx sigma() const noexcept { return sigma_; }
    double delta() const noexcept { return delta_; }

    /// L(d) = L0 + (1+d) sigma L1 + (1+d)^2 sigma^2 L2
    ComplexMatrix L_of(double d) const;

    /// Schur factors of M^{-1} L(delta)
    const SchurFactorization& schur_left() const noexcept { return schur_left_; }
    /// Schur factors of L(0)^T M^{-T}
    const SchurFactorization& schur_right() const noexcept { return sylvester_->right(); }

private:
    Index n_ = 0;
    cplx sigma_;
    double delta_ = 0.0;
    ComplexMatrix L0_, L1_, L2_, M_;
    ComplexMatrix rhs_left_;  // (L1 + sigma L2)^T
    ComplexMatrix rhs_right_; // (1+delta) L1 + sigma (1+delta)^2 L2
    Eigen::PartialPivLU<ComplexMatrix> m_factor_;
    SchurFactorization schur_left_;
    std::optional<SylvesterSolver> sylvester_;
};

ShiftInvertCache build_cache(const QuadraticPencil& pencil, cplx sigma, double delta);

inline ComplexVector apply_shift_invert(const ShiftInvertCache& cache, const ComplexVector& y) {
    return cache.apply(y);
}

/// Scratch matrices of the structured Rayleigh quotient.
struct RayleighWorkspace {
    ComplexMatrix T1, T2, T3, T4;
};

/// mu = z^H DeltaM z / z^H Delta0 z evaluated with n x n products only.
/// Throws DegenerateQuotient when the denominator is below
/// 1e-10 |z|^2 (|M| + |L1| + |L2|).
cplx rayleigh_mu(const QuadraticPencil& pencil, double delta, const ComplexVector& z);
cplx rayleigh_mu(const QuadraticPencil& pencil, double delta, const ComplexVector& z,
                 RayleighWorkspace& ws);

/// The 2x2 matrices with det(eta C2 + lambda C1 + C0) = eta - lambda^2.
struct CMatrices {
    ComplexMatrix C0, C1, C2;
};
CMatrices c_matrices();

/// sum over permutations p of S_3: sgn(p) A[0][p0] (x) A[1][p1] (x) A[2][p2]
ComplexMatrix operator_determinant(const std::array<std::array<ComplexMatrix, 3>, 3>& A);

/// Explicitly assembled operator determinants (test oracle, small n only).
struct StructuredDeltaOracle {
    Index n = 0;
    double delta = 0.0;
    ComplexMatrix Delta0, Delta1, DeltaM;
    std::array<ComplexMatrix, 6> G; ///< G0..G5
};

inline constexpr Index kOracleCap = 12;

/// Assemble Delta0, Delta1, DeltaM from the Kronecker blocks G0..G5.
/// Throws OracleTooLarge if n > cap.
StructuredDeltaOracle build_explicit_deltas(const QuadraticPencil& pencil, double delta,
                                            Index cap = kOracleCap);

/// The same three matrices from the 3x3 operator-determinant expansion.
StructuredDeltaOracle operator_determinant_deltas(const QuadraticPencil& pencil, double delta,
                                                  Index cap = kOracleCap);

} // namespace zgv
