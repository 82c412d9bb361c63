#pragma once

#include "zgv/dense.hpp"

namespace zgv {

/// Power-of-two change of variables lambda = alpha * lambda_hat,
/// mu = beta * mu_hat together with a division of W by s. It brings the four
/// terms of W to comparable magnitude (the plate matrices in SI units span
/// some fifteen orders) without any rounding.
struct PencilBalance {
    double alpha = 1.0;
    double beta = 1.0;
    double s = 1.0;
};

/// W(k, w) = (ik)^2 L2 + ik L1 + L0 + w^2 M with real n-by-n coefficients.
///
/// Construction validates shapes and finiteness. Nonsingularity of M is
/// checked lazily by the operations that invert it (build_cache, gep_omega).
class QuadraticPencil {
public:
    QuadraticPencil() = default;
    QuadraticPencil(RealMatrix L0, RealMatrix L1, RealMatrix L2, RealMatrix M);

    Index n() const noexcept { return L0_.rows(); }

    const RealMatrix& L0() const noexcept { return L0_; }
    const RealMatrix& L1() const noexcept { return L1_; }
    const RealMatrix& L2() const noexcept { return L2_; }
    const RealMatrix& M() const noexcept { return M_; }

    /// lambda^2 L2 + lambda L1 + L0 + mu M, i.e. W with lambda = ik, mu = w^2.
    ComplexMatrix at(cplx lambda, cplx mu) const;

    /// dW/dlambda = 2 lambda L2 + L1
    ComplexMatrix derivative(cplx lambda) const;

    /// |L0|_F + |lambda| |L1|_F + |lambda|^2 |L2|_F + |mu| |M|_F
    double scale(cplx lambda, cplx mu) const;

    /// Scaling factors with |L0| ~ alpha |L1| ~ alpha^2 |L2| ~ beta |M| ~ s.
    PencilBalance balance() const;

    /// The pencil W(alpha lambda, beta mu) / s.
    QuadraticPencil scaled(const PencilBalance& b) const;

    /// Throws SingularMass unless sigma_min(M) > 1e-12 |M|.
    void require_nonsingular_mass() const;

private:
    RealMatrix L0_, L1_, L2_, M_;
};

} // namespace zgv
