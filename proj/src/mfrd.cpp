#include "zgv/mfrd.hpp"

#include <string>

namespace zgv {

namespace {

SchurFactorization negated(SchurFactorization f) {
    f.R = -f.R;
    return f;
}

void require_oracle_size(Index n, Index cap) {
    if (n > cap) {
        throw OracleTooLarge("explicit Delta matrices requested for n = " + std::to_string(n) +
                             " above the cap " + std::to_string(cap));
    }
}

} // namespace

ShiftInvertCache::ShiftInvertCache(const QuadraticPencil& pencil, cplx sigma, double delta)
    : n_(pencil.n()), sigma_(sigma), delta_(delta) {
    if (!(delta > 0.0)) {
        throw InputError("MFRD parameter delta must be positive");
    }
    pencil.require_nonsingular_mass();
    L1_ = pencil.L1().cast<cplx>();
    L2_ = pencil.L2().cast<cplx>();
    M_ = pencil.M().cast<cplx>();
    const double d1 = 1.0 + delta;
    rhs_left_ = (L1_ + sigma * L2_).transpose();
    rhs_right_ = d1 * L1_ + sigma * d1 * d1 * L2_;
    m_factor_.compute(M_);

    L0_ = pencil.L0().cast<cplx>();
    const ComplexMatrix L_delta = L_of(delta);
    const ComplexMatrix L_zero = L_of(0.0);
    // L(0)^T M^{-T} = (M^{-1} L(0))^T
    const ComplexMatrix right = m_factor_.solve(L_zero).transpose();
    const ComplexMatrix left = m_factor_.solve(L_delta);
    schur_left_ = schur(left);
    try {
        sylvester_.emplace(negated(schur_left_), schur(right));
    } catch (const SingularSylvester& e) {
        throw EigenvalueCollision(std::string("shift-invert operator is singular at this shift: ") +
                                  e.what());
    }
}

ComplexMatrix ShiftInvertCache::L_of(double d) const {
    const double d1 = 1.0 + d;
    return L0_ + d1 * sigma_ * L1_ + d1 * d1 * sigma_ * sigma_ * L2_;
}

ComplexVector ShiftInvertCache::apply(const ComplexVector& y) const {
    const Index n = n_;
    const Index nn = n * n;
    if (y.size() != 2 * nn) {
        throw DimensionMismatch("apply_shift_invert: vector length " + std::to_string(y.size()) +
                                " is not 2n^2 = " + std::to_string(2 * nn));
    }
    const Eigen::Map<const ComplexMatrix> Y1(y.data(), n, n);
    const Eigen::Map<const ComplexMatrix> Y2(y.data() + nn, n, n);
    const double c2 = (1.0 + delta_) * (1.0 + delta_);

    // vec(W) = -(G1 + sigma G2) y1 - G2 y2
    ComplexMatrix W = -(M_ * Y1) * rhs_left_;
    W.noalias() += (rhs_right_ * Y1) * M_.transpose();
    W.noalias() -= (M_ * Y2) * L2_.transpose();
    W.noalias() += c2 * (L2_ * Y2) * M_.transpose();

    // M^{-1} W M^{-T}
    const ComplexMatrix half = m_factor_.solve(W).transpose();
    const ComplexMatrix W_tilde = m_factor_.solve(half).transpose();

    const ComplexMatrix Z1 = sylvester_->solve(W_tilde);
    ComplexVector z(2 * nn);
    z.head(nn) = Eigen::Map<const ComplexVector>(Z1.data(), nn);
    z.tail(nn) = y.head(nn) + sigma_ * z.head(nn);
    return z;
}

ShiftInvertCache build_cache(const QuadraticPencil& pencil, cplx sigma, double delta) {
    return ShiftInvertCache(pencil, sigma, delta);
}

cplx rayleigh_mu(const QuadraticPencil& pencil, double delta, const ComplexVector& z) {
    RayleighWorkspace ws;
    return rayleigh_mu(pencil, delta, z, ws);
}

cplx rayleigh_mu(const QuadraticPencil& pencil, double delta, const ComplexVector& z,
                 RayleighWorkspace& ws) {
    const Index n = pencil.n();
    const Index nn = n * n;
    if (z.size() != 2 * nn) {
        throw DimensionMismatch("rayleigh_mu: vector length is not 2n^2");
    }
    const ComplexMatrix L0 = pencil.L0().cast<cplx>();
    const ComplexMatrix L1 = pencil.L1().cast<cplx>();
    const ComplexMatrix L2 = pencil.L2().cast<cplx>();
    const ComplexMatrix M = pencil.M().cast<cplx>();
    const Eigen::Map<const ComplexMatrix> Z1(z.data(), n, n);
    const Eigen::Map<const ComplexMatrix> Z2(z.data() + nn, n, n);
    const double d1 = 1.0 + delta;
    const double d2 = d1 * d1;

    ws.T1 = -L0 * Z1 * L1.transpose() + d1 * L1 * Z1 * L0.transpose() +
            d2 * L2 * Z2 * L0.transpose() - L0 * Z2 * L2.transpose();
    ws.T2 = d2 * L2 * Z1 * L0.transpose() - L0 * Z1 * L2.transpose() -
            d1 * L1 * Z2 * L2.transpose() + d2 * L2 * Z2 * L1.transpose();
    ws.T3 = M * Z1 * L1.transpose() - d1 * L1 * Z1 * M.transpose() + M * Z2 * L2.transpose() -
            d2 * L2 * Z2 * M.transpose();
    ws.T4 = M * Z1 * L2.transpose() - d2 * L2 * Z1 * M.transpose();

    auto dot = [](const auto& A, const ComplexMatrix& B) { return (A.conjugate().cwiseProduct(B)).sum(); };
    const cplx num = dot(Z1, ws.T1) + dot(Z2, ws.T2);
    const cplx den = dot(Z1, ws.T3) + dot(Z2, ws.T4);
    const double thr = 1e-10 * z.squaredNorm() * (pencil.M().norm() + pencil.L1().norm() + pencil.L2().norm());
    if (!(std::abs(den) > thr)) {
        throw DegenerateQuotient("Rayleigh quotient for mu has a vanishing denominator");
    }
    return num / den;
}

CMatrices c_matrices() {
    CMatrices c;
    c.C0 = ComplexMatrix::Zero(2, 2);
    c.C0(1, 1) = 1.0;
    c.C1 = ComplexMatrix::Zero(2, 2);
    c.C1(0, 1) = -1.0;
    c.C1(1, 0) = -1.0;
    c.C2 = ComplexMatrix::Zero(2, 2);
    c.C2(0, 0) = 1.0;
    return c;
}

ComplexMatrix operator_determinant(const std::array<std::array<ComplexMatrix, 3>, 3>& A) {
    static constexpr std::array<std::array<int, 3>, 6> perms{{
        {0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}}};
    static constexpr std::array<double, 6> signs{1, 1, 1, -1, -1, -1};
    ComplexMatrix out;
    for (std::size_t p = 0; p < perms.size(); ++p) {
        const auto& s = perms[p];
        ComplexMatrix term = signs[p] * kron(A[0][s[0]], kron(A[1][s[1]], A[2][s[2]]));
        if (out.size() == 0) {
            out = std::move(term);
        } else {
            out += term;
        }
    }
    return out;
}

StructuredDeltaOracle build_explicit_deltas(const QuadraticPencil& pencil, double delta, Index cap) {
    const Index n = pencil.n();
    require_oracle_size(n, cap);
    const ComplexMatrix L0 = pencil.L0().cast<cplx>();
    const ComplexMatrix L1 = pencil.L1().cast<cplx>();
    const ComplexMatrix L2 = pencil.L2().cast<cplx>();
    const ComplexMatrix M = pencil.M().cast<cplx>();
    const double d1 = 1.0 + delta;
    const double d2 = d1 * d1;

    StructuredDeltaOracle o;
    o.n = n;
    o.delta = delta;
    o.G[0] = kron(L0, M) - kron(M, L0);
    o.G[1] = kron(L1, M) - d1 * kron(M, L1);
    o.G[2] = kron(L2, M) - d2 * kron(M, L2);
    o.G[3] = -kron(L1, L0) + d1 * kron(L0, L1);
    o.G[4] = d2 * kron(L0, L2) - kron(L2, L0);
    o.G[5] = -d1 * kron(L2, L1) + d2 * kron(L1, L2);

    const Index nn = n * n;
    const ComplexMatrix Z = ComplexMatrix::Zero(nn, nn);
    auto blocks = [nn](const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c,
                       const ComplexMatrix& d) {
        ComplexMatrix D(2 * nn, 2 * nn);
        D << a, b, c, d;
        return D;
    };
    o.Delta0 = blocks(o.G[1], o.G[2], o.G[2], Z);
    o.Delta1 = blocks(-o.G[0], Z, Z, o.G[2]);
    o.DeltaM = blocks(o.G[3], o.G[4], o.G[4], o.G[5]);
    return o;
}

StructuredDeltaOracle operator_determinant_deltas(const QuadraticPencil& pencil, double delta, Index cap) {
    const Index n = pencil.n();
    require_oracle_size(n, cap);
    const ComplexMatrix L0 = pencil.L0().cast<cplx>();
    const ComplexMatrix L1 = pencil.L1().cast<cplx>();
    const ComplexMatrix L2 = pencil.L2().cast<cplx>();
    const ComplexMatrix M = pencil.M().cast<cplx>();
    const double d1 = 1.0 + delta;
    const double d2 = d1 * d1;
    const CMatrices c = c_matrices();
    const ComplexMatrix zero = ComplexMatrix::Zero(2, 2);

    StructuredDeltaOracle o;
    o.n = n;
    o.delta = delta;
    o.Delta0 = operator_determinant({{{c.C2, c.C1, zero}, {L2, L1, M}, {d2 * L2, d1 * L1, M}}});
    o.Delta1 = -operator_determinant({{{c.C2, c.C0, zero}, {L2, L0, M}, {d2 * L2, L0, M}}});
    o.DeltaM = -operator_determinant({{{c.C2, c.C1, c.C0}, {L2, L1, L0}, {d2 * L2, d1 * L1, L0}}});
    return o;
}

} // namespace zgv
