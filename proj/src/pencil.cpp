#include "zgv/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

namespace zgv {

QuadraticPencil::QuadraticPencil(RealMatrix L0, RealMatrix L1, RealMatrix L2, RealMatrix M)
    : L0_(std::move(L0)), L1_(std::move(L1)), L2_(std::move(L2)), M_(std::move(M)) {
    const Index n = L0_.rows();
    auto check = [n](const RealMatrix& A, const char* name) {
        if (A.rows() != n || A.cols() != n) {
            throw DimensionMismatch(std::string("pencil: ") + name + " is " + std::to_string(A.rows()) +
                                    "x" + std::to_string(A.cols()) + ", expected " +
                                    std::to_string(n) + "x" + std::to_string(n));
        }
        if (!A.allFinite()) {
            throw InputError(std::string("pencil: ") + name + " has non-finite entries");
        }
    };
    check(L0_, "L0");
    check(L1_, "L1");
    check(L2_, "L2");
    check(M_, "M");
}

ComplexMatrix QuadraticPencil::at(cplx lambda, cplx mu) const {
    return (lambda * lambda) * L2_.cast<cplx>() + lambda * L1_.cast<cplx>() + L0_.cast<cplx>() +
           mu * M_.cast<cplx>();
}

ComplexMatrix QuadraticPencil::derivative(cplx lambda) const {
    return (2.0 * lambda) * L2_.cast<cplx>() + L1_.cast<cplx>();
}

double QuadraticPencil::scale(cplx lambda, cplx mu) const {
    const double a = std::abs(lambda);
    return L0_.norm() + a * L1_.norm() + a * a * L2_.norm() + std::abs(mu) * M_.norm();
}

namespace {

double power_of_two(double x) {
    return std::isfinite(x) && x > 0.0 ? std::exp2(std::round(std::log2(x))) : 1.0;
}

} // namespace

PencilBalance QuadraticPencil::balance() const {
    const double n0 = L0_.norm(), n1 = L1_.norm(), n2 = L2_.norm(), nm = M_.norm();
    double alpha = 1.0;
    if (n0 > 0.0 && n2 > 0.0) {
        alpha = std::sqrt(n0 / n2);
    } else if (n0 > 0.0 && n1 > 0.0) {
        alpha = n0 / n1;
    } else if (n1 > 0.0 && n2 > 0.0) {
        alpha = n1 / n2;
    }
    PencilBalance b;
    b.alpha = power_of_two(alpha);
    b.s = power_of_two(std::max({n0, b.alpha * n1, b.alpha * b.alpha * n2}));
    b.beta = nm > 0.0 ? power_of_two(b.s / nm) : 1.0;
    return b;
}

QuadraticPencil QuadraticPencil::scaled(const PencilBalance& b) const {
    return QuadraticPencil(L0_ / b.s, (b.alpha / b.s) * L1_, (b.alpha * b.alpha / b.s) * L2_,
                           (b.beta / b.s) * M_);
}

void QuadraticPencil::require_nonsingular_mass() const {
    if (n() == 0) {
        return;
    }
    Eigen::JacobiSVD<RealMatrix> svd(M_);
    const auto& s = svd.singularValues();
    if (!(s(s.size() - 1) > 1e-12 * s(0))) {
        throw SingularMass("mass matrix M is numerically singular");
    }
}

} // namespace zgv
