#include "zgv/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace zgv {

std::string_view to_string(Classification c) {
    switch (c) {
    case Classification::zgv:
        return "zgv";
    case Classification::trivial_zgv:
        return "trivial_zgv";
    case Classification::crossing:
        return "crossing";
    case Classification::rejected:
        return "rejected";
    }
    return "rejected";
}

ComplexMatrix evaluate_W(const QuadraticPencil& pencil, cplx k, cplx omega) {
    const cplx lambda(-k.imag(), k.real()); // ik
    return pencil.at(lambda, omega * omega);
}

ComplexVector residual_F(const QuadraticPencil& pencil, const ComplexVector& u, const ComplexVector& y,
                         cplx lambda, cplx mu) {
    const Index n = pencil.n();
    if (u.size() != n || y.size() != n) {
        throw DimensionMismatch("residual_F: vector length does not match the pencil");
    }
    const ComplexMatrix W = pencil.at(lambda, mu);
    const ComplexMatrix D = pencil.derivative(lambda);
    ComplexVector F(2 * n + 3);
    F.head(n) = W * u;
    F.segment(n, n) = W.transpose() * y;
    F(2 * n) = (y.transpose() * D * u).value();
    F(2 * n + 1) = 0.5 * (u.squaredNorm() - 1.0);
    F(2 * n + 2) = 0.5 * (y.squaredNorm() - 1.0);
    return F;
}

ComplexMatrix jacobian_F(const QuadraticPencil& pencil, const ComplexVector& u, const ComplexVector& y,
                         cplx lambda, cplx mu) {
    const Index n = pencil.n();
    if (u.size() != n || y.size() != n) {
        throw DimensionMismatch("jacobian_F: vector length does not match the pencil");
    }
    const ComplexMatrix W = pencil.at(lambda, mu);
    const ComplexMatrix D = pencil.derivative(lambda);
    const ComplexMatrix M = pencil.M().cast<cplx>();
    const ComplexMatrix L2 = pencil.L2().cast<cplx>();

    ComplexMatrix J = ComplexMatrix::Zero(2 * n + 3, 2 * n + 2);
    J.topLeftCorner(n, n) = W;
    J.block(0, 2 * n, n, 1) = D * u;
    J.block(0, 2 * n + 1, n, 1) = M * u;

    J.block(n, n, n, n) = W.transpose();
    J.block(n, 2 * n, n, 1) = D.transpose() * y;
    J.block(n, 2 * n + 1, n, 1) = M.transpose() * y;

    J.block(2 * n, 0, 1, n) = y.transpose() * D;
    J.block(2 * n, n, 1, n) = (D * u).transpose();
    J(2 * n, 2 * n) = 2.0 * (y.transpose() * L2 * u).value();

    J.block(2 * n + 1, 0, 1, n) = u.adjoint();
    J.block(2 * n + 2, n, 1, n) = y.adjoint();
    return J;
}

std::pair<ComplexVector, ComplexVector> initial_vectors(const QuadraticPencil& pencil, cplx lambda0,
                                                        cplx mu0) {
    const auto t = smallest_singular_triplets(pencil.at(lambda0, mu0), 1).front();
    // W v = sigma u_left, so u_left^H W ~ 0 and y = conj(u_left) satisfies W^T y ~ 0
    return {t.v_right, t.u_left.conjugate()};
}

double default_newton_tol(const QuadraticPencil& pencil, cplx lambda, cplx mu) {
    return 1e-10 * std::max(1.0, pencil.scale(lambda, mu));
}

namespace {

// Minimum-norm least-squares step, used when the Jacobian loses rank (at a
// crossing of two branches the solution set is not isolated).
ComplexVector min_norm_step(const ComplexMatrix& J, const ComplexVector& rhs) {
    Eigen::BDCSVD<ComplexMatrix> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    return svd.solve(rhs);
}

} // namespace

GaussNewtonState gauss_newton(const QuadraticPencil& pencil, ComplexVector u0, ComplexVector y0,
                              cplx lambda0, cplx mu0, double tol, int maxit) {
    const Index n = pencil.n();
    if (u0.size() != n || y0.size() != n) {
        throw DimensionMismatch("gauss_newton: initial vector length does not match the pencil");
    }
    if (!(tol > 0.0) || maxit < 1) {
        throw InputError("gauss_newton: tol must be positive and maxit at least 1");
    }
    GaussNewtonState s{std::move(u0), std::move(y0), lambda0, mu0, 0.0, 0, {}, {}};
    ComplexVector F = residual_F(pencil, s.u, s.y, s.lambda, s.mu);
    s.residual_norm = F.norm();
    s.history.push_back(s.residual_norm);

    int slow = 0;
    while (!(s.residual_norm <= tol)) {
        if (!std::isfinite(s.residual_norm)) {
            throw NoConvergence("gauss_newton: residual is not finite");
        }
        if (s.iterations >= maxit) {
            throw NoConvergence("gauss_newton: |F| = " + std::to_string(s.residual_norm) + " after " +
                                std::to_string(maxit) + " iterations");
        }
        const ComplexMatrix J = jacobian_F(pencil, s.u, s.y, s.lambda, s.mu);
        ComplexVector step;
        try {
            step = lstsq(J, -F);
        } catch (const RankDeficient&) {
            step = min_norm_step(J, -F);
        }

        double r_new = 0.0;
        ComplexVector u, y, F_new;
        cplx lambda, mu;
        for (int halving = 0;; ++halving) {
            u = s.u + step.head(n);
            y = s.y + step.segment(n, n);
            lambda = s.lambda + step(2 * n);
            mu = s.mu + step(2 * n + 1);
            F_new = residual_F(pencil, u, y, lambda, mu);
            r_new = F_new.norm();
            if (r_new <= s.residual_norm || halving == 5) {
                break;
            }
            step *= 0.5;
        }

        slow = r_new > 0.95 * s.residual_norm ? slow + 1 : 0;
        s.u = std::move(u);
        s.y = std::move(y);
        s.lambda = lambda;
        s.mu = mu;
        F = std::move(F_new);
        s.residual_norm = r_new;
        ++s.iterations;
        s.history.push_back(r_new);
        s.steps.push_back(step.norm());
        if (slow >= 3 && !(r_new <= tol)) {
            throw StagnatedResidual("gauss_newton: residual stagnated at " + std::to_string(r_new));
        }
    }
    return s;
}

std::vector<OmegaMode> gep_omega(const QuadraticPencil& pencil, double k) {
    pencil.require_nonsingular_mass();
    const cplx lambda(0.0, k);
    // (lambda^2 L2 + lambda L1 + L0) u = -mu M u
    const ComplexMatrix A = pencil.at(lambda, 0.0);
    const Eigen::PartialPivLU<ComplexMatrix> lu(pencil.M().cast<cplx>());
    const ComplexMatrix B = -lu.solve(A);
    std::vector<OmegaMode> modes;
    for (auto& p : eig_dense(B)) {
        modes.push_back({p.value, std::move(p.vector)});
    }
    std::stable_sort(modes.begin(), modes.end(),
                     [](const OmegaMode& a, const OmegaMode& b) { return a.omega2.real() < b.omega2.real(); });
    return modes;
}

double omega_gap(const QuadraticPencil& pencil, double k, double omega) {
    const auto modes = gep_omega(pencil, k);
    std::vector<double> dist;
    dist.reserve(modes.size());
    for (const auto& m : modes) {
        dist.push_back(std::abs(std::sqrt(m.omega2) - omega));
    }
    if (dist.size() < 2) {
        return std::numeric_limits<double>::infinity();
    }
    // the closest frequency is omega itself; the gap is to the next one
    std::partial_sort(dist.begin(), dist.begin() + 2, dist.end());
    return dist[1];
}

ZgvPoint classify(const QuadraticPencil& pencil, const GaussNewtonState& state, const ClassifyOptions& opts) {
    ZgvPoint p;
    const cplx lambda = state.lambda;
    const cplx mu = state.mu;
    p.k = lambda.imag();
    p.omega = std::sqrt(mu).real();
    p.u = state.u;
    p.z = state.y.conjugate();
    p.residual = state.residual_norm;

    // omega = sqrt(mu) must be real, so mu may not be negative either
    const bool real_point = std::abs(lambda.real()) <= opts.real_tol * (1.0 + std::abs(lambda)) &&
                            std::abs(mu.imag()) <= opts.imag_tol * (1.0 + std::abs(mu)) &&
                            mu.real() >= -opts.imag_tol * (1.0 + std::abs(mu));
    if (!real_point) {
        p.classification = Classification::rejected;
        return p;
    }
    p.omega_gap = omega_gap(pencil, p.k, p.omega);
    if (std::abs(p.k) <= opts.k_zero) {
        p.classification = Classification::trivial_zgv;
        return p;
    }
    const ComplexVector u = state.u.normalized();
    const ComplexVector y = state.y.normalized();
    const double condition = std::abs((y.transpose() * pencil.derivative(lambda) * u).value());
    const double scale = pencil.L1().norm() + 2.0 * std::abs(lambda) * pencil.L2().norm();
    if (condition > opts.zgv_tol * scale) {
        p.classification = Classification::rejected;
        return p;
    }
    p.classification = p.omega_gap > opts.gap_tol * (1.0 + p.omega) ? Classification::zgv
                                                                      : Classification::crossing;
    return p;
}

std::pair<ComplexVector, ComplexVector> span_initial_vectors(const QuadraticPencil& pencil, cplx lambda0,
                                                             cplx mu0, Index count, std::mt19937_64& rng) {
    count = std::clamp<Index>(count, 1, pencil.n());
    const auto t = smallest_singular_triplets(pencil.at(lambda0, mu0), count);
    std::normal_distribution<double> normal;
    ComplexVector u = ComplexVector::Zero(pencil.n());
    ComplexVector y = ComplexVector::Zero(pencil.n());
    for (const auto& s : t) {
        const double a = normal(rng), b = normal(rng), c = normal(rng), d = normal(rng);
        u += cplx(a, b) * s.v_right;
        y += cplx(c, d) * s.u_left.conjugate();
    }
    return {u.normalized(), y.normalized()};
}

ZgvPoint unscale(ZgvPoint p, const PencilBalance& b) {
    const double root = std::sqrt(b.beta);
    p.k *= b.alpha;
    p.omega *= root;
    p.omega_gap *= root;
    return p;
}

std::vector<RefineAttempt> refine_candidate(const QuadraticPencil& pencil, cplx lambda0, cplx mu0,
                                            const RefineOptions& opts) {
    if (opts.balance) {
        const PencilBalance b = pencil.balance();
        RefineOptions inner = opts;
        inner.balance = false;
        inner.tol = opts.tol / b.s;
        inner.classify.k_zero = opts.classify.k_zero / b.alpha;
        auto attempts = refine_candidate(pencil.scaled(b), lambda0 / b.alpha, mu0 / b.beta, inner);
        for (auto& a : attempts) {
            a.point = unscale(std::move(a.point), b);
        }
        return attempts;
    }
    const double tol = opts.tol > 0.0 ? opts.tol : default_newton_tol(pencil, lambda0, mu0);
    const double k0 = lambda0.imag();
    const double w0 = std::sqrt(mu0).real();
    std::mt19937_64 rng(opts.seed);
    std::vector<RefineAttempt> attempts;
    for (int a = 0; a <= opts.restarts; ++a) {
        auto [u, y] = a == 0 ? initial_vectors(pencil, lambda0, mu0)
                             : span_initial_vectors(pencil, lambda0, mu0, opts.span, rng);
        RefineAttempt att;
        try {
            const GaussNewtonState s = gauss_newton(pencil, std::move(u), std::move(y), lambda0, mu0, tol, opts.maxit);
            att.converged = true;
            att.iterations = s.iterations;
            att.point = classify(pencil, s, opts.classify);
            att.local = std::abs(att.point.k - k0) <= opts.locality * (1.0 + std::abs(k0)) &&
                        std::abs(att.point.omega - w0) <= opts.locality * (1.0 + std::abs(w0));
        } catch (const NumericalError& e) {
            att.message = e.what();
        }
        const bool accepted = att.converged && att.local && att.point.classification != Classification::rejected;
        attempts.push_back(std::move(att));
        if (accepted) {
            break;
        }
    }
    return attempts;
}

} // namespace zgv
