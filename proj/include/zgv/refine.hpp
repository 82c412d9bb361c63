#pragma once

// Gauss-Newton refinement of ZGV candidates and their classification.
//
// Unknowns are (u, y, lambda, mu) with lambda = ik, mu = w^2 and y the
// complex conjugate of the left eigenvector z. The residual is
//
//     F = [ W u ; W^T y ; y^T (2 lambda L2 + L1) u ; (u^H u - 1)/2 ; (y^H y - 1)/2 ]
//
// with W = lambda^2 L2 + lambda L1 + L0 + mu M, an overdetermined system
// (2n+3 equations, 2n+2 unknowns) that has zero residual at ZGV points.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zgv/dense.hpp"
#include "zgv/pencil.hpp"

namespace zgv {

struct GaussNewtonState {
    ComplexVector u;
    ComplexVector y;
    cplx lambda;
    cplx mu;
    double residual_norm = 0.0;
    int iterations = 0;
    std::vector<double> history; ///< |F| at the start and after every step
    std::vector<double> steps;   ///< norm of every accepted correction
};

enum class Classification { zgv, trivial_zgv, crossing, rejected };

std::string_view to_string(Classification c);

struct ZgvPoint {
    double k = 0.0;
    double omega = 0.0;
    ComplexVector u;
    ComplexVector z; ///< left eigenvector
    double residual = 0.0;
    Classification classification = Classification::rejected;
    double omega_gap = 0.0;
};

/// Thresholds of classify(); defaults follow the library conventions.
struct ClassifyOptions {
    double real_tol = 1e-6;  ///< |Re lambda| <= real_tol (1 + |lambda|)
    double imag_tol = 1e-6;  ///< |Im mu| <= imag_tol (1 + |mu|) and Re mu >= -imag_tol (1 + |mu|)
    double zgv_tol = 1e-6;   ///< |z^H (2 lambda L2 + L1) u| <= zgv_tol (|L1| + 2 |lambda| |L2|)
    double gap_tol = 1e-6;   ///< simple iff gap > gap_tol (1 + omega)
    double k_zero = 1e-4;    ///< |k| <= k_zero is a trivial point (absolute)
};

/// (ik)^2 L2 + ik L1 + L0 + omega^2 M
ComplexMatrix evaluate_W(const QuadraticPencil& pencil, cplx k, cplx omega);

/// The residual F (length 2n+3).
ComplexVector residual_F(const QuadraticPencil& pencil, const ComplexVector& u, const ComplexVector& y,
                         cplx lambda, cplx mu);

/// The (2n+3) x (2n+2) Jacobian of F.
ComplexMatrix jacobian_F(const QuadraticPencil& pencil, const ComplexVector& u, const ComplexVector& y,
                         cplx lambda, cplx mu);

/// Right singular vector u0 and conjugated left singular vector y0 of the
/// smallest singular value of W(lambda0, mu0).
std::pair<ComplexVector, ComplexVector> initial_vectors(const QuadraticPencil& pencil, cplx lambda0,
                                                        cplx mu0);

/// Pure Gauss-Newton on F with the least-squares update; a step is halved (at
/// most 5 times) only when it increases |F|.
///
/// `tol` is absolute. Throws NoConvergence after maxit steps and
/// StagnatedResidual when |F| stops decreasing above tol.
GaussNewtonState gauss_newton(const QuadraticPencil& pencil, ComplexVector u0, ComplexVector y0,
                              cplx lambda0, cplx mu0, double tol, int maxit = 30);

/// Default absolute tolerance 1e-10 * max(1, pencil.scale(lambda, mu)).
double default_newton_tol(const QuadraticPencil& pencil, cplx lambda, cplx mu);

struct OmegaMode {
    cplx omega2;
    ComplexVector u;
};

/// All n eigenpairs of (-k^2 L2 + ik L1 + L0) u = -w^2 M u sorted by Re(w^2).
std::vector<OmegaMode> gep_omega(const QuadraticPencil& pencil, double k);

/// Distance from omega to the nearest other frequency of the fixed-k problem.
double omega_gap(const QuadraticPencil& pencil, double k, double omega);

ZgvPoint classify(const QuadraticPencil& pencil, const GaussNewtonState& state,
                  const ClassifyOptions& opts = {});

/// Random unit combinations of the right singular vectors and of the
/// conjugated left singular vectors of the `count` smallest singular values.
std::pair<ComplexVector, ComplexVector> span_initial_vectors(const QuadraticPencil& pencil, cplx lambda0,
                                                             cplx mu0, Index count, std::mt19937_64& rng);

struct RefineOptions {
    double tol = 0.0;   ///< absolute |F| tolerance; 0 selects default_newton_tol at the start
    int maxit = 30;
    int restarts = 3;   ///< extra starts from random singular-subspace vectors
    Index span = 2;     ///< singular vectors spanning the restart subspace
    double locality = 0.1; ///< a result is local if |k - k0| <= locality (1 + |k0|), same for omega
    std::uint64_t seed = 0x5eed'2024'0002ULL;
    bool balance = true; ///< refine on pencil.scaled(pencil.balance()) and map back
    ClassifyOptions classify;
};

/// Map a point of the balanced pencil back to the original variables.
ZgvPoint unscale(ZgvPoint p, const PencilBalance& b);

struct RefineAttempt {
    bool converged = false;
    bool local = false;
    std::string message; ///< failure reason when not converged
    int iterations = 0;
    ZgvPoint point;
};

/// Refine one candidate (lambda0, mu0). The first start uses initial_vectors;
/// when it fails, leaves the neighbourhood of the start or ends up rejected,
/// further starts use span_initial_vectors. Near a crossing the
/// smallest singular pair belongs to a single branch, so the ZGV row of F is
/// O(1) there and only mixed vectors lead Gauss-Newton to the crossing.
/// Every attempt is returned; the last one is the accepted one if any is.
/// With balancing, tol is divided by b.s and the classification thresholds
/// apply to the balanced variables (k_zero is converted).
std::vector<RefineAttempt> refine_candidate(const QuadraticPencil& pencil, cplx lambda0, cplx mu0,
                                            const RefineOptions& opts = {});

} // namespace zgv
