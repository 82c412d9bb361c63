#include "zgv/waveguide.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "zgv/refine.hpp"

namespace zgv {

QuadraticPencil example21() {
    RealMatrix L2(3, 3), L1(3, 3), L0(3, 3), M(3, 3);
    L2 << 2, 1, 0, 1, 1, 0, 0, 0, 1;
    L1 << 0, 3, 0, -3, 0, 0, 0, 0, 0;
    L0 << -1.75, 1, 0, 1, -1.75, 0, 0, 0, -0.25;
    M << 3, 1, 0, 1, 4, 0, 0, 0, 3.5;
    return QuadraticPencil(L0, L1, L2, M);
}

PlateMaterial PlateMaterial::isotropic(double rho, double ct, double cl, double h) {
    const double mu = rho * ct * ct;
    const double lame = rho * cl * cl - 2.0 * mu;
    PlateMaterial m;
    m.rho = rho;
    m.h = h;
    m.C = RealMatrix::Zero(6, 6);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            m.C(i, j) = lame;
        }
        m.C(i, i) = lame + 2.0 * mu;
        m.C(i + 3, i + 3) = mu;
    }
    return m;
}

void PlateMaterial::validate() const {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw InvalidMaterial("material: density must be positive");
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidMaterial("material: thickness must be positive");
    }
    if (C.rows() != 6 || C.cols() != 6 || !C.allFinite()) {
        throw InvalidMaterial("material: stiffness must be a finite 6x6 matrix");
    }
    if ((C - C.transpose()).norm() > 1e-12 * C.norm()) {
        throw InvalidMaterial("material: stiffness matrix is not symmetric");
    }
    const Eigen::LDLT<RealMatrix> ldlt(C);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-12 * ldlt.vectorD().maxCoeff()) {
        throw InvalidMaterial("material: stiffness matrix is not positive definite");
    }
}

namespace {

// Voigt index of the symmetric pair (a, b), directions 0 = x, 1 = y, 2 = z.
int voigt(int a, int b) {
    if (a == b) {
        return a;
    }
    const int s = a + b; // 1: xy, 2: xz, 3: yz
    return s == 1 ? 5 : (s == 2 ? 4 : 3);
}

RealMatrix lagrange_derivative(const RealVector& x) {
    const Index n = x.size();
    RealVector bw = RealVector::Ones(n);
    for (Index j = 0; j < n; ++j) {
        for (Index k = 0; k < n; ++k) {
            if (k != j) {
                bw(j) /= x(j) - x(k);
            }
        }
    }
    RealMatrix D = RealMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (i != j) {
                D(i, j) = bw(j) / bw(i) / (x(i) - x(j));
                D(i, i) -= D(i, j);
            }
        }
    }
    return D;
}

} // namespace

RealMatrix PlateMaterial::block(int i, int j) const {
    RealMatrix c(3, 3);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            c(a, b) = C(voigt(a, i), voigt(b, j));
        }
    }
    return c;
}

void gll_rule(int order, RealVector& nodes, RealVector& weights) {
    if (order < 1) {
        throw InputError("gll_rule: order must be at least 1");
    }
    const int N = order;
    RealVector x(N + 1);
    for (int i = 0; i <= N; ++i) {
        x(i) = std::cos(std::numbers::pi * i / N);
    }
    RealVector pn(N + 1), pn1(N + 1);
    for (int it = 0; it < 100; ++it) {
        // Legendre P_N and P_{N-1} at all nodes by the three-term recurrence
        RealVector p0 = RealVector::Ones(N + 1);
        RealVector p1 = x;
        for (int k = 2; k <= N; ++k) {
            RealVector p2 = ((2.0 * k - 1.0) * x.cwiseProduct(p1) - (k - 1.0) * p0) / k;
            p0 = std::move(p1);
            p1 = std::move(p2);
        }
        pn = p1;
        pn1 = p0;
        const RealVector step = (x.cwiseProduct(pn) - pn1).cwiseQuotient((N + 1.0) * pn);
        x -= step;
        if (step.cwiseAbs().maxCoeff() < 1e-16) {
            break;
        }
    }
    weights = (2.0 / (N * (N + 1.0))) * pn.cwiseProduct(pn).cwiseInverse();
    nodes = x.reverse();
    weights = weights.reverse().eval();
}

QuadraticPencil assemble_plate(const PlateMaterial& mat, const Discretization& disc) {
    mat.validate();
    if (disc.order < 1 || disc.elements < 1) {
        throw InputError("plate: order and element count must be at least 1");
    }
    const int d = disc.polarization == Polarization::in_plane ? 2 : 3;
    const auto sub = [d](const RealMatrix& c) { return RealMatrix(c.topLeftCorner(d, d)); };
    const RealMatrix cxx = sub(mat.block(0, 0));
    const RealMatrix cxy = sub(mat.block(0, 1));
    const RealMatrix cyx = sub(mat.block(1, 0));
    const RealMatrix cyy = sub(mat.block(1, 1));

    RealVector xi, w;
    gll_rule(disc.order, xi, w);
    const RealMatrix D = lagrange_derivative(xi);
    const int p = disc.order;
    const Index nodes = static_cast<Index>(disc.elements) * p + 1;
    const Index full = nodes * d;
    RealMatrix L2 = RealMatrix::Zero(full, full), L1 = L2, L0 = L2, M = L2;
    const double le = mat.h / disc.elements;
    const RealMatrix eye = RealMatrix::Identity(d, d);

    for (int e = 0; e < disc.elements; ++e) {
        const Index base = static_cast<Index>(e) * p;
        for (int i = 0; i <= p; ++i) {
            const Index gi = (base + i) * d;
            L2.block(gi, gi, d, d) += (w(i) * le / 2.0) * cxx;
            M.block(gi, gi, d, d) += (mat.rho * w(i) * le / 2.0) * eye;
            for (int j = 0; j <= p; ++j) {
                const Index gj = (base + j) * d;
                L1.block(gi, gj, d, d) += (w(i) * D(i, j)) * cxy - (w(j) * D(j, i)) * cyx;
                double stiff = 0.0;
                for (int q = 0; q <= p; ++q) {
                    stiff += w(q) * D(q, i) * D(q, j);
                }
                L0.block(gi, gj, d, d) -= (stiff * 2.0 / le) * cyy;
            }
        }
    }

    std::vector<Index> keep;
    const bool clamp_bottom = disc.bc != PlateBoundary::free_free;
    const bool clamp_top = disc.bc == PlateBoundary::clamped_clamped;
    for (Index node = 0; node < nodes; ++node) {
        if ((node == 0 && clamp_bottom) || (node == nodes - 1 && clamp_top)) {
            continue;
        }
        for (int c = 0; c < d; ++c) {
            keep.push_back(node * d + c);
        }
    }
    const auto restrict = [&keep](const RealMatrix& A) {
        RealMatrix R(keep.size(), keep.size());
        for (std::size_t i = 0; i < keep.size(); ++i) {
            for (std::size_t j = 0; j < keep.size(); ++j) {
                R(static_cast<Index>(i), static_cast<Index>(j)) = A(keep[i], keep[j]);
            }
        }
        return R;
    };
    return QuadraticPencil(restrict(L0), restrict(L1), restrict(L2), restrict(M));
}

std::vector<double> linspace(double a, double b, std::size_t count) {
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = a;
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

namespace {

std::vector<double> frequencies(const QuadraticPencil& pencil, double k) {
    std::vector<double> out;
    for (const auto& m : gep_omega(pencil, k)) {
        out.push_back(std::sqrt(std::max(m.omega2.real(), 0.0)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

DispersionGrid dispersion_sweep(const QuadraticPencil& pencil, const std::vector<double>& k_values) {
    if (!std::is_sorted(k_values.begin(), k_values.end())) {
        throw InputError("dispersion_sweep: k grid must be ascending");
    }
    DispersionGrid g;
    g.k_values = k_values;
    g.omega_branches.reserve(k_values.size());
    for (double k : k_values) {
        g.omega_branches.push_back(frequencies(pencil, k));
    }
    return g;
}

namespace {

struct Stencil {
    double fm, f0, fp;
};

Stencil sample(const QuadraticPencil& pencil, int branch, double c, double h) {
    const auto b = static_cast<std::size_t>(branch);
    return {frequencies(pencil, c - h)[b], frequencies(pencil, c)[b], frequencies(pencil, c + h)[b]};
}

} // namespace

std::vector<OraclePoint> zgv_oracle(const QuadraticPencil& pencil, const std::vector<double>& k_values) {
    const DispersionGrid g = dispersion_sweep(pencil, k_values);
    const std::size_t nk = g.k_values.size();
    std::vector<OraclePoint> out;
    if (nk < 4) {
        return out;
    }
    const std::size_t nb = g.omega_branches.front().size();
    for (std::size_t b = 0; b < nb; ++b) {
        const auto w = [&](std::size_t i) { return g.omega_branches[i][b]; };
        std::vector<double> slope(nk, 0.0);
        for (std::size_t i = 1; i + 1 < nk; ++i) {
            slope[i] = (w(i + 1) - w(i - 1)) / (g.k_values[i + 1] - g.k_values[i - 1]);
        }
        for (std::size_t i = 1; i + 2 < nk; ++i) {
            if (!(slope[i] * slope[i + 1] < 0.0)) {
                continue;
            }
            // start at the sampled extremum among the two bracketing nodes
            const bool is_min = slope[i] < 0.0;
            std::size_t c_idx = i;
            if ((is_min && w(i + 1) < w(i)) || (!is_min && w(i + 1) > w(i))) {
                c_idx = i + 1;
            }
            double c = g.k_values[c_idx];
            double h = 0.5 * (g.k_values[i + 1] - g.k_values[i]);
            const double h_min = 1e-5 * (1.0 + std::abs(c));
            const int bi = static_cast<int>(b);
            for (int it = 0; it < 60; ++it) {
                const Stencil s = sample(pencil, bi, c, h);
                const double curv = s.fp - 2.0 * s.f0 + s.fm;
                if (curv == 0.0) {
                    break;
                }
                const double shift = std::clamp(-h * (s.fp - s.fm) / (2.0 * curv), -2.0 * h, 2.0 * h);
                c += shift;
                if (std::abs(shift) <= 1e-8 * (1.0 + std::abs(c))) {
                    break;
                }
                h = std::max(std::min(h, 4.0 * std::abs(shift)), h_min);
            }
            // A smooth extremum has one-sided slopes that shrink with the
            // stencil; at a kink of two crossing branches they do not.
            const double h1 = 10.0 * h_min;
            const Stencil wide = sample(pencil, bi, c, h1);
            const Stencil narrow = sample(pencil, bi, c, h1 / 10.0);
            const double s_wide = std::max(std::abs(wide.fp - wide.f0), std::abs(wide.f0 - wide.fm)) / h1;
            const double s_narrow =
                std::max(std::abs(narrow.fp - narrow.f0), std::abs(narrow.f0 - narrow.fm)) / (h1 / 10.0);
            if (s_narrow > 0.5 * s_wide) {
                continue;
            }
            if (c <= g.k_values.front() || c >= g.k_values.back()) {
                continue;
            }
            out.push_back({c, frequencies(pencil, c)[b], bi});
        }
    }
    std::sort(out.begin(), out.end(), [](const OraclePoint& a, const OraclePoint& b) {
        return a.k != b.k ? a.k < b.k : a.omega < b.omega;
    });
    // one bracket can be seen twice when the extremum sits on a grid node
    std::vector<OraclePoint> unique;
    for (const auto& p : out) {
        if (unique.empty() || unique.back().branch != p.branch ||
            std::abs(unique.back().k - p.k) > 1e-6 * (1.0 + std::abs(p.k))) {
            unique.push_back(p);
        }
    }
    return unique;
}

} // namespace zgv
