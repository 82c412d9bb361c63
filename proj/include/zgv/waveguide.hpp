#pragma once

// Test problems: the 3x3 pencil of the worked example, spectral-element plates
// and a brute-force ZGV locator working on sampled dispersion curves.

#include <array>
#include <string_view>
#include <vector>

#include "zgv/pencil.hpp"

namespace zgv {

/// L2 = [2 1 0; 1 1 0; 0 0 1], L1 = [0 3 0; -3 0 0; 0 0 0],
/// L0 = [-1.75 1 0; 1 -1.75 0; 0 0 -0.25], M = [3 1 0; 1 4 0; 0 0 3.5].
QuadraticPencil example21();

/// Four-digit reference values for example21() as printed with the matrices.
namespace example21_reference {
inline constexpr std::string_view zgv_k = "1.0642";
inline constexpr std::string_view zgv_omega = "0.2393";
inline constexpr std::array<std::string_view, 3> trivial_omega = {"0.2673", "0.4074", "1.0628"};
inline constexpr std::string_view crossing_k = "0.4236";
inline constexpr std::string_view crossing_omega = "0.3503";
} // namespace example21_reference

/// Elastic layer with stiffness in Voigt order (xx, yy, zz, yz, xz, xy); x is
/// the propagation direction and y the thickness direction.
struct PlateMaterial {
    double rho = 1.0;
    RealMatrix C = RealMatrix::Identity(6, 6);
    double h = 1.0;

    /// Lamé parameters from shear and longitudinal wave speeds.
    static PlateMaterial isotropic(double rho, double ct, double cl, double h);

    /// Throws InvalidMaterial unless rho > 0, h > 0 and C is symmetric positive definite.
    void validate() const;

    /// 3x3 block (c_ij)_{ac} = c_{a i c j} for direction indices i, j in {0, 1, 2}.
    RealMatrix block(int i, int j) const;
};

enum class Polarization { in_plane, full };
enum class PlateBoundary { free_free, clamped_free, clamped_clamped };

struct Discretization {
    int order = 12;
    int elements = 1;
    Polarization polarization = Polarization::in_plane;
    PlateBoundary bc = PlateBoundary::free_free;
};

/// Gauss-Lobatto-Legendre nodes on [-1, 1] (ascending) and quadrature weights.
void gll_rule(int order, RealVector& nodes, RealVector& weights);

/// Weak form of the plate problem on [0, h] with p-th order GLL elements:
///   L2 = int N c_xx N,  L1 = int (N c_xy N' - N' c_yx N),
///   L0 = -int N' c_yy N',  M = rho int N N.
/// Traction-free faces are natural; clamped faces are removed from the unknowns.
QuadraticPencil assemble_plate(const PlateMaterial& mat, const Discretization& disc);

struct DispersionGrid {
    std::vector<double> k_values;
    std::vector<std::vector<double>> omega_branches; ///< [k index][branch], ascending in branch
};

/// Frequencies sqrt(max(Re w^2, 0)) of every k, sorted so that branch b is the
/// b-th smallest frequency (which is the optimal nearest-value pairing).
DispersionGrid dispersion_sweep(const QuadraticPencil& pencil, const std::vector<double>& k_values);

struct OraclePoint {
    double k = 0.0;
    double omega = 0.0;
    int branch = 0;
};

/// Interior extrema of the sampled branches: sign changes of the centred
/// difference slope, refined by parabolic interpolation on a shrinking
/// symmetric stencil until |dk| <= 1e-8 (1 + |k|). Kinks where two sorted
/// branches cross are discarded. Sorted by k, then omega.
std::vector<OraclePoint> zgv_oracle(const QuadraticPencil& pencil, const std::vector<double>& k_values);

/// Uniform grid with `count` points on [a, b].
std::vector<double> linspace(double a, double b, std::size_t count);

} // namespace zgv
