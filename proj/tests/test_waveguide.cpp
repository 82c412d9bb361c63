#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "zgv/refine.hpp"
#include "zgv/scanner.hpp"
#include "zgv/waveguide.hpp"

using namespace zgv;

namespace {

constexpr double kCt = 3200.0, kCl = 5900.0, kRho = 7900.0;

bool symmetric(const RealMatrix& A, double tol) { return (A - A.transpose()).norm() <= tol * std::max(A.norm(), 1e-300); }

bool spd(const RealMatrix& A) { return symmetric(A, 1e-12) && Eigen::LLT<RealMatrix>(A).info() == Eigen::Success; }

std::vector<double> frequencies(const QuadraticPencil& p, double k) {
    std::vector<double> w;
    for (const auto& m : gep_omega(p, k)) {
        w.push_back(std::sqrt(std::max(m.omega2.real(), 0.0)));
    }
    return w;
}

std::string four_digits(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

// Rayleigh-Lamb functions of a free isotropic plate of thickness h, scaled so
// that they are real for real omega (p^2 and q^2 may be negative).
double lamb_symmetric(double k, double w, double ct, double cl, double h) {
    const cplx p = std::sqrt(cplx(w * w / (cl * cl) - k * k));
    const cplx q = std::sqrt(cplx(w * w / (ct * ct) - k * k));
    auto sinc_q = q == 0.0 ? cplx(h / 2) : std::sin(q * h / 2.0) / q;
    const cplx d = std::pow(q * q - k * k, 2) * std::cos(p * h / 2.0) * sinc_q +
                   4.0 * k * k * p * std::sin(p * h / 2.0) * std::cos(q * h / 2.0);
    return d.real();
}

double lamb_antisymmetric(double k, double w, double ct, double cl, double h) {
    const cplx p = std::sqrt(cplx(w * w / (cl * cl) - k * k));
    const cplx q = std::sqrt(cplx(w * w / (ct * ct) - k * k));
    auto sinc_p = p == 0.0 ? cplx(h / 2) : std::sin(p * h / 2.0) / p;
    const cplx d = std::pow(q * q - k * k, 2) * sinc_p * std::cos(q * h / 2.0) +
                   4.0 * k * k * q * std::sin(q * h / 2.0) * std::cos(p * h / 2.0);
    return d.real();
}

bool sign_change(double a, double b) { return (a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0); }

PlateMaterial random_material(std::mt19937_64& rng) {
    PlateMaterial m;
    const RealMatrix B = oracle::random_real(6, 6, rng);
    m.C = B * B.transpose() + 0.5 * RealMatrix::Identity(6, 6);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    m.rho = u(rng);
    m.h = u(rng);
    return m;
}

} // namespace

TEST_CASE("example pencil structure") {
    const auto p = example21();
    CHECK(p.n() == 3);
    CHECK(symmetric(p.L0(), 0.0));
    CHECK((p.L1() + p.L1().transpose()).norm() == 0.0);
    CHECK(spd(p.L2()));
    CHECK(spd(p.M()));
    const ComplexMatrix W = evaluate_W(p, 0.4236, 0.3503);
    Eigen::JacobiSVD<ComplexMatrix> svd(W);
    const auto s = svd.singularValues();
    CHECK(s(2) <= 1e-3 * W.norm());
    CHECK(s(1) <= 1e-3 * W.norm());
}

TEST_CASE("reference strings") {
    namespace ref = example21_reference;
    CHECK(ref::zgv_k == "1.0642");
    CHECK(ref::zgv_omega == "0.2393");
    CHECK(ref::trivial_omega[0] == "0.2673");
    CHECK(ref::trivial_omega[1] == "0.4074");
    CHECK(ref::trivial_omega[2] == "1.0628");
    CHECK(ref::crossing_k == "0.4236");
    CHECK(ref::crossing_omega == "0.3503");

    const auto t = trivial_zgv(example21());
    REQUIRE(t.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(four_digits(t[i].omega) == ref::trivial_omega[i]);
    }
    const auto o = zgv_oracle(example21(), linspace(0.05, 2.0, 1951));
    REQUIRE(o.size() == 1);
    CHECK(four_digits(o[0].k) == ref::zgv_k);
    CHECK(four_digits(o[0].omega) == ref::zgv_omega);
}

TEST_CASE("GLL rule") {
    for (int p : {1, 2, 5, 12, 16}) {
        RealVector x, w;
        gll_rule(p, x, w);
        REQUIRE(x.size() == p + 1);
        CHECK(x(0) == -1.0);
        CHECK(x(p) == 1.0);
        for (int i = 0; i <= p; ++i) {
            CHECK(std::abs(x(i) + x(p - i)) <= 1e-14);
            if (i > 0) {
                CHECK(x(i) > x(i - 1));
            }
        }
        // exact for degree 2p - 1
        for (int deg = 0; deg <= 2 * p - 1; ++deg) {
            const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
            CHECK(std::abs(w.dot(x.array().pow(deg).matrix()) - exact) <= 1e-13);
        }
    }
}

TEST_CASE("plate structure") {
    const auto mat = PlateMaterial::isotropic(kRho, kCt, kCl, 1e-3);
    SUBCASE("in-plane free plate") {
        const auto p = assemble_plate(mat, {});
        CHECK(p.n() == 26);
        CHECK((p.L1() + p.L1().transpose()).norm() <= 1e-12 * p.L1().norm());
        CHECK(symmetric(p.L0(), 1e-12));
        CHECK(symmetric(p.L2(), 1e-12));
        CHECK(spd(p.M()));
        const auto w = frequencies(p, 0.0);
        const double scale = std::sqrt(p.L0().norm() / p.M().norm());
        CHECK(w[0] <= 1e-6 * scale);
        CHECK(w[1] <= 1e-6 * scale);
        CHECK(w[2] > 1e-3 * scale);
    }
    SUBCASE("sizes") {
        CHECK(assemble_plate(mat, {8, 1, Polarization::full, PlateBoundary::free_free}).n() == 27);
        CHECK(assemble_plate(mat, {8, 3, Polarization::in_plane, PlateBoundary::free_free}).n() == 50);
        CHECK(assemble_plate(mat, {8, 1, Polarization::in_plane, PlateBoundary::clamped_free}).n() == 16);
        CHECK(assemble_plate(mat, {8, 1, Polarization::in_plane, PlateBoundary::clamped_clamped}).n() == 14);
    }
    SUBCASE("invalid input") {
        auto bad = mat;
        bad.rho = 0.0;
        CHECK_THROWS_AS(assemble_plate(bad, {}), InvalidMaterial);
        bad = mat;
        bad.h = -1.0;
        CHECK_THROWS_AS(assemble_plate(bad, {}), InvalidMaterial);
        bad = mat;
        bad.C(0, 0) = -bad.C(0, 0);
        CHECK_THROWS_AS(assemble_plate(bad, {}), InvalidMaterial);
        bad = mat;
        bad.C(0, 1) += 1.0;
        CHECK_THROWS_AS(assemble_plate(bad, {}), InvalidMaterial);
        CHECK_THROWS_AS(assemble_plate(mat, {0, 1, Polarization::in_plane, PlateBoundary::free_free}), InputError);
    }
}

TEST_CASE("random anisotropic materials give Hermitian operators") {
    std::mt19937_64 rng(60);
    std::uniform_real_distribution<double> k(-5.0, 5.0), w(0.0, 5.0);
    for (int t = 0; t < 20; ++t) {
        const auto m = random_material(rng);
        const auto p = assemble_plate(m, {6, 2, Polarization::full, PlateBoundary::free_free});
        CHECK((p.L1() + p.L1().transpose()).norm() <= 1e-12 * p.L1().norm());
        CHECK(spd(p.M()));
        for (int s = 0; s < 10; ++s) {
            const ComplexMatrix W = evaluate_W(p, k(rng), w(rng));
            CHECK((W - W.adjoint()).norm() <= 1e-12 * W.norm());
        }
    }
}

TEST_CASE("free plate frequencies solve the Rayleigh-Lamb equations") {
    const double h = 1.0, ct = 1.0, cl = kCl / kCt;
    const auto p = assemble_plate(PlateMaterial::isotropic(1.0, ct, cl, h), {16, 1, Polarization::in_plane, PlateBoundary::free_free});
    for (double k : {0.5, 1.0, 3.0}) {
        const auto w = frequencies(p, k);
        for (std::size_t i = 0; i < 8; ++i) {
            const double lo = w[i] * (1.0 - 1e-8), hi = w[i] * (1.0 + 1e-8);
            const bool s = sign_change(lamb_symmetric(k, lo, ct, cl, h), lamb_symmetric(k, hi, ct, cl, h));
            const bool a = sign_change(lamb_antisymmetric(k, lo, ct, cl, h), lamb_antisymmetric(k, hi, ct, cl, h));
            INFO("k = " << k << ", omega = " << w[i]);
            CHECK((s || a));
        }
    }
}

TEST_CASE("shear-horizontal modes have the closed form") {
    const double h = 1.0, ct = 1.0, cl = kCl / kCt, k = 1.3;
    const double pi = std::acos(-1.0);
    auto has = [](const std::vector<double>& w, double x) {
        for (double v : w) {
            if (std::abs(v - x) <= 1e-9 * x) {
                return true;
            }
        }
        return false;
    };
    const auto mat = PlateMaterial::isotropic(1.0, ct, cl, h);
    const auto free = frequencies(assemble_plate(mat, {16, 1, Polarization::full, PlateBoundary::free_free}), k);
    const auto clamped = frequencies(assemble_plate(mat, {16, 1, Polarization::full, PlateBoundary::clamped_clamped}), k);
    for (int m = 0; m < 4; ++m) {
        const double w = ct * std::sqrt(k * k + std::pow(m * pi / h, 2));
        CHECK(has(free, w));
        if (m > 0) {
            CHECK(has(clamped, w));
        }
    }
}

TEST_CASE("self-convergence from order 12 to 16 at kh = 1") {
    const double h = 1e-3;
    const auto mat = PlateMaterial::isotropic(kRho, kCt, kCl, h);
    const auto a = frequencies(assemble_plate(mat, {12, 1, Polarization::in_plane, PlateBoundary::free_free}), 1.0 / h);
    const auto b = frequencies(assemble_plate(mat, {16, 1, Polarization::in_plane, PlateBoundary::free_free}), 1.0 / h);
    int checked = 0;
    for (std::size_t i = 0; checked < 5; ++i) {
        if (a[i] <= 0.0) {
            continue;
        }
        CHECK(std::abs(a[i] - b[i]) <= 1e-8 * b[i]);
        ++checked;
    }
}

TEST_CASE("dispersion sweep") {
    const auto p = example21();
    SUBCASE("k = 0 gives the cut-off frequencies") {
        const auto g = dispersion_sweep(p, {0.0, 0.5});
        REQUIRE(g.k_values.size() == 2);
        REQUIRE(g.omega_branches[0].size() == 3);
        CHECK(four_digits(g.omega_branches[0][0]) == "0.2673");
        CHECK(four_digits(g.omega_branches[0][1]) == "0.4074");
        CHECK(four_digits(g.omega_branches[0][2]) == "1.0628");
    }
    SUBCASE("single point") {
        const auto g = dispersion_sweep(p, {0.7});
        CHECK(g.omega_branches.size() == 1);
        CHECK(g.omega_branches[0].size() == 3);
    }
    SUBCASE("curves are symmetric in k") {
        const auto ks = linspace(0.0, 2.0, 41);
        std::vector<double> neg;
        for (auto it = ks.rbegin(); it != ks.rend(); ++it) {
            neg.push_back(-*it);
        }
        const auto a = dispersion_sweep(p, ks);
        const auto b = dispersion_sweep(p, neg);
        for (std::size_t i = 0; i < ks.size(); ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(std::abs(a.omega_branches[i][j] - b.omega_branches[ks.size() - 1 - i][j]) <= 1e-10);
            }
        }
        for (std::size_t i = 0; i < ks.size(); ++i) {
            for (std::size_t j = 1; j < 3; ++j) {
                CHECK(a.omega_branches[i][j] >= a.omega_branches[i][j - 1]);
            }
        }
    }
}

TEST_CASE("sampled-curve ZGV locator") {
    SUBCASE("monotone branches") {
        const RealVector d = Eigen::Vector3d(0.5, 1.0, 2.0);
        const QuadraticPencil p(-RealMatrix(d.asDiagonal()), RealMatrix::Zero(3, 3), RealMatrix::Identity(3, 3),
                                RealMatrix::Identity(3, 3));
        CHECK(zgv_oracle(p, linspace(0.05, 2.0, 400)).empty());
    }
    SUBCASE("grid refinement moves the extremum by at most 10 dk^2") {
        const auto a = zgv_oracle(example21(), linspace(0.05, 2.0, 1951));
        const auto b = zgv_oracle(example21(), linspace(0.05, 2.0, 3901));
        REQUIRE(a.size() == 1);
        REQUIRE(b.size() == 1);
        CHECK(std::abs(a[0].k - b[0].k) <= 10.0 * 1e-3 * 1e-3);
    }
    SUBCASE("crossings are not extrema") {
        // the example has a crossing near k = 0.4236 where sorted branches kink
        for (const auto& o : zgv_oracle(example21(), linspace(0.05, 2.0, 1951))) {
            CHECK(std::abs(o.k - 0.4236) > 1e-2);
        }
    }
    SUBCASE("plate agrees with the scanner") {
        const double h = 1.0;
        const auto p = assemble_plate(PlateMaterial::isotropic(1.0, 1.0, kCl / kCt, h),
                                      {8, 1, Polarization::in_plane, PlateBoundary::free_free});
        const auto ref = zgv_oracle(p, linspace(0.1, 6.0, 5901));
        ScanConfig c;
        c.k_a = 0.1;
        c.k_b = 6.0;
        c.dk = 0.1;
        c.include_trivial = false;
        const auto found = scan(p, c).points;
        REQUIRE(!ref.empty());
        CHECK(found.size() == ref.size());
        for (std::size_t i = 0; i < std::min(found.size(), ref.size()); ++i) {
            CHECK(std::abs(found[i].k - ref[i].k) <= 1e-6 * (1.0 + c.k_b));
            CHECK(std::abs(found[i].omega - ref[i].omega) <= 1e-6 * (1.0 + ref[i].omega));
        }
    }
}

TEST_CASE("linspace") {
    const auto x = linspace(1.0, 2.0, 5);
    REQUIRE(x.size() == 5);
    CHECK(x.front() == 1.0);
    CHECK(x.back() == 2.0);
    CHECK(x[2] == 1.5);
    CHECK(linspace(3.0, 4.0, 1) == std::vector<double>{3.0});
}
