#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "zgv/scanner.hpp"
#include "zgv/waveguide.hpp"

using namespace zgv;

namespace {

ScanConfig example_config(double k_a = 0.05, double k_b = 2.0) {
    ScanConfig c;
    c.k_a = k_a;
    c.k_b = k_b;
    c.dk = 0.1;
    c.delta = 1e-2;
    c.arnoldi.m = 8;
    return c;
}

std::vector<ZgvPoint> of_class(const std::vector<ZgvPoint>& pts, Classification c) {
    std::vector<ZgvPoint> out;
    for (const auto& p : pts) {
        if (p.classification == c) {
            out.push_back(p);
        }
    }
    return out;
}

ZgvPoint point(double k, double omega, double residual) {
    ZgvPoint p;
    p.k = k;
    p.omega = omega;
    p.residual = residual;
    p.classification = Classification::zgv;
    return p;
}

} // namespace

TEST_CASE("example scan") {
    const auto p = example21();
    const ScanResult r = scan(p, example_config());
    const auto zgv = of_class(r.points, Classification::zgv);
    REQUIRE(zgv.size() == 1);
    CHECK(std::abs(zgv[0].k - 1.0642) <= 5e-5);
    CHECK(std::abs(zgv[0].omega - 0.2393) <= 5e-5);

    const auto trivial = of_class(r.points, Classification::trivial_zgv);
    REQUIRE(trivial.size() == 3);
    const double want[] = {0.2673, 0.4074, 1.0628};
    for (int i = 0; i < 3; ++i) {
        CHECK(trivial[static_cast<std::size_t>(i)].k == 0.0);
        CHECK(std::abs(trivial[static_cast<std::size_t>(i)].omega - want[i]) <= 5e-5);
    }

    bool crossing_logged = false;
    for (const auto& rec : r.log) {
        for (const auto& a : rec.attempts) {
            const bool near = std::abs(a.point.k - 0.4236) <= 5e-4 && std::abs(a.point.omega - 0.3503) <= 5e-4;
            if (a.converged && near) {
                CHECK(a.point.classification != Classification::zgv);
                crossing_logged = crossing_logged || a.point.classification == Classification::crossing;
            }
        }
    }
    CHECK(crossing_logged);
    CHECK(r.failures.empty());
}

TEST_CASE("targets increase strictly and end past k_b") {
    const auto r = scan(example21(), example_config());
    REQUIRE(!r.targets.empty());
    CHECK(r.targets.front() == 0.05);
    for (std::size_t i = 1; i < r.targets.size(); ++i) {
        CHECK(r.targets[i] > r.targets[i - 1]);
    }
    CHECK(r.targets.back() < 2.0);
    CHECK(r.targets.back() + 0.1 >= 2.0 - 1e-12);
}

TEST_CASE("interval without extrema") {
    const auto p = example21();
    auto c = example_config(1.5, 2.0);
    c.include_trivial = false;
    CHECK(scan(p, c).points.empty());
    // the sampled curves confirm it
    CHECK(zgv_oracle(p, linspace(1.5, 2.0, 501)).empty());
}

TEST_CASE("degenerate interval") {
    auto c = example_config(2.0 - 1e-9, 2.0);
    ScanResult r;
    CHECK_NOTHROW(r = scan(example21(), c));
    CHECK(r.targets.size() <= 1);
}

TEST_CASE("invalid configuration") {
    const auto p = example21();
    auto c = example_config(1.0, 1.0);
    CHECK_THROWS_AS(scan(p, c), InputError);
    c = example_config();
    c.dk = 0.0;
    CHECK_THROWS_AS(scan(p, c), InputError);
    c = example_config();
    c.delta = -1.0;
    CHECK_THROWS_AS(scan(p, c), InputError);
    c = example_config();
    c.arnoldi.m = 0;
    CHECK_THROWS_AS(scan(p, c), InputError);
}

TEST_CASE("scans are deterministic") {
    const auto p = example21();
    const auto a = scan(p, example_config());
    const auto b = scan(p, example_config());
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].k == b.points[i].k);
        CHECK(a.points[i].omega == b.points[i].omega);
        CHECK(a.points[i].residual == b.points[i].residual);
    }
    CHECK(a.targets == b.targets);
}

TEST_CASE("balanced and plain scans agree") {
    const auto p = example21();
    auto c = example_config();
    const auto a = scan(p, c);
    c.balance = false;
    const auto b = scan(p, c);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(std::abs(a.points[i].k - b.points[i].k) <= 1e-9);
        CHECK(std::abs(a.points[i].omega - b.points[i].omega) <= 1e-9);
    }
}

TEST_CASE("threaded scan finds the same points") {
    const auto p = example21();
    auto c = example_config();
    const auto a = scan(p, c);
    c.threads = 3;
    const auto b = scan(p, c);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(std::abs(a.points[i].k - b.points[i].k) <= 1e-9);
        CHECK(std::abs(a.points[i].omega - b.points[i].omega) <= 1e-9);
    }
}

TEST_CASE("deduplication") {
    SUBCASE("merges within tolerance and keeps the smaller residual") {
        const auto out = deduplicate({point(1.0, 0.5, 1e-9), point(1.0 + 1e-7, 0.5, 1e-12), point(1.1, 0.5, 1e-9)},
                                     1e-6, 2.0);
        REQUIRE(out.size() == 2);
        CHECK(out[0].residual == 1e-12);
        CHECK(out[1].k == 1.1);
    }
    SUBCASE("k tolerance scales with the interval end") {
        CHECK(deduplicate({point(1.0, 0.5, 0.0), point(1.0 + 5e-6, 0.5, 0.0)}, 1e-6, 2.0).size() == 2);
        CHECK(deduplicate({point(1.0, 0.5, 0.0), point(1.0 + 5e-6, 0.5, 0.0)}, 1e-6, 9.0).size() == 1);
    }
    SUBCASE("same k, different frequency") {
        CHECK(deduplicate({point(0.0, 0.5, 0.0), point(0.0, 0.6, 0.0)}, 1e-6, 2.0).size() == 2);
    }
    SUBCASE("sorted and idempotent") {
        const auto once = deduplicate({point(2.0, 0.1, 0.0), point(1.0, 0.3, 0.0), point(1.0, 0.2, 0.0)}, 1e-6, 2.0);
        REQUIRE(once.size() == 3);
        CHECK(once[0].omega == 0.2);
        CHECK(once[1].omega == 0.3);
        CHECK(once[2].k == 2.0);
        CHECK(deduplicate(once, 1e-6, 2.0).size() == 3);
    }
    SUBCASE("scan output has no near duplicates") {
        auto c = example_config();
        c.dk = 0.02; // many overlapping targets
        const auto pts = scan(example21(), c).points;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                const bool close = std::abs(pts[i].k - pts[j].k) <= 1e-6 * 3.0 &&
                                   std::abs(pts[i].omega - pts[j].omega) <= 1e-6 * (1.0 + pts[i].omega);
                CHECK(!close);
            }
        }
    }
}

TEST_CASE("trivial points") {
    SUBCASE("example") {
        const auto t = trivial_zgv(example21());
        REQUIRE(t.size() == 3);
        CHECK(std::abs(t[0].omega - 0.2673) <= 5e-5);
        CHECK(std::abs(t[1].omega - 0.4074) <= 5e-5);
        CHECK(std::abs(t[2].omega - 1.0628) <= 5e-5);
        for (const auto& p : t) {
            CHECK(p.classification == Classification::trivial_zgv);
            CHECK(p.residual <= 1e-12);
        }
    }
    SUBCASE("L0 = -I, M = I") {
        const RealMatrix I = RealMatrix::Identity(4, 4);
        const auto t = trivial_zgv(QuadraticPencil(-I, RealMatrix::Zero(4, 4), I, I));
        REQUIRE(t.size() == 4);
        for (const auto& p : t) {
            CHECK(std::abs(p.omega - 1.0) <= 1e-14);
        }
    }
    SUBCASE("free plate rigid-body modes") {
        const auto plate = assemble_plate(PlateMaterial::isotropic(7900.0, 3200.0, 5900.0, 1e-3), {});
        const auto t = trivial_zgv(plate);
        const double scale = std::sqrt(plate.L0().norm() / plate.M().norm());
        int rigid = 0;
        for (const auto& p : t) {
            rigid += p.omega <= 1e-6 * scale;
        }
        CHECK(rigid == 2);
        CHECK(t.size() == static_cast<std::size_t>(plate.n()));
    }
}

TEST_CASE("scanner agrees with the sampled-curve locator") {
    // strong skew coupling bends the curves into extrema; some branches
    // also reach negative omega^2, whose extrema must not be reported
    std::mt19937_64 rng(50);
    std::size_t total = 0;
    for (int t = 0; t < 6; ++t) {
        const auto q = oracle::random_pencil(4, rng);
        const QuadraticPencil p(q.L0(), (t < 3 ? 4.0 : 8.0) * q.L1(), q.L2(), q.M());
        ScanConfig c;
        c.k_a = 0.05;
        c.k_b = 3.0;
        c.dk = 0.1;
        c.include_trivial = false;
        const auto found = scan(p, c).points;
        const auto ref = zgv_oracle(p, linspace(c.k_a, c.k_b, 2951));
        // points near the ends of the interval are ambiguous for both methods
        std::vector<OraclePoint> interior;
        for (const auto& o : ref) {
            if (o.k > c.k_a + 1e-2 && o.k < c.k_b - 1e-2) {
                interior.push_back(o);
            }
        }
        std::size_t found_interior = 0;
        for (const auto& f : found) {
            found_interior += f.k > c.k_a + 1e-2 && f.k < c.k_b - 1e-2;
        }
        CHECK(found_interior == interior.size());
        total += interior.size();
        for (const auto& o : interior) {
            bool hit = false;
            for (const auto& f : found) {
                hit = hit || (std::abs(f.k - o.k) <= 1e-6 * (1.0 + o.k) && std::abs(f.omega - o.omega) <= 1e-6 * (1.0 + o.omega));
            }
            CHECK(hit);
        }
    }
    CHECK(total >= 6);
}
