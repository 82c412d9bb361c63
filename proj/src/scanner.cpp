#include "zgv/scanner.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

#include "zgv/mfrd.hpp"

namespace zgv {

void ScanConfig::validate() const {
    if (!(k_a < k_b)) {
        throw InputError("scan: k_a must be smaller than k_b");
    }
    if (!(dk > 0.0)) {
        throw InputError("scan: dk must be positive");
    }
    if (!(delta > 0.0)) {
        throw InputError("scan: delta must be positive");
    }
    if (threads < 1) {
        throw InputError("scan: threads must be at least 1");
    }
    arnoldi.validate();
}

std::vector<ZgvPoint> trivial_zgv(const QuadraticPencil& pencil, double real_tol) {
    const auto modes = gep_omega(pencil, 0.0);
    double scale = 0.0;
    for (const auto& m : modes) {
        scale = std::max(scale, std::abs(m.omega2));
    }
    const double thr = real_tol * (1.0 + scale);
    std::vector<ZgvPoint> out;
    for (const auto& m : modes) {
        if (std::abs(m.omega2.imag()) > thr || m.omega2.real() < -thr) {
            continue;
        }
        ZgvPoint p;
        p.k = 0.0;
        p.omega = std::sqrt(std::max(m.omega2.real(), 0.0));
        p.u = m.u;
        const ComplexMatrix W = pencil.at(0.0, p.omega * p.omega);
        p.z = smallest_singular_triplets(W, 1).front().u_left;
        p.residual = (W * p.u).norm();
        p.classification = Classification::trivial_zgv;
        out.push_back(std::move(p));
    }
    // gaps after all frequencies are known
    for (auto& p : out) {
        double gap = std::numeric_limits<double>::infinity();
        bool self = false;
        for (const auto& m : modes) {
            const double d = std::abs(std::sqrt(m.omega2) - p.omega);
            if (!self && d <= thr) {
                self = true;
                continue;
            }
            gap = std::min(gap, d);
        }
        p.omega_gap = gap;
    }
    return out;
}

std::vector<ZgvPoint> deduplicate(std::vector<ZgvPoint> points, double dedup_tol, double k_b) {
    std::vector<ZgvPoint> kept;
    for (auto& p : points) {
        auto same = std::find_if(kept.begin(), kept.end(), [&](const ZgvPoint& q) {
            return std::abs(p.k - q.k) <= dedup_tol * (1.0 + std::abs(k_b)) &&
                   std::abs(p.omega - q.omega) <= dedup_tol * (1.0 + std::abs(p.omega));
        });
        if (same == kept.end()) {
            kept.push_back(std::move(p));
        } else if (p.residual < same->residual) {
            *same = std::move(p);
        }
    }
    std::sort(kept.begin(), kept.end(), [](const ZgvPoint& a, const ZgvPoint& b) {
        return a.k != b.k ? a.k < b.k : a.omega < b.omega;
    });
    return kept;
}

namespace {

std::optional<ShiftInvertCache> make_cache(const QuadraticPencil& pencil, double k0, double delta,
                                           std::vector<std::string>& failures) {
    try {
        return ShiftInvertCache(pencil, cplx(0.0, k0), delta);
    } catch (const EigenvalueCollision&) {
        const double nudged = k0 + 1e-6 * (1.0 + std::abs(k0));
        try {
            return ShiftInvertCache(pencil, cplx(0.0, nudged), delta);
        } catch (const NumericalError& e) {
            failures.push_back("target " + std::to_string(k0) + ": " + e.what());
        }
    } catch (const NumericalError& e) {
        failures.push_back("target " + std::to_string(k0) + ": " + e.what());
    }
    return std::nullopt;
}

ScanResult scan_sequential(const QuadraticPencil& pencil, const ScanConfig& cfg) {
    ScanResult res;
    RefineOptions ropts;
    ropts.tol = cfg.newton_tol;
    ropts.maxit = cfg.newton_maxit;
    ropts.restarts = cfg.newton_restarts;
    ropts.balance = false;
    ropts.classify.k_zero = cfg.k_zero * (1.0 + std::abs(cfg.k_b));

    std::vector<ZgvPoint> found;
    double k_max = -std::numeric_limits<double>::infinity();
    double k0 = cfg.k_a;
    while (k0 < cfg.k_b) {
        res.targets.push_back(k0);
        const auto cache = make_cache(pencil, k0, cfg.delta, res.failures);
        if (cache) {
            ArnoldiResult ar;
            try {
                ar = eigs_closest(*cache, cfg.arnoldi);
            } catch (const NumericalError& e) {
                res.failures.push_back("target " + std::to_string(k0) + ": " + e.what());
            }
            if (ar.status == ArnoldiStatus::no_convergence) {
                res.failures.push_back("target " + std::to_string(k0) + ": Arnoldi did not converge after " +
                                       std::to_string(ar.restarts) + " restarts");
            }
            RayleighWorkspace ws;
            for (const RitzPair& pair : ar.pairs) {
                CandidateRecord rec;
                rec.candidate.lambda = pair.lambda;
                rec.candidate.eta = pair.lambda * pair.lambda;
                rec.candidate.z = pair.z;
                rec.candidate.source_target = k0;
                try {
                    rec.candidate.mu = rayleigh_mu(pencil, cfg.delta, pair.z, ws);
                } catch (const DegenerateQuotient& e) {
                    rec.note = e.what();
                    ++res.prefiltered;
                    res.log.push_back(std::move(rec));
                    continue;
                }
                const cplx lambda = rec.candidate.lambda;
                const cplx mu = rec.candidate.mu;
                if (std::abs(lambda.real()) > cfg.prefilter_real * (1.0 + std::abs(lambda)) ||
                    std::abs(mu.imag()) > cfg.prefilter_imag * (1.0 + std::abs(mu))) {
                    rec.note = "pre-filter";
                    ++res.prefiltered;
                    res.log.push_back(std::move(rec));
                    continue;
                }
                rec.launched = true;
                // start from (Im lambda, Re mu); the sign of k is kept, w > 0 via the principal root
                rec.attempts = refine_candidate(pencil, cplx(0.0, lambda.imag()), cplx(mu.real(), 0.0), ropts);
                for (const RefineAttempt& a : rec.attempts) {
                    if (!a.converged) {
                        rec.note += rec.note.empty() ? a.message : "; " + a.message;
                        continue;
                    }
                    const ZgvPoint& p = a.point;
                    if (p.classification == Classification::zgv && p.k >= cfg.k_a && p.k <= cfg.k_b) {
                        found.push_back(p);
                        k_max = std::max(k_max, p.k);
                    }
                }
                res.log.push_back(std::move(rec));
            }
        }
        k0 = std::max(k0 + cfg.dk, 0.95 * k_max);
    }
    res.points = std::move(found);
    return res;
}

void unscale(ScanResult& res, const PencilBalance& b) {
    for (auto& p : res.points) {
        p = unscale(std::move(p), b);
    }
    for (double& t : res.targets) {
        t *= b.alpha;
    }
    for (auto& rec : res.log) {
        rec.candidate.lambda *= b.alpha;
        rec.candidate.eta *= b.alpha * b.alpha;
        rec.candidate.mu *= b.beta;
        rec.candidate.source_target *= b.alpha;
        for (auto& a : rec.attempts) {
            a.point = unscale(std::move(a.point), b);
        }
    }
}

ScanResult scan_balanced(const QuadraticPencil& pencil, const ScanConfig& config) {
    if (config.threads == 1) {
        return scan_sequential(pencil, config);
    }
    ScanResult res;
    {
        const int parts = config.threads;
        std::vector<ScanResult> partial(static_cast<std::size_t>(parts));
        std::vector<std::thread> workers;
        const double width = (config.k_b - config.k_a) / parts;
        for (int i = 0; i < parts; ++i) {
            ScanConfig sub = config;
            sub.threads = 1;
            sub.k_a = config.k_a + i * width;
            sub.k_b = i + 1 == parts ? config.k_b : config.k_a + (i + 1) * width;
            workers.emplace_back([&pencil, sub, &out = partial[static_cast<std::size_t>(i)]] {
                out = scan_sequential(pencil, sub);
            });
        }
        for (auto& w : workers) {
            w.join();
        }
        for (auto& p : partial) {
            res.points.insert(res.points.end(), p.points.begin(), p.points.end());
            res.targets.insert(res.targets.end(), p.targets.begin(), p.targets.end());
            std::move(p.log.begin(), p.log.end(), std::back_inserter(res.log));
            res.failures.insert(res.failures.end(), p.failures.begin(), p.failures.end());
            res.prefiltered += p.prefiltered;
        }
    }
    return res;
}

} // namespace

ScanResult scan(const QuadraticPencil& pencil, const ScanConfig& config) {
    config.validate();
    pencil.require_nonsingular_mass();

    ScanResult res;
    if (config.balance) {
        const PencilBalance b = pencil.balance();
        ScanConfig inner = config;
        inner.k_a /= b.alpha;
        inner.k_b /= b.alpha;
        inner.dk /= b.alpha;
        inner.newton_tol /= b.s;
        res = scan_balanced(pencil.scaled(b), inner);
        unscale(res, b);
    } else {
        res = scan_balanced(pencil, config);
    }
    if (config.include_trivial) {
        for (auto& p : trivial_zgv(pencil)) {
            res.points.push_back(std::move(p));
        }
    }
    res.points = deduplicate(std::move(res.points), config.dedup_tol, config.k_b);
    return res;
}

} // namespace zgv
