#pragma once

// Sweep of shift targets i*k0 across [k_a, k_b]: at every target the m
// eigenvalues of the MFRD problem closest to the target are computed, the
// nearly real ones are refined by Gauss-Newton and classified, and the target
// advances by max(k0 + dk, 0.95 * largest ZGV wavenumber found so far).

#include <string>
#include <vector>

#include "zgv/arnoldi.hpp"
#include "zgv/pencil.hpp"
#include "zgv/refine.hpp"

namespace zgv {

struct ScanConfig {
    double k_a = 0.0;
    double k_b = 1.0;
    double dk = 0.1;
    double delta = 1e-2;
    ArnoldiOptions arnoldi; ///< arnoldi.m is the number of eigenvalues per target
    double prefilter_real = 1e-2; ///< launch Gauss-Newton only if |Re lambda| <= this (1 + |lambda|)
    double prefilter_imag = 1e-2; ///< and |Im mu| <= this (1 + |mu|)
    double newton_tol = 0.0;      ///< absolute (balanced pencil); 0 selects 1e-10 * pencil scale
    int newton_maxit = 30;
    int newton_restarts = 3;
    double dedup_tol = 1e-6;
    double k_zero = 1e-4;         ///< trivial points: |k| <= k_zero (1 + k_b)
    bool include_trivial = true;
    bool balance = true;          ///< scan pencil.scaled(pencil.balance()); results are mapped back
    int threads = 1;              ///< > 1 scans disjoint sub-intervals concurrently

    /// Throws InputError unless k_a < k_b, dk > 0, m >= 1 and delta > 0.
    void validate() const;
};

struct Mep3Candidate {
    cplx lambda;
    cplx mu;
    cplx eta; ///< lambda^2
    ComplexVector z;
    double source_target = 0.0;
};

struct CandidateRecord {
    Mep3Candidate candidate;
    bool launched = false;    ///< passed the pre-filter
    std::string note;         ///< why it was skipped, or the refinement failures
    std::vector<RefineAttempt> attempts;
};

struct ScanResult {
    std::vector<ZgvPoint> points;          ///< zgv points in [k_a, k_b] plus trivial points, sorted by k
    std::vector<double> targets;           ///< k0 of every processed target, increasing
    std::vector<CandidateRecord> log;      ///< every MFRD candidate in processing order
    std::vector<std::string> failures;     ///< per-target Arnoldi / cache failures
    long prefiltered = 0;                  ///< candidates not launched
};

ScanResult scan(const QuadraticPencil& pencil, const ScanConfig& config);

/// k = 0 points: positive square roots of the real eigenvalues w^2 of
/// L0 u = -w^2 M u. `real_tol` bounds |Im w^2| relative to 1 + max |w^2|.
std::vector<ZgvPoint> trivial_zgv(const QuadraticPencil& pencil, double real_tol = 1e-6);

/// Merge points closer than dedup_tol (1 + k_b) in k and dedup_tol (1 + w) in
/// w, keeping the smaller residual; the result is sorted by k, then w.
std::vector<ZgvPoint> deduplicate(std::vector<ZgvPoint> points, double dedup_tol, double k_b);

} // namespace zgv
