#pragma once

// Reports built from projection deviations and the majorant sums.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hill/basis.hpp"
#include "hill/potential.hpp"
#include "hill/projections.hpp"

namespace hill {

/// Applies f to every item on `jobs` threads; results keep the input order.
/// The first failing item (in input order) is rethrown after all workers join.
template <class T, class F>
auto parallel_map(const std::vector<T>& items, int jobs, F f) -> std::vector<decltype(f(items.front()))> {
    using R = decltype(f(items.front()));
    std::vector<std::optional<R>> slots(items.size());
    std::vector<std::exception_ptr> errors(items.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
            try {
                slots[i].emplace(f(items[i]));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int count = std::max(1, std::min<int>(jobs, static_cast<int>(items.size())));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < count; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<R> out;
    out.reserve(items.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

/// Admissible disc indices for bc in [lo, hi].
std::vector<int> admissible_range(BoundaryCondition bc, int lo, int hi);

// ---------------------------------------------------------------------------
// Decay of projection deviations

struct DecayRow {
    int n = 0;
    double hs = 0.0;
    ProjectionMethod method = ProjectionMethod::Quadrature;
    double eigen_distance = 0.0;    // ||(P - P0)_quad - (P - P0)_eigen||_HS
    double operator_norm = 0.0;     // ||P - P0||
    double parseval_defect = 0.0;   // |sum_m ||(P - P0) e_m||^2 - hs^2|
    ProjectionDiagnostics diagnostics;
};

struct TailSum {
    int N = 0;
    double tail = 0.0;           // sum over rows N < n <= n_max of hs^2
    double operator_tail = 0.0;  // same with operator norms
};

struct DecayReport {
    BoundaryCondition bc = BoundaryCondition::PerPlus;
    std::string potential_label;
    int M = 0;
    std::vector<DecayRow> rows;  // sorted by n
    std::vector<TailSum> tail_sums;
    double fitted_slope = 0.0;   // least squares of log hs against log n over rows with hs > 0
};

struct DecayOptions {
    int n_min = 1;
    int nodes = 32;
    int jobs = 1;
    bool eigen_cross_check = true;
};

/// Throws InvalidArgument when the window rule fails; any per-n failure is rethrown
/// with the offending n prepended.
DecayReport decay_report(const PotentialSpec& spec, BoundaryCondition bc, int M, const std::vector<int>& N_grid,
                         int n_max, const DecayOptions& options = {});

/// Slope of the least-squares line through (log x, log y); NaN with fewer than two points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Window rule M >= 2 n_max + support_cutoff + 8; throws InvalidArgument naming both values.
void check_window_rule(const PotentialSpec& spec, int M, int n_max);

// ---------------------------------------------------------------------------
// Localization

struct LocalizationRow {
    int n = 0;
    int count = -1;  // -1 when the count could not be certified
    int expected = 0;
    std::string error;
};

struct LocalizationReport {
    BoundaryCondition bc = BoundaryCondition::PerPlus;
    std::vector<LocalizationRow> rows;
    /// Smallest tested n with every tested n' >= n correct; empty when the last tested n fails.
    std::optional<int> N_loc;
};

LocalizationReport localization_report(const PotentialSpec& spec, BoundaryCondition bc, int M, int n_lo, int n_hi,
                                       int jobs = 1);

// ---------------------------------------------------------------------------
// Spectral decomposition f = P^N f + sum_{n>N} P_n f

struct ReconstructionReport {
    std::string f_label;
    int N = 0;
    int n_max = 0;
    double f_norm = 0.0;
    double error_norm = 0.0;
    double ordered_sup = 0.0;        // max over K of ||ordered partial sum K||
    double unconditional_sup = 0.0;  // max over trials of the same for signed, permuted blocks
    int trials = 0;
    std::uint64_t seed = kDefaultSeed;
    std::vector<double> block_norms;  // ||P^N f||, then ||P_n f|| for each disc
};

struct ReconstructOptions {
    int trials = 100;
    std::uint64_t seed = kDefaultSeed;
    int jobs = 1;
};

/// f is indexed like the bc window of size M and must vanish outside |m| <= M/2.
ReconstructionReport reconstruct(const PotentialSpec& spec, BoundaryCondition bc, int M, const Vector& f, int N,
                                 int n_max, const ReconstructOptions& options = {}, const std::string& f_label = "f");

/// Unit-norm vector with seeded random coefficients on |m| <= band, zero elsewhere.
Vector random_band_limited(const TruncationWindow& window, int band, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Elementary inequalities

struct ElementaryChecks {
    double t0_lhs = 0.0;    // sum_{N < n <= N + 1e6} 1/n^2
    double t0_tail = 0.0;   // bound on the omitted terms
    double t0_rhs = 0.0;    // 1/N
    double t00_lhs = 0.0;   // sum over p in n + 2Z, p != +-n, |p| <= 1e4 of 1/(n^2 - p^2)^2
    double t00_rhs = 0.0;   // 4/n^2
    bool t0_holds = false;  // t0_lhs + t0_tail < t0_rhs
    bool t00_holds = false;
};

ElementaryChecks elementary_checks(int N, int n);

// ---------------------------------------------------------------------------
// Weighted convolution sums

enum class LemmaId { T0, T00, T1, T2, T3, T9, T33 };
std::string to_string(LemmaId id);
LemmaId parse_lemma_id(const std::string& text);

inline constexpr long long kDefaultLemmaBudget = 1'000'000'000;

struct LemmaReport {
    LemmaId id = LemmaId::T1;
    int N = 0;
    int window = 0;
    double lhs = 0.0;           // truncated sum
    double tail_bound = 0.0;    // bound on everything the truncation omits
    double r_term = 0.0;        // ||r||^2 / N (T1-T9); 1/N or 4/N^2 for T0/T00
    double tail_energy = 0.0;   // E_N(r)^2
    double bound = 0.0;         // right side without the absolute constant
    double fitted_ratio = 0.0;  // lhs / bound, 0 when both vanish
    long long terms = 0;
};

/// n runs over (N, window]; the support of r fixes the remaining indices and the free
/// index p obeys |p - n| <= window (T3) or |p| <= n + window (T9, T33).
/// Throws BudgetError when the term estimate exceeds `budget`.
LemmaReport lemma_sums(LemmaId id, const RSequence& r, int N, int window, long long budget = kDefaultLemmaBudget);

/// One report per N, sharing the per-n contributions.
std::vector<LemmaReport> lemma_grid(LemmaId id, const RSequence& r, const std::vector<int>& N_grid, int window,
                                    long long budget = kDefaultLemmaBudget);

// ---------------------------------------------------------------------------
// Contraction parameter on C_n

struct RhoRow {
    int n = 0;
    BoundaryCondition bc = BoundaryCondition::PerPlus;
    double measured_hs = 0.0;     // max over 8 points of C_n of ||Kbar W Kbar||_HS
    double tail_energy = 0.0;     // E_{sqrt n}(r)
    double r_term = 0.0;          // ||r||^2 / n
    double rho = 0.0;
    double ratio = 0.0;           // measured_hs / rho, 0 when rho = 0
    double r0_norm = 0.0;         // max over the same points of ||R0_z||
    bool in_window = false;       // +-n belongs to the window
};

/// Uses `bc` for every n, or the parity-matched periodic condition when bc is empty.
std::vector<RhoRow> rho_bound_study(const PotentialSpec& spec, std::optional<BoundaryCondition> bc,
                                    const std::vector<int>& n_grid, int M, int jobs = 1);

}  // namespace hill
