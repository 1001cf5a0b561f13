#pragma once

// Resolvents of truncated operators, directly and through the perturbation series
//   R - R0 = sum_{s>=0} (R0 V)^{s+1} R0,
// plus the brute-force check of the majorant chain sums against Kbar (Kbar W Kbar)^{t+1} Kbar.

#include <complex>

#include "hill/basis.hpp"

namespace hill {

inline constexpr double kMaxCondition = 1e12;

/// Solves (z - L) X = rhs. Throws SingularError when the condition estimate exceeds kMaxCondition.
Matrix solve_shifted(const Matrix& L, std::complex<double> z, const Matrix& rhs);

/// (z - L)^{-1}; throws SingularError if z - L is (numerically) singular or the
/// multiply-back residual exceeds 1e-10 * dim.
OperatorMatrix resolvent_direct(const OperatorMatrix& L, std::complex<double> z);

inline constexpr int kMaxSeriesOrder = 60;

/// (R0 V)^{s+1} R0 at z.
OperatorMatrix series_term(const PotentialSpec& spec, BoundaryCondition bc, int M, std::complex<double> z, int s);

struct SeriesResult {
    OperatorMatrix value;
    int terms_used = 0;
    double last_term_hs = 0.0;
    bool converged = false;
    double contraction_hs = 0.0;  // measured ||Kbar W Kbar||_HS at z
};

/// Partial sums of the series, stopping once a term's HS norm is <= tol or after s_max.
/// Throws ContractionError when ||Kbar_z W Kbar_z||_HS >= 1.
SeriesResult resolvent_diff_series(const PotentialSpec& spec, BoundaryCondition bc, int M, std::complex<double> z,
                                   double tol, int s_max);

struct ChainSum {
    double brute_force = 0.0;
    double matrix_entry = 0.0;
    long long tuples = 0;
};

inline constexpr long long kChainTupleBudget = 10'000'000;

/// Sum over i_1..i_t of B(z, m, i_1, ..., i_t, p) by enumeration, next to the (m, p)
/// entry of Kbar (Kbar W Kbar)^{t+1} Kbar.
ChainSum chain_sum_check(const PotentialSpec& spec, BoundaryCondition bc, int M, std::complex<double> z, int m,
                         int p, int t);

}  // namespace hill
