#pragma once

// Index lattices and dense truncated matrices in the free eigenbasis.
//
//   Per+  exp(i m x), m in 2Z        Per-  exp(i m x), m in 1+2Z
//   Dir   sqrt(2) sin(m x), m = 1, 2, ...
//
// All inner products are normalised by 1/pi on [0, pi], so the bases are orthonormal.

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "hill/potential.hpp"

namespace hill {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class BoundaryCondition { PerPlus, PerMinus, Dir };

std::string to_string(BoundaryCondition bc);
/// Accepts "per+", "per-", "dir" (and "perplus", "perminus").
BoundaryCondition parse_boundary_condition(const std::string& text);

/// True when disc index n belongs to the lattice of bc (even for Per+, odd for Per-).
bool admissible_disc_index(BoundaryCondition bc, int n);

/// The periodic (even n) or antiperiodic (odd n) condition whose lattice contains n.
BoundaryCondition periodic_bc_for(int n);

inline constexpr int kMaxWindow = 4096;

struct TruncationWindow {
    int M = 0;
    std::vector<int> indices;  // strictly increasing

    int dim() const noexcept { return static_cast<int>(indices.size()); }
    /// Position of lattice index m, or -1 if m is not kept.
    int position(int m) const noexcept;
    bool contains(int m) const noexcept { return position(m) >= 0; }
};

std::vector<int> basis_indices(BoundaryCondition bc, int M);
TruncationWindow make_window(BoundaryCondition bc, int M);

enum class MatrixLabel { Free, Full, V, W, KbarWKbar, Resolvent, Projection, Generic };

std::string to_string(MatrixLabel label);

struct OperatorMatrix {
    Matrix entries;
    TruncationWindow window;
    BoundaryCondition bc = BoundaryCondition::PerPlus;
    MatrixLabel label = MatrixLabel::Generic;

    int dim() const noexcept { return window.dim(); }
    /// Entry addressed by lattice indices (j, m).
    std::complex<double> at(int j, int m) const;
};

/// Hilbert-Schmidt (Frobenius) norm.
double hs_norm(const Matrix& a);
inline double hs_norm(const OperatorMatrix& a) { return hs_norm(a.entries); }
/// Largest singular value.
double operator_norm(const Matrix& a);

/// diag(m^2).
OperatorMatrix build_free_matrix(BoundaryCondition bc, int M);

/// Matrix of multiplication by v in the bc basis. For Dir the entries come from
/// integrating Q' by parts against products of sines.
OperatorMatrix build_v_matrix(const PotentialSpec& spec, BoundaryCondition bc, int M);

/// L = L0 + V.
OperatorMatrix build_operator_matrix(const PotentialSpec& spec, BoundaryCondition bc, int M);

/// Majorant W_{jm} = W(j - m) with W(k) = |k| r(k) for k != 0 and W(0) = |v0|.
OperatorMatrix build_w_matrix(const PotentialSpec& spec, BoundaryCondition bc, int M);

/// (1/pi) int_0^pi Q(x) sin(kx) dx evaluated from the q coefficients.
std::complex<double> dirichlet_sine_moment(const PotentialSpec& spec, int k);

struct KbarWKbar {
    OperatorMatrix matrix;
    double hs = 0.0;
};

inline constexpr double kFreeProximity = 1e-9;

/// Kbar_z W Kbar_z with entries W(j-m) / (|z-j^2|^{1/2} |z-m^2|^{1/2}).
KbarWKbar kbar_w_kbar(const PotentialSpec& spec, BoundaryCondition bc, int M, std::complex<double> z);

/// Free resolvent R0_z = diag(1 / (z - m^2)).
OperatorMatrix r0_diag(BoundaryCondition bc, int M, std::complex<double> z);

/// Row-major CSV, each entry written as "re,im".
void write_matrix_csv(std::ostream& os, const Matrix& a);

}  // namespace hill
