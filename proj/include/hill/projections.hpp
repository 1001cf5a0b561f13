#pragma once

// Riesz projections of truncated Hill operators.
//
// Three independent routes to P_n - P_n^0:
//   Quadrature  trapezoidal rule on C_n = {|z - n^2| = n} (composite Gauss-Legendre on rectangles)
//   Eigen       right eigenvectors paired with the rows of their inverse
//   Series      termwise contour integration of sum_s (R0 V)^{s+1} R0

#include <complex>
#include <variant>
#include <vector>

#include "hill/basis.hpp"

namespace hill {

struct QuadNode {
    std::complex<double> z;
    std::complex<double> weight;  // includes dz / (2 pi i)
};

struct Circle {
    std::complex<double> center;
    double radius = 0.0;
};

struct Rectangle {
    double re_min = 0.0;
    double re_max = 0.0;
    double im_abs = 0.0;
};

class ContourSpec {
public:
    /// Trapezoidal rule with `nodes` points, angularly offset by half a step.
    static ContourSpec circle(std::complex<double> center, double radius, int nodes = 32);
    /// C_n with center n^2 and radius n.
    static ContourSpec disc(int n, int nodes = 32);
    /// Counterclockwise boundary of {re_min < Re z < re_max, |Im z| < im_abs}; each side is split
    /// into panels no longer than im_abs, each carrying a `nodes`-point Gauss-Legendre rule.
    static ContourSpec rectangle(double re_min, double re_max, double im_abs, int nodes = 16);

    const std::variant<Circle, Rectangle>& shape() const noexcept { return shape_; }
    bool is_circle() const noexcept { return std::holds_alternative<Circle>(shape_); }
    /// Nodes per circle, or Gauss-Legendre order per rectangle panel.
    int nodes() const noexcept { return nodes_; }
    int total_nodes() const;

    std::vector<QuadNode> quadrature() const;
    double length() const;
    double distance_to_path(std::complex<double> z) const;
    /// Strict interior.
    bool encloses(std::complex<double> z) const;
    ContourSpec with_nodes(int nodes) const;

private:
    ContourSpec(std::variant<Circle, Rectangle> shape, int nodes);
    std::variant<Circle, Rectangle> shape_;
    int nodes_;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

enum class ProjectionMethod { Quadrature, Eigen, Series };
std::string to_string(ProjectionMethod method);

struct ProjectionDiagnostics {
    int nodes = 0;
    double idempotency_defect = 0.0;
    double commutation_defect = 0.0;
    double doubling_change = 0.0;
    double eigvec_condition = 1.0;
    double min_eigen_distance = 0.0;  // closest eigenvalue to the contour (or disc boundary)
    int series_terms = 0;
    double series_tail_hs = 0.0;      // HS norm of the last integrated series term
    double max_contraction_hs = 0.0;  // max over nodes of ||Kbar W Kbar||_HS
    bool fallback = false;           // eigen route fell back to quadrature
    std::vector<double> term_hs;      // HS norm of each integrated series term
};

struct ProjectionResult {
    int n = 0;  // disc index, or N for the rectangle projection
    ProjectionMethod method = ProjectionMethod::Quadrature;
    OperatorMatrix matrix;     // P
    OperatorMatrix deviation;  // P - P^0
    double hs_deviation = 0.0;
    ProjectionDiagnostics diagnostics;
};

/// Rank-2 (Per+-) or rank-1 (Dir) indicator of the free indices +-n.
OperatorMatrix free_projection(BoundaryCondition bc, int M, int n);

/// Indicator of the free indices with m^2 strictly inside the contour.
OperatorMatrix free_projection(const TruncationWindow& window, BoundaryCondition bc, const ContourSpec& contour);

enum class QuadratureMode {
    FreeSplit,     // P = P^0 + quad[(z - L)^{-1} V R0(z)]
    FullResolvent  // P = quad[(z - L)^{-1}]
};

struct QuadratureOptions {
    QuadratureMode mode = QuadratureMode::FreeSplit;
    double doubling_tol = 1e-8;
    bool adaptive = false;  // keep doubling until the change is below doubling_tol
    int max_nodes = 2048;
    double idempotency_tol = 1e-7;
};

Eigen::VectorXcd eigenvalues(const OperatorMatrix& L);

ProjectionResult riesz_projection_quadrature(const OperatorMatrix& L, const ContourSpec& contour,
                                             const QuadratureOptions& options = {});

/// Quadrature on C_n.
ProjectionResult riesz_projection_disc(const OperatorMatrix& L, int n, int nodes = 32,
                                       const QuadratureOptions& options = {});

struct EigenOptions {
    double condition_limit = 1e10;
    double idempotency_tol = 1e-7;
    int fallback_nodes = 32;
};

ProjectionResult riesz_projection_eigen(const OperatorMatrix& L, std::complex<double> disc_center, double disc_radius,
                                        const EigenOptions& options = {});

/// Eigen route on C_n.
ProjectionResult riesz_projection_eigen_disc(const OperatorMatrix& L, int n, const EigenOptions& options = {});

ProjectionResult projection_diff_series(const PotentialSpec& spec, BoundaryCondition bc, int M, int n, int s_max,
                                        int nodes = 32);

/// Closed-form value of the (s, t) = (0, 0) double contour integral for e_m, summing p over the window.
double a00_closed_form(const PotentialSpec& spec, BoundaryCondition bc, int M, int n, int m);

/// The same quantity by a nested trapezoidal rule over C_n x C_n, normalised by (2 pi i)^{-2}.
double a00_double_contour(const PotentialSpec& spec, BoundaryCondition bc, int M, int n, int m, int nodes = 64);

/// Projection onto the spectrum inside R_N = {-N < Re z < N^2 + N, |Im z| < N}.
ProjectionResult p_upper_rectangle(const OperatorMatrix& L, int N, int nodes_per_side = 16,
                                   const QuadratureOptions& options = {});

/// Number of eigenvalues (with algebraic multiplicity) of L strictly inside the disc,
/// with a 1e-6 * radius exclusion band around the boundary.
int disc_eigen_count(const OperatorMatrix& L, std::complex<double> center, double radius);

/// Rounded trace of the quadrature projection on C_n, cross-checked against eigenvalue enumeration.
int count_in_disc(const OperatorMatrix& L, int n);

}  // namespace hill
