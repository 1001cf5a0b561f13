#include "hill/projections.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "hill/error.hpp"
#include "hill/resolvent.hpp"

namespace hill {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string fmt_z(std::complex<double> z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "(%.10g,%.10g)", z.real(), z.imag());
    return buf;
}

double segment_distance(std::complex<double> z, std::complex<double> a, std::complex<double> b) {
    const std::complex<double> ab = b - a;
    const double t = std::clamp(((z - a) * std::conj(ab)).real() / std::norm(ab), 0.0, 1.0);
    return std::abs(z - (a + t * ab));
}

struct Segment {
    std::complex<double> from;
    std::complex<double> to;
};

std::vector<Segment> rectangle_sides(const Rectangle& r) {
    const std::complex<double> bl{r.re_min, -r.im_abs}, br{r.re_max, -r.im_abs};
    const std::complex<double> tr{r.re_max, r.im_abs}, tl{r.re_min, r.im_abs};
    return {{bl, br}, {br, tr}, {tr, tl}, {tl, bl}};
}

int panels_for(const Segment& s, double panel_length) {
    return std::max(1, static_cast<int>(std::ceil(std::abs(s.to - s.from) / panel_length - 1e-12)));
}

Matrix free_part(const TruncationWindow& window) {
    const int d = window.dim();
    Matrix f = Matrix::Zero(d, d);
    for (int a = 0; a < d; ++a) {
        const double m = window.indices[a];
        f(a, a) = m * m;
    }
    return f;
}

double idempotency_defect(const Matrix& p) { return hs_norm(p * p - p); }
double commutation_defect(const Matrix& l, const Matrix& p) { return hs_norm(l * p - p * l); }

bool is_hermitian(const Matrix& a) {
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * scale;
}

void check_contour_clearance(const OperatorMatrix& L, const ContourSpec& contour, QuadratureMode mode,
                             double& min_distance) {
    const double band = contour.length() / (20.0 * contour.total_nodes());
    const Eigen::VectorXcd eig = eigenvalues(L);
    min_distance = INFINITY;
    for (Eigen::Index k = 0; k < eig.size(); ++k) {
        const double dist = contour.distance_to_path(eig(k));
        min_distance = std::min(min_distance, dist);
        if (dist < band) {
            throw ProximityError("quadrature: eigenvalue " + fmt_z(eig(k)) + " lies within " + fmt_double(dist) +
                                 " of the contour (exclusion band " + fmt_double(band) + ")");
        }
    }
    if (mode == QuadratureMode::FreeSplit) {
        for (int m : L.window.indices) {
            const double dist = contour.distance_to_path(double(m) * m);
            if (dist < band) {
                throw ProximityError("quadrature: free eigenvalue " + std::to_string(m) + "^2 lies within " +
                                     fmt_double(dist) + " of the contour");
            }
        }
    }
}

// Returns P for one node set.
Matrix quadrature_pass(const OperatorMatrix& L, const ContourSpec& contour, QuadratureMode mode,
                       const Matrix& free_proj) {
    const int d = L.dim();
    const std::vector<QuadNode> nodes = contour.quadrature();
    Matrix acc = Matrix::Zero(d, d);
    if (mode == QuadratureMode::FullResolvent) {
        const Matrix eye = Matrix::Identity(d, d);
        for (const auto& node : nodes) acc += node.weight * solve_shifted(L.entries, node.z, eye);
        return acc;
    }
    // R - R0 = R V R0, so only the correction is integrated; P^0 is exact.
    const Matrix v = L.entries - free_part(L.window);
    Eigen::VectorXcd r0(d);
    for (const auto& node : nodes) {
        for (int a = 0; a < d; ++a) {
            const double m = L.window.indices[a];
            r0(a) = 1.0 / (node.z - m * m);
        }
        const Matrix rhs = v * r0.asDiagonal();
        acc += node.weight * solve_shifted(L.entries, node.z, rhs);
    }
    return free_proj + acc;
}

ProjectionResult finish(const OperatorMatrix& L, Matrix p, const Matrix& free_proj, ProjectionMethod method, int n,
                        ProjectionDiagnostics diag, double idempotency_tol) {
    ProjectionResult out;
    out.n = n;
    out.method = method;
    diag.idempotency_defect = idempotency_defect(p);
    diag.commutation_defect = commutation_defect(L.entries, p);
    out.deviation = OperatorMatrix{p - free_proj, L.window, L.bc, MatrixLabel::Projection};
    out.matrix = OperatorMatrix{std::move(p), L.window, L.bc, MatrixLabel::Projection};
    out.hs_deviation = hs_norm(out.deviation);
    out.diagnostics = std::move(diag);
    if (!(out.diagnostics.idempotency_defect <= idempotency_tol)) {
        throw ConvergenceError(to_string(method) + " projection (n=" + std::to_string(n) +
                               ") failed the idempotency check: ||P^2 - P||_HS = " +
                               fmt_double(out.diagnostics.idempotency_defect));
    }
    return out;
}

int disc_index_of(const ContourSpec& contour) {
    if (const auto* c = std::get_if<Circle>(&contour.shape())) {
        const double n = c->radius;
        if (n == std::round(n) && c->center == std::complex<double>(n * n, 0.0)) return static_cast<int>(n);
    }
    return 0;
}

}  // namespace

ContourSpec::ContourSpec(std::variant<Circle, Rectangle> shape, int nodes) : shape_(shape), nodes_(nodes) {
    if (nodes_ < 8) throw InvalidArgument("contour: at least 8 nodes required, got " + std::to_string(nodes_));
    if (const auto* c = std::get_if<Circle>(&shape_)) {
        if (!(c->radius > 0.0)) throw InvalidArgument("contour: circle radius must be positive");
    } else {
        const auto& r = std::get<Rectangle>(shape_);
        if (!(r.re_min < r.re_max)) throw InvalidArgument("contour: rectangle needs re_min < re_max");
        if (!(r.im_abs > 0.0)) throw InvalidArgument("contour: rectangle half-height must be positive");
    }
}

ContourSpec ContourSpec::circle(std::complex<double> center, double radius, int nodes) {
    return ContourSpec(Circle{center, radius}, nodes);
}

ContourSpec ContourSpec::disc(int n, int nodes) {
    if (n < 1) throw InvalidArgument("disc contour: n must be >= 1");
    return circle(double(n) * n, n, nodes);
}

ContourSpec ContourSpec::rectangle(double re_min, double re_max, double im_abs, int nodes) {
    return ContourSpec(Rectangle{re_min, re_max, im_abs}, nodes);
}

int ContourSpec::total_nodes() const {
    if (is_circle()) return nodes_;
    const auto& r = std::get<Rectangle>(shape_);
    int panels = 0;
    for (const auto& side : rectangle_sides(r)) panels += panels_for(side, r.im_abs);
    return panels * nodes_;
}

std::vector<QuadNode> ContourSpec::quadrature() const {
    std::vector<QuadNode> out;
    if (const auto* c = std::get_if<Circle>(&shape_)) {
        out.reserve(nodes_);
        for (int j = 0; j < nodes_; ++j) {
            const double theta = 2.0 * std::numbers::pi * (j + 0.5) / nodes_;
            const std::complex<double> e = std::polar(1.0, theta);
            out.push_back({c->center + c->radius * e, (c->radius / nodes_) * e});
        }
        return out;
    }
    const auto& r = std::get<Rectangle>(shape_);
    std::vector<double> x, w;
    gauss_legendre(nodes_, x, w);
    for (const auto& side : rectangle_sides(r)) {
        const int panels = panels_for(side, r.im_abs);
        const std::complex<double> step = (side.to - side.from) / double(panels);
        for (int k = 0; k < panels; ++k) {
            const std::complex<double> a = side.from + double(k) * step;
            const std::complex<double> mid = a + 0.5 * step;
            for (std::size_t q = 0; q < x.size(); ++q) {
                out.push_back({mid + 0.5 * step * x[q], w[q] * 0.5 * step / (2.0 * std::numbers::pi * kI)});
            }
        }
    }
    return out;
}

double ContourSpec::length() const {
    if (const auto* c = std::get_if<Circle>(&shape_)) return 2.0 * std::numbers::pi * c->radius;
    const auto& r = std::get<Rectangle>(shape_);
    return 2.0 * (r.re_max - r.re_min) + 4.0 * r.im_abs;
}

double ContourSpec::distance_to_path(std::complex<double> z) const {
    if (const auto* c = std::get_if<Circle>(&shape_)) return std::abs(std::abs(z - c->center) - c->radius);
    double best = INFINITY;
    for (const auto& side : rectangle_sides(std::get<Rectangle>(shape_))) {
        best = std::min(best, segment_distance(z, side.from, side.to));
    }
    return best;
}

bool ContourSpec::encloses(std::complex<double> z) const {
    if (const auto* c = std::get_if<Circle>(&shape_)) return std::abs(z - c->center) < c->radius;
    const auto& r = std::get<Rectangle>(shape_);
    return z.real() > r.re_min && z.real() < r.re_max && std::abs(z.imag()) < r.im_abs;
}

ContourSpec ContourSpec::with_nodes(int nodes) const { return ContourSpec(shape_, nodes); }

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order < 1) throw InvalidArgument("gauss_legendre: order must be >= 1");
    nodes.assign(order, 0.0);
    weights.assign(order, 0.0);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (order == 1) p0 = 1.0;
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = weights[order - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

std::string to_string(ProjectionMethod method) {
    switch (method) {
        case ProjectionMethod::Quadrature: return "Quadrature";
        case ProjectionMethod::Eigen: return "Eigen";
        case ProjectionMethod::Series: return "Series";
    }
    return "?";
}

OperatorMatrix free_projection(BoundaryCondition bc, int M, int n) {
    if (!admissible_disc_index(bc, n)) {
        throw InvalidArgument("free_projection: disc index n=" + std::to_string(n) + " has the wrong parity for " +
                              to_string(bc));
    }
    OperatorMatrix out{Matrix(), make_window(bc, M), bc, MatrixLabel::Projection};
    const int d = out.dim();
    out.entries = Matrix::Zero(d, d);
    std::vector<int> targets{n};
    if (bc != BoundaryCondition::Dir) targets.push_back(-n);
    for (int m : targets) {
        const int a = out.window.position(m);
        if (a < 0) {
            throw InvalidArgument("free_projection: index " + std::to_string(m) + " lies outside the window M=" +
                                  std::to_string(M));
        }
        out.entries(a, a) = 1.0;
    }
    return out;
}

OperatorMatrix free_projection(const TruncationWindow& window, BoundaryCondition bc, const ContourSpec& contour) {
    OperatorMatrix out{Matrix::Zero(window.dim(), window.dim()), window, bc, MatrixLabel::Projection};
    for (int a = 0; a < window.dim(); ++a) {
        const double m = window.indices[a];
        if (contour.encloses(m * m)) out.entries(a, a) = 1.0;
    }
    return out;
}

Eigen::VectorXcd eigenvalues(const OperatorMatrix& L) {
    if (is_hermitian(L.entries)) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(L.entries, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw ConvergenceError("eigensolver failed");
        return es.eigenvalues().cast<std::complex<double>>();
    }
    Eigen::ComplexEigenSolver<Matrix> es(L.entries, false);
    if (es.info() != Eigen::Success) throw ConvergenceError("eigensolver failed");
    return es.eigenvalues();
}

ProjectionResult riesz_projection_quadrature(const OperatorMatrix& L, const ContourSpec& contour,
                                             const QuadratureOptions& options) {
    ProjectionDiagnostics diag;
    check_contour_clearance(L, contour, options.mode, diag.min_eigen_distance);
    const Matrix free_proj = free_projection(L.window, L.bc, contour).entries;

    ContourSpec current = contour;
    Matrix p = quadrature_pass(L, current, options.mode, free_proj);
    for (;;) {
        const ContourSpec finer = current.with_nodes(2 * current.nodes());
        Matrix p2 = quadrature_pass(L, finer, options.mode, free_proj);
        diag.doubling_change = hs_norm(p2 - p);
        if (diag.doubling_change <= options.doubling_tol) {
            if (options.adaptive) {
                p = std::move(p2);
                current = finer;
            }
            break;
        }
        if (!options.adaptive || 2 * finer.nodes() > options.max_nodes) {
            throw ConvergenceError("quadrature did not converge: doubling " + std::to_string(current.nodes()) +
                                   " nodes changed P by " + fmt_double(diag.doubling_change) + " (tolerance " +
                                   fmt_double(options.doubling_tol) + ")");
        }
        p = std::move(p2);
        current = finer;
    }
    diag.nodes = current.total_nodes();
    return finish(L, std::move(p), free_proj, ProjectionMethod::Quadrature, disc_index_of(contour), std::move(diag),
                  options.idempotency_tol);
}

ProjectionResult riesz_projection_disc(const OperatorMatrix& L, int n, int nodes, const QuadratureOptions& options) {
    ProjectionResult out = riesz_projection_quadrature(L, ContourSpec::disc(n, nodes), options);
    out.n = n;
    return out;
}

ProjectionResult riesz_projection_eigen(const OperatorMatrix& L, std::complex<double> disc_center, double disc_radius,
                                        const EigenOptions& options) {
    if (!(disc_radius > 0.0)) throw InvalidArgument("riesz_projection_eigen: radius must be positive");
    const ContourSpec disc = ContourSpec::circle(disc_center, disc_radius, std::max(8, options.fallback_nodes));
    const Matrix free_proj = free_projection(L.window, L.bc, disc).entries;
    const int d = L.dim();

    ProjectionDiagnostics diag;
    Eigen::VectorXcd lambda;
    Matrix right, left;  // P = right_sel * left_sel
    if (is_hermitian(L.entries)) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(L.entries);
        if (es.info() != Eigen::Success) throw ConvergenceError("eigensolver failed");
        lambda = es.eigenvalues().cast<std::complex<double>>();
        right = es.eigenvectors();
        left = right.adjoint();
    } else {
        Eigen::ComplexEigenSolver<Matrix> es(L.entries, true);
        if (es.info() != Eigen::Success) throw ConvergenceError("eigensolver failed");
        lambda = es.eigenvalues();
        right = es.eigenvectors();
        Eigen::JacobiSVD<Matrix> svd(right);
        const auto& sv = svd.singularValues();
        diag.eigvec_condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
        if (!(diag.eigvec_condition <= options.condition_limit)) {
            // Nearly defective spectrum: report through the quadrature route instead.
            QuadratureOptions q;
            q.adaptive = true;
            q.idempotency_tol = options.idempotency_tol;
            ProjectionResult out = riesz_projection_quadrature(L, disc, q);
            out.diagnostics.fallback = true;
            out.diagnostics.eigvec_condition = diag.eigvec_condition;
            return out;
        }
        left = right.partialPivLu().inverse();
    }

    diag.min_eigen_distance = INFINITY;
    std::vector<int> inside;
    for (int k = 0; k < d; ++k) {
        const double dist = std::abs(lambda(k) - disc_center) - disc_radius;
        diag.min_eigen_distance = std::min(diag.min_eigen_distance, std::abs(dist));
        if (std::abs(dist) < 1e-6 * disc_radius) {
            throw ProximityError("riesz_projection_eigen: eigenvalue " + fmt_z(lambda(k)) +
                                 " lies in the exclusion band of the disc boundary");
        }
        if (dist < 0.0) inside.push_back(k);
    }
    Matrix p = Matrix::Zero(d, d);
    for (int k : inside) p += right.col(k) * left.row(k);
    return finish(L, std::move(p), free_proj, ProjectionMethod::Eigen, disc_index_of(disc), std::move(diag),
                  options.idempotency_tol);
}

ProjectionResult riesz_projection_eigen_disc(const OperatorMatrix& L, int n, const EigenOptions& options) {
    if (n < 1) throw InvalidArgument("riesz_projection_eigen_disc: n must be >= 1");
    ProjectionResult out = riesz_projection_eigen(L, double(n) * n, n, options);
    out.n = n;
    return out;
}

ProjectionResult projection_diff_series(const PotentialSpec& spec, BoundaryCondition bc, int M, int n, int s_max,
                                        int nodes) {
    if (s_max < 0 || s_max > kMaxSeriesOrder) {
        throw InvalidArgument("projection_diff_series: s_max must lie in [0, " + std::to_string(kMaxSeriesOrder) + "]");
    }
    const OperatorMatrix free_proj = free_projection(bc, M, n);
    const OperatorMatrix v = build_v_matrix(spec, bc, M);
    const int d = v.dim();
    const std::vector<QuadNode> quad = ContourSpec::disc(n, nodes).quadrature();

    ProjectionDiagnostics diag;
    diag.nodes = static_cast<int>(quad.size());
    std::vector<Matrix> integrated(static_cast<std::size_t>(s_max + 1), Matrix::Zero(d, d));
    Eigen::VectorXcd r0(d);
    for (const auto& node : quad) {
        const double contraction = kbar_w_kbar(spec, bc, M, node.z).hs;
        diag.max_contraction_hs = std::max(diag.max_contraction_hs, contraction);
        if (!(contraction < 1.0)) {
            throw ContractionError("projection_diff_series: n=" + std::to_string(n) + " z=" + fmt_z(node.z) +
                                       " has ||Kbar W Kbar||_HS = " + fmt_double(contraction),
                                   contraction);
        }
        for (int a = 0; a < d; ++a) {
            const double m = v.window.indices[a];
            r0(a) = 1.0 / (node.z - m * m);
        }
        Matrix term = r0.asDiagonal() * v.entries * r0.asDiagonal();
        for (int s = 0; s <= s_max; ++s) {
            if (s > 0) term = r0.asDiagonal() * (v.entries * term);
            integrated[s] += node.weight * term;
        }
    }
    Matrix sum = Matrix::Zero(d, d);
    Matrix comp = Matrix::Zero(d, d);
    for (const auto& term : integrated) {
        diag.term_hs.push_back(hs_norm(term));
        // Kahan step, ascending in s.
        const Matrix y = term - comp;
        const Matrix t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    diag.series_terms = s_max + 1;
    diag.series_tail_hs = diag.term_hs.back();

    const OperatorMatrix L = build_operator_matrix(spec, bc, M);
    ProjectionResult out = finish(L, free_proj.entries + sum, free_proj.entries, ProjectionMethod::Series, n,
                                  std::move(diag), INFINITY);
    return out;
}

namespace {

std::vector<int> disc_lattice_points(BoundaryCondition bc, int n) {
    if (bc == BoundaryCondition::Dir) return {n};
    return {n, -n};
}

void check_a00_args(BoundaryCondition bc, const OperatorMatrix& v, int n, int m) {
    if (!admissible_disc_index(bc, n)) {
        throw InvalidArgument("a00: disc index n=" + std::to_string(n) + " has the wrong parity for " + to_string(bc));
    }
    if (!v.window.contains(m)) throw InvalidArgument("a00: index m=" + std::to_string(m) + " is not in the window");
    for (int k : disc_lattice_points(bc, n)) {
        if (!v.window.contains(k)) throw InvalidArgument("a00: the window does not contain +-n");
    }
}

}  // namespace

double a00_closed_form(const PotentialSpec& spec, BoundaryCondition bc, int M, int n, int m) {
    const OperatorMatrix v = build_v_matrix(spec, bc, M);
    check_a00_args(bc, v, n, m);
    const std::vector<int> pm = disc_lattice_points(bc, n);
    const bool on_disc = std::find(pm.begin(), pm.end(), m) != pm.end();
    const double n2 = double(n) * n;
    double total = 0.0;
    if (on_disc) {
        for (int p : v.window.indices) {
            if (std::find(pm.begin(), pm.end(), p) != pm.end()) continue;
            const double gap = n2 - double(p) * p;
            total += std::norm(v.at(p, m)) / (gap * gap);
        }
    } else {
        const double gap = n2 - double(m) * m;
        for (int p : pm) total += std::norm(v.at(p, m)) / (gap * gap);
    }
    return total;
}

double a00_double_contour(const PotentialSpec& spec, BoundaryCondition bc, int M, int n, int m, int nodes) {
    const OperatorMatrix v = build_v_matrix(spec, bc, M);
    check_a00_args(bc, v, n, m);
    const std::vector<QuadNode> quad = ContourSpec::disc(n, nodes).quadrature();
    const double m2 = double(m) * m;
    std::complex<double> total{};
    for (int p : v.window.indices) {
        const std::complex<double> forward = v.at(p, m);  // V(p - m)
        if (forward == std::complex<double>{}) continue;
        const std::complex<double> adjoint = std::conj(forward);  // V~(m - p)
        const double p2 = double(p) * p;
        std::complex<double> inner{};
        for (const auto& mu : quad) {
            const std::complex<double> fmu = mu.weight / ((mu.z - m2) * (mu.z - p2));
            for (const auto& lam : quad) {
                inner += fmu * lam.weight / ((lam.z - p2) * (lam.z - m2));
            }
        }
        total += adjoint * forward * inner;
    }
    return total.real();
}

ProjectionResult p_upper_rectangle(const OperatorMatrix& L, int N, int nodes_per_side,
                                   const QuadratureOptions& options) {
    if (N < 1) throw InvalidArgument("p_upper_rectangle: N must be >= 1");
    const int top = L.window.indices.back();
    if (top < 2 * N + 8) {
        throw InvalidArgument("p_upper_rectangle: window top index " + std::to_string(top) +
                              " does not cover m^2 < N^2 + N with margin (need >= " + std::to_string(2 * N + 8) + ")");
    }
    const double n = N;
    ProjectionResult out =
        riesz_projection_quadrature(L, ContourSpec::rectangle(-n, n * n + n, n, nodes_per_side), options);
    out.n = N;
    return out;
}

int disc_eigen_count(const OperatorMatrix& L, std::complex<double> center, double radius) {
    const Eigen::VectorXcd eig = eigenvalues(L);
    int count = 0;
    for (Eigen::Index k = 0; k < eig.size(); ++k) {
        const double dist = std::abs(eig(k) - center) - radius;
        if (std::abs(dist) < 1e-6 * radius) {
            throw ProximityError("disc_eigen_count: eigenvalue " + fmt_z(eig(k)) + " lies on the disc boundary");
        }
        if (dist < 0.0) ++count;
    }
    return count;
}

int count_in_disc(const OperatorMatrix& L, int n) {
    QuadratureOptions options;
    options.adaptive = true;
    options.doubling_tol = 1e-9;
    const ProjectionResult p = riesz_projection_disc(L, n, 32, options);
    const double trace = p.matrix.entries.trace().real();
    const double rounded = std::round(trace);
    if (std::abs(trace - rounded) > 1e-3) {
        throw ConvergenceError("count_in_disc: n=" + std::to_string(n) + " trace " + fmt_double(trace) +
                               " is not close to an integer");
    }
    const int enumerated = disc_eigen_count(L, double(n) * n, n);
    if (enumerated != static_cast<int>(rounded)) {
        throw ConvergenceError("count_in_disc: n=" + std::to_string(n) + " quadrature trace " +
                               std::to_string(static_cast<int>(rounded)) + " disagrees with eigenvalue count " +
                               std::to_string(enumerated));
    }
    return enumerated;
}

}  // namespace hill
