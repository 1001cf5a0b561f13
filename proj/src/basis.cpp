#include "hill/basis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "hill/error.hpp"

namespace hill {

std::string to_string(BoundaryCondition bc) {
    switch (bc) {
        case BoundaryCondition::PerPlus: return "per+";
        case BoundaryCondition::PerMinus: return "per-";
        case BoundaryCondition::Dir: return "dir";
    }
    return "?";
}

BoundaryCondition parse_boundary_condition(const std::string& text) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "per+" || t == "perplus" || t == "periodic") return BoundaryCondition::PerPlus;
    if (t == "per-" || t == "perminus" || t == "antiperiodic") return BoundaryCondition::PerMinus;
    if (t == "dir" || t == "dirichlet") return BoundaryCondition::Dir;
    throw InvalidArgument("unknown boundary condition '" + text + "' (expected per+, per-, dir)");
}

bool admissible_disc_index(BoundaryCondition bc, int n) {
    if (n < 1) return false;
    switch (bc) {
        case BoundaryCondition::PerPlus: return n % 2 == 0;
        case BoundaryCondition::PerMinus: return n % 2 == 1;
        case BoundaryCondition::Dir: return true;
    }
    return false;
}

BoundaryCondition periodic_bc_for(int n) {
    return n % 2 == 0 ? BoundaryCondition::PerPlus : BoundaryCondition::PerMinus;
}

int TruncationWindow::position(int m) const noexcept {
    auto it = std::lower_bound(indices.begin(), indices.end(), m);
    if (it == indices.end() || *it != m) return -1;
    return static_cast<int>(it - indices.begin());
}

std::vector<int> basis_indices(BoundaryCondition bc, int M) {
    if (M < 2) throw InvalidArgument("basis_indices: window M must be >= 2, got " + std::to_string(M));
    if (M > kMaxWindow) {
        throw InvalidArgument("basis_indices: window M=" + std::to_string(M) + " exceeds the dimension guard " +
                              std::to_string(kMaxWindow));
    }
    std::vector<int> out;
    switch (bc) {
        case BoundaryCondition::PerPlus: {
            const int top = M - (M % 2);
            for (int m = -top; m <= top; m += 2) out.push_back(m);
            break;
        }
        case BoundaryCondition::PerMinus: {
            const int top = M - 1 + (M % 2);
            for (int m = -top; m <= top; m += 2) out.push_back(m);
            break;
        }
        case BoundaryCondition::Dir:
            for (int m = 1; m <= M; ++m) out.push_back(m);
            break;
    }
    return out;
}

TruncationWindow make_window(BoundaryCondition bc, int M) {
    return TruncationWindow{M, basis_indices(bc, M)};
}

std::string to_string(MatrixLabel label) {
    switch (label) {
        case MatrixLabel::Free: return "Free";
        case MatrixLabel::Full: return "Full";
        case MatrixLabel::V: return "V";
        case MatrixLabel::W: return "W";
        case MatrixLabel::KbarWKbar: return "KbarWKbar";
        case MatrixLabel::Resolvent: return "Resolvent";
        case MatrixLabel::Projection: return "Projection";
        case MatrixLabel::Generic: return "Generic";
    }
    return "?";
}

std::complex<double> OperatorMatrix::at(int j, int m) const {
    const int a = window.position(j);
    const int b = window.position(m);
    if (a < 0 || b < 0) throw InvalidArgument("OperatorMatrix::at: index outside the window");
    return entries(a, b);
}

double hs_norm(const Matrix& a) { return a.norm(); }

double operator_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

OperatorMatrix build_free_matrix(BoundaryCondition bc, int M) {
    OperatorMatrix out{Matrix(), make_window(bc, M), bc, MatrixLabel::Free};
    const int d = out.dim();
    out.entries = Matrix::Zero(d, d);
    for (int a = 0; a < d; ++a) {
        const double m = out.window.indices[a];
        out.entries(a, a) = m * m;
    }
    return out;
}

std::complex<double> dirichlet_sine_moment(const PotentialSpec& spec, int k) {
    if (k == 0) return {};
    const std::complex<double> I{0.0, 1.0};
    if (k % 2 == 0) return (spec.q(-k) - spec.q(k)) / (2.0 * I);
    // l + k odd: (1/pi) int_0^pi e^{ilx} sin(kx) dx = -2k / (pi (l^2 - k^2)).
    std::complex<double> sum{};
    for (const auto& [l, value] : spec.coefficients()) {
        const double ll = l, kk = k;
        sum += value * (-2.0 * kk / (std::numbers::pi * (ll * ll - kk * kk)));
    }
    return sum;
}

OperatorMatrix build_v_matrix(const PotentialSpec& spec, BoundaryCondition bc, int M) {
    OperatorMatrix out{Matrix(), make_window(bc, M), bc, MatrixLabel::V};
    const auto& idx = out.window.indices;
    const int d = out.dim();
    out.entries = Matrix::Zero(d, d);
    if (bc == BoundaryCondition::Dir) {
        // s(k) for k in [-2M, 2M]; s(-k) = -s(k).
        std::vector<std::complex<double>> s(static_cast<std::size_t>(4 * M + 1));
        for (int k = 0; k <= 2 * M; ++k) {
            s[2 * M + k] = dirichlet_sine_moment(spec, k);
            s[2 * M - k] = -s[2 * M + k];
        }
        auto sm = [&](int k) { return s[static_cast<std::size_t>(2 * M + k)]; };
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                const int j = idx[a], m = idx[b];
                std::complex<double> e = double(j - m) * sm(j - m) - double(j + m) * sm(j + m);
                if (a == b) e += spec.v0();
                out.entries(a, b) = e;
            }
        }
        return out;
    }
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            const int diff = idx[a] - idx[b];
            if (std::abs(diff) <= spec.support_cutoff()) out.entries(a, b) = v_hat(spec, diff);
        }
    }
    return out;
}

OperatorMatrix build_operator_matrix(const PotentialSpec& spec, BoundaryCondition bc, int M) {
    OperatorMatrix out = build_v_matrix(spec, bc, M);
    for (int a = 0; a < out.dim(); ++a) {
        const double m = out.window.indices[a];
        out.entries(a, a) += m * m;
    }
    out.label = MatrixLabel::Full;
    return out;
}

namespace {

double w_of(const PotentialSpec& spec, int k) {
    if (k == 0) return std::abs(spec.v0());
    if (k % 2 != 0 || std::abs(k) > spec.support_cutoff()) return 0.0;
    return std::abs(k) * r_of(spec, k);
}

void check_free_proximity(const TruncationWindow& window, std::complex<double> z, const char* who) {
    for (int m : window.indices) {
        const double mm = double(m) * m;
        if (std::abs(z - mm) < kFreeProximity) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s: z=(%.17g,%.17g) lies within %.0e of free eigenvalue %d^2", who,
                          z.real(), z.imag(), kFreeProximity, m);
            throw ProximityError(buf);
        }
    }
}

}  // namespace

OperatorMatrix build_w_matrix(const PotentialSpec& spec, BoundaryCondition bc, int M) {
    OperatorMatrix out{Matrix(), make_window(bc, M), bc, MatrixLabel::W};
    const auto& idx = out.window.indices;
    const int d = out.dim();
    out.entries = Matrix::Zero(d, d);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) out.entries(a, b) = w_of(spec, idx[a] - idx[b]);
    }
    return out;
}

KbarWKbar kbar_w_kbar(const PotentialSpec& spec, BoundaryCondition bc, int M, std::complex<double> z) {
    OperatorMatrix w = build_w_matrix(spec, bc, M);
    check_free_proximity(w.window, z, "kbar_w_kbar");
    const int d = w.dim();
    Eigen::VectorXd kbar(d);
    for (int a = 0; a < d; ++a) {
        const double m = w.window.indices[a];
        kbar(a) = 1.0 / std::sqrt(std::abs(z - m * m));
    }
    w.entries = kbar.asDiagonal() * w.entries * kbar.asDiagonal();
    w.label = MatrixLabel::KbarWKbar;
    const double hs = hs_norm(w.entries);
    return {std::move(w), hs};
}

OperatorMatrix r0_diag(BoundaryCondition bc, int M, std::complex<double> z) {
    OperatorMatrix out{Matrix(), make_window(bc, M), bc, MatrixLabel::Resolvent};
    check_free_proximity(out.window, z, "r0_diag");
    const int d = out.dim();
    out.entries = Matrix::Zero(d, d);
    for (int a = 0; a < d; ++a) {
        const double m = out.window.indices[a];
        out.entries(a, a) = 1.0 / (z - m * m);
    }
    return out;
}

void write_matrix_csv(std::ostream& os, const Matrix& a) {
    char buf[64];
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", a(i, j).real(), a(i, j).imag());
            if (j > 0) os << ',';
            os << buf;
        }
        os << '\n';
    }
}

}  // namespace hill
