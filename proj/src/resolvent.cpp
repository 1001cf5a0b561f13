#include "hill/resolvent.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "hill/error.hpp"

namespace hill {

namespace {

std::string describe_z(std::complex<double> z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "z=(%.17g,%.17g)", z.real(), z.imag());
    return buf;
}

// Neumaier-style compensated accumulation, entrywise on real and imaginary parts.
class CompensatedSum {
public:
    explicit CompensatedSum(Eigen::Index d)
        : sum_(Eigen::MatrixXd::Zero(2 * d, d)), comp_(Eigen::MatrixXd::Zero(2 * d, d)), d_(d) {}

    void add(const Matrix& term) {
        for (Eigen::Index j = 0; j < d_; ++j) {
            for (Eigen::Index i = 0; i < d_; ++i) {
                accumulate(i, j, term(i, j).real());
                accumulate(d_ + i, j, term(i, j).imag());
            }
        }
    }

    Matrix value() const {
        const Eigen::MatrixXd total = sum_ + comp_;
        Matrix out(d_, d_);
        out.real() = total.topRows(d_);
        out.imag() = total.bottomRows(d_);
        return out;
    }

private:
    void accumulate(Eigen::Index i, Eigen::Index j, double x) {
        const double s = sum_(i, j);
        const double t = s + x;
        comp_(i, j) += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        sum_(i, j) = t;
    }

    Eigen::MatrixXd sum_;
    Eigen::MatrixXd comp_;
    Eigen::Index d_;
};

Eigen::VectorXcd free_resolvent_diagonal(const TruncationWindow& window, std::complex<double> z) {
    Eigen::VectorXcd d(window.dim());
    for (int a = 0; a < window.dim(); ++a) {
        const double m = window.indices[a];
        const std::complex<double> gap = z - m * m;
        if (std::abs(gap) < kFreeProximity) {
            throw ProximityError("free resolvent: " + describe_z(z) + " lies on the free eigenvalue " +
                                 std::to_string(window.indices[a]) + "^2");
        }
        d(a) = 1.0 / gap;
    }
    return d;
}

}  // namespace

Matrix solve_shifted(const Matrix& L, std::complex<double> z, const Matrix& rhs) {
    Matrix shifted = -L;
    shifted.diagonal().array() += z;
    Eigen::PartialPivLU<Matrix> lu(shifted);
    // The rcond estimate is blind to exactly vanishing pivots.
    const double min_pivot = shifted.size() ? lu.matrixLU().diagonal().cwiseAbs().minCoeff() : 1.0;
    const double rcond = min_pivot > 0.0 ? lu.rcond() : 0.0;
    if (!(rcond > 1.0 / kMaxCondition)) {
        const double cond = rcond > 0.0 ? 1.0 / rcond : INFINITY;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", cond);
        throw SingularError("z - L is singular at " + describe_z(z) + " (condition estimate " + buf + ")", cond);
    }
    return lu.solve(rhs);
}

OperatorMatrix resolvent_direct(const OperatorMatrix& L, std::complex<double> z) {
    const int d = L.dim();
    const Matrix eye = Matrix::Identity(d, d);
    OperatorMatrix out{solve_shifted(L.entries, z, eye), L.window, L.bc, MatrixLabel::Resolvent};
    Matrix shifted = -L.entries;
    shifted.diagonal().array() += z;
    const double residual = hs_norm(shifted * out.entries - eye);
    if (!(residual <= 1e-10 * d)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", residual);
        throw SingularError("resolvent_direct: multiply-back residual " + std::string(buf) + " at " + describe_z(z),
                            INFINITY);
    }
    return out;
}

OperatorMatrix series_term(const PotentialSpec& spec, BoundaryCondition bc, int M, std::complex<double> z, int s) {
    if (s < 0 || s > kMaxSeriesOrder) {
        throw InvalidArgument("series_term: order s must lie in [0, " + std::to_string(kMaxSeriesOrder) + "]");
    }
    const OperatorMatrix v = build_v_matrix(spec, bc, M);
    const Eigen::VectorXcd r0 = free_resolvent_diagonal(v.window, z);
    Matrix term = r0.asDiagonal() * v.entries * r0.asDiagonal();
    for (int k = 0; k < s; ++k) term = r0.asDiagonal() * (v.entries * term);
    return OperatorMatrix{std::move(term), v.window, bc, MatrixLabel::Resolvent};
}

SeriesResult resolvent_diff_series(const PotentialSpec& spec, BoundaryCondition bc, int M, std::complex<double> z,
                                   double tol, int s_max) {
    if (!(tol > 0.0)) throw InvalidArgument("resolvent_diff_series: tol must be positive");
    if (s_max < 0 || s_max > kMaxSeriesOrder) {
        throw InvalidArgument("resolvent_diff_series: s_max must lie in [0, " + std::to_string(kMaxSeriesOrder) + "]");
    }
    const double contraction = kbar_w_kbar(spec, bc, M, z).hs;
    if (!(contraction < 1.0)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", contraction);
        throw ContractionError("resolvent series is not contractive at " + describe_z(z) +
                                   ": ||Kbar W Kbar||_HS = " + buf,
                               contraction);
    }
    const OperatorMatrix v = build_v_matrix(spec, bc, M);
    const Eigen::VectorXcd r0 = free_resolvent_diagonal(v.window, z);

    SeriesResult result;
    result.contraction_hs = contraction;
    CompensatedSum acc(v.dim());
    Matrix term = r0.asDiagonal() * v.entries * r0.asDiagonal();
    for (int s = 0; s <= s_max; ++s) {
        if (s > 0) term = r0.asDiagonal() * (v.entries * term);
        acc.add(term);
        result.terms_used = s + 1;
        result.last_term_hs = hs_norm(term);
        if (result.last_term_hs <= tol) {
            result.converged = true;
            break;
        }
    }
    result.value = OperatorMatrix{acc.value(), v.window, bc, MatrixLabel::Resolvent};
    return result;
}

ChainSum chain_sum_check(const PotentialSpec& spec, BoundaryCondition bc, int M, std::complex<double> z, int m,
                         int p, int t) {
    if (t < 0 || t > 3) throw InvalidArgument("chain_sum_check: t must lie in [0, 3]");
    const OperatorMatrix w = build_w_matrix(spec, bc, M);
    const auto& idx = w.window.indices;
    const int d = w.dim();
    const int pm = w.window.position(m);
    const int pp = w.window.position(p);
    if (pm < 0 || pp < 0) throw InvalidArgument("chain_sum_check: m or p is outside the window");

    long long tuples = 1;
    for (int k = 0; k < t; ++k) {
        tuples *= d;
        if (tuples > kChainTupleBudget) {
            throw BudgetError("chain_sum_check: " + std::to_string(t) + "-index enumeration over " +
                              std::to_string(d) + " indices exceeds the budget of " +
                              std::to_string(kChainTupleBudget) + " tuples");
        }
    }

    std::vector<double> inv_gap(d);
    for (int a = 0; a < d; ++a) {
        const double mm = double(idx[a]) * idx[a];
        const double gap = std::abs(z - mm);
        if (gap < kFreeProximity) throw ProximityError("chain_sum_check: z lies on a free eigenvalue");
        inv_gap[a] = 1.0 / gap;
    }
    auto W = [&](int a, int b) { return w.entries(a, b).real(); };

    // Depth-first over (i_1, ..., i_t); `prefix` carries the product accumulated so far.
    double brute = 0.0;
    std::function<void(int, int, double)> walk = [&](int depth, int last, double prefix) {
        if (depth == t) {
            brute += prefix * W(last, pp) * inv_gap[pp];
            return;
        }
        for (int a = 0; a < d; ++a) {
            const double link = W(last, a);
            if (link == 0.0) continue;
            walk(depth + 1, a, prefix * link * inv_gap[a]);
        }
    };
    walk(0, pm, inv_gap[pm]);

    Eigen::VectorXd kbar(d);
    for (int a = 0; a < d; ++a) kbar(a) = std::sqrt(inv_gap[a]);
    const Eigen::MatrixXd kwk = kbar.asDiagonal() * w.entries.real() * kbar.asDiagonal();
    Eigen::MatrixXd chain = kwk;
    for (int k = 0; k < t; ++k) chain = chain * kwk;
    const Eigen::MatrixXd full = kbar.asDiagonal() * chain * kbar.asDiagonal();

    return ChainSum{brute, full(pm, pp), tuples};
}

}  // namespace hill
