#include "hill/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "hill/error.hpp"
#include "hill/resolvent.hpp"

namespace hill {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

QuadratureOptions adaptive_quadrature() {
    QuadratureOptions q;
    q.adaptive = true;
    return q;
}

}  // namespace

std::vector<int> admissible_range(BoundaryCondition bc, int lo, int hi) {
    std::vector<int> out;
    for (int n = std::max(lo, 1); n <= hi; ++n) {
        if (admissible_disc_index(bc, n)) out.push_back(n);
    }
    return out;
}

void check_window_rule(const PotentialSpec& spec, int M, int n_max) {
    const int need = 2 * n_max + spec.support_cutoff() + 8;
    if (M < need) {
        throw InvalidArgument("window rule violated: M=" + std::to_string(M) + " is below 2*n_max + cutoff + 8 = " +
                              std::to_string(need) + " for n_max=" + std::to_string(n_max));
    }
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double count = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    const double mx = sx / count, my = sy / count;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / sxx;
}

DecayReport decay_report(const PotentialSpec& spec, BoundaryCondition bc, int M, const std::vector<int>& N_grid,
                         int n_max, const DecayOptions& options) {
    check_window_rule(spec, M, n_max);
    const std::vector<int> ns = admissible_range(bc, options.n_min, n_max);
    if (ns.empty()) throw InvalidArgument("decay_report: no admissible n in [n_min, n_max]");
    const OperatorMatrix L = build_operator_matrix(spec, bc, M);

    DecayReport report;
    report.bc = bc;
    report.potential_label = spec.label();
    report.M = M;
    report.rows = parallel_map(ns, options.jobs, [&](int n) {
        try {
            const ProjectionResult q = riesz_projection_disc(L, n, options.nodes, adaptive_quadrature());
            DecayRow row;
            row.n = n;
            row.hs = q.hs_deviation;
            row.method = ProjectionMethod::Quadrature;
            row.operator_norm = operator_norm(q.deviation.entries);
            double columns = 0.0;
            for (Eigen::Index c = 0; c < q.deviation.entries.cols(); ++c) {
                columns += q.deviation.entries.col(c).squaredNorm();
            }
            row.parseval_defect = std::abs(columns - row.hs * row.hs);
            if (options.eigen_cross_check) {
                const ProjectionResult e = riesz_projection_eigen_disc(L, n);
                row.eigen_distance = hs_norm(q.deviation.entries - e.deviation.entries);
            }
            row.diagnostics = q.diagnostics;
            return row;
        } catch (...) {
            rethrow_with_context("decay n=" + std::to_string(n) + " method=Quadrature");
        }
    });

    std::vector<int> grid = N_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (int N : grid) {
        TailSum t;
        t.N = N;
        for (auto it = report.rows.rbegin(); it != report.rows.rend(); ++it) {
            if (it->n <= N) break;
            t.tail += it->hs * it->hs;
            t.operator_tail += it->operator_norm * it->operator_norm;
        }
        report.tail_sums.push_back(t);
    }

    std::vector<double> x, y;
    for (const auto& row : report.rows) {
        if (row.hs > 0.0) {
            x.push_back(row.n);
            y.push_back(row.hs);
        }
    }
    report.fitted_slope = loglog_slope(x, y);
    return report;
}

LocalizationReport localization_report(const PotentialSpec& spec, BoundaryCondition bc, int M, int n_lo, int n_hi,
                                       int jobs) {
    check_window_rule(spec, M, n_hi);
    const std::vector<int> ns = admissible_range(bc, n_lo, n_hi);
    if (ns.empty()) throw InvalidArgument("localization_report: no admissible n in the range");
    const OperatorMatrix L = build_operator_matrix(spec, bc, M);
    const int expected = bc == BoundaryCondition::Dir ? 1 : 2;

    LocalizationReport report;
    report.bc = bc;
    report.rows = parallel_map(ns, jobs, [&](int n) {
        LocalizationRow row;
        row.n = n;
        row.expected = expected;
        try {
            row.count = count_in_disc(L, n);
        } catch (const Error& e) {
            row.count = -1;
            row.error = e.what();
        }
        return row;
    });
    for (std::size_t i = report.rows.size(); i-- > 0;) {
        if (report.rows[i].count != report.rows[i].expected) break;
        report.N_loc = report.rows[i].n;
    }
    return report;
}

Vector random_band_limited(const TruncationWindow& window, int band, std::uint64_t seed) {
    if (band < 0) throw InvalidArgument("random_band_limited: band must be >= 0");
    std::mt19937_64 rng(seed);
    Vector f = Vector::Zero(window.dim());
    for (int a = 0; a < window.dim(); ++a) {
        if (std::abs(window.indices[a]) > band) continue;
        const double re = 2.0 * uniform01(rng) - 1.0;
        const double im = 2.0 * uniform01(rng) - 1.0;
        f(a) = {re, im};
    }
    const double norm = f.norm();
    if (norm == 0.0) throw InvalidArgument("random_band_limited: no window index satisfies |m| <= band");
    return f / norm;
}

ReconstructionReport reconstruct(const PotentialSpec& spec, BoundaryCondition bc, int M, const Vector& f, int N,
                                 int n_max, const ReconstructOptions& options, const std::string& f_label) {
    if (N < 1 || n_max <= N) throw InvalidArgument("reconstruct: need 1 <= N < n_max");
    if (options.trials < 0) throw InvalidArgument("reconstruct: trials must be >= 0");
    check_window_rule(spec, M, n_max);
    const OperatorMatrix L = build_operator_matrix(spec, bc, M);
    if (f.size() != L.dim()) {
        throw InvalidArgument("reconstruct: f has " + std::to_string(f.size()) + " coefficients, the window has " +
                              std::to_string(L.dim()));
    }
    for (int a = 0; a < L.dim(); ++a) {
        if (2 * std::abs(L.window.indices[a]) > M && f(a) != std::complex<double>{}) {
            throw InvalidArgument("reconstruct: f has a nonzero coefficient at m=" +
                                  std::to_string(L.window.indices[a]) + " outside |m| <= M/2");
        }
    }

    std::vector<int> blocks_n{0};
    for (int n : admissible_range(bc, N + 1, n_max)) blocks_n.push_back(n);
    const std::vector<Vector> blocks = parallel_map(blocks_n, options.jobs, [&](int n) -> Vector {
        try {
            if (n == 0) return p_upper_rectangle(L, N, 16, adaptive_quadrature()).matrix.entries * f;
            return riesz_projection_disc(L, n, 32, adaptive_quadrature()).matrix.entries * f;
        } catch (...) {
            rethrow_with_context(n == 0 ? "reconstruct rectangle N=" + std::to_string(N)
                                        : "reconstruct n=" + std::to_string(n) + " method=Quadrature");
        }
    });

    ReconstructionReport report;
    report.f_label = f_label;
    report.N = N;
    report.n_max = n_max;
    report.f_norm = f.norm();
    report.trials = options.trials;
    report.seed = options.seed;

    Vector partial = Vector::Zero(f.size());
    for (const auto& b : blocks) {
        report.block_norms.push_back(b.norm());
        partial += b;
        report.ordered_sup = std::max(report.ordered_sup, partial.norm());
    }
    report.error_norm = (f - partial).norm();

    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> order(blocks.size());
    for (int t = 0; t < options.trials; ++t) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
            std::swap(order[i - 1], order[std::min(j, i - 1)]);
        }
        Vector s = Vector::Zero(f.size());
        for (std::size_t i : order) {
            const double sign = (rng() >> 63) ? -1.0 : 1.0;
            s += sign * blocks[i];
            report.unconditional_sup = std::max(report.unconditional_sup, s.norm());
        }
    }
    return report;
}

ElementaryChecks elementary_checks(int N, int n) {
    if (N < 1 || n < 1) throw InvalidArgument("elementary_checks: N and n must be >= 1");
    constexpr long long kTerms = 1'000'000;
    constexpr int kLattice = 10'000;
    ElementaryChecks out;
    // Smallest terms first.
    for (long long k = N + kTerms; k > N; --k) out.t0_lhs += 1.0 / (double(k) * double(k));
    out.t0_tail = 1.0 / double(N + kTerms);
    out.t0_rhs = 1.0 / N;
    out.t0_holds = out.t0_lhs + out.t0_tail < out.t0_rhs;

    const double n2 = double(n) * n;
    int top = kLattice;
    if ((top - n) % 2 != 0) --top;
    for (int p = top; p >= -top; p -= 2) {
        if (p == n || p == -n) continue;
        const double gap = n2 - double(p) * p;
        out.t00_lhs += 1.0 / (gap * gap);
    }
    out.t00_rhs = 4.0 / n2;
    out.t00_holds = out.t00_lhs < out.t00_rhs;
    return out;
}

std::string to_string(LemmaId id) {
    switch (id) {
        case LemmaId::T0: return "T0";
        case LemmaId::T00: return "T00";
        case LemmaId::T1: return "T1";
        case LemmaId::T2: return "T2";
        case LemmaId::T3: return "T3";
        case LemmaId::T9: return "T9";
        case LemmaId::T33: return "T33";
    }
    return "?";
}

LemmaId parse_lemma_id(const std::string& text) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::toupper(c); });
    for (LemmaId id : {LemmaId::T0, LemmaId::T00, LemmaId::T1, LemmaId::T2, LemmaId::T3, LemmaId::T9, LemmaId::T33}) {
        if (to_string(id) == t) return id;
    }
    throw InvalidArgument("unknown lemma '" + text + "' (expected T0, T00, T1, T2, T3, T9, T33)");
}

namespace {

// Per-n contributions for n = 1..window, plus the bounds on what the window omits.
struct LemmaTable {
    std::vector<double> contribution;  // index n
    std::vector<double> p_tail;        // bound on omitted free indices at this n
    double n_tail = 0.0;               // bound on all n > window
    long long terms = 0;
};

long long estimate_terms(LemmaId id, const RSequence& r, int window) {
    const long long s = static_cast<long long>(r.support().size());
    const long long w = window;
    switch (id) {
        case LemmaId::T1:
        case LemmaId::T2: return w * s;
        case LemmaId::T3: return w * (w + 1) * s;
        case LemmaId::T9: return (w * (w + 1) / 2 + w * (w + 1)) * s + w * s;
        case LemmaId::T33: {
            const long long h = std::min<long long>(w, r.cutoff() / 2);
            return (h * (h + 1) / 2 + h * (w + 1)) * s;
        }
        default: return 0;
    }
}

// B(n) = sum_{p != +-n, |p| <= n + window} (n^2 - p^2)^-2 sum_{k != +-n} |k+p|^2 r(k+p)^2 / |n^2 - k^2|.
double b_factor(const RSequence& r, int n, int window) {
    const double n2 = double(n) * n;
    const auto& support = r.support();
    const int top = n + window - (window % 2);
    double outer = 0.0;
    for (int p = top; p >= -top; p -= 2) {
        if (p == n || p == -n) continue;
        double inner = 0.0;
        for (int l : support) {
            const int k = l - p;
            if (k == n || k == -n) continue;
            const double rl = r.at(l);
            inner += double(l) * l * rl * rl / std::abs(n2 - double(k) * k);
        }
        const double gap = n2 - double(p) * p;
        outer += inner / (gap * gap);
    }
    return outer;
}

// A(n) = sum_{i != +-n} |n+i| / |n-i| r(n+i)^2.
double a_factor(const RSequence& r, int n) {
    double sum = 0.0;
    for (int l : r.support()) {
        if (l == 2 * n) continue;
        const double rl = r.at(l);
        sum += std::abs(double(l)) / std::abs(2.0 * n - l) * rl * rl;
    }
    return sum;
}

// sum_{|p| > n + window, p = n mod 2} (n^2 - p^2)^-2.
double far_p_bound(int n, int window) {
    const double half = std::max(1, window / 2);
    const double w = window + 2.0 * n;
    return 2.0 / (w * w) / (4.0 * half);
}

LemmaTable build_table(LemmaId id, const RSequence& r, int N_min, int window) {
    const auto& support = r.support();
    const double norm2 = r.norm_squared();
    const double K = r.cutoff();
    const double W = window;
    LemmaTable t;
    t.contribution.assign(static_cast<std::size_t>(window + 1), 0.0);
    t.p_tail.assign(static_cast<std::size_t>(window + 1), 0.0);
    for (int n = std::max(1, N_min + 1); n <= window; ++n) {
        double c = 0.0;
        switch (id) {
            case LemmaId::T1:
            case LemmaId::T2:
                for (int l : support) {
                    if (l == 2 * n) continue;
                    const double rl = r.at(l);
                    const double gap = 2.0 * n - l;
                    double term = rl * rl / (gap * gap);
                    if (id == LemmaId::T2) term *= double(l) * l / (double(n) * n);
                    c += term;
                }
                t.terms += static_cast<long long>(support.size());
                break;
            case LemmaId::T3: {
                // a = n - p, b = n - k = 2n - l - a.
                for (int a = window - (window % 2); a >= -window; a -= 2) {
                    if (a == 0) continue;
                    double inner = 0.0;
                    for (int l : support) {
                        const int b = 2 * n - l - a;
                        if (b == 0) continue;
                        const double rl = r.at(l);
                        inner += rl * rl / (double(b) * b);
                    }
                    c += inner / (double(a) * a);
                }
                t.terms += static_cast<long long>(window + 1) * static_cast<long long>(support.size());
                const double a_min = W + 1.0;
                t.p_tail[n] = norm2 * std::numbers::pi * std::numbers::pi / (12.0 * a_min * a_min);
                break;
            }
            case LemmaId::T9: {
                const double A = a_factor(r, n);
                c = A * b_factor(r, n, window);
                t.terms += static_cast<long long>(n + window + 1 + 1) * static_cast<long long>(support.size());
                t.p_tail[n] = A * far_p_bound(n, window) * K * K * norm2 / (2.0 * n);
                break;
            }
            case LemmaId::T33: {
                const double r2n = r.at(2 * n);
                if (r2n == 0.0) break;
                c = n * r2n * r2n * b_factor(r, n, window);
                t.terms += static_cast<long long>(n + window + 1) * static_cast<long long>(support.size());
                t.p_tail[n] = n * r2n * r2n * far_p_bound(n, window) * K * K * norm2 / (2.0 * n);
                break;
            }
            default: break;
        }
        t.contribution[n] = c;
    }
    switch (id) {
        case LemmaId::T1: t.n_tail = norm2 / (2.0 * (2.0 * W - K)); break;
        case LemmaId::T2: t.n_tail = (K * K / ((W + 1) * (W + 1))) * norm2 / (2.0 * (2.0 * W - K)); break;
        case LemmaId::T3: t.n_tail = norm2 * std::numbers::pi * std::numbers::pi / (3.0 * (2.0 * W - K)); break;
        case LemmaId::T9: t.n_tail = K * K * K * norm2 * norm2 / ((2.0 * W + 2.0 - K) * W * W); break;
        default: t.n_tail = 0.0; break;
    }
    if (support.empty()) t.n_tail = 0.0;
    return t;
}

LemmaReport elementary_report(LemmaId id, int N) {
    const ElementaryChecks e = elementary_checks(N, N);
    LemmaReport out;
    out.id = id;
    out.N = N;
    if (id == LemmaId::T0) {
        out.lhs = e.t0_lhs;
        out.tail_bound = e.t0_tail;
        out.r_term = e.t0_rhs;
        out.terms = 1'000'000;
    } else {
        out.lhs = e.t00_lhs;
        out.r_term = e.t00_rhs;
        out.terms = 10'000;
    }
    out.bound = out.r_term;
    out.fitted_ratio = out.lhs / out.bound;
    return out;
}

}  // namespace

std::vector<LemmaReport> lemma_grid(LemmaId id, const RSequence& r, const std::vector<int>& N_grid, int window,
                                    long long budget) {
    if (N_grid.empty()) throw InvalidArgument("lemma_grid: empty N grid");
    for (int N : N_grid) {
        if (N < 1) throw InvalidArgument("lemma_sums: N must be >= 1");
    }
    std::vector<LemmaReport> out;
    if (id == LemmaId::T0 || id == LemmaId::T00) {
        for (int N : N_grid) out.push_back(elementary_report(id, N));
        return out;
    }
    const int N_min = *std::min_element(N_grid.begin(), N_grid.end());
    const int N_max = *std::max_element(N_grid.begin(), N_grid.end());
    if (window <= N_max) {
        throw InvalidArgument("lemma_sums: window " + std::to_string(window) + " must exceed N=" +
                              std::to_string(N_max));
    }
    if (window < r.cutoff() + 2) {
        throw InvalidArgument("lemma_sums: window " + std::to_string(window) + " must be >= support cutoff + 2 = " +
                              std::to_string(r.cutoff() + 2));
    }
    const long long estimate = estimate_terms(id, r, window);
    if (estimate > budget) {
        throw BudgetError("lemma " + to_string(id) + ": window " + std::to_string(window) + " needs about " +
                          std::to_string(estimate) + " terms, above the budget of " + std::to_string(budget));
    }
    const LemmaTable table = build_table(id, r, N_min, window);
    const double norm2 = r.norm_squared();
    for (int N : N_grid) {
        LemmaReport rep;
        rep.id = id;
        rep.N = N;
        rep.window = window;
        rep.terms = table.terms;
        // Smallest contributions (large n) first.
        for (int n = window; n > N; --n) {
            rep.lhs += table.contribution[n];
            rep.tail_bound += table.p_tail[n];
        }
        rep.tail_bound += table.n_tail;
        rep.r_term = norm2 / N;
        rep.tail_energy = r.tail_squared(N);
        switch (id) {
            case LemmaId::T9: rep.bound = norm2 * (rep.r_term + rep.tail_energy); break;
            case LemmaId::T33: rep.bound = norm2 * rep.tail_energy; break;
            default: rep.bound = rep.r_term + rep.tail_energy; break;
        }
        if (rep.bound > 0.0) {
            rep.fitted_ratio = rep.lhs / rep.bound;
        } else if (rep.lhs > 0.0) {
            rep.fitted_ratio = std::numeric_limits<double>::infinity();
        }
        out.push_back(rep);
    }
    return out;
}

LemmaReport lemma_sums(LemmaId id, const RSequence& r, int N, int window, long long budget) {
    return lemma_grid(id, r, {N}, window, budget).front();
}

std::vector<RhoRow> rho_bound_study(const PotentialSpec& spec, std::optional<BoundaryCondition> bc,
                                    const std::vector<int>& n_grid, int M, int jobs) {
    if (n_grid.empty()) throw InvalidArgument("rho_bound_study: empty n grid");
    for (int n : n_grid) {
        if (n < 1) throw InvalidArgument("rho_bound_study: n must be >= 1");
    }
    check_window_rule(spec, M, *std::max_element(n_grid.begin(), n_grid.end()));
    const RSequence r = RSequence::from_spec(spec);
    return parallel_map(n_grid, jobs, [&](int n) {
        RhoRow row;
        row.n = n;
        row.bc = bc ? *bc : periodic_bc_for(n);
        const TruncationWindow window = make_window(row.bc, M);
        row.in_window = window.contains(n) && (row.bc == BoundaryCondition::Dir || window.contains(-n));
        for (int j = 0; j < 8; ++j) {
            const std::complex<double> z = double(n) * n + std::polar(double(n), 2.0 * std::numbers::pi * j / 8.0);
            try {
                row.measured_hs = std::max(row.measured_hs, kbar_w_kbar(spec, row.bc, M, z).hs);
            } catch (...) {
                rethrow_with_context("rho_study n=" + std::to_string(n));
            }
            for (int m : window.indices) row.r0_norm = std::max(row.r0_norm, 1.0 / std::abs(z - double(m) * m));
        }
        row.tail_energy = std::sqrt(r.tail_squared(std::sqrt(double(n))));
        row.r_term = r.norm_squared() / n;
        row.rho = std::sqrt(row.tail_energy + row.r_term);
        row.ratio = row.rho > 0.0 ? row.measured_hs / row.rho : 0.0;
        return row;
    });
}

}  // namespace hill
