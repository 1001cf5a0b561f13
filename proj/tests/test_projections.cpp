#include <doctest.h>

#include <cmath>
#include <numeric>

#include "hill/error.hpp"
#include "hill/projections.hpp"

using namespace hill;

namespace {

const cplx I{0.0, 1.0};

PotentialSpec mathieu() { return make_example(ExampleKind::Mathieu, {1.0}); }

PotentialSpec complex_potential() { return PotentialSpec(0.0, {{2, 0.3 + 0.2 * I}, {-2, -0.1 * I}, {4, 0.05}}, 4); }

double idempotency(const Matrix& p) { return hs_norm(p * p - p); }

}  // namespace

TEST_CASE("gauss legendre") {
    std::vector<double> x, w;
    gauss_legendre(8, x, w);
    REQUIRE(x.size() == 8);
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(2.0).epsilon(1e-15));
    double moment = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) moment += w[i] * std::pow(x[i], 14);
    CHECK(moment == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
    CHECK_THROWS_AS(gauss_legendre(0, x, w), InvalidArgument);
}

TEST_CASE("circle contour") {
    const ContourSpec c = ContourSpec::disc(5, 16);
    CHECK(c.is_circle());
    CHECK(c.total_nodes() == 16);
    CHECK(c.length() == doctest::Approx(10.0 * M_PI));
    CHECK(c.encloses(cplx{25.0, 4.9}));
    CHECK_FALSE(c.encloses(cplx{30.0, 0.0}));
    CHECK(c.distance_to_path(cplx{25.0, 0.0}) == doctest::Approx(5.0));
    const auto q = c.quadrature();
    REQUIRE(q.size() == 16);
    cplx sum{}, first{};
    for (const auto& node : q) {
        CHECK(std::abs(std::abs(node.z - 25.0) - 5.0) < 1e-13);
        sum += node.weight / (node.z - 25.0);
        first += node.weight;
    }
    CHECK(std::abs(sum - 1.0) < 1e-14);
    CHECK(std::abs(first) < 1e-13);
    CHECK(c.with_nodes(64).total_nodes() == 64);
    CHECK_THROWS_AS(ContourSpec::circle(0.0, -1.0), InvalidArgument);
}

TEST_CASE("rectangle contour") {
    const ContourSpec r = ContourSpec::rectangle(-6.0, 42.0, 6.0, 16);
    CHECK_FALSE(r.is_circle());
    CHECK(r.length() == doctest::Approx(2.0 * 48.0 + 2.0 * 12.0));
    CHECK(r.total_nodes() % 16 == 0);
    CHECK(r.encloses(cplx{0.0, 0.0}));
    CHECK_FALSE(r.encloses(cplx{50.0, 0.0}));
    cplx winding{}, zero{};
    for (const auto& node : r.quadrature()) {
        winding += node.weight / (node.z - 10.0);
        zero += node.weight;
    }
    CHECK(std::abs(winding - 1.0) < 1e-10);
    CHECK(std::abs(zero) < 1e-12);
    CHECK_THROWS_AS(ContourSpec::rectangle(5.0, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("free projections") {
    const OperatorMatrix p = free_projection(BoundaryCondition::PerPlus, 12, 4);
    CHECK(p.label == MatrixLabel::Projection);
    CHECK(p.at(4, 4) == cplx{1.0, 0.0});
    CHECK(p.at(-4, -4) == cplx{1.0, 0.0});
    CHECK(hs_norm(p) == doctest::Approx(std::sqrt(2.0)));
    CHECK(hs_norm(free_projection(BoundaryCondition::Dir, 12, 4)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(free_projection(BoundaryCondition::PerPlus, 12, 3), InvalidArgument);
    const TruncationWindow w = make_window(BoundaryCondition::PerPlus, 12);
    const OperatorMatrix rect = free_projection(w, BoundaryCondition::PerPlus, ContourSpec::rectangle(-3, 12, 3));
    CHECK(hs_norm(rect) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("zero potential gives free projections") {
    for (auto bc : {BoundaryCondition::PerPlus, BoundaryCondition::PerMinus, BoundaryCondition::Dir}) {
        const OperatorMatrix L = build_operator_matrix(PotentialSpec(), bc, 32);
        for (int n = 2; n <= 12; ++n) {
            if (!admissible_disc_index(bc, n)) continue;
            CHECK(riesz_projection_disc(L, n).hs_deviation <= 1e-12);
            CHECK(riesz_projection_eigen_disc(L, n).hs_deviation <= 1e-12);
        }
    }
}

TEST_CASE("mathieu deviations match symmetric eigensolver") {
    const OperatorMatrix L = build_operator_matrix(mathieu(), BoundaryCondition::PerPlus, 64);
    const std::vector<std::pair<int, double>> expect{
        {10, 0.07176449182306952}, {16, 0.04444999071533235}, {20, 0.035486147989053224}};
    for (const auto& [n, hs] : expect) {
        const ProjectionResult q = riesz_projection_disc(L, n);
        const ProjectionResult e = riesz_projection_eigen_disc(L, n);
        CHECK(q.hs_deviation == doctest::Approx(hs).epsilon(1e-10));
        CHECK(e.hs_deviation == doctest::Approx(hs).epsilon(1e-12));
        CHECK(hs_norm(q.matrix.entries - e.matrix.entries) < 1e-10);
        CHECK(q.diagnostics.idempotency_defect < 1e-10);
        CHECK_FALSE(e.diagnostics.fallback);
    }
}

TEST_CASE("non-selfadjoint projection") {
    const OperatorMatrix L = build_operator_matrix(complex_potential(), BoundaryCondition::PerPlus, 64);
    const ProjectionResult q = riesz_projection_disc(L, 10);
    const ProjectionResult e = riesz_projection_eigen_disc(L, 10);
    CHECK(q.hs_deviation == doctest::Approx(0.03832985074993121).epsilon(1e-9));
    CHECK(e.hs_deviation == doctest::Approx(0.03832985074993121).epsilon(1e-9));
    CHECK(idempotency(q.matrix.entries) < 1e-10);
    CHECK(hs_norm(q.matrix.entries * L.entries - L.entries * q.matrix.entries) < 1e-8);
    CHECK(std::abs(q.matrix.entries.trace() - 2.0) < 1e-10);
}

TEST_CASE("series route agrees with quadrature") {
    const PotentialSpec m = mathieu();
    const int M = 48, n = 16;
    const ProjectionResult s = projection_diff_series(m, BoundaryCondition::PerPlus, M, n, 30);
    const ProjectionResult q = riesz_projection_disc(build_operator_matrix(m, BoundaryCondition::PerPlus, M), n);
    CHECK(s.method == ProjectionMethod::Series);
    CHECK(s.diagnostics.max_contraction_hs < 1.0);
    CHECK(s.diagnostics.series_terms == static_cast<int>(s.diagnostics.term_hs.size()));
    CHECK(hs_norm(s.matrix.entries - q.matrix.entries) < 1e-10);

    const PotentialSpec strong = make_example(ExampleKind::Mathieu, {40.0});
    CHECK_THROWS_AS(projection_diff_series(strong, BoundaryCondition::PerPlus, 24, 2, 30), ContractionError);
}

TEST_CASE("proximity is detected") {
    // The free eigenvalues 16 and 24 lie on |z - 20| = 4.
    const OperatorMatrix L = build_operator_matrix(PotentialSpec(), BoundaryCondition::PerPlus, 16);
    CHECK_THROWS_AS(riesz_projection_quadrature(L, ContourSpec::circle(20.0, 4.0)), ProximityError);
}

TEST_CASE("eigen route") {
    const OperatorMatrix L = build_operator_matrix(complex_potential(), BoundaryCondition::PerMinus, 31);
    const Eigen::VectorXcd ev = eigenvalues(L);
    CHECK(ev.size() == L.dim());
    CHECK(std::abs(ev.sum() - L.entries.trace()) < 1e-10);
    const ProjectionResult e = riesz_projection_eigen_disc(L, 7);
    CHECK(e.method == ProjectionMethod::Eigen);
    CHECK(e.diagnostics.eigvec_condition >= 1.0);
    CHECK(idempotency(e.matrix.entries) < 1e-10);
    CHECK(disc_eigen_count(L, 49.0, 7.0) == 2);
}

TEST_CASE("a00 double contour") {
    const PotentialSpec zero;
    CHECK(a00_closed_form(zero, BoundaryCondition::PerMinus, 40, 5, 5) == 0.0);
    const PotentialSpec m = mathieu();
    const double closed = a00_closed_form(m, BoundaryCondition::PerMinus, 40, 5, 5);
    CHECK(closed == doctest::Approx(1.0 / 256.0 + 1.0 / 576.0).epsilon(1e-14));
    CHECK(a00_double_contour(m, BoundaryCondition::PerMinus, 40, 5, 5) == doctest::Approx(closed).epsilon(1e-12));
    for (int n : {9, 13}) {
        for (int k : {n, n - 2, n + 4}) {
            const double c = a00_closed_form(m, BoundaryCondition::PerMinus, 40, n, k);
            const double d = a00_double_contour(m, BoundaryCondition::PerMinus, 40, n, k);
            if (c == 0.0) {
                CHECK(std::abs(d) <= 1e-15);
            } else {
                CHECK(d == doctest::Approx(c).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("rectangle projection and counting") {
    const OperatorMatrix L = build_operator_matrix(mathieu(), BoundaryCondition::PerPlus, 40);
    const ProjectionResult p = p_upper_rectangle(L, 6);
    CHECK(std::abs(p.matrix.entries.trace() - 7.0) < 1e-8);
    CHECK(idempotency(p.matrix.entries) < 1e-8);
    CHECK_THROWS_AS(p_upper_rectangle(build_operator_matrix(mathieu(), BoundaryCondition::PerPlus, 16), 6),
                    InvalidArgument);
    for (int n : {4, 6, 10}) CHECK(count_in_disc(L, n) == 2);
    const OperatorMatrix D = build_operator_matrix(mathieu(), BoundaryCondition::Dir, 40);
    for (int n : {3, 5, 8}) CHECK(count_in_disc(D, n) == 1);
}

TEST_CASE("method names") {
    CHECK(to_string(ProjectionMethod::Quadrature) == "Quadrature");
    CHECK(to_string(ProjectionMethod::Eigen) == "Eigen");
    CHECK(to_string(ProjectionMethod::Series) == "Series");
}
