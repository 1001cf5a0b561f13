#include <doctest.h>

#include <cmath>

#include "hill/error.hpp"
#include "hill/resolvent.hpp"

using namespace hill;

namespace {

const cplx I{0.0, 1.0};

PotentialSpec mathieu() { return make_example(ExampleKind::Mathieu, {1.0}); }

}  // namespace

TEST_CASE("direct resolvent inverts z - L") {
    const PotentialSpec s(0.5, {{2, 0.3 + 0.2 * I}, {-2, -0.1 * I}, {4, 0.05}}, 4);
    const OperatorMatrix L = build_operator_matrix(s, BoundaryCondition::PerPlus, 16);
    const cplx z{30.0, 2.0};
    const OperatorMatrix R = resolvent_direct(L, z);
    CHECK(R.label == MatrixLabel::Resolvent);
    Matrix shifted = -L.entries;
    shifted.diagonal().array() += z;
    CHECK(hs_norm(shifted * R.entries - Matrix::Identity(L.dim(), L.dim())) < 1e-12);
}

TEST_CASE("zero potential resolvent is free") {
    const OperatorMatrix L = build_operator_matrix(PotentialSpec(), BoundaryCondition::Dir, 10);
    const cplx z{7.0, 1.0};
    CHECK(hs_norm(resolvent_direct(L, z).entries - r0_diag(BoundaryCondition::Dir, 10, z).entries) < 1e-15);
    CHECK_THROWS_AS(resolvent_direct(L, cplx{9.0, 0.0}), SingularError);
}

TEST_CASE("singular shift reports condition") {
    const OperatorMatrix L = build_operator_matrix(PotentialSpec(), BoundaryCondition::PerPlus, 6);
    try {
        solve_shifted(L.entries, cplx{16.0, 0.0}, Matrix::Identity(L.dim(), L.dim()));
        FAIL("expected SingularError");
    } catch (const SingularError& e) {
        CHECK(e.condition() > kMaxCondition);
    }
}

TEST_CASE("first resolvent identity") {
    const PotentialSpec s(0.5, {{2, 0.3 + 0.2 * I}, {-2, -0.1 * I}, {4, 0.05}}, 4);
    for (auto bc : {BoundaryCondition::PerPlus, BoundaryCondition::PerMinus, BoundaryCondition::Dir}) {
        const OperatorMatrix L = build_operator_matrix(s, bc, 14);
        const cplx z{20.0, 3.0}, w{-4.0, 1.5};
        const Matrix Rz = resolvent_direct(L, z).entries;
        const Matrix Rw = resolvent_direct(L, w).entries;
        CHECK(hs_norm(Rz - Rw - (w - z) * Rz * Rw) < 1e-13);
    }
}

TEST_CASE("series matches direct resolvent") {
    const PotentialSpec m = mathieu();
    const int n = 16;
    const cplx z = double(n * n) + double(n) * I;
    const int M = 48;
    const SeriesResult series = resolvent_diff_series(m, BoundaryCondition::PerPlus, M, z, 1e-14, 40);
    CHECK(series.converged);
    CHECK(series.contraction_hs < 1.0);
    CHECK(series.last_term_hs <= 1e-14);
    const OperatorMatrix L = build_operator_matrix(m, BoundaryCondition::PerPlus, M);
    const Matrix diff = resolvent_direct(L, z).entries - r0_diag(BoundaryCondition::PerPlus, M, z).entries;
    CHECK(hs_norm(series.value.entries - diff) < 1e-10);

    const SeriesResult short_series = resolvent_diff_series(m, BoundaryCondition::PerPlus, M, z, 1e-14, 2);
    CHECK_FALSE(short_series.converged);
    CHECK(short_series.terms_used == 3);
}

TEST_CASE("series terms") {
    const PotentialSpec m = mathieu();
    const cplx z{50.0, 5.0};
    const int M = 12;
    const Matrix r0 = r0_diag(BoundaryCondition::Dir, M, z).entries;
    const Matrix v = build_v_matrix(m, BoundaryCondition::Dir, M).entries;
    CHECK(hs_norm(series_term(m, BoundaryCondition::Dir, M, z, 0).entries - r0 * v * r0) < 1e-15);
    CHECK(hs_norm(series_term(m, BoundaryCondition::Dir, M, z, 2).entries - r0 * v * r0 * v * r0 * v * r0) < 1e-15);
    CHECK_THROWS_AS(series_term(m, BoundaryCondition::Dir, M, z, -1), InvalidArgument);
    CHECK_THROWS_AS(series_term(m, BoundaryCondition::Dir, M, z, kMaxSeriesOrder + 1), InvalidArgument);
    CHECK_THROWS_AS(series_term(m, BoundaryCondition::Dir, M, cplx{49.0, 0.0}, 0), ProximityError);
}

TEST_CASE("series refuses non-contractive points") {
    const PotentialSpec strong = make_example(ExampleKind::Mathieu, {20.0});
    try {
        resolvent_diff_series(strong, BoundaryCondition::PerPlus, 12, cplx{4.5, 0.5}, 1e-10, 20);
        FAIL("expected ContractionError");
    } catch (const ContractionError& e) {
        CHECK(e.measured_hs() >= 1.0);
    }
    CHECK_THROWS_AS(resolvent_diff_series(mathieu(), BoundaryCondition::PerPlus, 12, cplx{100.0, 1.0}, 0.0, 20),
                    InvalidArgument);
}

TEST_CASE("chain sums agree with matrix products") {
    const PotentialSpec m = mathieu();
    const cplx z{16.0, 4.0};
    const ChainSum c = chain_sum_check(m, BoundaryCondition::PerPlus, 12, z, 0, 0, 2);
    CHECK(c.tuples == 13 * 13);
    // Three steps of +-2 cannot return to 0, and W(0) = |v0| = 0.
    CHECK(c.brute_force == 0.0);
    CHECK(std::abs(c.matrix_entry) < 1e-18);
    const ChainSum odd = chain_sum_check(m, BoundaryCondition::PerPlus, 12, z, 0, 2, 2);
    CHECK(odd.brute_force > 0.0);
    CHECK(odd.brute_force == doctest::Approx(odd.matrix_entry).epsilon(1e-13));

    const PotentialSpec s(0.5, {{2, 0.3 + 0.2 * I}, {-2, -0.1 * I}, {4, 0.05}}, 4);
    for (int t = 0; t <= 3; ++t) {
        const ChainSum d = chain_sum_check(s, BoundaryCondition::PerMinus, 9, cplx{10.0, 2.0}, 1, -3, t);
        CHECK(d.brute_force == doctest::Approx(d.matrix_entry).epsilon(1e-13));
    }
    CHECK_THROWS_AS(chain_sum_check(m, BoundaryCondition::PerPlus, 12, z, 1, 0, 2), InvalidArgument);
    CHECK_THROWS_AS(chain_sum_check(m, BoundaryCondition::PerPlus, 12, z, 0, 0, 4), InvalidArgument);
    CHECK_THROWS_AS(chain_sum_check(m, BoundaryCondition::Dir, 400, z, 1, 1, 3), BudgetError);
}
