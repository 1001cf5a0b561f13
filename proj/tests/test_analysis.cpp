#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hill/analysis.hpp"
#include "hill/error.hpp"

using namespace hill;

namespace {

PotentialSpec mathieu() { return make_example(ExampleKind::Mathieu, {1.0}); }

RSequence small_comb() { return RSequence::from_spec(make_example(ExampleKind::DeltaComb, {1.0, 10.0})); }

}  // namespace

TEST_CASE("parallel map keeps order and rethrows the first failure") {
    std::vector<int> items(50);
    for (int i = 0; i < 50; ++i) items[i] = i;
    for (int jobs : {1, 3, 8}) {
        const auto out = parallel_map(items, jobs, [](int x) { return x * x; });
        REQUIRE(out.size() == items.size());
        for (int i = 0; i < 50; ++i) CHECK(out[i] == i * i);
    }
    auto failing = [](int x) {
        if (x == 7 || x == 30) throw std::runtime_error("item " + std::to_string(x));
        return x;
    };
    for (int jobs : {1, 4}) {
        try {
            parallel_map(items, jobs, failing);
            FAIL("expected an exception");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "item 7");
        }
    }
}

TEST_CASE("helpers") {
    CHECK(admissible_range(BoundaryCondition::PerPlus, 1, 8) == std::vector<int>{2, 4, 6, 8});
    CHECK(admissible_range(BoundaryCondition::PerMinus, 2, 8) == std::vector<int>{3, 5, 7});
    CHECK(admissible_range(BoundaryCondition::Dir, 3, 5) == std::vector<int>{3, 4, 5});
    CHECK(loglog_slope({1, 2, 4, 8}, {3, 1.5, 0.75, 0.375}) == doctest::Approx(-1.0));
    CHECK(std::isnan(loglog_slope({2}, {1})));
    CHECK_NOTHROW(check_window_rule(mathieu(), 50, 20));
    try {
        check_window_rule(mathieu(), 49, 20);
        FAIL("expected InvalidArgument");
    } catch (const InvalidArgument& e) {
        const std::string what = e.what();
        CHECK(what.find("49") != std::string::npos);
        CHECK(what.find("50") != std::string::npos);
    }
}

TEST_CASE("decay report for the zero potential") {
    const DecayReport r = decay_report(PotentialSpec(), BoundaryCondition::Dir, 40, {4, 8}, 12);
    REQUIRE(r.rows.size() == 12);
    for (const auto& row : r.rows) {
        CHECK(row.hs <= 1e-12);
        CHECK(row.eigen_distance <= 1e-12);
    }
    REQUIRE(r.tail_sums.size() == 2);
    CHECK(r.tail_sums[0].tail <= 1e-24);
    CHECK_THROWS_AS(decay_report(mathieu(), BoundaryCondition::PerPlus, 30, {4}, 20), InvalidArgument);
}

TEST_CASE("decay report for mathieu") {
    DecayOptions opt;
    opt.n_min = 10;
    opt.jobs = 2;
    const DecayReport r = decay_report(mathieu(), BoundaryCondition::PerPlus, 64, {10, 16}, 20, opt);
    REQUIRE(r.rows.size() == 6);
    CHECK(r.rows.front().n == 10);
    CHECK(r.rows.front().hs == doctest::Approx(0.07176449182306952).epsilon(1e-10));
    CHECK(r.rows[3].hs == doctest::Approx(0.04444999071533235).epsilon(1e-10));
    CHECK(r.rows.back().hs == doctest::Approx(0.035486147989053224).epsilon(1e-10));
    for (const auto& row : r.rows) {
        CHECK(row.eigen_distance < 1e-10);
        CHECK(row.parseval_defect < 1e-12);
        CHECK(row.operator_norm <= row.hs + 1e-15);
    }
    double tail = 0.0;
    for (const auto& row : r.rows) {
        if (row.n > 16) tail += row.hs * row.hs;
    }
    CHECK(r.tail_sums[1].N == 16);
    CHECK(r.tail_sums[1].tail == doctest::Approx(tail));
    CHECK(r.fitted_slope < -0.8);
    CHECK(r.fitted_slope > -1.2);
}

TEST_CASE("localization") {
    const LocalizationReport r = localization_report(mathieu(), BoundaryCondition::PerPlus, 48, 2, 12);
    for (const auto& row : r.rows) {
        CHECK(row.error.empty());
        CHECK(row.count == row.expected);
    }
    REQUIRE(r.N_loc.has_value());
    CHECK(*r.N_loc == 2);
}

TEST_CASE("reconstruction") {
    const TruncationWindow w = make_window(BoundaryCondition::PerPlus, 96);
    const Vector f = random_band_limited(w, 24, 42);
    CHECK(f.norm() == doctest::Approx(1.0));
    for (int a = 0; a < w.dim(); ++a) {
        if (std::abs(w.indices[a]) > 24) CHECK(f(a) == cplx{});
    }
    CHECK(random_band_limited(w, 24, 42) == f);
    CHECK(random_band_limited(w, 24, 43) != f);

    ReconstructOptions opt;
    opt.trials = 20;
    const ReconstructionReport r = reconstruct(mathieu(), BoundaryCondition::PerPlus, 96, f, 6, 30, opt);
    CHECK(r.error_norm < 1e-9);
    CHECK(r.block_norms.size() == 1 + admissible_range(BoundaryCondition::PerPlus, 7, 30).size());
    CHECK(r.ordered_sup >= r.f_norm - 1e-12);
    CHECK(r.unconditional_sup <= 2.0 * r.ordered_sup);
    CHECK(r.trials == 20);
    CHECK_THROWS_AS(reconstruct(mathieu(), BoundaryCondition::PerPlus, 96, random_band_limited(w, 60, 1), 6, 30),
                    InvalidArgument);
}

TEST_CASE("elementary inequalities") {
    const ElementaryChecks ten = elementary_checks(10, 3);
    CHECK(ten.t0_lhs == doctest::Approx(0.09516533569218563).epsilon(1e-13));
    CHECK(ten.t0_rhs == doctest::Approx(0.1));
    CHECK(ten.t0_holds);
    CHECK(ten.t00_lhs == doctest::Approx(0.04106298333804347).epsilon(1e-10));
    CHECK(ten.t00_rhs == doctest::Approx(4.0 / 9.0));
    CHECK(ten.t00_holds);
    CHECK(elementary_checks(1, 1).t0_lhs == doctest::Approx(0.6449330668497264).epsilon(1e-13));
    for (int k = 1; k <= 20; ++k) {
        const ElementaryChecks c = elementary_checks(k, k);
        CHECK(c.t0_holds);
        CHECK(c.t00_holds);
    }
}

TEST_CASE("lemma names") {
    for (auto id : {LemmaId::T0, LemmaId::T00, LemmaId::T1, LemmaId::T2, LemmaId::T3, LemmaId::T9, LemmaId::T33}) {
        CHECK(parse_lemma_id(to_string(id)) == id);
    }
    CHECK_THROWS_AS(parse_lemma_id("T4"), InvalidArgument);
}

TEST_CASE("lemma sums match brute force") {
    const RSequence r = small_comb();
    struct Case {
        LemmaId id;
        double at3, at8;
    };
    for (const Case& c : {Case{LemmaId::T1, 0.007420856341759254, 0.0018428018993823564},
                          Case{LemmaId::T3, 0.009200702217669748, 0.002654408482720031},
                          Case{LemmaId::T9, 5.427816758945784e-05, 2.7937729930152767e-06},
                          Case{LemmaId::T33, 6.847797496290916e-06, 0.0}}) {
        CAPTURE(to_string(c.id));
        CHECK(lemma_sums(c.id, r, 3, 40).lhs == doctest::Approx(c.at3).epsilon(1e-12));
        const double at8 = lemma_sums(c.id, r, 8, 40).lhs;
        if (c.at8 == 0.0) {
            CHECK(at8 == 0.0);
        } else {
            CHECK(at8 == doctest::Approx(c.at8).epsilon(1e-12));
        }
        const auto grid = lemma_grid(c.id, r, {3, 8}, 40);
        REQUIRE(grid.size() == 2);
        CHECK(grid[0].lhs == doctest::Approx(c.at3).epsilon(1e-12));
    }
}

TEST_CASE("lemma report fields") {
    const RSequence r = RSequence::from_spec(mathieu());
    const LemmaReport t1 = lemma_sums(LemmaId::T1, r, 10, 200);
    CHECK(t1.lhs == doctest::Approx(0.01138080742184834).epsilon(1e-12));
    CHECK(t1.r_term == doctest::Approx(0.5 / 10));
    CHECK(t1.tail_energy == 0.0);
    CHECK(t1.tail_bound > 0.0);
    CHECK(t1.fitted_ratio == doctest::Approx(t1.lhs / t1.bound));
    CHECK(t1.terms > 0);

    const LemmaReport t2 = lemma_sums(LemmaId::T2, r, 10, 200);
    CHECK(t2.lhs > 0.0);
    CHECK(t2.lhs < t1.bound);
    CHECK_THROWS_AS(lemma_sums(LemmaId::T9, r, 10, 200, 1000), BudgetError);
    CHECK_THROWS_AS(lemma_sums(LemmaId::T1, r, 10, 5), InvalidArgument);
}

TEST_CASE("rho study") {
    const auto rows = rho_bound_study(mathieu(), std::nullopt, {8, 9, 16}, 48);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].bc == BoundaryCondition::PerPlus);
    CHECK(rows[1].bc == BoundaryCondition::PerMinus);
    for (const auto& row : rows) {
        CHECK(row.in_window);
        CHECK(row.rho == doctest::Approx(rho_n(mathieu(), row.n)));
        CHECK(row.ratio == doctest::Approx(row.measured_hs / row.rho));
        CHECK(row.r0_norm == doctest::Approx(1.0 / row.n).epsilon(1e-12));
        CHECK(row.measured_hs > 0.0);
    }
    const auto zero = rho_bound_study(PotentialSpec(), BoundaryCondition::Dir, {5}, 20);
    CHECK(zero[0].measured_hs == 0.0);
    CHECK(zero[0].ratio == 0.0);
}
