#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hill/error.hpp"
#include "hill/potential.hpp"

using namespace hill;

namespace {

const cplx I{0.0, 1.0};

PotentialSpec random_spec(std::mt19937_64& rng, int cutoff) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::map<int, cplx> q;
    for (int m = -cutoff; m <= cutoff; m += 2) {
        if (m != 0 && u(rng) > -0.5) q[m] = {u(rng), u(rng)};
    }
    return PotentialSpec({u(rng), u(rng)}, q, cutoff, "random");
}

}  // namespace

TEST_CASE("mathieu coefficients") {
    const PotentialSpec s = make_example(ExampleKind::Mathieu, {1.0});
    CHECK(s.q(2) == -0.5 * I);
    CHECK(s.q(-2) == 0.5 * I);
    CHECK(s.v0() == cplx{});
    CHECK(v_hat(s, 2) == cplx{1.0, 0.0});
    CHECK(v_hat(s, -2) == cplx{1.0, 0.0});
    CHECK(r_of(s, 2) == 0.5);
    CHECK(r_of(s, -2) == 0.5);
}

TEST_CASE("delta comb coefficients") {
    const PotentialSpec s = make_example(ExampleKind::DeltaComb, {M_PI, 4.0});
    CHECK(std::abs(s.q(2) - (-0.5 * I)) < 1e-15);
    CHECK(std::abs(s.q(4) - (-0.25 * I)) < 1e-15);
    CHECK(s.q(6) == cplx{});
    CHECK(std::abs(s.v0() - 1.0) < 1e-15);
    CHECK(std::abs(r_of(s, 4) - 0.25) < 1e-15);
    const PotentialSpec wide = make_example(ExampleKind::DeltaComb, {M_PI, 8.0});
    CHECK(std::abs(v_hat(wide, 6) - 1.0) < 1e-15);
}

TEST_CASE("random decay is seeded and decays") {
    const PotentialSpec a = make_example(ExampleKind::RandomDecay, {1.0, 20.0}, 7);
    const PotentialSpec b = make_example(ExampleKind::RandomDecay, {1.0, 20.0}, 7);
    const PotentialSpec c = make_example(ExampleKind::RandomDecay, {1.0, 20.0}, 8);
    CHECK(a.coefficients() == b.coefficients());
    CHECK(a.coefficients() != c.coefficients());
    for (const auto& [m, value] : a.coefficients()) {
        const double scale = std::pow(std::abs(m), -1.0);
        CHECK(std::abs(value) >= 0.5 * scale);
        CHECK(std::abs(value) <= 1.5 * scale);
    }
    CHECK_THROWS_AS(make_example(ExampleKind::RandomDecay, {0.5, 20.0}), InvalidArgument);
    CHECK_THROWS_AS(make_example(ExampleKind::DeltaComb, {1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(make_example(ExampleKind::DeltaComb, {1.0, -4.0}), InvalidArgument);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(PotentialSpec(0.0, {{0, 1.0}}, 4), InvalidArgument);
    CHECK_THROWS_AS(PotentialSpec(0.0, {{3, 1.0}}, 4), InvalidArgument);
    CHECK_THROWS_AS(PotentialSpec(0.0, {{6, 1.0}}, 4), InvalidArgument);
    CHECK_THROWS_AS(PotentialSpec(0.0, {}, 0), InvalidArgument);
    CHECK(PotentialSpec().is_zero());
}

TEST_CASE("v_hat and r_of edge cases") {
    const PotentialSpec s(2.0, {{2, 3.0 * I}, {-2, 4.0}}, 8);
    CHECK(r_of(s, 2) == 4.0);
    CHECK(r_of(s, -2) == 4.0);
    CHECK(v_hat(s, 0) == cplx{2.0, 0.0});
    CHECK(v_hat(s, 6) == cplx{});
    CHECK(v_hat(s, 100) == cplx{});
    CHECK_THROWS_AS(v_hat(s, 3), InvalidArgument);
    CHECK_THROWS_AS(r_of(s, 0), InvalidArgument);
    CHECK_THROWS_AS(r_of(s, 1), InvalidArgument);
}

TEST_CASE("tail energy") {
    const PotentialSpec m = make_example(ExampleKind::Mathieu, {1.0});
    CHECK(tail_energy(m, 1.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(tail_energy(m, 3.0) == 0.0);
    CHECK_THROWS_AS(tail_energy(m, 0.0), InvalidArgument);
    // Exact partial sum 2 * sum_{even 4 <= k <= 100} 1/k^2, square-rooted.
    const PotentialSpec comb = make_example(ExampleKind::DeltaComb, {M_PI, 100.0});
    CHECK(tail_energy(comb, 4.0) == doctest::Approx(0.5590763515037679).epsilon(1e-13));
    CHECK(tail_energy(comb, 101.0) == 0.0);
}

TEST_CASE("rho_n") {
    CHECK(rho_n(PotentialSpec(), 5) == 0.0);
    const PotentialSpec m = make_example(ExampleKind::Mathieu, {1.0});
    for (int n : {5, 9, 30}) CHECK(rho_n(m, n) == doctest::Approx(std::sqrt(0.5 / n)).epsilon(1e-14));
    const PotentialSpec comb = make_example(ExampleKind::DeltaComb, {M_PI, 100.0});
    CHECK(rho_n(comb, 16) == doctest::Approx(0.7809364567168322).epsilon(1e-13));
    CHECK_THROWS_AS(rho_n(m, 0), InvalidArgument);
}

TEST_CASE("sequence stats") {
    const SequenceStats zero = sequence_stats(PotentialSpec());
    CHECK(zero.r_norm == 0.0);
    CHECK(zero.h_minus1_norm == 0.0);
    CHECK(sequence_stats(make_example(ExampleKind::Mathieu, {1.0})).r_norm ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    const PotentialSpec s(2.0, {{2, 1.0}, {-2, 1.0}}, 2);
    CHECK(sequence_stats(s).h_minus1_norm * sequence_stats(s).h_minus1_norm == doctest::Approx(4.5).epsilon(1e-15));
    const PotentialSpec comb = make_example(ExampleKind::DeltaComb, {M_PI, 100.0});
    CHECK(sequence_stats(comb).r_norm * sequence_stats(comb).r_norm ==
          doctest::Approx(0.8125663668107647).epsilon(1e-13));
}

TEST_CASE("properties on random specs") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 25; ++trial) {
        const int cutoff = 2 * (1 + static_cast<int>(rng() % 12));
        const PotentialSpec s = random_spec(rng, cutoff);
        const RSequence r = RSequence::from_spec(s);
        double previous = INFINITY;
        for (int m = 2; m <= cutoff + 4; m += 2) {
            CHECK(r_of(s, m) == r_of(s, -m));
            if (s.coefficients().count(m)) CHECK(std::abs(v_hat(s, m) - I * double(m) * s.q(m)) == 0.0);
            const double e = tail_energy(s, m);
            CHECK(e <= previous);
            previous = e;
            double head = 0.0;
            for (int k = 2; k < m; k += 2) head += 2.0 * r_of(s, k) * r_of(s, k);
            CHECK(e * e + head == doctest::Approx(r.norm_squared()).epsilon(1e-12));
        }
        for (int n = (cutoff + 1) * (cutoff + 1); n < (cutoff + 1) * (cutoff + 1) + 20; ++n) {
            CHECK(rho_n(s, n + 1) <= rho_n(s, n));
        }
    }
}

TEST_CASE("RSequence") {
    const RSequence r(4, {0.25, 0.5, 7.0, 0.5, 0.25});
    CHECK(r.at(0) == 0.0);
    CHECK(r.at(2) == 0.5);
    CHECK(r.at(-4) == 0.25);
    CHECK(r.at(3) == 0.0);
    CHECK(r.at(6) == 0.0);
    CHECK(r.norm_squared() == doctest::Approx(2 * (0.0625 + 0.25)));
    CHECK(r.tail_squared(3.0) == doctest::Approx(0.125));
    CHECK(r.support() == std::vector<int>{-4, -2, 2, 4});
    CHECK_THROWS_AS(RSequence(4, {0.25, 0.5, 0.0, 0.4, 0.25}), InvalidArgument);
    CHECK_THROWS_AS(RSequence(4, {0.25, 0.5, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(RSequence(4, {-0.25, 0.5, 0.0, 0.5, -0.25}), InvalidArgument);
}

TEST_CASE("file round trip") {
    const PotentialSpec s = make_example(ExampleKind::RandomDecay, {0.8, 12.0}, 3);
    std::stringstream ss;
    write_potential(ss, s);
    const PotentialSpec back = read_potential(ss);
    CHECK(back.v0() == s.v0());
    CHECK(back.coefficients() == s.coefficients());

    std::istringstream bad_key("v0 0 0\n3 1 0\n");
    CHECK_THROWS_AS(read_potential(bad_key), InvalidArgument);
    std::istringstream garbage("v0 0 0\n2 one 0\n");
    CHECK_THROWS_AS(read_potential(garbage), InvalidArgument);
    std::istringstream commented("# header\nv0 1 0  # mean\n2 0 -0.5\n-2 0 0.5\n");
    const PotentialSpec c = read_potential(commented);
    CHECK(c.v0() == cplx{1.0, 0.0});
    CHECK(c.q(2) == -0.5 * I);
    CHECK_THROWS_AS(load_potential_file("/nonexistent/potential.txt"), InvalidArgument);
}
