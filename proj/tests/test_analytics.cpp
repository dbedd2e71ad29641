#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cachenet/analytics.hpp"
#include "cachenet/rng.hpp"

using namespace cachenet;

namespace {

// Independent root finder for F(T) = 0; pure bisection, no Newton.
double bisection_oracle(const CheProblem& p, double tol = 1e-13) {
    double lo = 0.0, hi = 1.0;
    while (che_F(hi, p) > 0.0) hi *= 2.0;
    for (int i = 0; i < 200 && (hi - lo) > tol * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (che_F(mid, p) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("che_F fixed values") {
    CheProblem p{1.0, {1.0, 1.0}, std::nullopt};
    CHECK(che_F(0.0, p) == Catch::Approx(1.0));                 // F(0) = capacity
    CHECK(che_F(std::log(2.0), p) == Catch::Approx(0.0).margin(1e-15));
    CHECK(che_F(1e9, p) == Catch::Approx(1.0 - 2.0));           // capacity - #contents

    CheProblem big{7.0, {0.5, 0.25, 3.0}, std::nullopt};
    CHECK(che_F(0.0, big) == Catch::Approx(7.0));
}

TEST_CASE("che_F is strictly decreasing when a rate is positive") {
    Rng rng(5);
    CheProblem p{3.0, {}, std::nullopt};
    for (int i = 0; i < 20; ++i) p.rates.push_back(rng.next_double() * 4.0);
    double prev = che_F(0.0, p);
    for (double t = 0.05; t < 10.0; t += 0.05) {
        const double cur = che_F(t, p);
        CHECK(cur < prev);
        CHECK(che_F_derivative(t, p) < 0.0);
        prev = cur;
    }
}

TEST_CASE("initial guess formula") {
    CHECK(che_initial_guess({1.0, {1.0, 1.0}, std::nullopt}) == Catch::Approx(0.5));
    CHECK(che_initial_guess({100.0, {20.0, 30.0}, std::nullopt}) == Catch::Approx(2.0));
    CHECK(che_initial_guess({10.0, {10.0}, std::nullopt}) == Catch::Approx(1.0));
    CHECK_THROWS_AS(che_initial_guess({1.0, {0.0, 0.0}, std::nullopt}), std::domain_error);
}

TEST_CASE("solver finds the closed-form roots") {
    const CheSolution two = solve_characteristic_time({1.0, {1.0, 1.0}, std::nullopt}, 1e-12);
    CHECK(two.converged);
    CHECK(two.T == Catch::Approx(std::log(2.0)).margin(1e-9));

    // symmetric case: k contents at rate r, capacity C -> T = -ln(1 - C/k)/r
    for (auto [k, C, r] : {std::tuple{10, 5.0, 1.0}, {100, 30.0, 2.5}, {1000, 999.0, 0.3}}) {
        CheProblem p{C, std::vector<double>(static_cast<std::size_t>(k), r), std::nullopt};
        const CheSolution sol = solve_characteristic_time(p, 1e-13);
        CHECK(sol.converged);
        const double expected = -std::log(1.0 - C / k) / r;
        CHECK(sol.T == Catch::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("solver agrees with the bisection oracle on random problems") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 10 + static_cast<int>(rng.next_double() * 500);
        const double alpha = 0.6 + rng.next_double() * 0.6;
        CheProblem p;
        p.capacity = 1.0 + rng.next_double() * (k / 2.0 - 1.0);
        const auto dist = zipf_distribution(k, alpha);
        const double scale = 1.0 + rng.next_double() * 200.0;
        for (double d : dist) p.rates.push_back(scale * d);
        const CheSolution sol = solve_characteristic_time(p, 1e-12);
        REQUIRE(sol.converged);
        const double oracle = bisection_oracle(p);
        CHECK(std::abs(sol.T - oracle) <= 1e-6 * oracle);
        CHECK(sol.iterations <= 30);
    }
}

TEST_CASE("solver rejects ill-posed problems") {
    CHECK_THROWS_AS(solve_characteristic_time({2.0, {1.0, 1.0}, std::nullopt}),
                    std::domain_error);
    CHECK_THROWS_AS(solve_characteristic_time({5.0, {1.0, 1.0, 0.0}, std::nullopt}),
                    std::domain_error);
}

TEST_CASE("occupancy identity holds at the solved T") {
    const auto dist = zipf_distribution(2000, 0.8);
    CheProblem p{150.0, {}, std::nullopt};
    for (double d : dist) p.rates.push_back(50.0 * d);
    const CheSolution sol = solve_characteristic_time(p, 1e-10);
    double occ = 0.0;
    for (double r : p.rates) occ += 1.0 - std::exp(-r * sol.T);
    CHECK(occ == Catch::Approx(150.0).margin(1e-8));
}

TEST_CASE("hit probability closed forms") {
    CHECK(hit_probability_lru(0.0, 5.0) == 0.0);
    CHECK(hit_probability_lru(1.0, std::log(2.0)) == Catch::Approx(0.5));
    CHECK(hit_probability_lru(100.0, 1e9) == Catch::Approx(1.0));

    CHECK(hit_probability_tlru(1.0, std::log(2.0), 1.0) ==
          Catch::Approx(hit_probability_lru(1.0, std::log(2.0))));
    CHECK(hit_probability_tlru(1.0, std::log(2.0), 0.0) == 0.0);
    CHECK(hit_probability_tlru(1.0, std::log(2.0), 0.8) == Catch::Approx(0.4));

    // monotone in rho and T; tlru never exceeds lru
    double prev = -1.0;
    for (double rho = 0.0; rho < 5.0; rho += 0.1) {
        const double h = hit_probability_lru(rho, 1.0);
        CHECK(h >= prev);
        CHECK(hit_probability_tlru(rho, 1.0, 0.7) <= h);
        prev = h;
    }
}

TEST_CASE("admission probability under each TTU law") {
    CHECK(admit_probability({TtuLaw::Kind::Constant, 10.0, 0, 0, 0}, 1.0) == 1.0);
    CHECK(admit_probability({TtuLaw::Kind::Constant, 0.5, 0, 0, 0}, 1.0) == 0.0);
    CHECK(admit_probability({TtuLaw::Kind::Normal, 0, 1.0, 1.0, 1e-12}, 1.0) ==
          Catch::Approx(0.5).margin(1e-9));
    // threshold under the floor clamp is always cleared
    CHECK(admit_probability({TtuLaw::Kind::Normal, 0, 1.0, 1.0, 2.0}, 1.0) == 1.0);
    CHECK(admit_probability({TtuLaw::Kind::Absent, 0, 0, 0, 0}, 1.0) == 0.0);
}

TEST_CASE("mm1 waiting time") {
    CHECK(mm1_waiting_time(1.0, 2.0) == Catch::Approx(0.5));
    CHECK(mm1_waiting_time(0.0, 2.0) == 0.0);
    CHECK_THROWS_AS(mm1_waiting_time(3.0, 3.0), std::domain_error);
    CHECK_THROWS_AS(mm1_waiting_time(5.0, 3.0), std::domain_error);
}

TEST_CASE("chain delay weights waiting times by miss products") {
    CHECK(chain_delay({{1.0, 2.0}}, {0.5}) == Catch::Approx(0.25));
    CHECK(chain_delay({{1.0, 2.0}, {1.0, 2.0}}, {1.0, 1.0}) == Catch::Approx(0.0));
    CHECK(chain_delay({{1.0, 2.0}, {1.0, 2.0}}, {0.0, 0.0}) == Catch::Approx(1.0));
    // exclusive mode counts the first hop fully
    CHECK(chain_delay({{1.0, 2.0}}, {0.5}, ChainProductMode::Exclusive) ==
          Catch::Approx(0.5));
    CHECK_THROWS_AS(chain_delay({{5.0, 2.0}}, {0.5}), std::domain_error);
}

TEST_CASE("predict_hit_curve composes solver and closed forms") {
    // symmetric two-content toy: T = ln 2, both hit probabilities 0.5
    CheProblem p{1.0, {1.0, 1.0}, std::vector<double>{1.0, 1.0}};
    const auto curve = predict_hit_curve(p, TtuLaw{});
    REQUIRE(curve.size() == 2);
    CHECK(curve[0].lru == Catch::Approx(0.5).margin(1e-9));
    CHECK(curve[0].tlru == Catch::Approx(curve[0].lru));  // admit prob 1

    // supplied admission factors override the law
    CheProblem half{1.0, {1.0, 1.0}, std::vector<double>{0.5, 0.5}};
    const auto damped = predict_hit_curve(half, TtuLaw{});
    CHECK(damped[0].tlru == Catch::Approx(0.25).margin(1e-9));
    for (std::size_t i = 0; i < damped.size(); ++i)
        CHECK(damped[i].tlru <= damped[i].lru);
}

TEST_CASE("newton converges fast from the intuitive guess") {
    // figure-5 scale: 10^4 Zipf contents, capacity 1000
    const auto dist = zipf_distribution(10000, 0.8);
    CheProblem p{1000.0, {}, std::nullopt};
    for (double d : dist) p.rates.push_back(100.0 * d);
    const CheSolution sol = solve_characteristic_time(p, 1e-9);
    CHECK(sol.converged);
    CHECK(sol.residual < 1e-9);
    CHECK(sol.iterations <= 5);
}
