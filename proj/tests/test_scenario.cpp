#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include <qrobust/scenario.hpp>
#include <qrobust/seeding.hpp>

#include "test_util.hpp"

using namespace qrobust;

TEST_CASE("expected scenario of a uniform set is the componentwise mean") {
    ScenarioSet s;
    s.scenarios = {{1.0, 3.0}, {3.0, 1.0}};
    const auto mean = expected_scenario(s);
    REQUIRE(mean == std::vector<double>{2.0, 2.0});
}

TEST_CASE("expected scenario of a single scenario is that scenario") {
    ScenarioSet s;
    s.scenarios = {{4.0, 5.0, 6.0}};
    REQUIRE(expected_scenario(s) == s.scenarios[0]);
}

TEST_CASE("expected scenario respects explicit probabilities") {
    ScenarioSet s;
    s.scenarios = {{0.0}, {10.0}};
    s.probabilities = {0.25, 0.75};
    const auto mean = expected_scenario(s);
    REQUIRE(mean.size() == 1);
    REQUIRE(mean[0] == Catch::Approx(7.5).margin(1e-12));
}

TEST_CASE("expected scenario is linear under shifting every scenario") {
    ScenarioSet s;
    s.scenarios = {{1.0, 2.0}, {2.5, 0.5}, {4.0, 1.5}, {0.5, 3.0}};
    const auto base = expected_scenario(s);
    ScenarioSet shifted = s;
    for (auto& row : shifted.scenarios)
        for (auto& v : row) v += 10.0;
    const auto moved = expected_scenario(shifted);
    for (std::size_t d = 0; d < base.size(); ++d)
        REQUIRE(moved[d] == Catch::Approx(base[d] + 10.0).margin(1e-12));
}

TEST_CASE("gaussian generator with zero sigma returns the mean every time") {
    const std::vector<double> mu = {2.0, 3.5};
    const std::vector<double> sigma = {0.0, 0.0};
    const ScenarioSet s = generate_gaussian_scenarios(mu, sigma, 6, 42);
    REQUIRE(s.size() == 6);
    for (const auto& row : s.scenarios) REQUIRE(row == mu);
}

TEST_CASE("gaussian generator produces the requested count and dimension") {
    const ScenarioSet s =
        generate_gaussian_scenarios({1.0, 2.0, 3.0}, {0.1, 0.2, 0.3}, 25, 7);
    REQUIRE(s.size() == 25);
    REQUIRE(s.dim() == 3);
}

TEST_CASE("gaussian generator is deterministic in the seed") {
    const auto a = generate_gaussian_scenarios({1.0}, {0.5}, 50, 11);
    const auto b = generate_gaussian_scenarios({1.0}, {0.5}, 50, 11);
    const auto c = generate_gaussian_scenarios({1.0}, {0.5}, 50, 12);
    REQUIRE(a.scenarios == b.scenarios);
    REQUIRE(a.scenarios != c.scenarios);
}

TEST_CASE("gaussian generator clamps draws at zero") {
    // Mean well below zero: without clamping almost every draw would be
    // negative.
    const ScenarioSet s = generate_gaussian_scenarios({-5.0}, {1.0}, 200, 5);
    for (const auto& row : s.scenarios) REQUIRE(row[0] >= 0.0);
}

TEST_CASE("gaussian generator sample mean converges to mu") {
    const double mu = 6.0;
    const double sigma = 0.5;
    const std::size_t count = 100000;
    const ScenarioSet s = generate_gaussian_scenarios({mu}, {sigma}, count, 99);
    double sum = 0.0;
    for (const auto& row : s.scenarios) sum += row[0];
    const double mean = sum / static_cast<double>(count);
    // mu is 12 sigma above zero, so clamping never fires and the sample mean
    // is Gaussian with standard error sigma/sqrt(count).
    const double se = sigma / std::sqrt(static_cast<double>(count));
    REQUIRE(std::abs(mean - mu) < 4.0 * se);
}

TEST_CASE("shot allocation splits evenly for uniform probabilities") {
    REQUIRE(allocate_shots({0.5, 0.5}, 100) == std::vector<std::uint64_t>{50, 50});
    REQUIRE(allocate_shots({1.0, 0.0}, 7) == std::vector<std::uint64_t>{7, 0});
}

TEST_CASE("shot allocation rounds by largest remainder") {
    const auto shots = allocate_shots({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 100);
    REQUIRE(shots == std::vector<std::uint64_t>{34, 33, 33});
}

TEST_CASE("shot allocation conserves the total and stays within one of exact") {
    auto eng = make_engine(2024);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t k = 1 + eng() % 6;
        std::vector<double> weights(k);
        double total = 0.0;
        for (auto& w : weights) {
            w = 1.0 + static_cast<double>(eng() % 9);
            total += w;
        }
        for (auto& w : weights) w /= total;
        const std::uint64_t shots_total = 1 + eng() % 500;
        const auto shots = allocate_shots(weights, shots_total);
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < k; ++i) {
            sum += shots[i];
            const double exact = weights[i] * static_cast<double>(shots_total);
            REQUIRE(static_cast<double>(shots[i]) >= std::floor(exact) - 1e-9);
            REQUIRE(static_cast<double>(shots[i]) <= std::ceil(exact) + 1e-9);
        }
        REQUIRE(sum == shots_total);
    }
}

TEST_CASE("histogram of identical scenarios puts everything in one cell") {
    ScenarioSet s;
    for (int i = 0; i < 25; ++i) s.scenarios.push_back({1.0, 2.0});
    const HistogramGrid grid = scenario_histogram(s, 5);
    std::uint64_t total = 0;
    std::uint64_t max_cell = 0;
    for (std::size_t xb = 0; xb < grid.bins_per_axis; ++xb)
        for (std::size_t yb = 0; yb < grid.bins_per_axis; ++yb) {
            total += grid.at(xb, yb);
            max_cell = std::max(max_cell, grid.at(xb, yb));
        }
    REQUIRE(total == 25);
    REQUIRE(max_cell == 25);
}

TEST_CASE("histogram counts sum to the scenario count") {
    const ScenarioSet s =
        generate_gaussian_scenarios({2.0, 2.0}, {0.7, 0.7}, 25, 13);
    const HistogramGrid grid = scenario_histogram(s, 4);
    std::uint64_t total = 0;
    for (std::size_t xb = 0; xb < grid.bins_per_axis; ++xb)
        for (std::size_t yb = 0; yb < grid.bins_per_axis; ++yb) total += grid.at(xb, yb);
    REQUIRE(total == s.size());
}

TEST_CASE("histogram requires two-dimensional scenarios") {
    ScenarioSet s;
    s.scenarios = {{1.0, 2.0, 3.0}};
    REQUIRE_THROWS_AS(scenario_histogram(s, 4), std::invalid_argument);
    ScenarioSet one;
    one.scenarios = {{1.0}};
    REQUIRE_THROWS_AS(scenario_histogram(one, 4), std::invalid_argument);
}

TEST_CASE("scenario validation rejects ragged and mismatched input") {
    ScenarioSet ragged;
    ragged.scenarios = {{1.0, 2.0}, {1.0}};
    REQUIRE_THROWS_AS(validate(ragged), std::invalid_argument);

    ScenarioSet negval;
    negval.scenarios = {{1.0, 2.0}, {1.0, -0.5}};
    REQUIRE_THROWS_AS(validate(negval), std::invalid_argument);

    ScenarioSet badprob;
    badprob.scenarios = {{1.0}, {2.0}};
    badprob.probabilities = {0.5};
    REQUIRE_THROWS_AS(validate(badprob), std::invalid_argument);

    ScenarioSet negprob;
    negprob.scenarios = {{1.0}, {2.0}};
    negprob.probabilities = {1.5, -0.5};
    REQUIRE_THROWS_AS(validate(negprob), std::invalid_argument);

    ScenarioSet offprob;
    offprob.scenarios = {{1.0}, {2.0}};
    offprob.probabilities = {0.7, 0.7};
    REQUIRE_THROWS_AS(validate(offprob), std::invalid_argument);

    ScenarioSet empty;
    REQUIRE_THROWS_AS(expected_scenario(empty), std::invalid_argument);
}
