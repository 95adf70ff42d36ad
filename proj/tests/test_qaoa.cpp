#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include <qrobust/qaoa.hpp>
#include <qrobust/qubo.hpp>
#include <qrobust/seeding.hpp>

#include "test_util.hpp"

using namespace qrobust;

namespace {

double grid_point(std::mt19937_64& eng, double span) {
    return span * uniform_double(eng);
}

}  // namespace

TEST_CASE("zero angles leave the uniform superposition untouched") {
    const QuboProblem q = testutil::random_dyadic_qubo(4, 9);
    const Statevector sv = qaoa_state(q, QaoaParams{{0.0}, {0.0}});
    const double amp = 1.0 / 4.0;  // 1/sqrt(16)
    for (const auto& a : sv.amps) {
        REQUIRE(a.real() == Catch::Approx(amp).margin(1e-12));
        REQUIRE(a.imag() == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("single-qubit circuit matches the closed form") {
    // E(x) = a x gives P(1) = (1 + sin(2 beta) sin(gamma a)) / 2 after one
    // layer, hence expectation a P(1).
    const double a = 1.5;
    QuboProblem q(1);
    q.add_linear(0, a);

    auto eng = make_engine(4);
    for (int trial = 0; trial < 10; ++trial) {
        const double beta = grid_point(eng, std::numbers::pi);
        const double gamma = grid_point(eng, 2.0 * std::numbers::pi);
        const Statevector sv = qaoa_state(q, QaoaParams{{beta}, {gamma}});
        const double p1 = 0.5 * (1.0 + std::sin(2.0 * beta) * std::sin(gamma * a));
        REQUIRE(std::norm(sv.amps[1]) == Catch::Approx(p1).margin(1e-12));
        REQUIRE(expectation(sv, {0.0, a}) == Catch::Approx(a * p1).margin(1e-12));
    }
}

TEST_CASE("circuit agrees with a dense matrix reference") {
    auto eng = make_engine(31);
    for (int trial = 0; trial < 20; ++trial) {
        const QuboProblem q = testutil::random_dyadic_qubo(3, 1000 + trial);
        const std::size_t p = 1 + trial % 2;
        QaoaParams params;
        for (std::size_t l = 0; l < p; ++l) {
            params.betas.push_back(grid_point(eng, std::numbers::pi));
            params.gammas.push_back(grid_point(eng, 2.0 * std::numbers::pi));
        }
        const Statevector sv = qaoa_state(q, params);
        const testutil::CVec ref = testutil::reference_qaoa_state(q, params);
        REQUIRE(sv.amps.size() == ref.size());
        for (std::size_t b = 0; b < ref.size(); ++b) {
            INFO("trial " << trial << " amplitude " << b);
            REQUIRE(std::abs(sv.amps[b] - ref[b]) < 1e-9);
        }
    }
}

TEST_CASE("every layer preserves the norm") {
    const QuboProblem q = testutil::random_dyadic_qubo(5, 88);
    const std::vector<double> energies = enumerate_energies(q);
    Statevector sv = plus_state(5);
    REQUIRE(std::abs(sv.norm() - 1.0) < 1e-10);
    auto eng = make_engine(12);
    for (int layer = 0; layer < 6; ++layer) {
        apply_cost_layer(sv, energies, grid_point(eng, 2.0 * std::numbers::pi));
        REQUIRE(std::abs(sv.norm() - 1.0) < 1e-10);
        apply_mixer_layer(sv, grid_point(eng, std::numbers::pi));
        REQUIRE(std::abs(sv.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("the cost layer only rotates phases") {
    const QuboProblem q = testutil::random_dyadic_qubo(4, 19);
    const std::vector<double> energies = enumerate_energies(q);
    Statevector sv = plus_state(4);
    apply_mixer_layer(sv, 0.7);  // some non-trivial amplitudes first
    const std::vector<double> before = sv.probabilities();
    apply_cost_layer(sv, energies, 1.3);
    const std::vector<double> after = sv.probabilities();
    for (std::size_t b = 0; b < before.size(); ++b)
        REQUIRE(after[b] == Catch::Approx(before[b]).margin(1e-12));
}

TEST_CASE("integer-valued problems make the phase layer 2-pi periodic") {
    QuboProblem q(3);
    q.add_linear(0, 2.0);
    q.add_linear(2, -1.0);
    q.add_quadratic(0, 1, 3.0);
    q.add_quadratic(1, 2, -2.0);
    q.add_offset(1.0);
    const double beta = 0.4;
    for (const double gamma : {0.3, 1.7, 4.4}) {
        const Statevector a = qaoa_state(q, QaoaParams{{beta}, {gamma}});
        const Statevector b =
            qaoa_state(q, QaoaParams{{beta}, {gamma + 2.0 * std::numbers::pi}});
        for (std::size_t k = 0; k < a.amps.size(); ++k)
            REQUIRE(std::abs(a.amps[k] - b.amps[k]) < 1e-9);
    }
}

TEST_CASE("expectation at zero angles is the plain average energy") {
    const QuboProblem q = testutil::random_dyadic_qubo(6, 23);
    const std::vector<double> energies = enumerate_energies(q);
    double mean = 0.0;
    for (const double e : energies) mean += e;
    mean /= static_cast<double>(energies.size());
    REQUIRE(expectation(q, QaoaParams{{0.0}, {0.0}}) == Catch::Approx(mean).margin(1e-9));
}

TEST_CASE("expectation rejects mismatched energy tables") {
    const Statevector sv = plus_state(2);
    REQUIRE_THROWS_AS(expectation(sv, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("parameter validation") {
    QaoaParams bad;
    REQUIRE_THROWS_AS(bad.check(), std::invalid_argument);  // no layers
    bad.betas = {0.1, 0.2};
    bad.gammas = {0.1};
    REQUIRE_THROWS_AS(bad.check(), std::invalid_argument);  // length mismatch
    QuboProblem big(21);
    REQUIRE_THROWS_AS(qaoa_state(big, QaoaParams{{0.1}, {0.1}}), SizeCapError);
}

TEST_CASE("grid search scans the full landscape") {
    const QuboProblem q = testutil::random_dyadic_qubo(4, 61);
    const std::vector<double> betas = default_beta_grid(8);
    const std::vector<double> gammas = default_gamma_grid(16);
    const GridSearchResult res = grid_search(q, betas, gammas);
    REQUIRE(res.landscape.size() == 8);
    for (const auto& row : res.landscape) REQUIRE(row.size() == 16);

    // Spot-check entries against a fresh single-point evaluation, and make
    // sure the reported best is the lexicographically first minimizer.
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    std::size_t best_j = 0;
    for (std::size_t i = 0; i < betas.size(); ++i)
        for (std::size_t j = 0; j < gammas.size(); ++j)
            if (res.landscape[i][j] < best) {
                best = res.landscape[i][j];
                best_i = i;
                best_j = j;
            }
    REQUIRE(res.best.betas[0] == betas[best_i]);
    REQUIRE(res.best.gammas[0] == gammas[best_j]);
    for (const auto [i, j] :
         {std::pair<std::size_t, std::size_t>{0, 0}, {3, 7}, {7, 15}}) {
        const double direct = expectation(q, QaoaParams{{betas[i]}, {gammas[j]}});
        REQUIRE(res.landscape[i][j] == Catch::Approx(direct).margin(1e-12));
    }
}

TEST_CASE("grid search on a constant problem stays flat") {
    QuboProblem q(3);
    q.add_offset(2.5);
    const GridSearchResult res = grid_search(q, default_beta_grid(4), default_gamma_grid(4));
    for (const auto& row : res.landscape)
        for (const double v : row) REQUIRE(v == Catch::Approx(2.5).margin(1e-12));
}

TEST_CASE("grid search ties break toward the first grid point") {
    // A zero objective gives a bitwise-flat landscape (every expectation is
    // exactly 0.0), so the minimum is a genuine tie across the whole grid.
    const QuboProblem q(3);
    const GridSearchResult res = grid_search(q, default_beta_grid(4), default_gamma_grid(4));
    for (const auto& row : res.landscape)
        for (const double v : row) REQUIRE(v == 0.0);
    REQUIRE(res.best.betas[0] == res.beta_grid[0]);
    REQUIRE(res.best.gammas[0] == res.gamma_grid[0]);
}

TEST_CASE("grid search accepts single-point grids") {
    const QuboProblem q = testutil::random_dyadic_qubo(3, 5);
    const GridSearchResult res = grid_search(q, {0.3}, {0.9});
    REQUIRE(res.best.betas == std::vector<double>{0.3});
    REQUIRE(res.best.gammas == std::vector<double>{0.9});
    REQUIRE(res.landscape.size() == 1);
    REQUIRE(res.landscape[0].size() == 1);
    REQUIRE_THROWS_AS(grid_search(q, {}, {0.9}), std::invalid_argument);
}

TEST_CASE("measurement statistics follow the state distribution") {
    // Zero angles: uniform distribution over 8 outcomes.
    QuboProblem q(3);
    q.add_linear(0, 1.0);
    const std::uint64_t shots = 100000;
    const SampleSet set = qaoa_sample(q, QaoaParams{{0.0}, {0.0}}, shots, 33);
    REQUIRE(set.total_shots == shots);
    const double p = 1.0 / 8.0;
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(shots));
    for (const auto& e : set.entries) {
        const double freq = static_cast<double>(e.multiplicity) / static_cast<double>(shots);
        REQUIRE(std::abs(freq - p) < 4.0 * se);
    }
    REQUIRE(set.entries.size() == 8);
}

TEST_CASE("measured energies average to the circuit expectation") {
    const QuboProblem q = testutil::random_dyadic_qubo(4, 3);
    const QaoaParams params{{0.8}, {1.1}};
    const std::uint64_t shots = 100000;
    const SampleSet set = qaoa_sample(q, params, shots, 11);

    double sampled = 0.0;
    for (const auto& e : set.entries)
        sampled += e.energy * static_cast<double>(e.multiplicity);
    sampled /= static_cast<double>(shots);

    const Statevector sv = qaoa_state(q, params);
    const std::vector<double> energies = enumerate_energies(q);
    const double mean = expectation(sv, energies);
    double second = 0.0;
    for (std::size_t b = 0; b < energies.size(); ++b)
        second += std::norm(sv.amps[b]) * energies[b] * energies[b];
    const double sd = std::sqrt(std::max(0.0, second - mean * mean));
    REQUIRE(std::abs(sampled - mean) < 4.0 * sd / std::sqrt(static_cast<double>(shots)) + 1e-12);
}

TEST_CASE("measurement is deterministic in the seed and empty for zero shots") {
    const QuboProblem q = testutil::random_dyadic_qubo(3, 8);
    const QaoaParams params{{0.5}, {0.7}};
    const SampleSet a = qaoa_sample(q, params, 500, 21);
    const SampleSet b = qaoa_sample(q, params, 500, 21);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        REQUIRE(a.entries[i].bits == b.entries[i].bits);
        REQUIRE(a.entries[i].multiplicity == b.entries[i].multiplicity);
    }
    const SampleSet empty = qaoa_sample(q, params, 0, 21);
    REQUIRE(empty.empty());
    REQUIRE(empty.total_shots == 0);
}

TEST_CASE("coefficient normalization rescales energies uniformly") {
    const QuboProblem q = testutil::random_dyadic_qubo(5, 42);
    const auto [scaled, scale] = normalize_coefficients(q);
    REQUIRE(scale > 0.0);

    double max_abs = 0.0;
    for (const auto& [i, v] : scaled.linear()) max_abs = std::max(max_abs, std::abs(v));
    for (const auto& [ij, v] : scaled.quadratic()) max_abs = std::max(max_abs, std::abs(v));
    max_abs = std::max(max_abs, std::abs(scaled.offset()));
    REQUIRE(max_abs == Catch::Approx(1.0).margin(1e-12));

    for (std::uint64_t b = 0; b < 32; ++b) {
        const Bitstring x = bits_from_index(b, 5);
        REQUIRE(scale * evaluate(scaled, x) == Catch::Approx(evaluate(q, x)).margin(1e-9));
    }
    const EnumerateResult before = enumerate_optimum(q);
    const EnumerateResult after = enumerate_optimum(scaled);
    REQUIRE(before.argmins == after.argmins);

    QuboProblem zero(3);
    const auto [same, unit] = normalize_coefficients(zero);
    REQUIRE(unit == 1.0);
}
