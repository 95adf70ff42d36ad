#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include <qrobust/errors.hpp>
#include <qrobust/ev.hpp>
#include <qrobust/objectives.hpp>
#include <qrobust/qubo.hpp>
#include <qrobust/seeding.hpp>

#include "test_util.hpp"

using namespace qrobust;

namespace {

EvInstance small_instance() {
    EvInstance inst;
    inst.num_steps = 2;
    inst.j_min = {0, 0};
    inst.j_max = {3, 3};
    inst.bits = {2, 2};
    inst.e_min = 1.0;
    inst.e_max = 4.0;
    return inst;
}

}  // namespace

TEST_CASE("expectation coefficients for a uniform supply on [0, 1]") {
    EvInstance inst = small_instance();
    inst.pv_kind = PvKind::uniform;
    inst.pv_lo = {0.0, 0.0};
    inst.pv_hi = {1.0, 1.0};
    const EvCoefficients coef = ev_coefficients(inst);
    for (std::size_t t = 0; t < 2; ++t) {
        REQUIRE(coef.c[t] == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(coef.d[t] == Catch::Approx(1.0 / 3.0).margin(1e-12));
    }
}

TEST_CASE("expectation coefficients for a deterministic supply") {
    EvInstance inst = small_instance();
    inst.pv_kind = PvKind::gaussian;
    inst.pv_mu = {2.0, 2.0};
    inst.pv_sigma = {0.0, 0.0};
    const EvCoefficients coef = ev_coefficients(inst);
    REQUIRE(coef.c[0] == 4.0);
    REQUIRE(coef.d[0] == 4.0);
}

TEST_CASE("expectation coefficients match a Monte Carlo estimate") {
    EvInstance inst = small_instance();
    inst.num_steps = 1;
    inst.pv_kind = PvKind::gaussian;
    inst.pv_mu = {1.0};
    inst.pv_sigma = {0.5};
    inst.j_min = {0};
    inst.j_max = {3};
    inst.bits = {2};
    const EvCoefficients coef = ev_coefficients(inst);
    REQUIRE(coef.c[0] == 2.0);
    REQUIRE(coef.d[0] == 1.25);

    // E[(j - S)^2] for j = 3 should equal j^2 - C j + D = 4.25. The summand
    // has standard deviation sqrt(4.125), so four standard errors over 1e6
    // draws is about 0.008.
    auto eng = make_engine(77);
    const std::size_t draws = 1000000;
    double sum = 0.0;
    for (std::size_t k = 0; k < draws; ++k) {
        const double s = 1.0 + 0.5 * normal_double(eng);
        sum += (3.0 - s) * (3.0 - s);
    }
    const double mc = sum / static_cast<double>(draws);
    const double predicted = 9.0 - 3.0 * coef.c[0] + coef.d[0];
    REQUIRE(predicted == 4.25);
    REQUIRE(std::abs(mc - predicted) < 0.009);
}

TEST_CASE("expectation coefficients need a supply model") {
    EvInstance inst = small_instance();
    REQUIRE_THROWS_AS(ev_coefficients(inst), std::invalid_argument);
}

TEST_CASE("bounded slack register covers exactly its range") {
    using qrobust::detail::bounded_register_weights;
    REQUIRE(bounded_register_weights(0).empty());
    REQUIRE(bounded_register_weights(1) == std::vector<std::int64_t>{1});
    REQUIRE(bounded_register_weights(3) == std::vector<std::int64_t>{1, 2});
    REQUIRE(bounded_register_weights(4) == std::vector<std::int64_t>{1, 2, 1});

    for (std::int64_t range = 1; range <= 16; ++range) {
        const auto w = bounded_register_weights(range);
        std::set<std::int64_t> reachable;
        const std::size_t combos = std::size_t{1} << w.size();
        for (std::size_t m = 0; m < combos; ++m) {
            std::int64_t v = 0;
            for (std::size_t b = 0; b < w.size(); ++b)
                if (m & (std::size_t{1} << b)) v += w[b];
            reachable.insert(v);
        }
        INFO("range " << range);
        REQUIRE(*reachable.begin() == 0);
        REQUIRE(*reachable.rbegin() == range);
        for (std::int64_t v = 0; v <= range; ++v) REQUIRE(reachable.count(v) == 1);
    }
}

TEST_CASE("encoding lays out charge registers then the slack register") {
    const EvInstance inst = small_instance();
    const EvQubo built = encode_ev(inst, std::vector<double>{1.0, 2.0});
    const EvLayout& lay = built.layout;
    REQUIRE(lay.window_lo == 1);
    REQUIRE(lay.window_hi == 4);
    REQUIRE(lay.slack_weights == std::vector<std::int64_t>{1, 2});
    REQUIRE(lay.num_vars == 6);
    REQUIRE(lay.j_offset == std::vector<std::size_t>{0, 2});
    REQUIRE(lay.slack_offset == 4);
    REQUIRE(built.qubo.num_vars() == 6);
    REQUIRE_NOTHROW(built.qubo.validate_labels());

    Bitstring x(6, 0);
    x[0] = 1;        // j_0 gets bit 0
    x[3] = 1;        // j_1 gets bit 1
    x[4] = x[5] = 1; // slack = 3
    const EvSchedule s = decode_ev(lay, x);
    REQUIRE(s.j == std::vector<std::int64_t>{1, 2});
    REQUIRE(decode_ev_slack(lay, x) == 3);
}

TEST_CASE("scenario energy is the realized cost plus the window penalty") {
    const EvInstance inst = small_instance();
    const std::vector<double> supply = {0.5, 1.25};
    const EvQubo built = encode_ev(inst, supply);
    const EvLayout& lay = built.layout;

    const std::size_t n = lay.num_vars;
    const double lam = default_total_weight(inst, supply);
    for (std::uint64_t b = 0; b < (1ULL << n); ++b) {
        const Bitstring x = bits_from_index(b, n);
        const EvSchedule s = decode_ev(lay, x);
        std::int64_t total = 0;
        for (const auto j : s.j) total += j;
        const double gap =
            static_cast<double>(total - lay.window_lo - decode_ev_slack(lay, x));
        const double expected = ev_cost(s, supply) + lam * gap * gap;
        INFO("assignment " << to_string(x));
        REQUIRE(evaluate(built.qubo, x) == expected);
    }
}

TEST_CASE("window penalty can vanish exactly for totals inside the window") {
    const EvInstance inst = small_instance();
    const std::vector<double> supply = {1.0, 1.0};
    const EvQubo built = encode_ev(inst, supply);
    const EvLayout& lay = built.layout;

    // For every schedule, the best assignment of slack bits zeroes the
    // penalty exactly when the total lands inside [e_min, e_max].
    for (std::uint64_t jbits = 0; jbits < 16; ++jbits) {
        Bitstring x(lay.num_vars, 0);
        for (std::size_t k = 0; k < 4; ++k)
            x[k] = static_cast<std::uint8_t>((jbits >> k) & 1ULL);
        const EvSchedule s = decode_ev(lay, x);
        std::int64_t total = 0;
        for (const auto j : s.j) total += j;

        double best = std::numeric_limits<double>::infinity();
        for (std::uint64_t sl = 0; sl < 4; ++sl) {
            x[4] = static_cast<std::uint8_t>(sl & 1);
            x[5] = static_cast<std::uint8_t>((sl >> 1) & 1);
            best = std::min(best, evaluate(built.qubo, x) - ev_cost(s, supply));
        }
        INFO("schedule total " << total);
        if (total >= lay.window_lo && total <= lay.window_hi)
            REQUIRE(best == 0.0);
        else
            REQUIRE(best > 0.5);
    }
}

TEST_CASE("expectation encoding averages the scenario encodings") {
    EvInstance inst = small_instance();
    inst.pv_kind = PvKind::gaussian;
    inst.pv_mu = {1.0, 2.0};
    inst.pv_sigma = {0.5, 0.25};

    const double lam = 11.0;
    const EvQubo expected = encode_ev(inst, std::nullopt, lam);
    // Two scenarios at mu +- sigma have mean mu and second moment
    // mu^2 + sigma^2, so their QUBOs average to the expectation QUBO.
    std::vector<double> up(2), down(2);
    for (std::size_t t = 0; t < 2; ++t) {
        up[t] = inst.pv_mu[t] + inst.pv_sigma[t];
        down[t] = inst.pv_mu[t] - inst.pv_sigma[t];
    }
    const EvQubo a = encode_ev(inst, up, lam);
    const EvQubo b = encode_ev(inst, down, lam);

    REQUIRE(a.qubo.num_vars() == expected.qubo.num_vars());
    const double mean_offset = 0.5 * (a.qubo.offset() + b.qubo.offset());
    REQUIRE(mean_offset == Catch::Approx(expected.qubo.offset()).margin(1e-12));
    for (std::size_t v = 0; v < expected.qubo.num_vars(); ++v) {
        const double mean_lin = 0.5 * (a.qubo.linear_at(v) + b.qubo.linear_at(v));
        REQUIRE(mean_lin == Catch::Approx(expected.qubo.linear_at(v)).margin(1e-12));
    }
    for (const auto& [key, coeff] : expected.qubo.quadratic()) {
        const double mean_quad = 0.5 * (a.qubo.quadratic_at(key.first, key.second) +
                                        b.qubo.quadratic_at(key.first, key.second));
        REQUIRE(mean_quad == Catch::Approx(coeff).margin(1e-12));
    }
}

TEST_CASE("supply variance shifts every energy by a constant") {
    EvInstance inst = small_instance();
    inst.pv_kind = PvKind::gaussian;
    inst.pv_mu = {1.0, 2.0};
    inst.pv_sigma = {0.0, 0.0};
    const double lam = 30.0;
    const EvQubo flat = encode_ev(inst, std::nullopt, lam);
    inst.pv_sigma = {2.0, 2.0};
    const EvQubo noisy = encode_ev(inst, std::nullopt, lam);

    const auto e_flat = enumerate_energies(flat.qubo);
    const auto e_noisy = enumerate_energies(noisy.qubo);
    for (std::size_t b = 0; b < e_flat.size(); ++b)
        REQUIRE(e_noisy[b] - e_flat[b] == Catch::Approx(8.0).margin(1e-9));

    const EnumerateResult flat_best = enumerate_optimum(flat.qubo);
    const EnumerateResult noisy_best = enumerate_optimum(noisy.qubo);
    REQUIRE(flat_best.argmins == noisy_best.argmins);
}

TEST_CASE("impossible energy windows are rejected up front") {
    EvInstance inst = small_instance();
    inst.e_min = 1.2;
    inst.e_max = 1.8;  // no integer total in between
    REQUIRE_THROWS_AS(encode_ev(inst, std::vector<double>{1.0, 1.0}), InfeasibleError);

    inst = small_instance();
    inst.j_min = {3, 3};
    inst.j_max = {3, 3};
    inst.bits = {0, 0};
    inst.e_max = 4.0;  // minimum total charge is 6
    REQUIRE_THROWS_AS(encode_ev(inst, std::vector<double>{1.0, 1.0}), InfeasibleError);

    inst = small_instance();
    inst.e_min = 9.0;
    inst.e_max = 9.0;  // register tops out at 6
    REQUIRE_THROWS_AS(encode_ev(inst, std::vector<double>{1.0, 1.0}), InfeasibleError);
}

TEST_CASE("instance validation rejects inconsistent charge registers") {
    EvInstance inst = small_instance();
    inst.j_max = {4, 3};  // needs 3 bits at step 0
    REQUIRE_THROWS_AS(validate(inst), std::invalid_argument);
    inst = small_instance();
    inst.j_min = {-1, 0};
    REQUIRE_THROWS_AS(validate(inst), std::invalid_argument);
    inst = small_instance();
    inst.e_min = 5.0;
    inst.e_max = 4.0;
    REQUIRE_THROWS_AS(validate(inst), std::invalid_argument);
}

TEST_CASE("schedule feasibility checks bounds and the energy window") {
    EvInstance inst = small_instance();
    inst.j_max = {2, 3};  // tighter than the register cap at step 0
    REQUIRE(ev_schedule_feasible(inst, EvSchedule{{1, 2}}));
    REQUIRE(ev_schedule_feasible(inst, EvSchedule{{0, 1}}));
    REQUIRE(!ev_schedule_feasible(inst, EvSchedule{{3, 0}}));  // above j_max
    REQUIRE(!ev_schedule_feasible(inst, EvSchedule{{0, 0}}));  // below e_min
    REQUIRE(!ev_schedule_feasible(inst, EvSchedule{{2, 3}}));  // above e_max
}

TEST_CASE("realized cost matches its definition") {
    const EvSchedule s{{1, 3}};
    REQUIRE(ev_cost(s, {0.5, 1.0}) == 0.25 + 4.0);
    REQUIRE_THROWS_AS(ev_cost(s, {1.0}), std::invalid_argument);
}

TEST_CASE("scenario objective wraps realized cost and feasibility") {
    EvInstance inst = small_instance();
    inst.j_max = {2, 3};
    const EvQubo built = encode_ev(inst, std::vector<double>{1.0, 1.0});

    ScenarioSet supplies;
    supplies.scenarios = {{1.0, 1.0}, {0.0, 2.0}};
    const ScenarioObjective obj = make_ev_objective(inst, built.layout, supplies);
    REQUIRE(obj.num_vars == built.layout.num_vars);

    Bitstring x(built.layout.num_vars, 0);
    x[0] = 1;  // j = (1, 0), total 1
    const EvSchedule s = decode_ev(built.layout, x);
    for (std::size_t k = 0; k < 2; ++k)
        REQUIRE(obj.value(x, k) == ev_cost(s, supplies.scenarios[k]));
    REQUIRE(obj.feasible(x));

    Bitstring over(built.layout.num_vars, 0);
    over[0] = over[1] = 1;  // j_0 = 3 exceeds j_max = 2
    REQUIRE(!obj.feasible(over));
}
