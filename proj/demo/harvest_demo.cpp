// Walkthrough of the annealing-harvest pipeline on a two-unit commitment
// problem with uncertain residual demand.

#include <iostream>

#include <qrobust/qrobust.hpp>

using namespace qrobust;

int main() {
    UcpInstance inst;
    inst.num_steps = 4;
    inst.units = {
        {2.0, 3.0, 1.0, 2.0, 2, 2, 1.0}, // flexible, cheap to run
        {3.0, 1.0, 3.0, 3.0, 1, 1, 1.0}, // fixed block, cheap to start
    };

    ScenarioSet demands;
    demands.scenarios = {
        {3, 4, 5, 4},
        {4, 5, 6, 5},
        {2, 3, 4, 3},
        {3, 5, 5, 4},
        {4, 4, 4, 4},
    };

    const std::vector<double> expected = expected_scenario(demands);
    const auto [qubo, enc] = encode_ucp(inst, expected);
    std::cout << "expected-demand QUBO: " << qubo.num_vars() << " variables\n";

    const ScenarioObjective obj = make_ucp_objective(inst, enc, demands);
    const std::vector<double> f_star = scenario_optima(obj, demands);

    SaConfig sa;
    sa.shots = 500;
    const HarvestResult result =
        harvest(qubo, make_sa_sampler(sa), sa.shots, 7, obj, demands, Measure::regret, f_star);

    std::cout << "sampled " << result.samples.total_shots << " shots, "
              << result.report.candidates.size() << " distinct candidates\n";
    const CandidateReport& best = result.report.best();
    std::cout << "selected " << to_string(best.bits) << "  regret " << best.regret
              << "  worst case " << best.worst_case << "\n";

    const RobustOptimum exact = robust_optimum(obj, demands, Measure::regret, f_star);
    std::cout << "exact robust optimum regret " << exact.value << "\n";
    return 0;
}
