#pragma once

#include <cstddef>
#include <stdexcept>

#include "qrobust/ev.hpp"
#include "qrobust/robust.hpp"
#include "qrobust/scenario.hpp"
#include "qrobust/ucp.hpp"

namespace qrobust {

/// Scenario objective for unit commitment: scenarios are residual-demand
/// profiles, f(x, k) = deterministic cost + weighted squared mismatch, and
/// feasibility covers only the unit operating rules (demand stays soft).
inline ScenarioObjective make_ucp_objective(const UcpInstance& inst, const UcpEncoding& enc,
                                            const ScenarioSet& scenarios,
                                            double lambda_demand = 1.0) {
    validate(inst);
    validate(scenarios);
    if (scenarios.size() > 0 && static_cast<int>(scenarios.scenarios[0].size()) != inst.num_steps)
        throw std::invalid_argument("ucp objective: scenario length must equal num_steps");
    if (!(lambda_demand > 0.0))
        throw std::invalid_argument("ucp objective: demand weight must be positive");

    ScenarioObjective obj;
    obj.num_vars = enc.num_vars();
    obj.value = [inst, enc, scenarios, lambda_demand](const Bitstring& x, std::size_t k) {
        const UcpSchedule s = decode_ucp(inst, enc, x);
        const auto [det, mismatch] =
            ucp_objective(inst, s, scenarios.scenarios.at(k), lambda_demand);
        return det + mismatch;
    };
    obj.feasible = [inst, enc](const Bitstring& x) {
        return check_feasible(inst, decode_ucp(inst, enc, x)).empty();
    };
    obj.decompose = [inst, enc, scenarios, lambda_demand](const Bitstring& x, std::size_t k) {
        return ucp_objective(inst, decode_ucp(inst, enc, x), scenarios.scenarios.at(k),
                             lambda_demand);
    };
    return obj;
}

/// Scenario objective for EV charging: scenarios are PV supply profiles,
/// f(x, k) = realized quadratic tracking cost; feasibility covers the charge
/// bounds and the total-energy window.
inline ScenarioObjective make_ev_objective(const EvInstance& inst, const EvLayout& layout,
                                           const ScenarioSet& scenarios) {
    validate(inst);
    validate(scenarios);
    if (scenarios.size() > 0 &&
        static_cast<int>(scenarios.scenarios[0].size()) != inst.num_steps)
        throw std::invalid_argument("ev objective: scenario length must equal num_steps");

    ScenarioObjective obj;
    obj.num_vars = layout.num_vars;
    obj.value = [layout, scenarios](const Bitstring& x, std::size_t k) {
        return ev_cost(decode_ev(layout, x), scenarios.scenarios.at(k));
    };
    obj.feasible = [inst, layout](const Bitstring& x) {
        return ev_schedule_feasible(inst, decode_ev(layout, x));
    };
    return obj;
}

} // namespace qrobust
