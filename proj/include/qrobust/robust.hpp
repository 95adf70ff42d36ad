#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrobust/errors.hpp"
#include "qrobust/parallel.hpp"
#include "qrobust/qaoa.hpp"
#include "qrobust/qubo.hpp"
#include "qrobust/samplers.hpp"
#include "qrobust/scenario.hpp"
#include "qrobust/seeding.hpp"

namespace qrobust {

enum class Measure { worst_case, regret };
enum class Allocation { uniform, probability };

/// Evaluation contract the engine works against: candidate value per
/// scenario index, a hard-feasibility predicate, and an optional split of
/// the value into (deterministic cost, supply/demand mismatch) for reports.
struct ScenarioObjective {
    std::size_t num_vars = 0;
    std::function<double(const Bitstring&, std::size_t)> value;
    std::function<bool(const Bitstring&)> feasible; // unset = everything feasible
    std::function<std::pair<double, double>(const Bitstring&, std::size_t)> decompose; // optional
};

namespace detail {

inline bool is_feasible(const ScenarioObjective& obj, const Bitstring& x) {
    return !obj.feasible || obj.feasible(x);
}

inline void check_objective(const ScenarioObjective& obj, const ScenarioSet& scenarios) {
    if (!obj.value) throw std::invalid_argument("scenario objective has no value function");
    if (obj.num_vars == 0) throw std::invalid_argument("scenario objective has no variables");
    if (scenarios.size() == 0) throw std::invalid_argument("empty scenario set");
}

} // namespace detail

inline double worst_case_value(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("worst_case_value: no scenario values");
    return *std::max_element(values.begin(), values.end());
}

inline double regret_value(const std::vector<double>& values, const std::vector<double>& f_star) {
    if (values.empty()) throw std::invalid_argument("regret_value: no scenario values");
    if (values.size() != f_star.size())
        throw std::invalid_argument("regret_value: values and f* length mismatch");
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < values.size(); ++k) worst = std::max(worst, values[k] - f_star[k]);
    return worst;
}

/// Exact per-scenario optima f*(xi_k) = min over feasible assignments, by
/// full enumeration.
inline std::vector<double> scenario_optima(const ScenarioObjective& obj,
                                           const ScenarioSet& scenarios,
                                           std::size_t max_vars = 24) {
    detail::check_objective(obj, scenarios);
    if (obj.num_vars > max_vars)
        throw SizeCapError("scenario_optima: " + std::to_string(obj.num_vars) +
                           " variables exceed cap " + std::to_string(max_vars));
    const std::size_t total = std::size_t{1} << obj.num_vars;
    std::vector<double> f_star(scenarios.size(), std::numeric_limits<double>::infinity());
    bool any_feasible = false;
    for (std::size_t b = 0; b < total; ++b) {
        const Bitstring x = bits_from_index(b, obj.num_vars);
        if (!detail::is_feasible(obj, x)) continue;
        any_feasible = true;
        for (std::size_t k = 0; k < scenarios.size(); ++k)
            f_star[k] = std::min(f_star[k], obj.value(x, k));
    }
    if (!any_feasible)
        throw InfeasibleError("scenario_optima: feasible set is empty (scenario 0 onward)");
    return f_star;
}

struct RobustOptimum {
    double value = 0.0;
    std::vector<Bitstring> argmins; // lexicographically sorted
};

/// Exact robust optimum over the full feasible set, for either measure.
inline RobustOptimum robust_optimum(const ScenarioObjective& obj, const ScenarioSet& scenarios,
                                    Measure measure, const std::vector<double>& f_star,
                                    std::size_t max_vars = 24) {
    detail::check_objective(obj, scenarios);
    if (measure == Measure::regret && f_star.size() != scenarios.size())
        throw std::invalid_argument("robust_optimum: f* length mismatch");
    if (obj.num_vars > max_vars)
        throw SizeCapError("robust_optimum: " + std::to_string(obj.num_vars) +
                           " variables exceed cap " + std::to_string(max_vars));
    const std::size_t total = std::size_t{1} << obj.num_vars;
    RobustOptimum out;
    out.value = std::numeric_limits<double>::infinity();
    std::vector<double> values(scenarios.size());
    for (std::size_t b = 0; b < total; ++b) {
        const Bitstring x = bits_from_index(b, obj.num_vars);
        if (!detail::is_feasible(obj, x)) continue;
        for (std::size_t k = 0; k < scenarios.size(); ++k) values[k] = obj.value(x, k);
        const double m = measure == Measure::worst_case ? worst_case_value(values)
                                                        : regret_value(values, f_star);
        if (m < out.value) {
            out.value = m;
            out.argmins.assign(1, x);
        } else if (m == out.value) {
            out.argmins.push_back(x);
        }
    }
    if (out.argmins.empty()) throw InfeasibleError("robust_optimum: feasible set is empty");
    std::sort(out.argmins.begin(), out.argmins.end());
    return out;
}

struct CandidateReport {
    Bitstring bits;
    bool feasible = false;
    std::vector<double> values; // f(x, xi_k) per scenario
    double worst_case = 0.0;
    double regret = 0.0;
    double det_cost = 0.0;
    double mismatch_regret = 0.0; // worst per-scenario mismatch component
    std::uint64_t multiplicity = 0;
    std::map<std::string, std::uint64_t> provenance; // sample source -> count
};

struct RobustnessReport {
    Measure measure = Measure::regret;
    std::vector<double> f_star;
    std::vector<CandidateReport> candidates; // lexicographic by bitstring
    std::optional<std::size_t> selected;     // index of the chosen candidate

    double measure_of(const CandidateReport& c) const {
        return measure == Measure::worst_case ? c.worst_case : c.regret;
    }
    const CandidateReport& best() const {
        if (!selected) throw EmptyHarvestError("no feasible candidate was sampled");
        return candidates[*selected];
    }
};

/// Distinct sampled bitstrings with per-source shot counts.
using PooledCounts = std::map<Bitstring, std::map<std::string, std::uint64_t>>;

/// Evaluates every pooled candidate under every scenario and selects the
/// feasible minimizer of the chosen measure (ties: lexicographically
/// smallest bitstring). Candidate evaluation may fan out over threads; the
/// report is ordered and selected deterministically regardless.
inline RobustnessReport build_report(const ScenarioObjective& obj, const ScenarioSet& scenarios,
                                     Measure measure, const std::vector<double>& f_star,
                                     const PooledCounts& pooled, unsigned threads = 1) {
    detail::check_objective(obj, scenarios);
    if (f_star.size() != scenarios.size())
        throw std::invalid_argument("build_report: f* length mismatch");

    RobustnessReport report;
    report.measure = measure;
    report.f_star = f_star;
    report.candidates.resize(pooled.size());
    {
        std::size_t idx = 0;
        for (const auto& [bits, sources] : pooled) {
            CandidateReport& c = report.candidates[idx++];
            c.bits = bits;
            c.provenance = sources;
            for (const auto& [src, count] : sources) c.multiplicity += count;
        }
    }

    parallel_for(report.candidates.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t n = lo; n < hi; ++n) {
            CandidateReport& c = report.candidates[n];
            if (c.bits.size() != obj.num_vars)
                throw std::invalid_argument("build_report: candidate length mismatch");
            c.feasible = detail::is_feasible(obj, c.bits);
            c.values.resize(scenarios.size());
            double worst_mismatch = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < scenarios.size(); ++k) {
                c.values[k] = obj.value(c.bits, k);
                if (obj.decompose) {
                    const auto [det, mismatch] = obj.decompose(c.bits, k);
                    c.det_cost = det;
                    worst_mismatch = std::max(worst_mismatch, mismatch);
                }
            }
            c.worst_case = worst_case_value(c.values);
            c.regret = regret_value(c.values, f_star);
            c.mismatch_regret = obj.decompose ? worst_mismatch : c.worst_case;
        }
    });

    for (std::size_t n = 0; n < report.candidates.size(); ++n) {
        const CandidateReport& c = report.candidates[n];
        if (!c.feasible) continue;
        if (!report.selected || report.measure_of(c) < report.measure_of(report.candidates[*report.selected]))
            report.selected = n;
    }
    return report;
}

struct HarvestResult {
    RobustnessReport report;
    SampleSet samples;
};

/// Expected-value harvesting: sample the expected-scenario QUBO once, then
/// rank the deduplicated candidates by their robustness across all
/// scenarios. The report keeps infeasible candidates (flagged) so exports
/// show the full sample picture; selection skips them.
inline HarvestResult harvest(const QuboProblem& expected_qubo, const SamplerFn& sampler,
                             std::uint64_t shots, std::uint64_t seed, const ScenarioObjective& obj,
                             const ScenarioSet& scenarios, Measure measure,
                             const std::vector<double>& f_star, unsigned threads = 1) {
    if (expected_qubo.num_vars() != obj.num_vars)
        throw std::invalid_argument("harvest: qubo/objective variable count mismatch");
    if (!sampler) throw std::invalid_argument("harvest: no sampler");
    HarvestResult out;
    out.samples = sampler(expected_qubo, shots, seed);
    PooledCounts pooled;
    for (const auto& e : out.samples.entries) pooled[e.bits]["expected"] = e.multiplicity;
    out.report = build_report(obj, scenarios, measure, f_star, pooled, threads);
    return out;
}

struct TwoStepConfig {
    std::vector<double> beta_grid = default_beta_grid();
    std::vector<double> gamma_grid = default_gamma_grid();
    std::uint64_t total_shots = 0;
    Allocation allocation = Allocation::uniform;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct TwoStepResult {
    RobustnessReport report;
    QaoaParams params;
    GridSearchResult search;
    std::vector<std::uint64_t> shots; // per scenario
};

/// Two-step pipeline: tune (beta, gamma) once on the expected-value
/// Hamiltonian, re-run the fixed circuit on every scenario Hamiltonian with
/// an apportioned shot budget, then pool all sample sets and select as in
/// harvest. Scenario k samples with sub-seed derive_seed(seed, k).
inline TwoStepResult two_step_qaoa(const QuboProblem& expected_qubo,
                                   const std::vector<QuboProblem>& scenario_qubos,
                                   const TwoStepConfig& cfg, const ScenarioObjective& obj,
                                   const ScenarioSet& scenarios, Measure measure,
                                   const std::vector<double>& f_star) {
    if (expected_qubo.num_vars() != obj.num_vars)
        throw std::invalid_argument("two_step_qaoa: qubo/objective variable count mismatch");
    if (scenario_qubos.size() != scenarios.size())
        throw std::invalid_argument("two_step_qaoa: one QUBO per scenario required");
    for (const auto& sq : scenario_qubos)
        if (sq.num_vars() != expected_qubo.num_vars() || sq.labels() != expected_qubo.labels())
            throw std::invalid_argument("two_step_qaoa: scenario QUBO layout mismatch");

    TwoStepResult out;
    out.search = grid_search(expected_qubo, cfg.beta_grid, cfg.gamma_grid);
    out.params = out.search.best;

    std::vector<double> probs(scenarios.size(), 1.0 / static_cast<double>(scenarios.size()));
    if (cfg.allocation == Allocation::probability)
        for (std::size_t k = 0; k < scenarios.size(); ++k) probs[k] = scenarios.probability(k);
    out.shots = allocate_shots(probs, cfg.total_shots);

    PooledCounts pooled;
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
        const SampleSet set =
            qaoa_sample(scenario_qubos[k], out.params, out.shots[k], derive_seed(cfg.seed, k));
        const std::string tag = "s" + std::to_string(k);
        for (const auto& e : set.entries) pooled[e.bits][tag] += e.multiplicity;
    }
    out.report = build_report(obj, scenarios, measure, f_star, pooled, cfg.threads);
    return out;
}

struct StochasticMeasures {
    double ws = 0.0;   // wait-and-see: expected per-scenario optimum
    double rp = 0.0;   // recourse problem: best expected value over X
    double eev = 0.0;  // expected value of the expected-value solution
    double vss = 0.0;  // eev - rp
    double evpi = 0.0; // rp - ws
    Bitstring rp_solution;
};

/// Classic two-stage quality measures against the exact oracle. Probability
/// weights are required; all expectations accumulate in scenario order so
/// the definitional inequalities hold exactly.
inline StochasticMeasures stochastic_measures(const ScenarioObjective& obj,
                                              const ScenarioSet& scenarios, const Bitstring& x_ev,
                                              std::size_t max_vars = 24) {
    detail::check_objective(obj, scenarios);
    if (!scenarios.has_probabilities())
        throw std::invalid_argument("stochastic_measures: scenario probabilities required");
    if (x_ev.size() != obj.num_vars)
        throw std::invalid_argument("stochastic_measures: x_ev length mismatch");
    if (obj.num_vars > max_vars)
        throw SizeCapError("stochastic_measures: " + std::to_string(obj.num_vars) +
                           " variables exceed cap " + std::to_string(max_vars));

    const auto expected_over = [&](const Bitstring& x) {
        double acc = 0.0;
        for (std::size_t k = 0; k < scenarios.size(); ++k)
            acc += scenarios.probability(k) * obj.value(x, k);
        return acc;
    };

    StochasticMeasures out;
    const std::vector<double> f_star = scenario_optima(obj, scenarios, max_vars);
    for (std::size_t k = 0; k < scenarios.size(); ++k)
        out.ws += scenarios.probability(k) * f_star[k];

    double best = std::numeric_limits<double>::infinity();
    const std::size_t total = std::size_t{1} << obj.num_vars;
    for (std::size_t b = 0; b < total; ++b) {
        const Bitstring x = bits_from_index(b, obj.num_vars);
        if (!detail::is_feasible(obj, x)) continue;
        const double v = expected_over(x);
        if (v < best || (v == best && (out.rp_solution.empty() || x < out.rp_solution))) {
            best = v;
            out.rp_solution = x;
        }
    }
    out.rp = best;
    out.eev = expected_over(x_ev);
    out.vss = out.eev - out.rp;
    out.evpi = out.rp - out.ws;
    return out;
}

} // namespace qrobust
