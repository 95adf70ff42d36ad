#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "qrobust/parallel.hpp"
#include "qrobust/qubo.hpp"
#include "qrobust/seeding.hpp"

namespace qrobust {

enum class BetaSchedule { geometric, linear };

/// Annealing-sampler knobs. Every shot is an independent run, sub-seeded by
/// shot index, so the result is one deterministic multiset no matter how the
/// shots are scheduled across threads.
struct SaConfig {
    int num_sweeps = 1000;
    double beta_start = 0.1;
    double beta_end = 10.0;
    BetaSchedule schedule = BetaSchedule::geometric;
    std::uint64_t shots = 100;
    std::uint64_t seed = 0;
    unsigned threads = 1; // 0 = hardware
};

namespace detail {

inline double beta_at(const SaConfig& cfg, int sweep) {
    if (cfg.num_sweeps <= 1) return cfg.beta_end;
    const double f = static_cast<double>(sweep) / static_cast<double>(cfg.num_sweeps - 1);
    if (cfg.schedule == BetaSchedule::linear)
        return cfg.beta_start + (cfg.beta_end - cfg.beta_start) * f;
    return cfg.beta_start * std::pow(cfg.beta_end / cfg.beta_start, f);
}

inline Bitstring sa_single_run(const CompiledQubo& cq, const SaConfig& cfg, std::uint64_t sub_seed) {
    auto eng = make_engine(sub_seed);
    Bitstring x(cq.n);
    for (auto& b : x) b = static_cast<std::uint8_t>(eng() & 1ULL);
    for (int sweep = 0; sweep < cfg.num_sweeps; ++sweep) {
        const double beta = beta_at(cfg, sweep);
        for (std::size_t i = 0; i < cq.n; ++i) {
            const double delta = cq.flip_delta(x, i);
            if (delta <= 0.0 || uniform_double(eng) < std::exp(-beta * delta)) x[i] ^= 1;
        }
    }
    return x;
}

/// Draws `shots` indices from the distribution given by a normalized CDF.
/// Each draw has its own derived seed; the result is order-independent.
inline std::map<std::uint64_t, std::uint64_t> multinomial_draw(const std::vector<double>& cdf,
                                                               std::uint64_t shots,
                                                               std::uint64_t seed) {
    std::map<std::uint64_t, std::uint64_t> counts;
    for (std::uint64_t k = 0; k < shots; ++k) {
        auto eng = make_engine(derive_seed(seed, k));
        const double u = uniform_double(eng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto idx = static_cast<std::uint64_t>(
            std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
        ++counts[idx];
    }
    return counts;
}

inline std::vector<double> cdf_from_weights(std::vector<double> w) {
    double total = 0.0;
    for (double v : w) total += v;
    if (!(total > 0.0)) throw std::invalid_argument("distribution has no weight");
    double acc = 0.0;
    for (double& v : w) {
        acc += v / total;
        v = acc;
    }
    w.back() = 1.0;
    return w;
}

} // namespace detail

/// Metropolis single-spin-flip simulated annealing. Stands in for hardware
/// annealers: returns a deduplicated multiset of end states.
inline SampleSet sa_sample(const QuboProblem& q, const SaConfig& cfg) {
    if (q.num_vars() == 0) throw std::invalid_argument("sa_sample: empty problem");
    if (cfg.shots == 0) throw std::invalid_argument("sa_sample: shots must be >= 1");
    if (cfg.num_sweeps < 1) throw std::invalid_argument("sa_sample: num_sweeps must be >= 1");
    if (!(cfg.beta_start > 0.0) || !(cfg.beta_end > 0.0) || cfg.beta_start > cfg.beta_end)
        throw std::invalid_argument("sa_sample: need 0 < beta_start <= beta_end");

    const detail::CompiledQubo cq(q);
    std::vector<Bitstring> results(cfg.shots);
    parallel_for(cfg.shots, cfg.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k)
            results[k] = detail::sa_single_run(cq, cfg, derive_seed(cfg.seed, k));
    });
    return make_sample_set(q, results);
}

/// Exact Gibbs sampler: enumerates all assignments and draws from
/// probabilities proportional to exp(-E/temperature). Only viable for small
/// problems; as temperature -> 0 it concentrates on the global optima.
inline SampleSet boltzmann_sample(const QuboProblem& q, double temperature, std::uint64_t shots,
                                  std::uint64_t seed, std::size_t max_vars = 20) {
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
    if (q.num_vars() > max_vars)
        throw SizeCapError("boltzmann_sample: " + std::to_string(q.num_vars()) +
                           " variables exceed cap " + std::to_string(max_vars));
    const std::vector<double> energies = enumerate_energies(q, max_vars);
    const double e_min = *std::min_element(energies.begin(), energies.end());
    std::vector<double> weights(energies.size());
    for (std::size_t b = 0; b < energies.size(); ++b)
        weights[b] = std::exp(-(energies[b] - e_min) / temperature);

    const auto counts = detail::multinomial_draw(detail::cdf_from_weights(std::move(weights)),
                                                 shots, seed);
    std::map<Bitstring, std::uint64_t> by_bits;
    for (const auto& [idx, mult] : counts) by_bits[bits_from_index(idx, q.num_vars())] = mult;
    return make_sample_set(q, by_bits);
}

/// Common sampler contract: every sample-set producer can be passed around as
/// (problem, shot budget, seed) -> samples.
using SamplerFn =
    std::function<SampleSet(const QuboProblem&, std::uint64_t shots, std::uint64_t seed)>;

inline SamplerFn make_sa_sampler(SaConfig base) {
    return [base](const QuboProblem& q, std::uint64_t shots, std::uint64_t seed) {
        SaConfig cfg = base;
        cfg.shots = shots;
        cfg.seed = seed;
        return sa_sample(q, cfg);
    };
}

inline SamplerFn make_boltzmann_sampler(double temperature, std::size_t max_vars = 20) {
    return [temperature, max_vars](const QuboProblem& q, std::uint64_t shots, std::uint64_t seed) {
        return boltzmann_sample(q, temperature, shots, seed, max_vars);
    };
}

} // namespace qrobust
