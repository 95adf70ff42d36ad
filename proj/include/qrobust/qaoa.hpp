#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qrobust/qubo.hpp"
#include "qrobust/samplers.hpp"

namespace qrobust {

/// Angle sets for a p-layer circuit: one (beta, gamma) pair per layer.
struct QaoaParams {
    std::vector<double> betas;
    std::vector<double> gammas;

    std::size_t p() const { return betas.size(); }
    void check() const {
        if (betas.empty() || betas.size() != gammas.size())
            throw std::invalid_argument("qaoa params: need equal nonempty beta/gamma lists");
        for (double v : betas)
            if (!std::isfinite(v)) throw std::invalid_argument("qaoa params: non-finite beta");
        for (double v : gammas)
            if (!std::isfinite(v)) throw std::invalid_argument("qaoa params: non-finite gamma");
    }
};

/// Dense state over n qubits. Basis index b spells the bitstring with
/// variable 0 in the least significant bit.
struct Statevector {
    std::size_t num_qubits = 0;
    std::vector<std::complex<double>> amps;

    double norm() const {
        double s = 0.0;
        for (const auto& a : amps) s += std::norm(a);
        return s;
    }
    std::vector<double> probabilities() const {
        std::vector<double> p(amps.size());
        for (std::size_t b = 0; b < amps.size(); ++b) p[b] = std::norm(amps[b]);
        return p;
    }
};

inline constexpr std::size_t qaoa_max_vars = 20;

inline Statevector plus_state(std::size_t num_qubits) {
    if (num_qubits > qaoa_max_vars)
        throw SizeCapError("statevector: " + std::to_string(num_qubits) +
                           " qubits exceed cap " + std::to_string(qaoa_max_vars));
    Statevector sv;
    sv.num_qubits = num_qubits;
    const std::size_t dim = std::size_t{1} << num_qubits;
    sv.amps.assign(dim, std::complex<double>(std::sqrt(1.0 / static_cast<double>(dim)), 0.0));
    return sv;
}

/// Diagonal phase layer exp(-i * gamma * H): multiplies each amplitude by
/// exp(-i * gamma * E(b)).
inline void apply_cost_layer(Statevector& sv, const std::vector<double>& energies, double gamma) {
    if (energies.size() != sv.amps.size())
        throw std::invalid_argument("cost layer: energy table size mismatch");
    for (std::size_t b = 0; b < sv.amps.size(); ++b)
        sv.amps[b] *= std::polar(1.0, -gamma * energies[b]);
}

/// Transverse-field layer exp(-i * beta * X) on every qubit:
/// cos(beta) * a - i * sin(beta) * a_flipped, one qubit at a time.
inline void apply_mixer_layer(Statevector& sv, double beta) {
    const std::complex<double> c(std::cos(beta), 0.0);
    const std::complex<double> ms(0.0, -std::sin(beta));
    for (std::size_t qb = 0; qb < sv.num_qubits; ++qb) {
        const std::size_t mask = std::size_t{1} << qb;
        for (std::size_t i = 0; i < sv.amps.size(); ++i) {
            if (i & mask) continue;
            const std::complex<double> a0 = sv.amps[i];
            const std::complex<double> a1 = sv.amps[i | mask];
            sv.amps[i] = c * a0 + ms * a1;
            sv.amps[i | mask] = ms * a0 + c * a1;
        }
    }
}

/// Full circuit: |+>^n, then per layer the cost phase followed by the mixer.
inline Statevector qaoa_state(const QuboProblem& q, const QaoaParams& params) {
    params.check();
    const std::vector<double> energies = enumerate_energies(q, qaoa_max_vars);
    Statevector sv = plus_state(q.num_vars());
    for (std::size_t l = 0; l < params.p(); ++l) {
        apply_cost_layer(sv, energies, params.gammas[l]);
        apply_mixer_layer(sv, params.betas[l]);
    }
    return sv;
}

inline double expectation(const Statevector& sv, const std::vector<double>& energies) {
    if (energies.size() != sv.amps.size())
        throw std::invalid_argument("expectation: energy table size mismatch");
    double e = 0.0;
    for (std::size_t b = 0; b < sv.amps.size(); ++b) e += std::norm(sv.amps[b]) * energies[b];
    return e;
}

inline double expectation(const QuboProblem& q, const QaoaParams& params) {
    return expectation(qaoa_state(q, params), enumerate_energies(q, qaoa_max_vars));
}

struct GridSearchResult {
    QaoaParams best;
    std::vector<double> beta_grid;
    std::vector<double> gamma_grid;
    std::vector<std::vector<double>> landscape; // [beta index][gamma index]
};

inline std::vector<double> default_beta_grid(std::size_t points = 32) {
    std::vector<double> g(points);
    for (std::size_t k = 0; k < points; ++k)
        g[k] = std::numbers::pi * static_cast<double>(k) / static_cast<double>(points);
    return g;
}

inline std::vector<double> default_gamma_grid(std::size_t points = 64) {
    std::vector<double> g(points);
    for (std::size_t k = 0; k < points; ++k)
        g[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(points);
    return g;
}

/// Single-layer parameter scan. Shares the phased state across the beta
/// sweep, so the cost per gamma is one phase pass plus |beta_grid| mixers.
/// Ties go to the lowest (beta index, gamma index) pair.
inline GridSearchResult grid_search(const QuboProblem& q, const std::vector<double>& beta_grid,
                                    const std::vector<double>& gamma_grid) {
    if (beta_grid.empty() || gamma_grid.empty())
        throw std::invalid_argument("grid_search: empty grid");
    const std::vector<double> energies = enumerate_energies(q, qaoa_max_vars);
    const Statevector base = plus_state(q.num_vars());

    GridSearchResult out;
    out.beta_grid = beta_grid;
    out.gamma_grid = gamma_grid;
    out.landscape.assign(beta_grid.size(), std::vector<double>(gamma_grid.size(), 0.0));

    std::size_t best_i = 0;
    std::size_t best_j = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < gamma_grid.size(); ++j) {
        Statevector phased = base;
        apply_cost_layer(phased, energies, gamma_grid[j]);
        for (std::size_t i = 0; i < beta_grid.size(); ++i) {
            Statevector sv = phased;
            apply_mixer_layer(sv, beta_grid[i]);
            const double val = expectation(sv, energies);
            out.landscape[i][j] = val;
            if (val < best_val ||
                (val == best_val && std::make_pair(i, j) < std::make_pair(best_i, best_j))) {
                best_val = val;
                best_i = i;
                best_j = j;
            }
        }
    }
    out.best = QaoaParams{{beta_grid[best_i]}, {gamma_grid[best_j]}};
    return out;
}

/// Multinomial measurement of the circuit's output distribution. Seed
/// determinism follows the shared per-shot sub-seed rule.
inline SampleSet qaoa_sample(const QuboProblem& q, const QaoaParams& params, std::uint64_t shots,
                             std::uint64_t seed) {
    const Statevector sv = qaoa_state(q, params);
    if (shots == 0) return make_sample_set(q, std::map<Bitstring, std::uint64_t>{});
    const auto counts =
        detail::multinomial_draw(detail::cdf_from_weights(sv.probabilities()), shots, seed);
    std::map<Bitstring, std::uint64_t> by_bits;
    for (const auto& [idx, mult] : counts) by_bits[bits_from_index(idx, q.num_vars())] = mult;
    return make_sample_set(q, by_bits);
}

/// Rescales all coefficients (offset included) by 1 / max |coefficient| so
/// gamma sweeps stay at unit scale; returns the scale to undo the mapping.
/// Argmins are unchanged.
inline std::pair<QuboProblem, double> normalize_coefficients(const QuboProblem& q) {
    double scale = 0.0;
    for (const auto& [i, v] : q.linear()) scale = std::max(scale, std::abs(v));
    for (const auto& [ij, v] : q.quadratic()) scale = std::max(scale, std::abs(v));
    scale = std::max(scale, std::abs(q.offset()));
    if (scale == 0.0) return {q, 1.0};
    QuboProblem out(q.num_vars());
    out.add_offset(q.offset() / scale);
    for (const auto& [i, v] : q.linear()) out.add_linear(i, v / scale);
    for (const auto& [ij, v] : q.quadratic()) out.add_quadratic(ij.first, ij.second, v / scale);
    for (const auto& [name, idx] : q.labels()) out.set_label(name, idx);
    return {out, scale};
}

} // namespace qrobust
