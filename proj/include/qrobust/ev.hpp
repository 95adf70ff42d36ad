#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrobust/errors.hpp"
#include "qrobust/qubo.hpp"

namespace qrobust {

enum class PvKind { none, gaussian, uniform };

/// Charging-schedule instance: pick integer charge amounts j_t against an
/// uncertain PV supply, with per-step and total-energy bounds.
struct EvInstance {
    int num_steps = 0;
    PvKind pv_kind = PvKind::none;
    std::vector<double> pv_mu;    // gaussian
    std::vector<double> pv_sigma; // gaussian
    std::vector<double> pv_lo;    // uniform
    std::vector<double> pv_hi;    // uniform
    std::vector<std::int64_t> j_min;
    std::vector<std::int64_t> j_max;
    std::vector<int> bits; // register width per step
    double e_min = 0.0;
    double e_max = 0.0;
};

inline void validate(const EvInstance& inst) {
    const auto T = static_cast<std::size_t>(inst.num_steps);
    if (inst.num_steps < 1) throw std::invalid_argument("ev: num_steps must be >= 1");
    if (inst.j_min.size() != T || inst.j_max.size() != T || inst.bits.size() != T)
        throw std::invalid_argument("ev: j_min/j_max/bits must have num_steps entries");
    if (!(inst.e_min <= inst.e_max)) throw std::invalid_argument("ev: need e_min <= e_max");
    for (std::size_t t = 0; t < T; ++t) {
        const std::string tag = "ev step " + std::to_string(t) + ": ";
        if (inst.j_min[t] < 0 || inst.j_max[t] < inst.j_min[t])
            throw std::invalid_argument(tag + "need 0 <= j_min <= j_max");
        if (inst.bits[t] < 0 || inst.bits[t] > 32)
            throw std::invalid_argument(tag + "bits out of range");
        if (inst.j_max[t] > inst.j_min[t] + ((std::int64_t{1} << inst.bits[t]) - 1))
            throw std::invalid_argument(tag + "register too narrow for j_max");
    }
    if (inst.pv_kind == PvKind::gaussian) {
        if (inst.pv_mu.size() != T || inst.pv_sigma.size() != T)
            throw std::invalid_argument("ev: gaussian pv needs mu/sigma per step");
        for (double s : inst.pv_sigma)
            if (!(s >= 0.0)) throw std::invalid_argument("ev: sigma must be nonnegative");
    } else if (inst.pv_kind == PvKind::uniform) {
        if (inst.pv_lo.size() != T || inst.pv_hi.size() != T)
            throw std::invalid_argument("ev: uniform pv needs lo/hi per step");
        for (std::size_t t = 0; t < T; ++t)
            if (!(inst.pv_lo[t] <= inst.pv_hi[t]))
                throw std::invalid_argument("ev: need pv lo <= hi");
    }
}

/// Expectation coefficients of E[(j - S)^2] = j^2 - C j + D per step:
/// C = 2 E[S], D = E[S^2].
struct EvCoefficients {
    std::vector<double> c;
    std::vector<double> d;
};

inline EvCoefficients ev_coefficients(const EvInstance& inst) {
    validate(inst);
    const auto T = static_cast<std::size_t>(inst.num_steps);
    EvCoefficients out;
    out.c.resize(T);
    out.d.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        double mu = 0.0;
        double var = 0.0;
        switch (inst.pv_kind) {
            case PvKind::gaussian:
                mu = inst.pv_mu[t];
                var = inst.pv_sigma[t] * inst.pv_sigma[t];
                break;
            case PvKind::uniform: {
                mu = 0.5 * (inst.pv_lo[t] + inst.pv_hi[t]);
                const double w = inst.pv_hi[t] - inst.pv_lo[t];
                var = w * w / 12.0;
                break;
            }
            case PvKind::none:
                throw std::invalid_argument("ev_coefficients: missing supply distribution");
        }
        out.c[t] = 2.0 * mu;
        out.d[t] = mu * mu + var;
    }
    return out;
}

struct EvSchedule {
    std::vector<std::int64_t> j;
};

/// Variable layout: per step a charge register (j_t = j_min_t + bits), then
/// one slack register that encodes total charge minus the window floor.
struct EvLayout {
    std::size_t num_vars = 0;
    std::vector<std::size_t> j_offset; // first bit of step t's register
    std::vector<int> j_bits;
    std::vector<std::int64_t> j_base;
    std::size_t slack_offset = 0;
    std::vector<std::int64_t> slack_weights;
    std::int64_t window_lo = 0; // ceil(e_min)
    std::int64_t window_hi = 0; // floor(e_max)
};

namespace detail {

/// Bounded binary register covering exactly 0..range: powers of two plus a
/// capped top weight.
inline std::vector<std::int64_t> bounded_register_weights(std::int64_t range) {
    std::vector<std::int64_t> w;
    if (range <= 0) return w;
    const int k = std::bit_width(static_cast<std::uint64_t>(range));
    for (int b = 0; b + 1 < k; ++b) w.push_back(std::int64_t{1} << b);
    w.push_back(range - ((std::int64_t{1} << (k - 1)) - 1));
    return w;
}

} // namespace detail

/// Weight that dominates any achievable quadratic cost, so breaking the
/// total-energy window never pays off. Register ceilings (which can sit above
/// j_max) bound the worst per-step charge.
inline double default_total_weight(const EvInstance& inst,
                                   const std::optional<std::vector<double>>& supply) {
    validate(inst);
    const auto T = static_cast<std::size_t>(inst.num_steps);
    double bound = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
        const double jcap = static_cast<double>(inst.j_min[t]) +
                            static_cast<double>((std::int64_t{1} << inst.bits[t]) - 1);
        if (supply) {
            const double d = std::max(jcap, (*supply)[t]);
            bound += d * d;
        } else if (inst.pv_kind == PvKind::uniform) {
            const double d = std::max(jcap, inst.pv_hi[t]);
            bound += d * d;
        } else {
            const double d = std::max(jcap, inst.pv_mu[t]);
            bound += d * d + inst.pv_sigma[t] * inst.pv_sigma[t];
        }
    }
    return bound;
}

struct EvQubo {
    QuboProblem qubo;
    EvLayout layout;
};

/// Builds the charging QUBO. With a supply vector the objective is the
/// realized cost sum (j_t - supply_t)^2; without one it is the expectation
/// sum (j_t^2 - C_t j_t + D_t). Either way a slack-register penalty enforces
/// e_min <= sum j_t <= e_max on the integer grid.
inline EvQubo encode_ev(const EvInstance& inst,
                        const std::optional<std::vector<double>>& supply = std::nullopt,
                        std::optional<double> total_weight = std::nullopt) {
    validate(inst);
    const auto T = static_cast<std::size_t>(inst.num_steps);
    if (supply && supply->size() != T)
        throw std::invalid_argument("encode_ev: supply length must match num_steps");

    std::vector<double> c(T), d(T);
    if (supply) {
        for (std::size_t t = 0; t < T; ++t) {
            const double e = (*supply)[t];
            c[t] = 2.0 * e;
            d[t] = e * e;
        }
    } else {
        const EvCoefficients coef = ev_coefficients(inst);
        c = coef.c;
        d = coef.d;
    }

    EvLayout lay;
    lay.j_bits = inst.bits;
    lay.j_base = inst.j_min;
    lay.j_offset.resize(T);
    std::size_t off = 0;
    std::int64_t base_total = 0;
    std::int64_t cap_total = 0;
    for (std::size_t t = 0; t < T; ++t) {
        lay.j_offset[t] = off;
        off += static_cast<std::size_t>(inst.bits[t]);
        base_total += inst.j_min[t];
        cap_total += inst.j_min[t] + ((std::int64_t{1} << inst.bits[t]) - 1);
    }
    lay.window_lo = static_cast<std::int64_t>(std::ceil(inst.e_min - 1e-9));
    lay.window_hi = static_cast<std::int64_t>(std::floor(inst.e_max + 1e-9));
    if (lay.window_lo > lay.window_hi)
        throw InfeasibleError("encode_ev: no integer total inside [e_min, e_max]");
    if (base_total > lay.window_hi)
        throw InfeasibleError("encode_ev: minimum charges already exceed e_max");
    if (cap_total < lay.window_lo)
        throw InfeasibleError("encode_ev: maximum charges cannot reach e_min");
    lay.slack_offset = off;
    lay.slack_weights = detail::bounded_register_weights(lay.window_hi - lay.window_lo);
    lay.num_vars = off + lay.slack_weights.size();

    QuboProblem q(lay.num_vars);
    for (std::size_t t = 0; t < T; ++t) {
        const double m = static_cast<double>(inst.j_min[t]);
        q.add_offset(m * m - c[t] * m + d[t]);
        for (int k = 0; k < inst.bits[t]; ++k) {
            const std::size_t vk = lay.j_offset[t] + static_cast<std::size_t>(k);
            const double wk = std::ldexp(1.0, k);
            q.set_label("j[" + std::to_string(t) + "][" + std::to_string(k) + "]", vk);
            q.add_linear(vk, 2.0 * m * wk + wk * wk - c[t] * wk);
            for (int l = k + 1; l < inst.bits[t]; ++l) {
                const std::size_t vl = lay.j_offset[t] + static_cast<std::size_t>(l);
                q.add_quadratic(vk, vl, 2.0 * wk * std::ldexp(1.0, l));
            }
        }
    }

    const double lam = total_weight.value_or(default_total_weight(inst, supply));
    if (!(lam > 0.0)) throw std::invalid_argument("encode_ev: total weight must be positive");
    std::map<std::size_t, double> terms;
    for (std::size_t t = 0; t < T; ++t)
        for (int k = 0; k < inst.bits[t]; ++k)
            terms[lay.j_offset[t] + static_cast<std::size_t>(k)] += std::ldexp(1.0, k);
    for (std::size_t s = 0; s < lay.slack_weights.size(); ++s) {
        const std::size_t vs = lay.slack_offset + s;
        q.set_label("slack[" + std::to_string(s) + "]", vs);
        terms[vs] -= static_cast<double>(lay.slack_weights[s]);
    }
    penalty_linear_eq(q, terms, static_cast<double>(lay.window_lo - base_total), lam);

    return EvQubo{std::move(q), std::move(lay)};
}

inline EvSchedule decode_ev(const EvLayout& lay, const Bitstring& x) {
    if (x.size() != lay.num_vars) throw std::invalid_argument("decode_ev: length mismatch");
    EvSchedule s;
    s.j.resize(lay.j_offset.size());
    for (std::size_t t = 0; t < lay.j_offset.size(); ++t) {
        std::int64_t v = lay.j_base[t];
        for (int k = 0; k < lay.j_bits[t]; ++k)
            if (x[lay.j_offset[t] + static_cast<std::size_t>(k)]) v += std::int64_t{1} << k;
        s.j[t] = v;
    }
    return s;
}

inline std::int64_t decode_ev_slack(const EvLayout& lay, const Bitstring& x) {
    if (x.size() != lay.num_vars) throw std::invalid_argument("decode_ev_slack: length mismatch");
    std::int64_t v = 0;
    for (std::size_t s = 0; s < lay.slack_weights.size(); ++s)
        if (x[lay.slack_offset + s]) v += lay.slack_weights[s];
    return v;
}

/// Realized scenario cost sum (j_t - supply_t)^2; the objective the robust
/// engine evaluates per scenario.
inline double ev_cost(const EvSchedule& s, const std::vector<double>& supply) {
    if (s.j.size() != supply.size()) throw std::invalid_argument("ev_cost: length mismatch");
    double cost = 0.0;
    for (std::size_t t = 0; t < s.j.size(); ++t) {
        const double gap = static_cast<double>(s.j[t]) - supply[t];
        cost += gap * gap;
    }
    return cost;
}

/// Charge bounds and the total-energy window, on the decoded schedule.
inline bool ev_schedule_feasible(const EvInstance& inst, const EvSchedule& s) {
    const auto T = static_cast<std::size_t>(inst.num_steps);
    if (s.j.size() != T) throw std::invalid_argument("ev_schedule_feasible: length mismatch");
    std::int64_t total = 0;
    for (std::size_t t = 0; t < T; ++t) {
        if (s.j[t] < inst.j_min[t] || s.j[t] > inst.j_max[t]) return false;
        total += s.j[t];
    }
    const double tot = static_cast<double>(total);
    return tot >= inst.e_min - 1e-9 && tot <= inst.e_max + 1e-9;
}

} // namespace qrobust
