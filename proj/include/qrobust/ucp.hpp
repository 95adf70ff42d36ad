#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrobust/qubo.hpp"

namespace qrobust {

/// One dispatchable generator. Power lives on the grid
/// {mingen, mingen+step, ..., maxgen} whenever the unit is on.
struct UcpUnit {
    double varcost = 0.0;   // cost per unit of power per step
    double startcost = 0.0; // one-off cost when the unit starts
    double mingen = 0.0;
    double maxgen = 0.0;
    int minup = 1;   // steps the unit must stay on after a start
    int mindown = 1; // steps the unit must stay off after a shutdown
    double step = 1.0;
};

struct UcpInstance {
    std::vector<UcpUnit> units;
    int num_steps = 0;
};

inline void validate(const UcpInstance& inst) {
    if (inst.num_steps < 1) throw std::invalid_argument("ucp: num_steps must be >= 1");
    if (inst.units.empty()) throw std::invalid_argument("ucp: no units");
    for (std::size_t i = 0; i < inst.units.size(); ++i) {
        const auto& u = inst.units[i];
        const std::string tag = "ucp unit " + std::to_string(i) + ": ";
        if (!(u.mingen >= 0.0) || !(u.maxgen >= u.mingen))
            throw std::invalid_argument(tag + "need 0 <= mingen <= maxgen");
        if (!(u.step > 0.0)) throw std::invalid_argument(tag + "step must be positive");
        if (u.minup < 1 || u.minup > inst.num_steps)
            throw std::invalid_argument(tag + "minup out of range");
        if (u.mindown < 1 || u.mindown > inst.num_steps)
            throw std::invalid_argument(tag + "mindown out of range");
        if (u.varcost < 0.0 || u.startcost < 0.0)
            throw std::invalid_argument(tag + "costs must be nonnegative");
    }
}

/// Number of bits in the power register of a unit: enough levels to reach
/// maxgen from mingen in grid steps. A fixed-output unit needs none.
inline std::size_t gen_bit_count(const UcpUnit& u) {
    const double levels = (u.maxgen - u.mingen) / u.step;
    const auto m = static_cast<std::uint64_t>(std::floor(levels + 1e-9));
    return m == 0 ? 0 : std::bit_width(m);
}

/// Penalty weights for the constraint terms. Anything left unset defaults to
/// a bound that dominates every achievable cost difference, so violating a
/// logic constraint can never pay off.
struct UcpWeights {
    double demand = 1.0;
    std::optional<double> link;
    std::optional<double> start_logic;
    std::optional<double> minup;
    std::optional<double> mindown;
};

inline double default_logic_weight(const UcpInstance& inst) {
    double bound = 1.0;
    for (const auto& u : inst.units)
        bound += u.startcost + static_cast<double>(inst.num_steps) * u.varcost * u.maxgen;
    return bound;
}

/// Variable layout. Per (step, unit) block: [on, start, gen bit 0, ...],
/// blocks ordered step-major then unit.
class UcpEncoding {
  public:
    UcpEncoding(const UcpInstance& inst) : num_steps_(inst.num_steps) {
        gen_bits_.reserve(inst.units.size());
        for (const auto& u : inst.units) gen_bits_.push_back(gen_bit_count(u));
        block_offsets_.resize(inst.units.size());
        std::size_t off = 0;
        block_stride_ = 0;
        for (std::size_t i = 0; i < inst.units.size(); ++i) {
            block_offsets_[i] = off;
            off += 2 + gen_bits_[i];
        }
        block_stride_ = off;
        num_vars_ = block_stride_ * static_cast<std::size_t>(num_steps_);
    }

    std::size_t num_vars() const { return num_vars_; }
    std::size_t num_units() const { return gen_bits_.size(); }
    int num_steps() const { return num_steps_; }
    std::size_t gen_bits(std::size_t unit) const { return gen_bits_.at(unit); }

    std::size_t on_index(int t, std::size_t unit) const { return base(t, unit); }
    std::size_t start_index(int t, std::size_t unit) const { return base(t, unit) + 1; }
    std::size_t gen_index(int t, std::size_t unit, std::size_t k) const {
        if (k >= gen_bits_.at(unit)) throw std::out_of_range("gen bit index");
        return base(t, unit) + 2 + k;
    }

  private:
    std::size_t base(int t, std::size_t unit) const {
        if (t < 0 || t >= num_steps_) throw std::out_of_range("time step");
        return static_cast<std::size_t>(t) * block_stride_ + block_offsets_.at(unit);
    }

    int num_steps_;
    std::vector<std::size_t> gen_bits_;
    std::vector<std::size_t> block_offsets_;
    std::size_t block_stride_ = 0;
    std::size_t num_vars_ = 0;
};

struct UcpQubo {
    QuboProblem qubo;
    UcpEncoding encoding;
};

/// Builds the QUBO for one demand profile. Deterministic cost plus penalties:
/// demand balance (squared mismatch, tunable weight), power-to-on linking,
/// start bookkeeping, and min up/down times.
inline UcpQubo encode_ucp(const UcpInstance& inst, const std::vector<double>& demand,
                          const UcpWeights& weights = {}) {
    validate(inst);
    if (static_cast<int>(demand.size()) != inst.num_steps)
        throw std::invalid_argument("ucp: demand length must match num_steps");
    if (!(weights.demand > 0.0)) throw std::invalid_argument("ucp: demand weight must be positive");

    const double logic = default_logic_weight(inst);
    const double w_link = weights.link.value_or(logic);
    const double w_start = weights.start_logic.value_or(logic);
    const double w_minup = weights.minup.value_or(logic);
    const double w_mindown = weights.mindown.value_or(logic);

    UcpEncoding enc(inst);
    QuboProblem q(enc.num_vars());
    const int T = inst.num_steps;

    for (int t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < inst.units.size(); ++i) {
            const auto& u = inst.units[i];
            const std::size_t on = enc.on_index(t, i);
            const std::size_t start = enc.start_index(t, i);
            q.set_label("on[" + std::to_string(t) + "][" + std::to_string(i) + "]", on);
            q.set_label("start[" + std::to_string(t) + "][" + std::to_string(i) + "]", start);

            // Running cost: varcost * P with P = mingen*on + step * register.
            q.add_linear(on, u.varcost * u.mingen);
            for (std::size_t k = 0; k < enc.gen_bits(i); ++k) {
                const std::size_t g = enc.gen_index(t, i, k);
                q.set_label("gen[" + std::to_string(t) + "][" + std::to_string(i) + "][" +
                                std::to_string(k) + "]",
                            g);
                q.add_linear(g, u.varcost * u.step * std::ldexp(1.0, static_cast<int>(k)));
                // Register bits only count while the unit is on.
                q.add_linear(g, w_link);
                q.add_quadratic(on, g, -w_link);
            }
            q.add_linear(start, u.startcost);

            // start_t must equal on_t AND NOT on_{t-1} (with on_{-1} = 0).
            if (t == 0) {
                // Penalty (on - start)^2 collapses the gadget for the boundary.
                q.add_linear(on, w_start);
                q.add_linear(start, w_start);
                q.add_quadratic(on, start, -2.0 * w_start);
            } else {
                penalty_and_gadget(q, on, enc.on_index(t - 1, i), start, w_start);
            }

            // A start at t forces the unit on through the whole up window,
            // penalizing start * (1 - on) per window step.
            {
                const int last = std::min(t + u.minup - 1, T - 1);
                for (int tau = t; tau <= last; ++tau) {
                    q.add_linear(start, w_minup);
                    q.add_quadratic(start, enc.on_index(tau, i), -w_minup);
                }
            }

            // Being on at t forbids a restart inside the down window that a
            // shutdown right after t would open.
            if (u.mindown > 1) {
                const int last = std::min(t + u.mindown, T - 1);
                for (int r = t + 2; r <= last; ++r)
                    q.add_quadratic(on, enc.start_index(r, i), w_mindown);
            }
        }

        // Produced power must meet demand at every step.
        std::map<std::size_t, double> terms;
        for (std::size_t i = 0; i < inst.units.size(); ++i) {
            const auto& u = inst.units[i];
            terms[enc.on_index(t, i)] += u.mingen;
            for (std::size_t k = 0; k < enc.gen_bits(i); ++k)
                terms[enc.gen_index(t, i, k)] += u.step * std::ldexp(1.0, static_cast<int>(k));
        }
        penalty_linear_eq(q, terms, demand[static_cast<std::size_t>(t)], weights.demand);
    }

    return UcpQubo{std::move(q), std::move(enc)};
}

/// Dispatch decoded from a bitstring. power[t][i] is 0 while off, otherwise
/// mingen + step * register value (link violations decode as-is).
struct UcpSchedule {
    std::vector<std::vector<std::uint8_t>> on;    // [t][unit]
    std::vector<std::vector<std::uint8_t>> start; // [t][unit]
    std::vector<std::vector<double>> power;       // [t][unit]
};

inline UcpSchedule decode_ucp(const UcpInstance& inst, const UcpEncoding& enc, const Bitstring& x) {
    if (x.size() != enc.num_vars()) throw std::invalid_argument("decode_ucp: length mismatch");
    const int T = enc.num_steps();
    UcpSchedule s;
    s.on.assign(static_cast<std::size_t>(T), std::vector<std::uint8_t>(inst.units.size(), 0));
    s.start = s.on;
    s.power.assign(static_cast<std::size_t>(T), std::vector<double>(inst.units.size(), 0.0));
    for (int t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < inst.units.size(); ++i) {
            const auto& u = inst.units[i];
            const auto ts = static_cast<std::size_t>(t);
            s.on[ts][i] = x[enc.on_index(t, i)];
            s.start[ts][i] = x[enc.start_index(t, i)];
            double reg = 0.0;
            for (std::size_t k = 0; k < enc.gen_bits(i); ++k)
                if (x[enc.gen_index(t, i, k)])
                    reg += std::ldexp(1.0, static_cast<int>(k));
            s.power[ts][i] = s.on[ts][i] ? u.mingen + u.step * reg : u.step * reg;
        }
    }
    return s;
}

/// Inverse of decode_ucp for well-formed schedules; rejects power values not
/// on the unit's grid.
inline Bitstring encode_schedule(const UcpInstance& inst, const UcpEncoding& enc,
                                 const UcpSchedule& s) {
    Bitstring x(enc.num_vars(), 0);
    for (int t = 0; t < enc.num_steps(); ++t) {
        const auto ts = static_cast<std::size_t>(t);
        for (std::size_t i = 0; i < inst.units.size(); ++i) {
            const auto& u = inst.units[i];
            x[enc.on_index(t, i)] = s.on.at(ts).at(i) ? 1 : 0;
            x[enc.start_index(t, i)] = s.start.at(ts).at(i) ? 1 : 0;
            double reg = 0.0;
            if (s.on[ts][i]) reg = (s.power.at(ts).at(i) - u.mingen) / u.step;
            else if (s.power.at(ts).at(i) != 0.0)
                throw std::invalid_argument("encode_schedule: power while off");
            const auto bits = static_cast<std::uint64_t>(std::llround(reg));
            if (reg < -1e-6 || std::abs(reg - static_cast<double>(bits)) > 1e-6)
                throw std::invalid_argument("encode_schedule: power off-grid");
            if (bits >= (1ULL << enc.gen_bits(i)))
                throw std::invalid_argument("encode_schedule: power exceeds register range");
            for (std::size_t k = 0; k < enc.gen_bits(i); ++k)
                x[enc.gen_index(t, i, k)] = static_cast<std::uint8_t>((bits >> k) & 1ULL);
        }
    }
    return x;
}

struct UcpViolation {
    enum class Kind { start_logic, min_uptime, min_downtime, power_bounds };
    Kind kind;
    int t;
    std::size_t unit;
    std::string note;
};

/// Checks the hard operating rules (not demand balance, which is soft):
/// start bits consistent with on transitions, min up/down respected, power
/// zero while off and on the [mingen, maxgen] grid while on.
inline std::vector<UcpViolation> check_feasible(const UcpInstance& inst, const UcpSchedule& s) {
    std::vector<UcpViolation> out;
    const int T = inst.num_steps;
    for (std::size_t i = 0; i < inst.units.size(); ++i) {
        const auto& u = inst.units[i];
        for (int t = 0; t < T; ++t) {
            const auto ts = static_cast<std::size_t>(t);
            const bool on = s.on[ts][i] != 0;
            const bool prev_on = t > 0 && s.on[static_cast<std::size_t>(t - 1)][i] != 0;
            const bool started = on && !prev_on;
            if ((s.start[ts][i] != 0) != started)
                out.push_back({UcpViolation::Kind::start_logic, t, i,
                               started ? "missing start bit" : "spurious start bit"});
            if (started) {
                const int last = std::min(t + u.minup - 1, T - 1);
                for (int tau = t + 1; tau <= last; ++tau)
                    if (!s.on[static_cast<std::size_t>(tau)][i]) {
                        out.push_back({UcpViolation::Kind::min_uptime, tau, i,
                                       "off before minimum uptime elapsed"});
                        break;
                    }
            }
            if (t > 0 && prev_on && !on) {
                const int last = std::min(t + u.mindown - 1, T - 1);
                for (int r = t; r <= last; ++r)
                    if (s.on[static_cast<std::size_t>(r)][i] &&
                        !s.on[static_cast<std::size_t>(r - 1)][i]) {
                        out.push_back({UcpViolation::Kind::min_downtime, r, i,
                                       "restart before minimum downtime elapsed"});
                        break;
                    }
            }
            const double p = s.power[ts][i];
            if (!on) {
                if (p != 0.0)
                    out.push_back({UcpViolation::Kind::power_bounds, t, i, "power while off"});
            } else {
                const double rel = (p - u.mingen) / u.step;
                const bool on_grid = std::abs(rel - std::round(rel)) <= 1e-6;
                if (p < u.mingen - 1e-9 || p > u.maxgen + 1e-9 || !on_grid)
                    out.push_back({UcpViolation::Kind::power_bounds, t, i, "power off-grid"});
            }
        }
    }
    return out;
}

/// Deterministic cost and weighted squared demand mismatch of a schedule
/// under one demand profile. Together the pair matches the non-logic part of
/// the QUBO energy for every assignment, feasible or not, since decode keeps
/// raw register power.
inline std::pair<double, double> ucp_objective(const UcpInstance& inst, const UcpSchedule& s,
                                               const std::vector<double>& demand,
                                               double lambda_demand = 1.0) {
    if (static_cast<int>(demand.size()) != inst.num_steps)
        throw std::invalid_argument("ucp_objective: demand length mismatch");
    double det = 0.0;
    double mismatch = 0.0;
    for (int t = 0; t < inst.num_steps; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        double produced = 0.0;
        for (std::size_t i = 0; i < inst.units.size(); ++i) {
            const auto& u = inst.units[i];
            det += u.varcost * s.power[ts][i];
            det += u.startcost * static_cast<double>(s.start[ts][i]);
            produced += s.power[ts][i];
        }
        const double gap = produced - demand[ts];
        mismatch += gap * gap;
    }
    return {det, lambda_demand * mismatch};
}

} // namespace qrobust
