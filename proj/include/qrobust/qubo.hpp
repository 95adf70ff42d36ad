#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrobust/errors.hpp"

namespace qrobust {

/// One binary assignment; entry i is variable i (0 or 1).
using Bitstring = std::vector<std::uint8_t>;

inline std::string to_string(const Bitstring& bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

inline Bitstring bits_from_string(const std::string& s) {
    Bitstring bits;
    bits.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("bitstring must be over {0,1}");
        bits.push_back(c == '1' ? 1 : 0);
    }
    return bits;
}

/// Basis-index convention used everywhere: variable 0 is the least significant
/// bit of the index.
inline Bitstring bits_from_index(std::uint64_t index, std::size_t num_vars) {
    Bitstring bits(num_vars, 0);
    for (std::size_t i = 0; i < num_vars; ++i) bits[i] = (index >> i) & 1ULL;
    return bits;
}

inline std::uint64_t index_from_bits(const Bitstring& bits) {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) idx |= (1ULL << i);
    return idx;
}

/// Sparse quadratic pseudo-Boolean objective
///     E(x) = offset + sum_i linear[i]*x_i + sum_{i<j} quadratic[i,j]*x_i*x_j.
///
/// Quadratic keys are kept strictly upper-triangular; a diagonal add folds
/// into the linear part (x_i^2 = x_i). Coefficients that cancel to exactly
/// zero are dropped. Optional labels name variables; when present they must
/// be a bijection onto 0..num_vars-1.
class QuboProblem {
public:
    using Key = std::pair<std::size_t, std::size_t>;

    QuboProblem() = default;
    explicit QuboProblem(std::size_t num_vars) : num_vars_(num_vars) {}

    std::size_t num_vars() const { return num_vars_; }
    double offset() const { return offset_; }
    const std::map<std::size_t, double>& linear() const { return linear_; }
    const std::map<Key, double>& quadratic() const { return quadratic_; }
    const std::map<std::string, std::size_t>& labels() const { return labels_; }

    void add_offset(double v) {
        check_finite(v);
        offset_ += v;
    }

    void add_linear(std::size_t i, double c) {
        check_index(i);
        check_finite(c);
        accumulate(linear_, i, c);
    }

    void add_quadratic(std::size_t i, std::size_t j, double c) {
        check_index(i);
        check_index(j);
        check_finite(c);
        if (i == j) {
            accumulate(linear_, i, c); // x^2 = x on binaries
            return;
        }
        if (i > j) std::swap(i, j);
        accumulate(quadratic_, Key{i, j}, c);
    }

    double linear_at(std::size_t i) const {
        auto it = linear_.find(i);
        return it == linear_.end() ? 0.0 : it->second;
    }

    double quadratic_at(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        if (i > j) std::swap(i, j);
        auto it = quadratic_.find(Key{i, j});
        return it == quadratic_.end() ? 0.0 : it->second;
    }

    /// Merge another objective over the same variable set (penalty fragments).
    void add(const QuboProblem& other) {
        if (other.num_vars_ != num_vars_)
            throw std::invalid_argument("cannot add objectives with different num_vars");
        offset_ += other.offset_;
        for (const auto& [i, c] : other.linear_) accumulate(linear_, i, c);
        for (const auto& [k, c] : other.quadratic_) accumulate(quadratic_, k, c);
        for (const auto& [name, idx] : other.labels_) set_label(name, idx);
    }

    void set_label(const std::string& name, std::size_t index) {
        check_index(index);
        auto it = labels_.find(name);
        if (it != labels_.end() && it->second != index)
            throw std::invalid_argument("label '" + name + "' already bound to another variable");
        if (it == labels_.end())
            for (const auto& [other, idx] : labels_)
                if (idx == index)
                    throw std::invalid_argument("variable " + std::to_string(index) +
                                                " already labeled '" + other + "'");
        labels_[name] = index;
    }

    /// Labels, when used at all, must cover every variable exactly once.
    void validate_labels() const {
        if (labels_.empty()) return;
        if (labels_.size() != num_vars_)
            throw std::invalid_argument("labels must cover all variables");
        std::vector<bool> seen(num_vars_, false);
        for (const auto& [name, idx] : labels_) {
            if (seen[idx]) throw std::invalid_argument("duplicate label index " + std::to_string(idx));
            seen[idx] = true;
        }
    }

    /// Sum of |coefficients|; a cheap bound on the energy scale.
    double coefficient_scale() const {
        double s = std::abs(offset_);
        for (const auto& [i, c] : linear_) s += std::abs(c);
        for (const auto& [k, c] : quadratic_) s += std::abs(c);
        return s;
    }

private:
    template <typename M, typename K>
    static void accumulate(M& m, const K& key, double c) {
        auto [it, inserted] = m.try_emplace(key, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0.0) m.erase(it);
        } else if (c == 0.0) {
            m.erase(it);
        }
    }

    void check_index(std::size_t i) const {
        if (i >= num_vars_)
            throw std::invalid_argument("variable index " + std::to_string(i) + " out of range");
    }

    static void check_finite(double v) {
        if (!std::isfinite(v)) throw std::invalid_argument("coefficient must be finite");
    }

    std::size_t num_vars_ = 0;
    double offset_ = 0.0;
    std::map<std::size_t, double> linear_;
    std::map<Key, double> quadratic_;
    std::map<std::string, std::size_t> labels_;
};

inline double evaluate(const QuboProblem& q, const Bitstring& x) {
    if (x.size() != q.num_vars())
        throw std::invalid_argument("bitstring length does not match num_vars");
    double e = q.offset();
    for (const auto& [i, c] : q.linear())
        if (x[i]) e += c;
    for (const auto& [key, c] : q.quadratic())
        if (x[key.first] && x[key.second]) e += c;
    return e;
}

/// Spin-variable form of the same objective:
///     E(s) = offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j,  s_i in {-1,+1}.
struct IsingProblem {
    std::vector<double> fields;                                    // h
    std::map<std::pair<std::size_t, std::size_t>, double> couplings; // J, i<j
    double offset = 0.0;
};

inline double ising_energy(const IsingProblem& p, const std::vector<int>& spins) {
    if (spins.size() != p.fields.size())
        throw std::invalid_argument("spin vector length does not match fields");
    for (int s : spins)
        if (s != 1 && s != -1) throw std::invalid_argument("spins must be +-1");
    double e = p.offset;
    for (std::size_t i = 0; i < p.fields.size(); ++i) e += p.fields[i] * spins[i];
    for (const auto& [key, j] : p.couplings) e += j * spins[key.first] * spins[key.second];
    return e;
}

/// Spin convention is pinned as x = (1 - s)/2, i.e. s=+1 <=> x=0.
inline std::vector<int> spins_from_bits(const Bitstring& bits) {
    std::vector<int> s(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) s[i] = bits[i] ? -1 : 1;
    return s;
}

inline IsingProblem to_ising(const QuboProblem& q) {
    IsingProblem p;
    p.fields.assign(q.num_vars(), 0.0);
    p.offset = q.offset();
    for (const auto& [i, c] : q.linear()) {
        p.offset += c / 2;
        p.fields[i] -= c / 2;
    }
    for (const auto& [key, c] : q.quadratic()) {
        const auto [i, j] = key;
        p.offset += c / 4;
        p.fields[i] -= c / 4;
        p.fields[j] -= c / 4;
        p.couplings[key] += c / 4;
        if (p.couplings[key] == 0.0) p.couplings.erase(key);
    }
    return p;
}

inline QuboProblem from_ising(const IsingProblem& p) {
    QuboProblem q(p.fields.size());
    q.add_offset(p.offset);
    for (std::size_t i = 0; i < p.fields.size(); ++i) {
        if (p.fields[i] == 0.0) continue;
        q.add_offset(p.fields[i]);
        q.add_linear(i, -2.0 * p.fields[i]);
    }
    for (const auto& [key, j] : p.couplings) {
        q.add_offset(j);
        q.add_linear(key.first, -2.0 * j);
        q.add_linear(key.second, -2.0 * j);
        q.add_quadratic(key.first, key.second, 4.0 * j);
    }
    return q;
}

/// Quadratic penalty weight * (sum_i coeffs[i]*x_i - rhs)^2, expanded into
/// linear/quadratic coefficients (using x_i^2 = x_i).
inline QuboProblem penalty_linear_eq(std::size_t num_vars,
                                     const std::map<std::size_t, double>& coeffs,
                                     double rhs, double weight) {
    if (weight <= 0.0) throw std::invalid_argument("penalty weight must be positive");
    QuboProblem frag(num_vars);
    frag.add_offset(weight * rhs * rhs);
    for (auto it = coeffs.begin(); it != coeffs.end(); ++it) {
        const auto [i, a] = *it;
        frag.add_linear(i, weight * (a * a - 2.0 * rhs * a));
        for (auto jt = std::next(it); jt != coeffs.end(); ++jt)
            frag.add_quadratic(i, jt->first, 2.0 * weight * a * jt->second);
    }
    return frag;
}

/// Penalty that is zero exactly when z = x * (1 - y) and at least `weight`
/// otherwise. This is the standard AND quadratization of z = x*w written for
/// w = 1-y, with w eliminated by substitution:
///     weight * (x - x*y - 2*x*z + 2*y*z + z).
inline QuboProblem penalty_and_gadget(std::size_t num_vars, std::size_t x, std::size_t y,
                                      std::size_t z, double weight) {
    if (weight <= 0.0) throw std::invalid_argument("penalty weight must be positive");
    if (x == y || x == z || y == z)
        throw std::invalid_argument("gadget variables must be distinct");
    QuboProblem frag(num_vars);
    frag.add_linear(x, weight);
    frag.add_linear(z, weight);
    frag.add_quadratic(x, y, -weight);
    frag.add_quadratic(x, z, -2.0 * weight);
    frag.add_quadratic(y, z, 2.0 * weight);
    return frag;
}

/// In-place variants: accumulate the fragment onto an existing objective.
inline void penalty_linear_eq(QuboProblem& q, const std::map<std::size_t, double>& coeffs,
                              double rhs, double weight) {
    q.add(penalty_linear_eq(q.num_vars(), coeffs, rhs, weight));
}

inline void penalty_and_gadget(QuboProblem& q, std::size_t x, std::size_t y, std::size_t z,
                               double weight) {
    q.add(penalty_and_gadget(q.num_vars(), x, y, z, weight));
}

/// One distinct sampled assignment with its exact energy and how often it
/// appeared.
struct SampleEntry {
    Bitstring bits;
    double energy = 0.0;
    std::uint64_t multiplicity = 0;
};

/// Deduplicated multiset of samples. Entries are ordered by (energy,
/// bitstring) so identical sample multisets print identically.
struct SampleSet {
    std::vector<SampleEntry> entries;
    std::uint64_t total_shots = 0;

    bool empty() const { return entries.empty(); }

    const SampleEntry& best() const {
        if (entries.empty()) throw std::invalid_argument("sample set is empty");
        return entries.front();
    }
};

inline SampleSet make_sample_set(const QuboProblem& q,
                                 const std::map<Bitstring, std::uint64_t>& counts) {
    SampleSet set;
    set.entries.reserve(counts.size());
    for (const auto& [bits, mult] : counts) {
        if (mult == 0) continue;
        set.entries.push_back({bits, evaluate(q, bits), mult});
        set.total_shots += mult;
    }
    std::stable_sort(set.entries.begin(), set.entries.end(),
                     [](const SampleEntry& a, const SampleEntry& b) {
                         if (a.energy != b.energy) return a.energy < b.energy;
                         return a.bits < b.bits;
                     });
    return set;
}

inline SampleSet make_sample_set(const QuboProblem& q, const std::vector<Bitstring>& shots) {
    std::map<Bitstring, std::uint64_t> counts;
    for (const auto& s : shots) ++counts[s];
    return make_sample_set(q, counts);
}

namespace detail {

/// Dense-ish view for hot loops: per-variable linear coefficients plus a
/// symmetrized adjacency list of quadratic couplings.
struct CompiledQubo {
    std::size_t n = 0;
    double offset = 0.0;
    std::vector<double> linear;
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;

    explicit CompiledQubo(const QuboProblem& q)
        : n(q.num_vars()), offset(q.offset()), linear(q.num_vars(), 0.0), adj(q.num_vars()) {
        for (const auto& [i, c] : q.linear()) linear[i] = c;
        for (const auto& [key, c] : q.quadratic()) {
            adj[key.first].emplace_back(key.second, c);
            adj[key.second].emplace_back(key.first, c);
        }
    }

    /// Energy change of flipping bit b in assignment x.
    double flip_delta(const Bitstring& x, std::size_t b) const {
        double d = linear[b];
        for (const auto& [j, c] : adj[b])
            if (x[j]) d += c;
        return x[b] ? -d : d;
    }
};

/// Walks all 2^n assignments in Gray-code order, maintaining the energy
/// incrementally, and calls visit(bits, energy, index) for each. The running
/// energy can drift by a few ulps over long walks; callers that need exact
/// values re-evaluate the assignments they keep.
template <typename Visit>
void gray_walk(const QuboProblem& q, Visit&& visit) {
    const CompiledQubo cq(q);
    const std::size_t n = q.num_vars();
    Bitstring cur(n, 0);
    double e = cq.offset;
    std::uint64_t index = 0;
    visit(cur, e, index);
    if (n == 0) return;
    const std::uint64_t total = 1ULL << n;
    for (std::uint64_t k = 1; k < total; ++k) {
        const auto b = static_cast<std::size_t>(std::countr_zero(k));
        e += cq.flip_delta(cur, b);
        cur[b] ^= 1;
        index ^= (1ULL << b);
        visit(cur, e, index);
    }
}

} // namespace detail

/// Energies of all 2^n assignments, indexed by basis index (variable 0 =
/// least significant bit).
inline std::vector<double> enumerate_energies(const QuboProblem& q, std::size_t max_vars = 26) {
    if (q.num_vars() > max_vars)
        throw SizeCapError("enumerate_energies: " + std::to_string(q.num_vars()) +
                           " variables exceed cap " + std::to_string(max_vars));
    std::vector<double> out(1ULL << q.num_vars());
    detail::gray_walk(q, [&](const Bitstring&, double e, std::uint64_t idx) { out[idx] = e; });
    return out;
}

struct EnumerateResult {
    double min_energy = 0.0;
    std::vector<Bitstring> argmins; // sorted lexicographically
};

/// Exact global minimum by full enumeration, optionally restricted to
/// assignments accepted by `feasible`. Ties are collected exactly (energies
/// re-evaluated, compared bit-for-bit) and returned in lexicographic order.
inline EnumerateResult enumerate_optimum(const QuboProblem& q,
                                         const std::function<bool(const Bitstring&)>& feasible = {},
                                         std::size_t max_vars = 24) {
    if (q.num_vars() > max_vars)
        throw SizeCapError("enumerate_optimum: " + std::to_string(q.num_vars()) +
                           " variables exceed cap " + std::to_string(max_vars));
    // Margin below which a state is re-evaluated exactly; covers worst-case
    // drift of the incremental walk.
    const double margin = 1e-9 + 1e-8 * q.coefficient_scale();

    bool found = false;
    double best = 0.0;
    std::vector<std::pair<Bitstring, double>> near;
    detail::gray_walk(q, [&](const Bitstring& bits, double e, std::uint64_t) {
        if (found && e > best + margin) return;
        if (feasible && !feasible(bits)) return;
        const double exact = evaluate(q, bits);
        if (!found || exact < best) {
            found = true;
            best = exact;
            std::erase_if(near, [&](const auto& c) { return c.second > best + margin; });
        }
        if (exact <= best + margin) near.emplace_back(bits, exact);
    });
    if (!found) throw InfeasibleError("enumerate_optimum: feasible set is empty");

    EnumerateResult res;
    res.min_energy = best;
    for (auto& [bits, e] : near)
        if (e == best) res.argmins.push_back(std::move(bits));
    std::sort(res.argmins.begin(), res.argmins.end());
    res.argmins.erase(std::unique(res.argmins.begin(), res.argmins.end()), res.argmins.end());
    return res;
}

} // namespace qrobust
