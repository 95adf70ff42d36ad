#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrobust/seeding.hpp"

namespace qrobust {

/// Discrete uncertainty set: one vector of uncertain parameters per scenario,
/// all of the same length, with optional probabilities. An empty probability
/// vector means "uniform".
struct ScenarioSet {
    std::vector<std::vector<double>> scenarios;
    std::vector<double> probabilities;

    std::size_t size() const { return scenarios.size(); }

    std::size_t dim() const { return scenarios.empty() ? 0 : scenarios.front().size(); }

    bool has_probabilities() const { return !probabilities.empty(); }

    double probability(std::size_t k) const {
        return probabilities.empty() ? 1.0 / static_cast<double>(scenarios.size())
                                     : probabilities[k];
    }
};

inline void validate(const ScenarioSet& s) {
    for (const auto& v : s.scenarios) {
        if (v.size() != s.dim())
            throw std::invalid_argument("scenario vectors must all have the same length");
        for (double x : v)
            if (x < 0.0)
                throw std::invalid_argument("scenario values must be nonnegative");
    }
    if (!s.probabilities.empty()) {
        if (s.probabilities.size() != s.scenarios.size())
            throw std::invalid_argument("probabilities must match scenario count");
        double sum = 0.0;
        for (double p : s.probabilities) {
            if (p < 0.0) throw std::invalid_argument("probabilities must be nonnegative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("probabilities must sum to 1");
    }
}

/// Probability-weighted component-wise mean (uniform weights if none given).
inline std::vector<double> expected_scenario(const ScenarioSet& s) {
    if (s.scenarios.empty()) throw std::invalid_argument("scenario set is empty");
    validate(s);
    std::vector<double> mean(s.dim(), 0.0);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double w = s.probability(k);
        for (std::size_t t = 0; t < s.dim(); ++t) mean[t] += w * s.scenarios[k][t];
    }
    return mean;
}

/// `count` independent per-step draws from Normal(mu_t, sigma_t), clamped at 0
/// (negative supply is not physical). Bit-identical for identical seeds.
inline ScenarioSet generate_gaussian_scenarios(const std::vector<double>& mu,
                                               const std::vector<double>& sigma,
                                               std::size_t count, std::uint64_t seed) {
    if (mu.size() != sigma.size())
        throw std::invalid_argument("mu and sigma must have the same length");
    if (count == 0) throw std::invalid_argument("scenario count must be at least 1");
    for (double s : sigma)
        if (s < 0.0) throw std::invalid_argument("sigma must be nonnegative");

    ScenarioSet set;
    set.scenarios.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        auto eng = make_engine(derive_seed(seed, k));
        std::vector<double> draw(mu.size());
        for (std::size_t t = 0; t < mu.size(); ++t)
            draw[t] = std::max(0.0, mu[t] + sigma[t] * normal_double(eng));
        set.scenarios.push_back(std::move(draw));
    }
    return set;
}

/// Largest-remainder apportionment of `total` shots across a distribution.
/// Counts sum to `total` exactly and each is within 1 of probs[k]*total.
/// Remainder ties go to the lower index.
inline std::vector<std::uint64_t> allocate_shots(const std::vector<double>& probs,
                                                 std::uint64_t total) {
    if (probs.empty()) throw std::invalid_argument("allocate_shots: empty distribution");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("allocate_shots: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("allocate_shots: probabilities must sum to 1");

    std::vector<std::uint64_t> counts(probs.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders(probs.size());
    std::uint64_t assigned = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        const double ideal = probs[k] * static_cast<double>(total);
        counts[k] = static_cast<std::uint64_t>(std::floor(ideal));
        assigned += counts[k];
        remainders[k] = {ideal - std::floor(ideal), k};
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t r = 0; assigned < total; ++r, ++assigned)
        ++counts[remainders[r % remainders.size()].second];
    return counts;
}

/// Equal-width 2D bin counts over a two-step scenario set (two axes plus a
/// count make the plotted histogram three-dimensional).
struct HistogramGrid {
    std::size_t bins_per_axis = 0;
    double x_lo = 0.0, x_width = 0.0;
    double y_lo = 0.0, y_width = 0.0;
    std::vector<std::uint64_t> counts; // row-major: x_bin * bins_per_axis + y_bin

    std::uint64_t at(std::size_t xb, std::size_t yb) const {
        return counts[xb * bins_per_axis + yb];
    }
};

inline HistogramGrid scenario_histogram(const ScenarioSet& s, std::size_t bins_per_axis) {
    if (s.dim() != 2)
        throw std::invalid_argument("scenario_histogram supports two-step scenario sets only");
    if (bins_per_axis == 0) throw std::invalid_argument("bins_per_axis must be positive");
    validate(s);

    HistogramGrid grid;
    grid.bins_per_axis = bins_per_axis;
    grid.counts.assign(bins_per_axis * bins_per_axis, 0);

    double lo[2], hi[2];
    for (int a = 0; a < 2; ++a) {
        lo[a] = s.scenarios.front()[a];
        hi[a] = s.scenarios.front()[a];
        for (const auto& v : s.scenarios) {
            lo[a] = std::min(lo[a], v[a]);
            hi[a] = std::max(hi[a], v[a]);
        }
    }
    grid.x_lo = lo[0];
    grid.y_lo = lo[1];
    grid.x_width = (hi[0] - lo[0]) / static_cast<double>(bins_per_axis);
    grid.y_width = (hi[1] - lo[1]) / static_cast<double>(bins_per_axis);

    auto bin_of = [bins_per_axis](double v, double l, double w) -> std::size_t {
        if (w <= 0.0) return 0;
        auto b = static_cast<std::int64_t>(std::floor((v - l) / w));
        b = std::clamp<std::int64_t>(b, 0, static_cast<std::int64_t>(bins_per_axis) - 1);
        return static_cast<std::size_t>(b);
    };
    for (const auto& v : s.scenarios)
        ++grid.counts[bin_of(v[0], lo[0], grid.x_width) * bins_per_axis +
                      bin_of(v[1], lo[1], grid.y_width)];
    return grid;
}

} // namespace qrobust
