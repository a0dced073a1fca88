#include "baybfed/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "baybfed/errors.hpp"

namespace baybfed {

namespace {

std::size_t checked_length(std::span<const FlatUpdate> updates, const char* who) {
    if (updates.empty()) throw EmptyAggregationError(std::string(who) + ": no updates");
    const std::size_t l = updates.front().weights.size();
    for (const FlatUpdate& u : updates) {
        if (u.weights.size() != l) {
            throw InvalidInputError(std::string(who) + ": inconsistent update lengths");
        }
    }
    return l;
}

}  // namespace

GlobalModel fedavg(std::span<const FlatUpdate> kept_updates) {
    const std::size_t l = checked_length(kept_updates, "fedavg");
    GlobalModel g;
    g.round = kept_updates.front().round;
    g.weights.assign(l, 0.0);
    const double inv_n = 1.0 / static_cast<double>(kept_updates.size());
    for (const FlatUpdate& u : kept_updates) {
        for (std::size_t k = 0; k < l; ++k) g.weights[k] += u.weights[k] * inv_n;
    }
    return g;
}

GlobalModel coordinate_median(std::span<const FlatUpdate> updates) {
    const std::size_t l = checked_length(updates, "coordinate_median");
    const std::size_t n = updates.size();
    GlobalModel g;
    g.round = updates.front().round;
    g.weights.resize(l);
    std::vector<double> column(n);
    for (std::size_t k = 0; k < l; ++k) {
        for (std::size_t i = 0; i < n; ++i) column[i] = updates[i].weights[k];
        std::sort(column.begin(), column.end());
        g.weights[k] = (n % 2 == 1) ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
    }
    return g;
}

GlobalModel trimmed_mean(std::span<const FlatUpdate> updates, double trim_fraction) {
    if (trim_fraction < 0.0 || trim_fraction >= 0.5) {
        throw InvalidInputError("trimmed_mean: trim_fraction must be in [0, 0.5)");
    }
    const std::size_t l = checked_length(updates, "trimmed_mean");
    const std::size_t n = updates.size();
    const std::size_t cut =
        static_cast<std::size_t>(std::floor(trim_fraction * static_cast<double>(n) + 1e-9));
    if (2 * cut >= n) throw InvalidInputError("trimmed_mean: trimming removes every value");

    GlobalModel g;
    g.round = updates.front().round;
    g.weights.resize(l);
    std::vector<double> column(n);
    const double inv_kept = 1.0 / static_cast<double>(n - 2 * cut);
    for (std::size_t k = 0; k < l; ++k) {
        for (std::size_t i = 0; i < n; ++i) column[i] = updates[i].weights[k];
        std::sort(column.begin(), column.end());
        double s = 0.0;
        for (std::size_t i = cut; i < n - cut; ++i) s += column[i];
        g.weights[k] = s * inv_kept;
    }
    return g;
}

}  // namespace baybfed
