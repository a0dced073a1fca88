#pragma once

#include <span>
#include <vector>

#include "baybfed/types.hpp"

namespace baybfed {

struct GlobalModel {
    std::vector<double> weights;
    int round = 0;
};

// Equal-weight coordinate-wise mean of the kept updates. Every client counts
// the same regardless of its dataset size; a client cannot buy influence by
// reporting an inflated sample count. Throws EmptyAggregationError on an
// empty list (the caller decides whether to reuse the previous model).
GlobalModel fedavg(std::span<const FlatUpdate> kept_updates);

// Coordinate-wise median; the mean of the two middle values for even counts.
GlobalModel coordinate_median(std::span<const FlatUpdate> updates);

// Coordinate-wise mean after dropping floor(trim_fraction * n) values from
// each tail. trim_fraction must lie in [0, 0.5) and leave at least one value.
GlobalModel trimmed_mean(std::span<const FlatUpdate> updates, double trim_fraction);

}  // namespace baybfed
