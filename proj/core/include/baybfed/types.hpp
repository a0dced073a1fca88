#pragma once

#include <cstdint>
#include <vector>

namespace baybfed {

// One client's flattened weight vector for one round. The ground-truth
// malicious flag exists for metric bookkeeping only; the detection path
// never reads it.
struct FlatUpdate {
    int client_id = 0;
    int round = 0;
    std::vector<double> weights;
    bool truth_malicious = false;
};

}  // namespace baybfed
