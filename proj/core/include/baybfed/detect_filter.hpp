#pragma once

#include <span>
#include <vector>

namespace baybfed {

// Which of the two filtering rules decide the verdict.
enum class FilterMode {
    combined,        // keep only when both rules keep (default)
    threshold_only,  // keep iff the score is strictly below the round average
    duplicate_only,  // keep iff no other client has the same score (within epsilon)
};

struct FilterConfig {
    double dup_epsilon = 1e-9;  // equality tolerance for the duplicate rule
    FilterMode mode = FilterMode::combined;
};

// Per-round verdict over the stored anomaly scores. Index i is kept when
//   threshold rule: scores[i] < mean(scores)          (strict)
//   duplicate rule: no j != i with |scores[i] - scores[j]| <= dup_epsilon
// combined under the configured mode. Throws InvalidInputError when empty.
std::vector<bool> detect_filter(std::span<const double> max_jd_stored, const FilterConfig& cfg);

}  // namespace baybfed
