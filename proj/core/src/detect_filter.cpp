#include "baybfed/detect_filter.hpp"

#include <cmath>
#include <cstddef>

#include "baybfed/errors.hpp"
#include "baybfed/vecmath.hpp"

namespace baybfed {

std::vector<bool> detect_filter(std::span<const double> max_jd_stored, const FilterConfig& cfg) {
    const std::size_t n = max_jd_stored.size();
    if (n == 0) throw InvalidInputError("detect_filter: empty score vector");

    const double avg = vec_sum(max_jd_stored) / static_cast<double>(n);

    std::vector<bool> below(n), unique(n);
    for (std::size_t i = 0; i < n; ++i) {
        below[i] = max_jd_stored[i] < avg;
        bool duplicated = false;
        for (std::size_t j = 0; j < n && !duplicated; ++j) {
            if (j == i) continue;
            duplicated = std::fabs(max_jd_stored[i] - max_jd_stored[j]) <= cfg.dup_epsilon;
        }
        unique[i] = !duplicated;
    }

    std::vector<bool> kept(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (cfg.mode) {
            case FilterMode::threshold_only: kept[i] = below[i]; break;
            case FilterMode::duplicate_only: kept[i] = unique[i]; break;
            case FilterMode::combined: kept[i] = below[i] && unique[i]; break;
        }
    }
    return kept;
}

}  // namespace baybfed
