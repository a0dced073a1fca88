#include "baybfed/hbbp.hpp"

#include "baybfed/errors.hpp"
#include "baybfed/vecmath.hpp"

namespace baybfed {

std::pair<BaselineStats, BetaProcessState> init_baseline(std::span<const double> initial_global_model,
                                                         double c0) {
    if (initial_global_model.empty()) throw InvalidInputError("init_baseline: empty model vector");
    if (c0 <= 0.0) throw InvalidInputError("init_baseline: c0 must be > 0");

    BaselineStats stats;
    stats.mu_p = vec_mean(initial_global_model);
    stats.sigma_p = vec_std_population(initial_global_model);
    if (stats.sigma_p == 0.0) {
        throw DegenerateModelError("init_baseline: constant model vector (sigma = 0)");
    }

    BetaProcessState root;
    root.client_id = -1;
    root.concentration = c0;
    root.base_summary = stats.mu_p;
    return {stats, root};
}

std::vector<BetaProcessState> spawn_client_priors(const BetaProcessState& baseline, std::size_t n,
                                                  std::mt19937_64& rng) {
    if (n == 0) throw InvalidInputError("spawn_client_priors: n must be >= 1");

    std::poisson_distribution<long> poisson(baseline.concentration);
    std::vector<BetaProcessState> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        BetaProcessState s;
        s.client_id = static_cast<int>(i);
        // Shifted by one so a zero draw cannot produce a zero concentration.
        s.concentration = 1.0 + static_cast<double>(poisson(rng));
        s.base_summary = baseline.base_summary;
        out.push_back(s);
    }
    return out;
}

BetaProcessState posterior_update(const BetaProcessState& state, const FlatUpdate& update,
                                  PosteriorRule rule) {
    const std::size_t l = update.weights.size();
    if (l == 0) throw InvalidInputError("posterior_update: empty update");

    const double c = state.concentration;
    const double len = static_cast<double>(l);
    const double sum = vec_sum(update.weights);

    BetaProcessState next = state;
    next.concentration = c + len;
    const double data_weight = (rule == PosteriorRule::scaled) ? 1.0 / (c * len) : 1.0 / (c + len);
    next.base_summary = (c / (c + len)) * state.base_summary + data_weight * sum;
    return next;
}

}  // namespace baybfed
