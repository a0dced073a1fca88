#pragma once

#include <random>
#include <span>
#include <utility>
#include <vector>

#include "baybfed/types.hpp"

namespace baybfed {

// Mean/std of the flattened pre-training global model. Computed once and
// never mutated; every density evaluation against the baseline uses it.
struct BaselineStats {
    double mu_p = 0.0;
    double sigma_p = 1.0;  // population std, strictly > 0
};

// Per-client Beta-process posterior state: a concentration scalar and a
// scalar running summary of the base measure.
struct BetaProcessState {
    int client_id = -1;
    double concentration = 1.0;  // strictly > 0, grows by the update length each round
    double base_summary = 0.0;
};

// Weighting of the data term in the base-summary recurrence.
//   scaled:    summary' = (c/(c+l))*h + sum(W)/(c*l)   (default)
//   classical: summary' = (c/(c+l))*h + sum(W)/(c+l)   (textbook conjugate form)
enum class PosteriorRule {
    scaled,
    classical,
};

// Builds the baseline stats and the root process state from the flattened
// initial global model. Throws InvalidInputError on an empty vector or
// c0 <= 0, DegenerateModelError when the model is constant (zero std).
std::pair<BaselineStats, BetaProcessState> init_baseline(std::span<const double> initial_global_model,
                                                         double c0);

// Draws n per-client prior states from the baseline: base_summary is copied,
// concentration is 1 + Poisson(baseline.concentration) so it stays positive.
// Client ids are 0..n-1. Deterministic for a given engine state.
std::vector<BetaProcessState> spawn_client_priors(const BetaProcessState& baseline, std::size_t n,
                                                  std::mt19937_64& rng);

// Conjugate posterior refresh from one flattened update of length l:
// concentration grows by l, base_summary follows the selected rule.
BetaProcessState posterior_update(const BetaProcessState& state, const FlatUpdate& update,
                                  PosteriorRule rule = PosteriorRule::scaled);

}  // namespace baybfed
