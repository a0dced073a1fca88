#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "baybfed/dataset.hpp"
#include "baybfed/divergence.hpp"
#include "baybfed/hbbp.hpp"
#include "baybfed/mlp.hpp"
#include "baybfed/types.hpp"

namespace baybfed {

// Attack code deliberately takes only knowledge an adversary has: the
// previous global model it received, its own local data, and quantities it
// can estimate for itself. Server-side cluster state never appears here.

struct TriggerSpec {
    std::vector<int> trigger_coords;
    double trigger_value = 0.0;
    int target_label = 0;
};

enum class AttackKind {
    data_poison,         // trigger injection only
    constrain_and_scale, // trigger injection plus scaled deviation from the global model
    adaptive,            // trigger injection plus an evasion term in the training loss
};

struct AttackConfig {
    AttackKind kind = AttackKind::constrain_and_scale;
    double pdr = 0.5;           // fraction of local samples poisoned, in [0, 1]
    double scale_factor = 10.0; // deviation boost for constrain_and_scale
    double alpha = 1.0;         // accuracy-vs-evasion trade-off for adaptive, in [0, 1]
    std::uint64_t seed = 0;
};

// Writes trigger_value at the trigger coordinates of floor(pdr * n) randomly
// chosen samples and relabels them to the target label. Deterministic per seed.
Dataset poison_dataset(const Dataset& data, const TriggerSpec& trig, double pdr,
                       std::uint64_t seed);

// Stamps the trigger onto every row without touching labels (evaluation helper).
Dataset apply_trigger_all(const Dataset& data, const TriggerSpec& trig);

// Boosts the trained update's deviation from the previous global model:
// w' = g_prev + scale * (w - g_prev).
FlatUpdate constrain_and_scale(const FlatUpdate& trained, std::span<const double> g_prev,
                               double scale);

// The adversary's own base-measure estimate: the posterior recurrence run
// with the public default concentration over a benign update it trained itself.
double estimate_base_measure(std::span<const double> benign_update, const BaselineStats& baseline,
                             double c0, PosteriorRule rule);

// The p distribution a given flattened model would present to the detector,
// as simulated by the adversary with its own base-measure estimate.
ProbVector simulate_p(std::span<const double> flat_model, std::span<const double> g_prev,
                      const BaselineStats& baseline, double h_estimate, double sigma_floor);

// Trains on the poisoned data under the combined objective
//   alpha * cross_entropy + (1 - alpha) * || p(model) - reference_p ||^2
// where reference_p are the p-statistics of a benign model the adversary
// trained on its clean data. At alpha = 1 the evasion term is skipped
// entirely and the result matches local_train on the poisoned data exactly.
FlatUpdate adaptive_train(const TinyModel& start, const Dataset& poisoned, const TrainHyper& hyper,
                          double alpha, double h_estimate, const BaselineStats& baseline,
                          std::span<const double> g_prev, const ProbVector& reference_p,
                          double sigma_floor, int client_id, int round);

}  // namespace baybfed
