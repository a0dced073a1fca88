#include "baybfed/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "baybfed/detector.hpp"
#include "baybfed/errors.hpp"
#include "baybfed/vecmath.hpp"

namespace baybfed {

namespace {

void check_trigger(const TriggerSpec& trig, const Dataset& data) {
    if (data.size() == 0) throw InvalidInputError("poison_dataset: empty dataset");
    const int dim = static_cast<int>(data.features.front().size());
    for (int c : trig.trigger_coords) {
        if (c < 0 || c >= dim) throw InvalidInputError("poison_dataset: trigger coord out of range");
    }
    if (trig.target_label < 0 || trig.target_label >= data.n_classes) {
        throw InvalidInputError("poison_dataset: target label out of range");
    }
}

void stamp(std::vector<double>& row, const TriggerSpec& trig) {
    for (int c : trig.trigger_coords) row[static_cast<std::size_t>(c)] = trig.trigger_value;
}

}  // namespace

Dataset poison_dataset(const Dataset& data, const TriggerSpec& trig, double pdr,
                       std::uint64_t seed) {
    if (pdr < 0.0 || pdr > 1.0) throw InvalidInputError("poison_dataset: pdr must be in [0, 1]");
    check_trigger(trig, data);

    Dataset out = data;
    // guarded floor so exact products (0.29 * 100 = 29) survive rounding
    const std::size_t n_poison =
        static_cast<std::size_t>(std::floor(pdr * static_cast<double>(data.size()) + 1e-9));
    if (n_poison == 0) return out;

    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    for (std::size_t k = 0; k < n_poison; ++k) {
        const std::size_t i = idx[k];
        stamp(out.features[i], trig);
        out.labels[i] = trig.target_label;
    }
    return out;
}

Dataset apply_trigger_all(const Dataset& data, const TriggerSpec& trig) {
    check_trigger(trig, data);
    Dataset out = data;
    for (auto& row : out.features) stamp(row, trig);
    return out;
}

FlatUpdate constrain_and_scale(const FlatUpdate& trained, std::span<const double> g_prev,
                               double scale) {
    if (trained.weights.size() != g_prev.size()) {
        throw InvalidInputError("constrain_and_scale: length mismatch");
    }
    FlatUpdate out = trained;
    for (std::size_t k = 0; k < out.weights.size(); ++k) {
        out.weights[k] = g_prev[k] + scale * (trained.weights[k] - g_prev[k]);
    }
    return out;
}

double estimate_base_measure(std::span<const double> benign_update, const BaselineStats& baseline,
                             double c0, PosteriorRule rule) {
    BetaProcessState self;
    self.client_id = -1;
    self.concentration = c0;
    self.base_summary = baseline.mu_p;
    FlatUpdate u;
    u.weights.assign(benign_update.begin(), benign_update.end());
    return posterior_update(self, u, rule).base_summary;
}

ProbVector simulate_p(std::span<const double> flat_model, std::span<const double> g_prev,
                      const BaselineStats& baseline, double h_estimate, double sigma_floor) {
    // The adversary runs the exact server-side transform on its own weights.
    const double cos = cosine_similarity(flat_model, g_prev);
    std::vector<double> w_up(flat_model.size());
    for (std::size_t k = 0; k < w_up.size(); ++k) w_up[k] = flat_model[k] + cos;
    return compute_p(w_up, baseline, h_estimate, sigma_floor);
}

namespace {

double evasion_loss(std::span<const double> flat_model, std::span<const double> g_prev,
                    const BaselineStats& baseline, double h_estimate, double sigma_floor,
                    const ProbVector& reference_p) {
    const ProbVector p = simulate_p(flat_model, g_prev, baseline, h_estimate, sigma_floor);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p.weights[i] - reference_p.weights[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace

FlatUpdate adaptive_train(const TinyModel& start, const Dataset& poisoned, const TrainHyper& hyper,
                          double alpha, double h_estimate, const BaselineStats& baseline,
                          std::span<const double> g_prev, const ProbVector& reference_p,
                          double sigma_floor, int client_id, int round) {
    if (alpha < 0.0 || alpha > 1.0) throw InvalidInputError("adaptive_train: alpha must be in [0, 1]");

    TinyModel trained;
    if (alpha == 1.0) {
        trained = local_train(start, poisoned, hyper);
    } else {
        // The evasion gradient goes through two density stages and a
        // normalization; central differences keep it exact enough for SGD
        // without hand-deriving that chain.
        GradHook hook = [&](const TinyModel& m, std::vector<double>& grad) {
            for (double& g : grad) g *= alpha;

            const double step = 1e-5;
            std::vector<double> flat = m.flatten();
            for (std::size_t k = 0; k < flat.size(); ++k) {
                const double saved = flat[k];
                flat[k] = saved + step;
                const double lp =
                    evasion_loss(flat, g_prev, baseline, h_estimate, sigma_floor, reference_p);
                flat[k] = saved - step;
                const double lm =
                    evasion_loss(flat, g_prev, baseline, h_estimate, sigma_floor, reference_p);
                flat[k] = saved;
                grad[k] += (1.0 - alpha) * (lp - lm) / (2.0 * step);
            }
        };
        trained = sgd_train(start, poisoned, hyper, &hook);
    }

    FlatUpdate out;
    out.client_id = client_id;
    out.round = round;
    out.truth_malicious = true;
    out.weights = trained.flatten();
    return out;
}

}  // namespace baybfed
