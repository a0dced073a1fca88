#include <cmath>
#include <vector>

#include <doctest.h>

#include "baybfed/attacks.hpp"
#include "baybfed/divergence.hpp"
#include "baybfed/errors.hpp"

using namespace baybfed;

namespace {

TriggerSpec trigger() { return TriggerSpec{{0, 1}, 5.0, 0}; }

}  // namespace

TEST_SUITE("attacks") {

TEST_CASE("poison_dataset count exactness and determinism") {
    const Dataset data = generate_dataset(100, 4, 4, 3.0, 50);

    const Dataset untouched = poison_dataset(data, trigger(), 0.0, 1);
    CHECK(untouched.features == data.features);
    CHECK(untouched.labels == data.labels);

    const Dataset all = poison_dataset(data, trigger(), 1.0, 1);
    for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK(all.labels[i] == 0);
        CHECK(all.features[i][0] == 5.0);
        CHECK(all.features[i][1] == 5.0);
    }

    const Dataset half = poison_dataset(data, trigger(), 0.5, 2);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < half.size(); ++i) {
        if (half.features[i] != data.features[i]) ++changed;
    }
    CHECK(changed <= 50);  // a sample already carrying the trigger row stays equal
    std::size_t relabeled_or_stamped = 0;
    for (std::size_t i = 0; i < half.size(); ++i) {
        const bool stamped = half.features[i][0] == 5.0 && half.features[i][1] == 5.0 &&
                             half.labels[i] == 0;
        if (stamped && (half.features[i] != data.features[i] || half.labels[i] != data.labels[i])) {
            ++relabeled_or_stamped;
        }
    }
    CHECK(relabeled_or_stamped >= 45);  // nearly all 50 modified rows are detectable

    const Dataset again = poison_dataset(data, trigger(), 0.5, 2);
    CHECK(again.features == half.features);
    CHECK(again.labels == half.labels);

    // 0.29 * 100 rounds below 29 in floating point; the count must still be 29
    const Dataset odd = poison_dataset(data, trigger(), 0.29, 3);
    std::size_t touched = 0;
    for (std::size_t i = 0; i < odd.size(); ++i) {
        if (odd.features[i] != data.features[i] || odd.labels[i] != data.labels[i]) ++touched;
    }
    CHECK(touched == 29);

    TriggerSpec bad = trigger();
    bad.trigger_coords = {99};
    CHECK_THROWS_AS(poison_dataset(data, bad, 0.5, 2), InvalidInputError);
}

TEST_CASE("constrain_and_scale is an affine boost") {
    FlatUpdate w;
    w.weights = {1.0, 2.0};
    const std::vector<double> g = {0.0, 0.0};

    CHECK(constrain_and_scale(w, g, 1.0).weights == w.weights);
    CHECK(constrain_and_scale(w, g, 0.0).weights == g);

    const FlatUpdate boosted = constrain_and_scale(w, g, 10.0);
    CHECK(boosted.weights == std::vector<double>{10.0, 20.0});

    // midpoint property of an affine map
    const FlatUpdate s2 = constrain_and_scale(w, g, 2.0);
    const FlatUpdate s4 = constrain_and_scale(w, g, 4.0);
    const FlatUpdate s3 = constrain_and_scale(w, g, 3.0);
    for (std::size_t k = 0; k < w.weights.size(); ++k) {
        CHECK(s3.weights[k] == doctest::Approx(0.5 * (s2.weights[k] + s4.weights[k])).epsilon(1e-12));
    }
}

TEST_CASE("adaptive alpha=1 reproduces plain poisoned training exactly") {
    const Dataset shard = generate_dataset(80, 4, 4, 4.0, 61);
    const TinyModel global = TinyModel::init(4, 6, 4, 0.1, 62);
    const std::vector<double> g_prev = global.flatten();
    const Dataset poisoned = poison_dataset(shard, trigger(), 0.5, 63);
    TrainHyper hyper{0.05, 2, 16, 64};

    auto [baseline, root] = init_baseline(g_prev, 5.0);
    const double h_est = estimate_base_measure(g_prev, baseline, 5.0, PosteriorRule::scaled);
    const ProbVector p_ref = simulate_p(g_prev, g_prev, baseline, h_est, 1e-6);

    const FlatUpdate adaptive = adaptive_train(global, poisoned, hyper, 1.0, h_est, baseline,
                                               g_prev, p_ref, 1e-6, 0, 1);
    const TinyModel plain = local_train(global, poisoned, hyper);
    CHECK(adaptive.weights == plain.flatten());
    CHECK(adaptive.truth_malicious);

    CHECK_THROWS_AS(adaptive_train(global, poisoned, hyper, 1.5, h_est, baseline, g_prev, p_ref,
                                   1e-6, 0, 1),
                    InvalidInputError);
}

TEST_CASE("alpha=0 lands closer to the benign reference statistics") {
    const Dataset shard = generate_dataset(80, 4, 4, 4.0, 71);
    const TinyModel global = TinyModel::init(4, 6, 4, 0.1, 72);
    const std::vector<double> g_prev = global.flatten();
    TrainHyper hyper{0.05, 2, 16, 73};

    auto [baseline, root] = init_baseline(g_prev, 5.0);

    // the adversary's own benign reference
    const std::vector<double> benign = local_train(global, shard, hyper).flatten();
    const double h_est = estimate_base_measure(benign, baseline, 5.0, PosteriorRule::scaled);
    const ProbVector p_ref = simulate_p(benign, g_prev, baseline, h_est, 1e-6);

    const Dataset poisoned = poison_dataset(shard, trigger(), 0.5, 74);
    const FlatUpdate evasive = adaptive_train(global, poisoned, hyper, 0.0, h_est, baseline,
                                              g_prev, p_ref, 1e-6, 0, 1);
    const FlatUpdate greedy = adaptive_train(global, poisoned, hyper, 1.0, h_est, baseline,
                                             g_prev, p_ref, 1e-6, 0, 1);

    const ProbVector p_evasive = simulate_p(evasive.weights, g_prev, baseline, h_est, 1e-6);
    const ProbVector p_greedy = simulate_p(greedy.weights, g_prev, baseline, h_est, 1e-6);
    CHECK(jsd(p_evasive, p_ref) < jsd(p_greedy, p_ref));
}

}  // TEST_SUITE
