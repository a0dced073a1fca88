#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "baybfed/dataset.hpp"
#include "baybfed/errors.hpp"
#include "baybfed/mlp.hpp"

using namespace baybfed;

TEST_SUITE("mlp") {

TEST_CASE("flatten and unflatten round-trip exactly") {
    const TinyModel m = TinyModel::init(8, 16, 10, 0.1, 3);
    CHECK(m.param_count() == 8 * 16 + 16 + 16 * 10 + 10);  // 314

    const std::vector<double> flat = m.flatten();
    const TinyModel back = TinyModel::unflatten(flat, 8, 16, 10);
    CHECK(back.w1 == m.w1);
    CHECK(back.b1 == m.b1);
    CHECK(back.w2 == m.w2);
    CHECK(back.b2 == m.b2);

    CHECK_THROWS_AS(TinyModel::unflatten(std::vector<double>(10, 0.0), 8, 16, 10),
                    InvalidInputError);
}

TEST_CASE("zero learning rate freezes the weights") {
    const Dataset data = generate_dataset(64, 4, 4, 3.0, 17);
    const TinyModel m = TinyModel::init(4, 8, 4, 0.1, 5);
    TrainHyper hyper{0.0, 3, 8, 11};
    const TinyModel out = local_train(m, data, hyper);
    CHECK(out.flatten() == m.flatten());
}

TEST_CASE("training is deterministic per seed and reduces the loss") {
    const Dataset data = generate_dataset(256, 4, 4, 4.0, 29);
    const TinyModel m = TinyModel::init(4, 8, 4, 0.1, 6);

    TrainHyper hyper{0.05, 1, 16, 123};
    const double before = ce_loss(m, data);
    TinyModel cur = m;
    double prev = before;
    for (int epoch = 0; epoch < 6; ++epoch) {
        hyper.seed = 123 + static_cast<std::uint64_t>(epoch);
        cur = sgd_train(cur, data, hyper);
        const double now = ce_loss(cur, data);
        CHECK(now <= prev + 1e-6);  // near-monotone on separable data at small lr
        prev = now;
    }
    CHECK(prev < before);

    TrainHyper fixed{0.05, 3, 16, 77};
    const TinyModel a = local_train(m, data, fixed);
    const TinyModel b = local_train(m, data, fixed);
    CHECK(a.flatten() == b.flatten());
}

TEST_CASE("analytic gradient matches central differences") {
    std::mt19937_64 rng(404);
    const Dataset data = generate_dataset(32, 4, 4, 3.0, 31);
    const double step = 1e-5;

    for (int trial = 0; trial < 5; ++trial) {
        const TinyModel m = TinyModel::init(4, 6, 4, 0.3, 1000 + static_cast<std::uint64_t>(trial));
        const std::vector<double> grad = ce_gradient(m, data);
        std::vector<double> flat = m.flatten();

        for (int probe = 0; probe < 10; ++probe) {
            const std::size_t k = rng() % flat.size();
            const double saved = flat[k];

            flat[k] = saved + step;
            const double lp = ce_loss(TinyModel::unflatten(flat, 4, 6, 4), data);
            flat[k] = saved - step;
            const double lm = ce_loss(TinyModel::unflatten(flat, 4, 6, 4), data);
            flat[k] = saved;

            const double numeric = (lp - lm) / (2.0 * step);
            const double denom = std::max({std::fabs(numeric), std::fabs(grad[k]), 1e-8});
            CHECK(std::fabs(grad[k] - numeric) / denom < 1e-4);
        }
    }
}

TEST_CASE("dimension mismatches are rejected") {
    const Dataset data = generate_dataset(16, 4, 4, 3.0, 3);
    const TinyModel wrong = TinyModel::init(5, 8, 4, 0.1, 0);
    TrainHyper hyper{0.1, 1, 8, 0};
    CHECK_THROWS_AS(local_train(wrong, data, hyper), InvalidInputError);
    CHECK_THROWS_AS(ce_loss(wrong, data), InvalidInputError);
}

TEST_CASE("predict returns the argmax class") {
    TinyModel m = TinyModel::init(2, 2, 3, 0.1, 9);
    // force the output layer so class 2 always wins
    m.w2.assign(m.w2.size(), 0.0);
    m.b2 = {0.0, 0.0, 5.0};
    CHECK(m.predict(std::vector<double>{0.3, -0.7}) == 2);
}

}  // TEST_SUITE
