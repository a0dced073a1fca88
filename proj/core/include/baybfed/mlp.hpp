#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "baybfed/dataset.hpp"

namespace baybfed {

struct TrainHyper {
    double learning_rate = 0.1;
    int epochs = 2;
    int batch_size = 16;
    std::uint64_t seed = 0;
};

// Two-layer perceptron with tanh hidden activation and softmax output.
// Small enough that a federated round runs in milliseconds, large enough
// that its flattened weight vector carries usable density structure.
struct TinyModel {
    int in_dim = 0;
    int hidden = 0;
    int n_classes = 0;
    std::vector<double> w1;  // hidden x in_dim, row-major
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // n_classes x hidden, row-major
    std::vector<double> b2;  // n_classes

    static TinyModel init(int in_dim, int hidden, int n_classes, double init_std,
                          std::uint64_t seed);

    std::size_t param_count() const;
    std::vector<double> flatten() const;
    static TinyModel unflatten(std::span<const double> flat, int in_dim, int hidden,
                               int n_classes);

    std::vector<double> logits(std::span<const double> x) const;
    int predict(std::span<const double> x) const;
};

// Mean softmax cross-entropy over the dataset.
double ce_loss(const TinyModel& m, const Dataset& data);

// Flattened analytic gradient of the mean cross-entropy over the dataset.
std::vector<double> ce_gradient(const TinyModel& m, const Dataset& data);

// Optional extra gradient contribution, called once per minibatch with the
// current model; implementations add their term into the flat gradient.
using GradHook = std::function<void(const TinyModel&, std::vector<double>&)>;

// Mini-batch SGD. Epoch order is a seeded shuffle, so results are fully
// deterministic per TrainHyper::seed.
TinyModel sgd_train(const TinyModel& start, const Dataset& data, const TrainHyper& hyper,
                    const GradHook* hook = nullptr);

// Plain local training used by benign clients.
TinyModel local_train(const TinyModel& start, const Dataset& data, const TrainHyper& hyper);

}  // namespace baybfed
