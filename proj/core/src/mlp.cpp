#include "baybfed/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "baybfed/errors.hpp"

namespace baybfed {

namespace {

void check_dims(const TinyModel& m, const Dataset& data) {
    if (data.size() == 0) throw InvalidInputError("mlp: empty dataset");
    if (static_cast<int>(data.features.front().size()) != m.in_dim) {
        throw InvalidInputError("mlp: feature dim does not match model input dim");
    }
    if (data.n_classes != m.n_classes) {
        throw InvalidInputError("mlp: dataset classes do not match model output dim");
    }
}

// softmax probabilities from logits, with max subtraction for stability
std::vector<double> softmax(std::vector<double> z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
}

struct Scratch {
    std::vector<double> hidden;
    std::vector<double> d_hidden;
};

// Adds one sample's cross-entropy gradient (scaled by `weight`) into `grad`,
// which uses the flatten() layout [w1, b1, w2, b2].
void accumulate_sample_gradient(const TinyModel& m, std::span<const double> x, int y,
                                double weight, Scratch& s, std::vector<double>& grad) {
    const int in = m.in_dim;
    const int hid = m.hidden;
    const int out = m.n_classes;

    s.hidden.resize(static_cast<std::size_t>(hid));
    for (int j = 0; j < hid; ++j) {
        double acc = m.b1[static_cast<std::size_t>(j)];
        const double* row = &m.w1[static_cast<std::size_t>(j * in)];
        for (int k = 0; k < in; ++k) acc += row[k] * x[static_cast<std::size_t>(k)];
        s.hidden[static_cast<std::size_t>(j)] = std::tanh(acc);
    }

    std::vector<double> z(static_cast<std::size_t>(out));
    for (int c = 0; c < out; ++c) {
        double acc = m.b2[static_cast<std::size_t>(c)];
        const double* row = &m.w2[static_cast<std::size_t>(c * hid)];
        for (int j = 0; j < hid; ++j) acc += row[j] * s.hidden[static_cast<std::size_t>(j)];
        z[static_cast<std::size_t>(c)] = acc;
    }
    std::vector<double> prob = softmax(std::move(z));
    prob[static_cast<std::size_t>(y)] -= 1.0;  // dL/dlogits

    const std::size_t w1_off = 0;
    const std::size_t b1_off = w1_off + static_cast<std::size_t>(hid * in);
    const std::size_t w2_off = b1_off + static_cast<std::size_t>(hid);
    const std::size_t b2_off = w2_off + static_cast<std::size_t>(out * hid);

    s.d_hidden.assign(static_cast<std::size_t>(hid), 0.0);
    for (int c = 0; c < out; ++c) {
        const double dz = prob[static_cast<std::size_t>(c)] * weight;
        grad[b2_off + static_cast<std::size_t>(c)] += dz;
        const double* row = &m.w2[static_cast<std::size_t>(c * hid)];
        for (int j = 0; j < hid; ++j) {
            grad[w2_off + static_cast<std::size_t>(c * hid + j)] +=
                dz * s.hidden[static_cast<std::size_t>(j)];
            s.d_hidden[static_cast<std::size_t>(j)] += dz * row[j];
        }
    }
    for (int j = 0; j < hid; ++j) {
        const double h = s.hidden[static_cast<std::size_t>(j)];
        const double dpre = s.d_hidden[static_cast<std::size_t>(j)] * (1.0 - h * h);
        grad[b1_off + static_cast<std::size_t>(j)] += dpre;
        for (int k = 0; k < in; ++k) {
            grad[w1_off + static_cast<std::size_t>(j * in + k)] += dpre * x[static_cast<std::size_t>(k)];
        }
    }
}

std::vector<double> gradient_over_indices(const TinyModel& m, const Dataset& data,
                                          std::span<const std::size_t> idx) {
    std::vector<double> grad(m.param_count(), 0.0);
    Scratch s;
    const double w = 1.0 / static_cast<double>(idx.size());
    for (std::size_t i : idx) {
        accumulate_sample_gradient(m, data.features[i], data.labels[i], w, s, grad);
    }
    return grad;
}

void apply_step(TinyModel& m, const std::vector<double>& grad, double lr) {
    std::size_t p = 0;
    for (double& v : m.w1) v -= lr * grad[p++];
    for (double& v : m.b1) v -= lr * grad[p++];
    for (double& v : m.w2) v -= lr * grad[p++];
    for (double& v : m.b2) v -= lr * grad[p++];
}

}  // namespace

TinyModel TinyModel::init(int in_dim, int hidden, int n_classes, double init_std,
                          std::uint64_t seed) {
    if (in_dim < 1 || hidden < 1 || n_classes < 2) {
        throw InvalidInputError("TinyModel::init: bad dimensions");
    }
    TinyModel m;
    m.in_dim = in_dim;
    m.hidden = hidden;
    m.n_classes = n_classes;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, init_std);
    m.w1.resize(static_cast<std::size_t>(hidden * in_dim));
    m.b1.resize(static_cast<std::size_t>(hidden));
    m.w2.resize(static_cast<std::size_t>(n_classes * hidden));
    m.b2.resize(static_cast<std::size_t>(n_classes));
    for (double& v : m.w1) v = dist(rng);
    for (double& v : m.b1) v = dist(rng);
    for (double& v : m.w2) v = dist(rng);
    for (double& v : m.b2) v = dist(rng);
    return m;
}

std::size_t TinyModel::param_count() const {
    return w1.size() + b1.size() + w2.size() + b2.size();
}

std::vector<double> TinyModel::flatten() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    flat.insert(flat.end(), w1.begin(), w1.end());
    flat.insert(flat.end(), b1.begin(), b1.end());
    flat.insert(flat.end(), w2.begin(), w2.end());
    flat.insert(flat.end(), b2.begin(), b2.end());
    return flat;
}

TinyModel TinyModel::unflatten(std::span<const double> flat, int in_dim, int hidden,
                               int n_classes) {
    const std::size_t expect = static_cast<std::size_t>(hidden * in_dim + hidden +
                                                        n_classes * hidden + n_classes);
    if (flat.size() != expect) throw InvalidInputError("TinyModel::unflatten: length mismatch");
    TinyModel m;
    m.in_dim = in_dim;
    m.hidden = hidden;
    m.n_classes = n_classes;
    auto it = flat.begin();
    m.w1.assign(it, it + hidden * in_dim);
    it += hidden * in_dim;
    m.b1.assign(it, it + hidden);
    it += hidden;
    m.w2.assign(it, it + n_classes * hidden);
    it += n_classes * hidden;
    m.b2.assign(it, it + n_classes);
    return m;
}

std::vector<double> TinyModel::logits(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != in_dim) throw InvalidInputError("logits: bad input dim");
    std::vector<double> h(static_cast<std::size_t>(hidden));
    for (int j = 0; j < hidden; ++j) {
        double acc = b1[static_cast<std::size_t>(j)];
        const double* row = &w1[static_cast<std::size_t>(j * in_dim)];
        for (int k = 0; k < in_dim; ++k) acc += row[k] * x[static_cast<std::size_t>(k)];
        h[static_cast<std::size_t>(j)] = std::tanh(acc);
    }
    std::vector<double> z(static_cast<std::size_t>(n_classes));
    for (int c = 0; c < n_classes; ++c) {
        double acc = b2[static_cast<std::size_t>(c)];
        const double* row = &w2[static_cast<std::size_t>(c * hidden)];
        for (int j = 0; j < hidden; ++j) acc += row[j] * h[static_cast<std::size_t>(j)];
        z[static_cast<std::size_t>(c)] = acc;
    }
    return z;
}

int TinyModel::predict(std::span<const double> x) const {
    const std::vector<double> z = logits(x);
    return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

double ce_loss(const TinyModel& m, const Dataset& data) {
    check_dims(m, data);
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::vector<double> z = m.logits(data.features[i]);
        const double zmax = *std::max_element(z.begin(), z.end());
        double lse = 0.0;
        for (double v : z) lse += std::exp(v - zmax);
        total += std::log(lse) + zmax - z[static_cast<std::size_t>(data.labels[i])];
    }
    return total / static_cast<double>(data.size());
}

std::vector<double> ce_gradient(const TinyModel& m, const Dataset& data) {
    check_dims(m, data);
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    return gradient_over_indices(m, data, idx);
}

TinyModel sgd_train(const TinyModel& start, const Dataset& data, const TrainHyper& hyper,
                    const GradHook* hook) {
    check_dims(start, data);
    if (hyper.learning_rate < 0.0) throw InvalidInputError("sgd_train: negative learning rate");
    if (hyper.epochs < 0) throw InvalidInputError("sgd_train: negative epochs");
    if (hyper.batch_size < 1) throw InvalidInputError("sgd_train: batch_size must be >= 1");

    TinyModel cur = start;
    std::mt19937_64 rng(hyper.seed);
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);

    const std::size_t bs = static_cast<std::size_t>(hyper.batch_size);
    for (int e = 0; e < hyper.epochs; ++e) {
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t off = 0; off < idx.size(); off += bs) {
            const std::size_t len = std::min(bs, idx.size() - off);
            std::vector<double> grad =
                gradient_over_indices(cur, data, std::span<const std::size_t>(idx).subspan(off, len));
            if (hook != nullptr) (*hook)(cur, grad);
            apply_step(cur, grad, hyper.learning_rate);
        }
    }
    return cur;
}

TinyModel local_train(const TinyModel& start, const Dataset& data, const TrainHyper& hyper) {
    return sgd_train(start, data, hyper, nullptr);
}

}  // namespace baybfed
