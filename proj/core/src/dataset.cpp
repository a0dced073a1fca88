#include "baybfed/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "baybfed/errors.hpp"

namespace baybfed {

namespace {

std::vector<double> class_mean(int cls, int feature_dim, double separation) {
    std::vector<double> mu(static_cast<std::size_t>(feature_dim));
    for (int j = 0; j < feature_dim; ++j) {
        const bool bit = j < 31 && ((cls >> j) & 1) != 0;
        mu[static_cast<std::size_t>(j)] = separation * (bit ? 0.5 : -0.5);
    }
    return mu;
}

}  // namespace

Dataset generate_dataset(std::size_t n_samples, int n_classes, int feature_dim,
                         double class_separation, std::uint64_t seed) {
    if (n_classes < 2) throw InvalidInputError("generate_dataset: need at least 2 classes");
    if (feature_dim < 2) throw InvalidInputError("generate_dataset: need feature_dim >= 2");
    if (n_samples == 0) throw InvalidInputError("generate_dataset: need at least 1 sample");
    if (class_separation < 0.0) throw InvalidInputError("generate_dataset: negative separation");
    // Distinct hypercube corners require one bit per class within the dim.
    if (n_classes > (1 << std::min(feature_dim, 30))) {
        throw InvalidInputError("generate_dataset: too many classes for feature_dim");
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    // Balanced labels, order shuffled.
    std::vector<int> labels(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) labels[i] = static_cast<int>(i % static_cast<std::size_t>(n_classes));
    std::shuffle(labels.begin(), labels.end(), rng);

    std::vector<std::vector<double>> means;
    means.reserve(static_cast<std::size_t>(n_classes));
    for (int c = 0; c < n_classes; ++c) means.push_back(class_mean(c, feature_dim, class_separation));

    Dataset out;
    out.n_classes = n_classes;
    out.labels = std::move(labels);
    out.features.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const std::vector<double>& mu = means[static_cast<std::size_t>(out.labels[i])];
        std::vector<double> row(static_cast<std::size_t>(feature_dim));
        for (int j = 0; j < feature_dim; ++j) {
            row[static_cast<std::size_t>(j)] = mu[static_cast<std::size_t>(j)] + noise(rng);
        }
        out.features[i] = std::move(row);
    }
    return out;
}

std::vector<Dataset> partition(const Dataset& data, const PartitionSpec& spec) {
    if (spec.n_clients < 2) throw InvalidInputError("partition: need at least 2 clients");
    if (static_cast<std::size_t>(spec.n_clients) > data.size()) {
        throw InvalidInputError("partition: more clients than samples");
    }
    if (spec.non_iid_degree < 0.0 || spec.non_iid_degree > 1.0) {
        throw InvalidInputError("partition: non_iid_degree must be in [0, 1]");
    }

    std::mt19937_64 rng(spec.seed);
    const std::size_t n = data.size();
    const int n_clients = spec.n_clients;
    const int n_classes = data.n_classes;

    // Per-class index pools, each shuffled.
    std::vector<std::vector<std::size_t>> pools(static_cast<std::size_t>(n_classes));
    for (std::size_t i = 0; i < n; ++i) {
        pools[static_cast<std::size_t>(data.labels[i])].push_back(i);
    }
    for (auto& pool : pools) std::shuffle(pool.begin(), pool.end(), rng);

    // Quotas: n / n_clients, the first (n mod n_clients) clients get one extra.
    std::vector<std::size_t> quota(static_cast<std::size_t>(n_clients), n / static_cast<std::size_t>(n_clients));
    for (std::size_t i = 0; i < n % static_cast<std::size_t>(n_clients); ++i) quota[i] += 1;

    // First pass: main-class share, taken from the back of the class pool.
    std::vector<std::vector<std::size_t>> assigned(static_cast<std::size_t>(n_clients));
    for (int c = 0; c < n_clients; ++c) {
        auto& pool = pools[static_cast<std::size_t>(c % n_classes)];
        std::size_t want = static_cast<std::size_t>(
            std::llround(spec.non_iid_degree * static_cast<double>(quota[static_cast<std::size_t>(c)])));
        want = std::min(want, quota[static_cast<std::size_t>(c)]);
        const std::size_t take = std::min(want, pool.size());
        for (std::size_t k = 0; k < take; ++k) {
            assigned[static_cast<std::size_t>(c)].push_back(pool.back());
            pool.pop_back();
        }
    }

    // Second pass: fill the remaining quota from the shuffled leftovers. At
    // degree 1 nothing is filled here, so clients stay single-class even when
    // their pool ran short.
    std::vector<std::size_t> leftovers;
    for (const auto& pool : pools) leftovers.insert(leftovers.end(), pool.begin(), pool.end());
    std::shuffle(leftovers.begin(), leftovers.end(), rng);

    if (spec.non_iid_degree < 1.0) {
        for (int c = 0; c < n_clients; ++c) {
            auto& mine = assigned[static_cast<std::size_t>(c)];
            while (mine.size() < quota[static_cast<std::size_t>(c)] && !leftovers.empty()) {
                mine.push_back(leftovers.back());
                leftovers.pop_back();
            }
        }
    }

    std::vector<Dataset> out(static_cast<std::size_t>(n_clients));
    for (int c = 0; c < n_clients; ++c) {
        Dataset& shard = out[static_cast<std::size_t>(c)];
        shard.n_classes = n_classes;
        for (std::size_t idx : assigned[static_cast<std::size_t>(c)]) {
            shard.features.push_back(data.features[idx]);
            shard.labels.push_back(data.labels[idx]);
        }
        if (shard.labels.empty()) throw InvalidInputError("partition: a client received no samples");
    }
    return out;
}

}  // namespace baybfed
