#pragma once

#include <cstdint>
#include <vector>

namespace baybfed {

// In-memory classification dataset; one feature row per label.
struct Dataset {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;  // values in [0, n_classes)
    int n_classes = 0;

    std::size_t size() const { return labels.size(); }
};

struct PartitionSpec {
    int n_clients = 2;
    double non_iid_degree = 0.0;  // 0 = fully random split, 1 = single-class clients
    std::uint64_t seed = 0;
};

// Synthetic Gaussian-blob data. Class c is centered on a hypercube corner
// scaled by class_separation, so the minimum distance between any two class
// means is exactly class_separation; per-coordinate noise is unit normal.
// Labels are balanced across classes. Deterministic per seed.
Dataset generate_dataset(std::size_t n_samples, int n_classes, int feature_dim,
                         double class_separation, std::uint64_t seed);

// Splits a dataset across clients. Client i's main class is i mod n_classes;
// a non_iid_degree fraction of its quota is drawn from that class and the
// rest from the remaining pool regardless of class. Samples are assigned to
// at most one client. Deterministic per spec.seed.
std::vector<Dataset> partition(const Dataset& data, const PartitionSpec& spec);

}  // namespace baybfed
