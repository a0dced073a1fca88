#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "baybfed/attacks.hpp"
#include "baybfed/detect_filter.hpp"
#include "baybfed/detector.hpp"
#include "baybfed/hbbp.hpp"
#include "baybfed/mlp.hpp"

namespace baybfed {

enum class DefenseKind {
    baybfed,  // filter updates through the detector before aggregating
    none,     // aggregate everything
};

enum class AggregatorKind {
    fedavg,
    median,
    trimmed_mean,
};

struct DataConfig {
    std::size_t n_samples = 3000;  // training pool, split across clients
    std::size_t n_test = 600;      // held-out clean test set
    int n_classes = 10;
    int feature_dim = 8;
    double class_separation = 6.0;
    double init_std = 0.1;  // std of the initial model weights
};

struct ModelConfig {
    int hidden = 16;
};

// Full scenario description. Everything an experiment run consumes is here,
// so a run is replayable from its serialized form alone.
struct ExperimentConfig {
    int n_clients = 30;
    double pmr = 0.2;  // fraction of adversary-controlled clients, at most 0.5
    int rounds = 5;
    double non_iid_degree = 0.7;

    AttackConfig attack;
    TriggerSpec trigger{{0, 1}, 3.0, 0};
    DetectorConfig detector;
    FilterConfig filter;
    PosteriorRule posterior_rule = PosteriorRule::scaled;
    DefenseKind defense = DefenseKind::baybfed;
    AggregatorKind aggregator = AggregatorKind::fedavg;
    double trim_fraction = 0.1;  // only used by the trimmed_mean aggregator

    DataConfig data;
    ModelConfig model;
    TrainHyper train;

    double c0 = 5.0;  // root concentration of the baseline process
    std::uint64_t seed = 42;
};

// Throws ValidationError naming the offending field path.
void validate(const ExperimentConfig& cfg);

// Strict JSON parsing: unknown keys are rejected, missing keys fall back to
// the defaults above, and the result is validated. Throws IoError when the
// file cannot be read and ValidationError on malformed content.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_string(const std::string& text);

// Serializes the fully resolved config; parse_config_string round-trips it.
std::string serialize_config(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace baybfed
