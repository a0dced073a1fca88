#pragma once

#include <map>
#include <vector>

#include "baybfed/aggregation.hpp"
#include "baybfed/config.hpp"
#include "baybfed/dataset.hpp"
#include "baybfed/detector.hpp"
#include "baybfed/metrics.hpp"
#include "baybfed/mlp.hpp"

namespace baybfed {

// One round's full outcome: detector records in processing order, the
// ground-truth flags aligned with them, and the evaluated metrics.
struct RoundTrace {
    int round = 0;
    std::vector<DetectionRecord> records;
    std::vector<bool> truth;
    RoundMetrics metrics;
    bool aggregation_skipped = false;
};

struct Report {
    ExperimentConfig config;
    std::vector<RoundTrace> rounds;
    double final_ba = 0.0;
    double final_ma = 0.0;
    std::vector<int> skipped_rounds;
    TinyModel final_model;
};

// Deterministic 64-bit mixer used to fan the experiment seed out to
// independent per-purpose and per-client streams.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t client_round_seed(std::uint64_t base, int client_id, int round);

// Scenario engine. All state is value-typed, so a Simulation can be copied
// to replay a round under a different client order. Client training within a
// round may run in parallel (BAYBFED_THREADS); detection is sequential.
class Simulation {
  public:
    explicit Simulation(const ExperimentConfig& cfg);

    // Locally trains every client against the current global model and
    // returns their updates in client-id order. Does not mutate round state.
    std::vector<FlatUpdate> train_round_updates() const;

    // Runs detection over the updates (in the given order), filters,
    // aggregates, evaluates, and advances to the next round.
    RoundTrace apply_round(const std::vector<FlatUpdate>& updates);

    RoundTrace step_round();

    int next_round() const { return round_ + 1; }
    bool is_malicious(int client_id) const;
    const TinyModel& global_model() const { return global_; }
    const Dataset& test_set() const { return test_; }
    const BaselineStats& baseline() const { return baseline_; }
    const std::vector<ClusterState>& clusters() const { return clusters_; }
    const std::map<int, BetaProcessState>& priors() const { return priors_; }

  private:
    FlatUpdate train_client(int client_id, int round, const std::vector<double>& g_prev) const;

    ExperimentConfig cfg_;
    int n_malicious_ = 0;
    int round_ = 0;  // completed rounds
    Dataset test_;
    std::vector<Dataset> shards_;
    TinyModel global_;
    BaselineStats baseline_;
    std::map<int, BetaProcessState> priors_;
    std::vector<ClusterState> clusters_;
    std::vector<int> skipped_rounds_;

    friend Report run_experiment(const ExperimentConfig& cfg);
};

// Executes the configured number of rounds and collects the full report.
Report run_experiment(const ExperimentConfig& cfg);

}  // namespace baybfed
