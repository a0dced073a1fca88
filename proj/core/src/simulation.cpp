#include "baybfed/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <random>
#include <thread>

#include "baybfed/attacks.hpp"
#include "baybfed/errors.hpp"

namespace baybfed {

std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t client_round_seed(std::uint64_t base, int client_id, int round) {
    const std::uint64_t per_client = base ^ mix64(static_cast<std::uint64_t>(client_id) + 1);
    return mix64(per_client + static_cast<std::uint64_t>(round));
}

namespace {

int thread_budget() {
    const char* env = std::getenv("BAYBFED_THREADS");
    if (env == nullptr) return 1;
    const int v = std::atoi(env);
    return v < 1 ? 1 : v;
}

}  // namespace

Simulation::Simulation(const ExperimentConfig& cfg) : cfg_(cfg) {
    validate(cfg_);
    // floor of pmr*n, guarded so exact products (0.3 * 30 = 9) survive rounding
    n_malicious_ = static_cast<int>(
        std::floor(cfg_.pmr * static_cast<double>(cfg_.n_clients) + 1e-9));

    const std::uint64_t s = cfg_.seed;
    Dataset pool = generate_dataset(cfg_.data.n_samples, cfg_.data.n_classes,
                                    cfg_.data.feature_dim, cfg_.data.class_separation, mix64(s ^ 1));
    test_ = generate_dataset(cfg_.data.n_test, cfg_.data.n_classes, cfg_.data.feature_dim,
                             cfg_.data.class_separation, mix64(s ^ 2));

    PartitionSpec part;
    part.n_clients = cfg_.n_clients;
    part.non_iid_degree = cfg_.non_iid_degree;
    part.seed = mix64(s ^ 3);
    shards_ = partition(pool, part);

    global_ = TinyModel::init(cfg_.data.feature_dim, cfg_.model.hidden, cfg_.data.n_classes,
                              cfg_.data.init_std, mix64(s ^ 4));

    auto [stats, root] = init_baseline(global_.flatten(), cfg_.c0);
    baseline_ = stats;

    std::mt19937_64 prior_rng(mix64(s ^ 5));
    for (BetaProcessState& p :
         spawn_client_priors(root, static_cast<std::size_t>(cfg_.n_clients), prior_rng)) {
        priors_.emplace(p.client_id, p);
    }
}

bool Simulation::is_malicious(int client_id) const { return client_id < n_malicious_; }

FlatUpdate Simulation::train_client(int client_id, int round,
                                    const std::vector<double>& g_prev) const {
    const Dataset& shard = shards_[static_cast<std::size_t>(client_id)];
    TrainHyper hyper = cfg_.train;
    hyper.seed = client_round_seed(cfg_.seed, client_id, round);

    FlatUpdate u;
    u.client_id = client_id;
    u.round = round;
    u.truth_malicious = is_malicious(client_id);

    if (!u.truth_malicious) {
        u.weights = local_train(global_, shard, hyper).flatten();
        return u;
    }

    const std::uint64_t poison_seed = client_round_seed(cfg_.attack.seed, client_id, round);
    const Dataset poisoned = poison_dataset(shard, cfg_.trigger, cfg_.attack.pdr, poison_seed);

    switch (cfg_.attack.kind) {
        case AttackKind::data_poison: {
            u.weights = local_train(global_, poisoned, hyper).flatten();
            return u;
        }
        case AttackKind::constrain_and_scale: {
            u.weights = local_train(global_, poisoned, hyper).flatten();
            return constrain_and_scale(u, g_prev, cfg_.attack.scale_factor);
        }
        case AttackKind::adaptive: {
            // The adversary estimates what a benign update of its own would
            // look like and steers its statistics toward that reference.
            const std::vector<double> benign_ref = local_train(global_, shard, hyper).flatten();
            const double h_est =
                estimate_base_measure(benign_ref, baseline_, cfg_.c0, cfg_.posterior_rule);
            const ProbVector p_ref =
                simulate_p(benign_ref, g_prev, baseline_, h_est, cfg_.detector.sigma_floor);
            return adaptive_train(global_, poisoned, hyper, cfg_.attack.alpha, h_est, baseline_,
                                  g_prev, p_ref, cfg_.detector.sigma_floor, client_id, round);
        }
    }
    throw InvalidStateError("train_client: unhandled attack kind");
}

std::vector<FlatUpdate> Simulation::train_round_updates() const {
    const int round = round_ + 1;
    const std::vector<double> g_prev = global_.flatten();
    const int n = cfg_.n_clients;
    std::vector<FlatUpdate> updates(static_cast<std::size_t>(n));

    const int threads = std::min(thread_budget(), n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) {
            updates[static_cast<std::size_t>(i)] = train_client(i, round, g_prev);
        }
        return updates;
    }

    // Each client's result is a pure function of its derived seed, so the
    // chunking cannot change the outcome.
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        workers.emplace_back([&, t]() {
            try {
                for (int i = t; i < n; i += threads) {
                    updates[static_cast<std::size_t>(i)] = train_client(i, round, g_prev);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (std::thread& w : workers) w.join();
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return updates;
}

RoundTrace Simulation::apply_round(const std::vector<FlatUpdate>& updates) {
    const int round = round_ + 1;
    const std::vector<double> g_prev = global_.flatten();

    RoundResult detection = run_round(updates, g_prev, priors_, clusters_, baseline_,
                                      cfg_.detector, cfg_.filter, cfg_.posterior_rule);
    priors_ = std::move(detection.priors);
    clusters_ = std::move(detection.clusters);

    RoundTrace trace;
    trace.round = round;
    trace.records = std::move(detection.records);
    trace.truth.reserve(updates.size());
    for (const FlatUpdate& u : updates) trace.truth.push_back(u.truth_malicious);

    // The detector's verdicts are always recorded; whether they gate the
    // aggregation depends on the configured defense.
    std::vector<FlatUpdate> aggregated;
    for (std::size_t i = 0; i < updates.size(); ++i) {
        if (cfg_.defense == DefenseKind::none || trace.records[i].kept) {
            aggregated.push_back(updates[i]);
        }
    }

    if (aggregated.empty()) {
        trace.aggregation_skipped = true;
        skipped_rounds_.push_back(round);
    } else {
        GlobalModel g;
        switch (cfg_.aggregator) {
            case AggregatorKind::fedavg: g = fedavg(aggregated); break;
            case AggregatorKind::median: g = coordinate_median(aggregated); break;
            case AggregatorKind::trimmed_mean: g = trimmed_mean(aggregated, cfg_.trim_fraction); break;
        }
        global_ = TinyModel::unflatten(g.weights, cfg_.data.feature_dim, cfg_.model.hidden,
                                       cfg_.data.n_classes);
    }

    std::vector<bool> kept;
    kept.reserve(trace.records.size());
    for (const DetectionRecord& r : trace.records) kept.push_back(r.kept);

    trace.metrics.round = round;
    trace.metrics.tpr = tpr(kept, trace.truth);
    trace.metrics.tnr = tnr(kept, trace.truth);
    trace.metrics.ba = backdoor_accuracy(global_, test_, cfg_.trigger);
    trace.metrics.ma = main_accuracy(global_, test_);
    trace.metrics.kept_count = aggregated.size();

    round_ = round;
    return trace;
}

RoundTrace Simulation::step_round() { return apply_round(train_round_updates()); }

Report run_experiment(const ExperimentConfig& cfg) {
    Simulation sim(cfg);
    Report report;
    report.config = cfg;
    report.rounds.reserve(static_cast<std::size_t>(cfg.rounds));
    for (int r = 0; r < cfg.rounds; ++r) report.rounds.push_back(sim.step_round());
    report.final_ba = report.rounds.back().metrics.ba;
    report.final_ma = report.rounds.back().metrics.ma;
    report.skipped_rounds = sim.skipped_rounds_;
    report.final_model = sim.global_;
    return report;
}

}  // namespace baybfed
