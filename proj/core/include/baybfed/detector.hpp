#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "baybfed/detect_filter.hpp"
#include "baybfed/divergence.hpp"
#include "baybfed/hbbp.hpp"
#include "baybfed/types.hpp"

namespace baybfed {

// Detection core. Each round, every incoming update is transformed against
// the previous global model, turned into a probability distribution against
// the baseline, and scored by its maximum Jensen-Shannon divergence over the
// existing clusters plus one candidate cluster. Scores feed detect_filter.

// One restaurant-process cluster over update statistics.
struct ClusterState {
    double mean = 0.0;
    double std = 1.0;        // strictly > 0
    std::size_t count = 0;   // number of assigned updates
    double precision = 1.0;  // 1/std^2, kept consistent on every refresh
};

enum class AssignmentRule {
    argmax_jd,  // literal rule: join the cluster with the largest divergence (default)
    argmin_jd,  // conventional best-fit alternative
};

struct DetectorConfig {
    double mu0 = 0.0;          // prior mean assumed for new clusters
    double sigma0 = 1.0;       // prior std assumed for new clusters
    double tau0 = 1.0;         // prior precision, 1/sigma0^2
    AssignmentRule assignment_rule = AssignmentRule::argmax_jd;
    double sigma_floor = 1e-6;  // lower bound for the |mean(W_up)| density scale

    // Convenience constructor keeping tau0 = 1/sigma0^2 consistent.
    static DetectorConfig with_prior(double mu0, double sigma0);
};

// Per-client per-round verdict.
struct DetectionRecord {
    int client_id = 0;
    double max_jd = 0.0;       // anomaly score, in [0, ln 2]
    int assigned_cluster = 0;  // index into the round's cluster list
    bool kept = true;
};

// Shifts every coordinate of the update by the cosine similarity between the
// full update and the previous global model. Throws ZeroVectorError when
// either vector has zero norm.
std::vector<double> update_client_weight(const FlatUpdate& update, std::span<const double> g_prev);

// Measurement error contributed by one update: L2 distance to the previous
// global model times the cosine similarity. May be negative; consumers square it.
double measurement_error(const FlatUpdate& update, std::span<const double> g_prev);

// Client-side distribution: Gaussian density of the shifted update against
// the baseline, lifted by the client's current base summary, then passed
// through a second density with mean 1 and scale max(|mean(w_up)|, sigma_floor),
// and finally normalized.
ProbVector compute_p(std::span<const double> w_up, const BaselineStats& baseline, double h_t,
                     double sigma_floor);

// Cluster-side distribution: Gaussian density of the shifted update under the
// cluster's mean/std, normalized with the given probability floor.
ProbVector compute_q(std::span<const double> w_up, const ClusterState& cluster,
                     double floor = kProbFloor);

// The distribution a not-yet-created cluster would have: prior mean with the
// prior variance combined with the incoming update's squared measurement error.
ClusterState candidate_cluster(const DetectorConfig& cfg, double sigma_w);

struct Assignment {
    double max_jd = 0.0;  // maximum divergence over existing clusters + candidate
    int index = 0;        // chosen cluster; clusters.size() when is_new
    bool is_new = false;
};

// Scores p against every existing cluster plus the candidate and picks a
// cluster under the configured rule. The reported max_jd is always the
// maximum of the divergence set regardless of the rule. Ties resolve to the
// lowest index. Throws InvalidStateError when there is nothing to score.
Assignment assign_cluster(const ProbVector& p, std::span<const ClusterState> clusters,
                          const std::optional<ClusterState>& candidate_new,
                          std::span<const double> w_up, const DetectorConfig& cfg);

// Precision-weighted refresh of a cluster absorbing one update:
//   mean' = (mean(w_up)*n_k*tau_k + mu0*tau0) / (n_k*tau_k + tau0)
//   var'  = 1/(n_k*tau_k + tau0) + sigma_w^2
// with n_k the current member count and tau_k the current precision.
ClusterState update_cluster(const ClusterState& cluster, std::span<const double> w_up,
                            double sigma_w, const DetectorConfig& cfg);

// Opens a new cluster around one update: the same refresh applied to the
// candidate state with a nominal single member.
ClusterState seed_cluster(std::span<const double> w_up, double sigma_w, const DetectorConfig& cfg);

struct RoundResult {
    std::vector<DetectionRecord> records;  // one per update, in input order
    std::vector<ClusterState> clusters;
    std::map<int, BetaProcessState> priors;
};

// Runs the full detection pass over one round of updates, sequentially in the
// given order: refresh each client's posterior, transform the update, score
// and assign it, refresh or open the chosen cluster, and finally apply
// detect_filter over the stored scores. A round with a single update is kept
// unconditionally: there is no population to filter against.
RoundResult run_round(std::span<const FlatUpdate> updates, std::span<const double> g_prev,
                      const std::map<int, BetaProcessState>& priors,
                      std::span<const ClusterState> clusters, const BaselineStats& baseline,
                      const DetectorConfig& cfg, const FilterConfig& filter_cfg,
                      PosteriorRule rule = PosteriorRule::scaled);

}  // namespace baybfed
