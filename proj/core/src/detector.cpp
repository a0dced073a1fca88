#include "baybfed/detector.hpp"

#include <cmath>
#include <string>

#include "baybfed/errors.hpp"
#include "baybfed/vecmath.hpp"

namespace baybfed {

DetectorConfig DetectorConfig::with_prior(double mu0, double sigma0) {
    if (sigma0 <= 0.0) throw InvalidScaleError("DetectorConfig: sigma0 must be > 0");
    DetectorConfig cfg;
    cfg.mu0 = mu0;
    cfg.sigma0 = sigma0;
    cfg.tau0 = 1.0 / (sigma0 * sigma0);
    return cfg;
}

std::vector<double> update_client_weight(const FlatUpdate& update, std::span<const double> g_prev) {
    if (update.weights.size() != g_prev.size()) {
        throw InvalidInputError("update_client_weight: length mismatch");
    }
    const double cos = cosine_similarity(update.weights, g_prev);
    std::vector<double> out(update.weights.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = update.weights[k] + cos;
    return out;
}

double measurement_error(const FlatUpdate& update, std::span<const double> g_prev) {
    if (update.weights.size() != g_prev.size()) {
        throw InvalidInputError("measurement_error: length mismatch");
    }
    const double dist = l2_distance(update.weights, g_prev);
    const double cos = cosine_similarity(update.weights, g_prev);
    return dist * cos;
}

ProbVector compute_p(std::span<const double> w_up, const BaselineStats& baseline, double h_t,
                     double sigma_floor) {
    if (sigma_floor <= 0.0) throw InvalidScaleError("compute_p: sigma_floor must be > 0");
    if (w_up.empty()) throw InvalidInputError("compute_p: empty update");

    std::vector<double> v = normal_pdf_vec(w_up, baseline.mu_p, baseline.sigma_p);
    for (double& x : v) x += h_t;
    // The second-stage scale follows the shifted update's mean magnitude,
    // floored because a mean can be arbitrarily close to zero.
    const double scale = std::max(std::fabs(vec_mean(w_up)), sigma_floor);
    v = normal_pdf_vec(v, 1.0, scale);
    return normalize(v);
}

ProbVector compute_q(std::span<const double> w_up, const ClusterState& cluster, double floor) {
    if (cluster.std <= 0.0) throw InvalidScaleError("compute_q: cluster std must be > 0");
    return normalize(normal_pdf_vec(w_up, cluster.mean, cluster.std), floor);
}

ClusterState candidate_cluster(const DetectorConfig& cfg, double sigma_w) {
    ClusterState c;
    c.mean = cfg.mu0;
    const double var = cfg.sigma0 * cfg.sigma0 + sigma_w * sigma_w;
    c.std = std::sqrt(var);
    c.precision = 1.0 / var;
    c.count = 0;
    return c;
}

Assignment assign_cluster(const ProbVector& p, std::span<const ClusterState> clusters,
                          const std::optional<ClusterState>& candidate_new,
                          std::span<const double> w_up, const DetectorConfig& cfg) {
    if (clusters.empty() && !candidate_new.has_value()) {
        throw InvalidStateError("assign_cluster: no clusters and no candidate");
    }

    std::vector<double> jds;
    jds.reserve(clusters.size() + 1);
    for (const ClusterState& c : clusters) jds.push_back(jsd(p, compute_q(w_up, c)));
    if (candidate_new.has_value()) jds.push_back(jsd(p, compute_q(w_up, *candidate_new)));

    // First extremum wins, so ties resolve to the lowest index and an existing
    // cluster beats the candidate (which is scored last).
    std::size_t best = 0;
    double max_jd = jds[0];
    for (std::size_t i = 1; i < jds.size(); ++i) {
        if (jds[i] > max_jd) max_jd = jds[i];
        const bool better = cfg.assignment_rule == AssignmentRule::argmax_jd ? jds[i] > jds[best]
                                                                             : jds[i] < jds[best];
        if (better) best = i;
    }

    Assignment a;
    a.max_jd = max_jd;
    a.index = static_cast<int>(best);
    a.is_new = candidate_new.has_value() && best == clusters.size();
    return a;
}

namespace {

// Shared precision-weighted blend behind update_cluster and seed_cluster.
ClusterState blend(double w_bar, double n_k, double tau_k, double sigma_w,
                   const DetectorConfig& cfg) {
    const double denom = n_k * tau_k + cfg.tau0;
    ClusterState out;
    out.mean = (w_bar * n_k * tau_k + cfg.mu0 * cfg.tau0) / denom;
    const double var = 1.0 / denom + sigma_w * sigma_w;
    out.std = std::sqrt(var);
    out.precision = 1.0 / var;
    return out;
}

}  // namespace

ClusterState update_cluster(const ClusterState& cluster, std::span<const double> w_up,
                            double sigma_w, const DetectorConfig& cfg) {
    if (w_up.empty()) throw InvalidInputError("update_cluster: empty update");
    ClusterState next = blend(vec_mean(w_up), static_cast<double>(cluster.count),
                              cluster.precision, sigma_w, cfg);
    next.count = cluster.count + 1;
    return next;
}

ClusterState seed_cluster(std::span<const double> w_up, double sigma_w, const DetectorConfig& cfg) {
    if (w_up.empty()) throw InvalidInputError("seed_cluster: empty update");
    const ClusterState cand = candidate_cluster(cfg, sigma_w);
    ClusterState fresh = blend(vec_mean(w_up), 1.0, cand.precision, sigma_w, cfg);
    fresh.count = 1;
    return fresh;
}

RoundResult run_round(std::span<const FlatUpdate> updates, std::span<const double> g_prev,
                      const std::map<int, BetaProcessState>& priors,
                      std::span<const ClusterState> clusters, const BaselineStats& baseline,
                      const DetectorConfig& cfg, const FilterConfig& filter_cfg,
                      PosteriorRule rule) {
    if (updates.empty()) throw InvalidInputError("run_round: no updates");
    const std::size_t l = updates.front().weights.size();
    if (l < 2) throw InvalidInputError("run_round: updates must have at least 2 coordinates");
    for (const FlatUpdate& u : updates) {
        if (u.weights.size() != l) {
            throw InvalidInputError("run_round: inconsistent update length for client " +
                                    std::to_string(u.client_id));
        }
        if (!all_finite(u.weights)) {
            throw InvalidInputError("run_round: non-finite update from client " +
                                    std::to_string(u.client_id));
        }
    }

    RoundResult result;
    result.clusters.assign(clusters.begin(), clusters.end());
    result.priors = priors;
    result.records.reserve(updates.size());

    std::vector<double> stored;
    stored.reserve(updates.size());

    for (const FlatUpdate& u : updates) {
        auto it = result.priors.find(u.client_id);
        if (it == result.priors.end()) {
            throw InvalidInputError("run_round: no prior for client " +
                                    std::to_string(u.client_id));
        }

        const std::string ctx = "run_round: client " + std::to_string(u.client_id) + ": ";
        try {
            // Posterior first, so the p distribution sees this round's summary.
            it->second = posterior_update(it->second, u, rule);
            const double h_t = it->second.base_summary;

            const std::vector<double> w_up = update_client_weight(u, g_prev);
            const double sigma_w = measurement_error(u, g_prev);
            const ProbVector p = compute_p(w_up, baseline, h_t, cfg.sigma_floor);

            const std::optional<ClusterState> cand = candidate_cluster(cfg, sigma_w);
            const Assignment a = assign_cluster(p, result.clusters, cand, w_up, cfg);

            if (a.is_new) {
                result.clusters.push_back(seed_cluster(w_up, sigma_w, cfg));
            } else {
                result.clusters[static_cast<std::size_t>(a.index)] = update_cluster(
                    result.clusters[static_cast<std::size_t>(a.index)], w_up, sigma_w, cfg);
            }

            DetectionRecord rec;
            rec.client_id = u.client_id;
            rec.max_jd = a.max_jd;
            // When a.is_new the candidate index already equals the slot the
            // fresh cluster was pushed into.
            rec.assigned_cluster = a.index;
            rec.kept = true;
            result.records.push_back(rec);
            stored.push_back(a.max_jd);
        } catch (const ZeroVectorError& e) {
            throw ZeroVectorError(ctx + e.what());
        } catch (const InvalidScaleError& e) {
            throw InvalidScaleError(ctx + e.what());
        } catch (const DegenerateDistributionError& e) {
            throw DegenerateDistributionError(ctx + e.what());
        } catch (const Error& e) {
            throw InvalidInputError(ctx + e.what());
        }
    }

    if (stored.size() == 1) {
        // No population to compare a lone update against.
        result.records.front().kept = true;
        return result;
    }

    const std::vector<bool> kept = detect_filter(stored, filter_cfg);
    for (std::size_t i = 0; i < kept.size(); ++i) result.records[i].kept = kept[i];
    return result;
}

}  // namespace baybfed
