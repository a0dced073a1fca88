#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "baybfed/detector.hpp"
#include "baybfed/errors.hpp"

using namespace baybfed;

namespace {

FlatUpdate u(int id, std::vector<double> w) {
    FlatUpdate out;
    out.client_id = id;
    out.weights = std::move(w);
    return out;
}

}  // namespace

TEST_SUITE("detector") {

TEST_CASE("update_client_weight shifts by the cosine") {
    const std::vector<double> g = {1.0, 1.0};

    // identical direction: cosine 1, every coordinate moves by 1
    const std::vector<double> same = update_client_weight(u(0, {1.0, 1.0}), g);
    CHECK(same[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(same[1] == doctest::Approx(2.0).epsilon(1e-12));

    // orthogonal: cosine 0, unchanged
    const std::vector<double> ortho = update_client_weight(u(0, {1.0, -1.0}), g);
    CHECK(ortho[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ortho[1] == doctest::Approx(-1.0).epsilon(1e-12));

    // hand-worked: cos([1,0],[1,1]) = 1/sqrt(2)
    const std::vector<double> mixed = update_client_weight(u(0, {1.0, 0.0}), g);
    CHECK(mixed[0] == doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(mixed[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(update_client_weight(u(0, {0.0, 0.0}), g), ZeroVectorError);
}

TEST_CASE("measurement_error combines distance and cosine") {
    CHECK(measurement_error(u(0, {1.0, 0.0}), std::vector<double>{1.0, 0.0}) ==
          doctest::Approx(0.0));
    CHECK(measurement_error(u(0, {2.0, 0.0}), std::vector<double>{1.0, 0.0}) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // doubling the distance at a fixed direction doubles the error
    const double e1 = measurement_error(u(0, {3.0, 0.0}), std::vector<double>{1.0, 0.0});
    const double e2 = measurement_error(u(0, {5.0, 0.0}), std::vector<double>{1.0, 0.0});
    CHECK(e2 == doctest::Approx(2.0 * e1).epsilon(1e-12));

    CHECK_THROWS_AS(measurement_error(u(0, {0.0, 0.0}), std::vector<double>{0.0, 0.0}),
                    ZeroVectorError);
}

TEST_CASE("compute_p is a normalized zero-free distribution") {
    BaselineStats base{0.1, 0.5};
    const std::vector<double> w_up = {0.3, -0.2, 0.8, 0.05};
    const ProbVector p = compute_p(w_up, base, 0.2, 1e-6);
    double sum = 0.0;
    for (double x : p.weights) {
        CHECK(x > 0.0);
        sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    const ProbVector again = compute_p(w_up, base, 0.2, 1e-6);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p.weights[i] == again.weights[i]);
}

TEST_CASE("compute_p hand trace collapses symmetric input to uniform") {
    // both coordinates sit on the baseline mean, so the first density stage
    // emits the same value twice and the second stage keeps them identical
    BaselineStats base{2.0, 1.0};
    const std::vector<double> w_up = {2.0, 2.0};
    const ProbVector p = compute_p(w_up, base, 0.0, 1e-6);
    CHECK(p.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("compute_p rejects a bad sigma floor") {
    BaselineStats base{0.0, 1.0};
    CHECK_THROWS_AS(compute_p(std::vector<double>{1.0}, base, 0.0, 0.0), InvalidScaleError);
}

TEST_CASE("compute_q worked values") {
    ClusterState c;
    c.mean = 0.0;
    c.std = 1.0;
    c.precision = 1.0;

    // equidistant points collapse to uniform
    const ProbVector sym = compute_q(std::vector<double>{-0.7, 0.7}, c);
    CHECK(sym.weights[0] == doctest::Approx(0.5).epsilon(1e-12));

    // hand-worked densities 0.39894, 0.24197 -> [0.62246, 0.37754]
    const ProbVector q = compute_q(std::vector<double>{0.0, 1.0}, c);
    CHECK(q.weights[0] == doctest::Approx(0.6224593312018546).epsilon(1e-9));
    CHECK(q.weights[1] == doctest::Approx(0.3775406687981454).epsilon(1e-9));

    ClusterState bad = c;
    bad.std = 0.0;
    CHECK_THROWS_AS(compute_q(std::vector<double>{0.0}, bad), InvalidScaleError);
}

TEST_CASE("wider clusters flatten q toward uniform") {
    const std::vector<double> w_up = {0.0, 0.5, 1.0, 2.0};
    double prev_entropy = -1.0;
    for (double sigma : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        ClusterState c;
        c.mean = 0.3;
        c.std = sigma;
        c.precision = 1.0 / (sigma * sigma);
        const double h = entropy(compute_q(w_up, c));
        CHECK(h > prev_entropy);
        prev_entropy = h;
    }
}

TEST_CASE("assign_cluster with only a candidate") {
    DetectorConfig cfg = DetectorConfig::with_prior(0.0, 1.0);
    const std::vector<double> w_up = {0.4, -0.1, 0.2};
    const ProbVector p = compute_p(w_up, BaselineStats{0.0, 1.0}, 0.0, cfg.sigma_floor);
    const std::optional<ClusterState> cand = candidate_cluster(cfg, 0.5);

    const Assignment a = assign_cluster(p, {}, cand, w_up, cfg);
    CHECK(a.is_new);
    CHECK(a.index == 0);
    CHECK(a.max_jd == doctest::Approx(jsd(p, compute_q(w_up, *cand))).epsilon(1e-15));

    CHECK_THROWS_AS(assign_cluster(p, {}, std::nullopt, w_up, cfg), InvalidStateError);
}

TEST_CASE("ties break toward the lowest existing index") {
    DetectorConfig cfg = DetectorConfig::with_prior(0.0, 1.0);
    ClusterState c;
    c.mean = 1.0;
    c.std = 2.0;
    c.precision = 0.25;
    const std::vector<ClusterState> clusters = {c, c};

    const std::vector<double> w_up = {0.4, -0.1, 0.2};
    const ProbVector p = compute_p(w_up, BaselineStats{0.0, 1.0}, 0.0, cfg.sigma_floor);
    const Assignment a = assign_cluster(p, clusters, std::nullopt, w_up, cfg);
    CHECK(a.index == 0);
    CHECK_FALSE(a.is_new);
}

TEST_CASE("argmax picks the most divergent cluster, argmin the closest") {
    DetectorConfig cfg = DetectorConfig::with_prior(0.0, 1.0);
    ClusterState near;
    near.mean = 0.0;
    near.std = 1.0;
    near.precision = 1.0;
    ClusterState far = near;
    far.mean = 10.0;
    const std::vector<ClusterState> clusters = {near, far};

    // a p that matches the near cluster exactly, evaluated at points near 0
    const std::vector<double> w_up = {0.0, 0.6, -0.8, 1.2};
    const ProbVector p = compute_q(w_up, near);

    // brute-force oracle over the two clusters
    const double jd_near = jsd(p, compute_q(w_up, near));
    const double jd_far = jsd(p, compute_q(w_up, far));
    REQUIRE(jd_far > jd_near);

    const Assignment a = assign_cluster(p, clusters, std::nullopt, w_up, cfg);
    CHECK(a.index == 1);
    CHECK(a.max_jd == doctest::Approx(jd_far).epsilon(1e-15));

    DetectorConfig alt = cfg;
    alt.assignment_rule = AssignmentRule::argmin_jd;
    const Assignment b = assign_cluster(p, clusters, std::nullopt, w_up, alt);
    CHECK(b.index == 0);
    CHECK(b.max_jd == doctest::Approx(jd_far).epsilon(1e-15));  // score stays the max
}

TEST_CASE("update_cluster worked values") {
    DetectorConfig cfg;
    cfg.mu0 = 0.0;
    cfg.sigma0 = 1.0 / std::sqrt(2.0);
    cfg.tau0 = 2.0;

    ClusterState c;
    c.mean = 1.0;
    c.std = 1.0;
    c.precision = 1.0;
    c.count = 2;

    // mean(w_up)=4, n_k=2, tau_k=1: mean' = 8/4 = 2, var' = 1/4 + sigma_w^2
    const double sigma_w = 0.5;
    const ClusterState next = update_cluster(c, std::vector<double>{4.0, 4.0}, sigma_w, cfg);
    CHECK(next.mean == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(next.std == doctest::Approx(std::sqrt(0.25 + 0.25)).epsilon(1e-12));
    CHECK(next.count == 3);
    CHECK(next.precision == doctest::Approx(1.0 / (next.std * next.std)).epsilon(1e-9));
}

TEST_CASE("update_cluster symmetric blend and concentration limit") {
    DetectorConfig cfg = DetectorConfig::with_prior(0.0, 1.0);

    // n_k * tau_k == tau0: the posterior mean is the midpoint
    ClusterState c;
    c.mean = 5.0;
    c.std = 1.0;
    c.precision = 1.0;
    c.count = 1;
    const ClusterState mid = update_cluster(c, std::vector<double>{3.0, 3.0}, 0.0, cfg);
    CHECK(mid.mean == doctest::Approx((3.0 + 0.0) / 2.0).epsilon(1e-12));

    // overwhelming evidence pushes the mean to the data and the variance to zero
    ClusterState heavy;
    heavy.mean = 5.0;
    heavy.std = 1e-3;
    heavy.precision = 1e6;
    heavy.count = 1;
    const ClusterState sure = update_cluster(heavy, std::vector<double>{3.0, 3.0}, 0.0, cfg);
    CHECK(sure.mean == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(sure.std * sure.std == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("randomized cluster update against the closed form") {
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    DetectorConfig cfg = DetectorConfig::with_prior(0.25, 2.0);
    for (int it = 0; it < 100; ++it) {
        ClusterState c;
        c.mean = -1.0 + 2.0 * unit(rng);
        c.std = 0.2 + 2.0 * unit(rng);
        c.precision = 1.0 / (c.std * c.std);
        c.count = 1 + rng() % 10;
        const double sigma_w = -1.0 + 2.0 * unit(rng);

        std::vector<double> w_up(3);
        for (double& x : w_up) x = -2.0 + 4.0 * unit(rng);
        const double w_bar = (w_up[0] + w_up[1] + w_up[2]) / 3.0;

        const ClusterState next = update_cluster(c, w_up, sigma_w, cfg);
        const double nk = static_cast<double>(c.count);
        const double denom = nk * c.precision + cfg.tau0;
        CHECK(next.mean ==
              doctest::Approx((w_bar * nk * c.precision + cfg.mu0 * cfg.tau0) / denom).epsilon(1e-12));
        const double var = 1.0 / denom + sigma_w * sigma_w;
        CHECK(next.std == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
        CHECK(next.precision * next.std * next.std == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(next.count == c.count + 1);
    }
}

TEST_CASE("run_round seeds the first cluster and keeps a lone client") {
    DetectorConfig cfg = DetectorConfig::with_prior(0.0, 1.0);
    FilterConfig filter;
    BaselineStats base{0.0, 1.0};

    std::map<int, BetaProcessState> priors;
    BetaProcessState prior;
    prior.client_id = 0;
    prior.concentration = 5.0;
    prior.base_summary = 0.0;
    priors.emplace(0, prior);

    const std::vector<FlatUpdate> updates = {u(0, {0.5, -0.5, 0.25})};
    const std::vector<double> g_prev = {0.4, -0.4, 0.3};

    const RoundResult r = run_round(updates, g_prev, priors, {}, base, cfg, filter);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].kept);
    CHECK(r.records[0].assigned_cluster == 0);
    CHECK(r.clusters.size() == 1);
    CHECK(r.clusters[0].count == 1);
    CHECK(r.records[0].max_jd >= 0.0);
    CHECK(r.records[0].max_jd <= kLn2);
    // posterior bookkeeping: concentration grew by the update length
    CHECK(r.priors.at(0).concentration == doctest::Approx(8.0));
}

TEST_CASE("run_round handles identical updates and concentration bookkeeping") {
    DetectorConfig cfg = DetectorConfig::with_prior(0.0, 1.0);
    FilterConfig filter;
    BaselineStats base{0.0, 1.0};

    std::map<int, BetaProcessState> priors;
    for (int i = 0; i < 4; ++i) {
        BetaProcessState p;
        p.client_id = i;
        p.concentration = 3.0 + i;
        p.base_summary = 0.0;
        priors.emplace(i, p);
    }

    std::vector<FlatUpdate> updates;
    for (int i = 0; i < 4; ++i) updates.push_back(u(i, {0.5, -0.5, 0.25}));
    const std::vector<double> g_prev = {0.4, -0.4, 0.3};

    const RoundResult r = run_round(updates, g_prev, priors, {}, base, cfg, filter);
    REQUIRE(r.records.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(r.priors.at(i).concentration == doctest::Approx(3.0 + i + 3.0));
        CHECK(r.records[static_cast<std::size_t>(i)].max_jd >= 0.0);
        CHECK(r.records[static_cast<std::size_t>(i)].max_jd <= kLn2);
    }

    CHECK_THROWS_AS(
        run_round(std::vector<FlatUpdate>{u(9, {1.0, 0.0, 0.0})}, g_prev, priors, {}, base, cfg,
                  filter),
        InvalidInputError);
}

TEST_CASE("run_round is deterministic") {
    DetectorConfig cfg = DetectorConfig::with_prior(0.0, 1.0);
    FilterConfig filter;
    BaselineStats base{0.1, 0.7};

    std::mt19937_64 rng(2717);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::map<int, BetaProcessState> priors;
    std::vector<FlatUpdate> updates;
    std::vector<double> g_prev(8);
    for (double& g : g_prev) g = unit(rng);
    for (int i = 0; i < 6; ++i) {
        BetaProcessState p;
        p.client_id = i;
        p.concentration = 4.0;
        p.base_summary = 0.1;
        priors.emplace(i, p);
        FlatUpdate up;
        up.client_id = i;
        up.weights.resize(8);
        for (double& w : up.weights) w = unit(rng);
        updates.push_back(std::move(up));
    }

    const RoundResult a = run_round(updates, g_prev, priors, {}, base, cfg, filter);
    const RoundResult b = run_round(updates, g_prev, priors, {}, base, cfg, filter);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].max_jd == b.records[i].max_jd);
        CHECK(a.records[i].assigned_cluster == b.records[i].assigned_cluster);
        CHECK(a.records[i].kept == b.records[i].kept);
    }
}

}  // TEST_SUITE
