#include "baybfed/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "baybfed/divergence.hpp"
#include "baybfed/errors.hpp"

namespace baybfed {

namespace {

using nlohmann::json;

// Shortest round-trippable decimal representation, stable across runs.
std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("short write to " + path.string());
}

json metrics_json(const RoundMetrics& m) {
    json j;
    j["round"] = m.round;
    j["tpr"] = m.tpr.has_value() ? json(*m.tpr) : json(nullptr);
    j["tnr"] = m.tnr.has_value() ? json(*m.tnr) : json(nullptr);
    j["ba"] = m.ba;
    j["ma"] = m.ma;
    j["kept_count"] = m.kept_count;
    return j;
}

}  // namespace

SweepAxis sweep_axis_from_name(const std::string& name) {
    if (name == "pmr") return SweepAxis::pmr;
    if (name == "non_iid") return SweepAxis::non_iid;
    if (name == "pdr") return SweepAxis::pdr;
    if (name == "alpha") return SweepAxis::alpha;
    if (name == "n_clients") return SweepAxis::n_clients;
    throw ValidationError("axis: unknown value '" + name + "'");
}

std::string sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::pmr: return "pmr";
        case SweepAxis::non_iid: return "non_iid";
        case SweepAxis::pdr: return "pdr";
        case SweepAxis::alpha: return "alpha";
        case SweepAxis::n_clients: return "n_clients";
    }
    return "?";
}

std::string trace_csv(const Report& report) {
    std::string out = "round,client_id,is_malicious,max_jd,assigned_cluster,kept\n";
    for (const RoundTrace& rt : report.rounds) {
        for (std::size_t i = 0; i < rt.records.size(); ++i) {
            const DetectionRecord& r = rt.records[i];
            out += std::to_string(rt.round);
            out += ',';
            out += std::to_string(r.client_id);
            out += ',';
            out += rt.truth[i] ? "true" : "false";
            out += ',';
            out += fmt_double(r.max_jd);
            out += ',';
            out += std::to_string(r.assigned_cluster);
            out += ',';
            out += r.kept ? "true" : "false";
            out += '\n';
        }
    }
    return out;
}

std::string summary_json(const Report& report) {
    json root;
    root["seed"] = report.config.seed;
    root["config"] = json::parse(serialize_config(report.config));
    json rounds = json::array();
    for (const RoundTrace& rt : report.rounds) {
        json j = metrics_json(rt.metrics);
        j["aggregation_skipped"] = rt.aggregation_skipped;
        rounds.push_back(std::move(j));
    }
    root["rounds"] = std::move(rounds);
    root["final"] = {{"ba", report.final_ba}, {"ma", report.final_ma}};
    root["skipped_rounds"] = report.skipped_rounds;
    return root.dump(2) + "\n";
}

Report cmd_run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    Report report = run_experiment(cfg);
    write_file(out_dir / "trace.csv", trace_csv(report));
    write_file(out_dir / "summary.json", summary_json(report));
    return report;
}

namespace {

ExperimentConfig with_axis_value(const ExperimentConfig& base, SweepAxis axis, double value) {
    ExperimentConfig cfg = base;
    switch (axis) {
        case SweepAxis::pmr: cfg.pmr = value; break;
        case SweepAxis::non_iid: cfg.non_iid_degree = value; break;
        case SweepAxis::pdr: cfg.attack.pdr = value; break;
        case SweepAxis::alpha: cfg.attack.alpha = value; break;
        case SweepAxis::n_clients: {
            if (value < 2.0 || value != std::floor(value)) {
                throw ValidationError("values: n_clients entries must be integers >= 2");
            }
            cfg.n_clients = static_cast<int>(value);
            break;
        }
    }
    validate(cfg);
    return cfg;
}

std::string axis_dir_name(SweepAxis axis, double value) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s_%g", sweep_axis_name(axis).c_str(), value);
    return buf;
}

}  // namespace

SweepOutcome cmd_sweep(const ExperimentConfig& base, SweepAxis axis,
                       const std::vector<double>& values, const std::filesystem::path& out_dir) {
    if (values.empty()) throw ValidationError("values: must not be empty");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    std::string summary = "axis,value,tpr,tnr,ba,ma,status\n";
    SweepOutcome outcome;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double value = values[k];
        std::string row = sweep_axis_name(axis) + "," + fmt_double(value) + ",";
        try {
            ExperimentConfig cfg = with_axis_value(base, axis, value);
            cfg.seed = mix64(base.seed + k + 1);
            const Report rep = cmd_run(cfg, out_dir / axis_dir_name(axis, value));
            const RoundMetrics& fin = rep.rounds.back().metrics;
            row += fin.tpr ? fmt_double(*fin.tpr) : std::string("null");
            row += ',';
            row += fin.tnr ? fmt_double(*fin.tnr) : std::string("null");
            row += ',';
            row += fmt_double(fin.ba) + "," + fmt_double(fin.ma) + ",ok\n";
        } catch (const std::exception& e) {
            outcome.failures += 1;
            row += "null,null,null,null,failed: ";
            row += e.what();
            row += '\n';
        }
        summary += row;
    }
    write_file(out_dir / "sweep_summary.csv", summary);
    return outcome;
}

namespace {

bool check(bool ok, const char* what, int& failures) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << what << "\n";
    if (!ok) ++failures;
    return ok;
}

}  // namespace

int selftest() {
    int failures = 0;
    std::mt19937_64 rng(20240917);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Divergence axioms over random distributions.
    bool axioms = true;
    for (int it = 0; it < 200; ++it) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng() % 16);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = unit(rng);
            b[i] = unit(rng);
        }
        const ProbVector p = normalize(a);
        const ProbVector q = normalize(b);
        const double d = jsd(p, q);
        axioms = axioms && d >= 0.0 && d <= kLn2 && std::fabs(d - jsd(q, p)) <= 1e-9 &&
                 jsd(p, p) <= 1e-12 && kl(p, q) >= -1e-12;
    }
    check(axioms, "divergence axioms (bounds, symmetry, identity)", failures);

    // Posterior arithmetic against the closed form.
    bool posterior = true;
    for (int it = 0; it < 100; ++it) {
        const double c = 0.5 + 10.0 * unit(rng);
        const double h = -2.0 + 4.0 * unit(rng);
        const std::size_t l = 1 + rng() % 32;
        FlatUpdate u;
        double sum = 0.0;
        for (std::size_t i = 0; i < l; ++i) {
            u.weights.push_back(-1.0 + 2.0 * unit(rng));
            sum += u.weights.back();
        }
        BetaProcessState s;
        s.concentration = c;
        s.base_summary = h;
        const BetaProcessState next = posterior_update(s, u, PosteriorRule::scaled);
        const double expect = (c / (c + static_cast<double>(l))) * h + sum / (c * static_cast<double>(l));
        posterior = posterior && next.concentration == c + static_cast<double>(l) &&
                    std::fabs(next.base_summary - expect) <= 1e-12 * std::max(1.0, std::fabs(expect));
    }
    check(posterior, "posterior update closed form", failures);

    // Filter rules on the canonical patterns.
    {
        FilterConfig fc;
        const std::vector<double> v1 = {0.1, 0.2, 0.15, 0.9, 0.95};
        const std::vector<bool> k1 = detect_filter(v1, fc);
        const bool t1 = k1 == std::vector<bool>{true, true, true, false, false};

        FilterConfig dup;
        dup.mode = FilterMode::duplicate_only;
        const std::vector<double> v2 = {0.3, 0.3, 0.3, 0.1, 0.12};
        const std::vector<bool> k2 = detect_filter(v2, dup);
        const bool t2 = k2 == std::vector<bool>{false, false, false, true, true};

        const std::vector<double> v3 = {0.4, 0.4, 0.4};
        const std::vector<bool> k3 = detect_filter(v3, fc);
        const bool t3 = k3 == std::vector<bool>{false, false, false};
        check(t1 && t2 && t3, "filter rules (threshold, duplicate, degenerate)", failures);
    }

    std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures;
}

}  // namespace baybfed
