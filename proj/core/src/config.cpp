#include "baybfed/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "baybfed/errors.hpp"

namespace baybfed {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw ValidationError(path + ": " + why);
}

void check_known_keys(const json& obj, const std::string& path,
                      const std::set<std::string>& known) {
    for (const auto& item : obj.items()) {
        if (known.find(item.key()) == known.end()) {
            fail(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
        }
    }
}

template <typename T>
void read(const json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        fail(path.empty() ? key : path + "." + std::string(key), "wrong type");
    }
}

void read_enum(const json& obj, const std::string& path, const char* key,
               const std::vector<std::pair<std::string, int>>& table, int& out) {
    if (!obj.contains(key)) return;
    std::string s;
    read(obj, path, key, s);
    for (const auto& [name, value] : table) {
        if (name == s) {
            out = value;
            return;
        }
    }
    fail(path.empty() ? key : path + "." + std::string(key), "unknown value '" + s + "'");
}

const std::vector<std::pair<std::string, int>> kPosteriorRuleNames = {
    {"scaled", static_cast<int>(PosteriorRule::scaled)},
    {"classical", static_cast<int>(PosteriorRule::classical)}};
const std::vector<std::pair<std::string, int>> kDefenseNames = {
    {"baybfed", static_cast<int>(DefenseKind::baybfed)},
    {"none", static_cast<int>(DefenseKind::none)}};
const std::vector<std::pair<std::string, int>> kAggregatorNames = {
    {"fedavg", static_cast<int>(AggregatorKind::fedavg)},
    {"median", static_cast<int>(AggregatorKind::median)},
    {"trimmed_mean", static_cast<int>(AggregatorKind::trimmed_mean)}};
const std::vector<std::pair<std::string, int>> kAssignmentNames = {
    {"argmax_jd", static_cast<int>(AssignmentRule::argmax_jd)},
    {"argmin_jd", static_cast<int>(AssignmentRule::argmin_jd)}};
const std::vector<std::pair<std::string, int>> kFilterModeNames = {
    {"combined", static_cast<int>(FilterMode::combined)},
    {"threshold_only", static_cast<int>(FilterMode::threshold_only)},
    {"duplicate_only", static_cast<int>(FilterMode::duplicate_only)}};
const std::vector<std::pair<std::string, int>> kAttackKindNames = {
    {"data_poison", static_cast<int>(AttackKind::data_poison)},
    {"constrain_and_scale", static_cast<int>(AttackKind::constrain_and_scale)},
    {"adaptive", static_cast<int>(AttackKind::adaptive)}};

std::string enum_name(const std::vector<std::pair<std::string, int>>& table, int value) {
    for (const auto& [name, v] : table) {
        if (v == value) return name;
    }
    return "?";
}

ExperimentConfig from_json(const json& root) {
    ExperimentConfig cfg;
    check_known_keys(root, "",
                     {"n_clients", "pmr", "rounds", "non_iid_degree", "attack", "trigger",
                      "detector", "filter", "posterior_rule", "defense", "aggregator",
                      "trim_fraction", "data", "model", "train", "c0", "seed"});

    read(root, "", "n_clients", cfg.n_clients);
    read(root, "", "pmr", cfg.pmr);
    read(root, "", "rounds", cfg.rounds);
    read(root, "", "non_iid_degree", cfg.non_iid_degree);
    read(root, "", "trim_fraction", cfg.trim_fraction);
    read(root, "", "c0", cfg.c0);
    read(root, "", "seed", cfg.seed);

    int tmp;
    tmp = static_cast<int>(cfg.posterior_rule);
    read_enum(root, "", "posterior_rule", kPosteriorRuleNames, tmp);
    cfg.posterior_rule = static_cast<PosteriorRule>(tmp);
    tmp = static_cast<int>(cfg.defense);
    read_enum(root, "", "defense", kDefenseNames, tmp);
    cfg.defense = static_cast<DefenseKind>(tmp);
    tmp = static_cast<int>(cfg.aggregator);
    read_enum(root, "", "aggregator", kAggregatorNames, tmp);
    cfg.aggregator = static_cast<AggregatorKind>(tmp);

    if (root.contains("attack")) {
        const json& a = root.at("attack");
        check_known_keys(a, "attack", {"kind", "pdr", "scale_factor", "alpha", "seed"});
        tmp = static_cast<int>(cfg.attack.kind);
        read_enum(a, "attack", "kind", kAttackKindNames, tmp);
        cfg.attack.kind = static_cast<AttackKind>(tmp);
        read(a, "attack", "pdr", cfg.attack.pdr);
        read(a, "attack", "scale_factor", cfg.attack.scale_factor);
        read(a, "attack", "alpha", cfg.attack.alpha);
        read(a, "attack", "seed", cfg.attack.seed);
    }
    if (root.contains("trigger")) {
        const json& t = root.at("trigger");
        check_known_keys(t, "trigger", {"coords", "value", "target_label"});
        read(t, "trigger", "coords", cfg.trigger.trigger_coords);
        read(t, "trigger", "value", cfg.trigger.trigger_value);
        read(t, "trigger", "target_label", cfg.trigger.target_label);
    }
    if (root.contains("detector")) {
        const json& d = root.at("detector");
        check_known_keys(d, "detector",
                         {"mu0", "sigma0", "tau0", "assignment_rule", "sigma_floor"});
        read(d, "detector", "mu0", cfg.detector.mu0);
        bool tau_given = d.contains("tau0");
        read(d, "detector", "sigma0", cfg.detector.sigma0);
        if (!tau_given && cfg.detector.sigma0 > 0.0) {
            cfg.detector.tau0 = 1.0 / (cfg.detector.sigma0 * cfg.detector.sigma0);
        }
        read(d, "detector", "tau0", cfg.detector.tau0);
        tmp = static_cast<int>(cfg.detector.assignment_rule);
        read_enum(d, "detector", "assignment_rule", kAssignmentNames, tmp);
        cfg.detector.assignment_rule = static_cast<AssignmentRule>(tmp);
        read(d, "detector", "sigma_floor", cfg.detector.sigma_floor);
    }
    if (root.contains("filter")) {
        const json& f = root.at("filter");
        check_known_keys(f, "filter", {"dup_epsilon", "mode"});
        read(f, "filter", "dup_epsilon", cfg.filter.dup_epsilon);
        tmp = static_cast<int>(cfg.filter.mode);
        read_enum(f, "filter", "mode", kFilterModeNames, tmp);
        cfg.filter.mode = static_cast<FilterMode>(tmp);
    }
    if (root.contains("data")) {
        const json& d = root.at("data");
        check_known_keys(d, "data",
                         {"n_samples", "n_test", "n_classes", "feature_dim", "class_separation",
                          "init_std"});
        read(d, "data", "n_samples", cfg.data.n_samples);
        read(d, "data", "n_test", cfg.data.n_test);
        read(d, "data", "n_classes", cfg.data.n_classes);
        read(d, "data", "feature_dim", cfg.data.feature_dim);
        read(d, "data", "class_separation", cfg.data.class_separation);
        read(d, "data", "init_std", cfg.data.init_std);
    }
    if (root.contains("model")) {
        const json& m = root.at("model");
        check_known_keys(m, "model", {"hidden"});
        read(m, "model", "hidden", cfg.model.hidden);
    }
    if (root.contains("train")) {
        const json& t = root.at("train");
        check_known_keys(t, "train", {"learning_rate", "epochs", "batch_size", "seed"});
        read(t, "train", "learning_rate", cfg.train.learning_rate);
        read(t, "train", "epochs", cfg.train.epochs);
        read(t, "train", "batch_size", cfg.train.batch_size);
        read(t, "train", "seed", cfg.train.seed);
    }

    validate(cfg);
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    json root;
    root["n_clients"] = cfg.n_clients;
    root["pmr"] = cfg.pmr;
    root["rounds"] = cfg.rounds;
    root["non_iid_degree"] = cfg.non_iid_degree;
    root["posterior_rule"] = enum_name(kPosteriorRuleNames, static_cast<int>(cfg.posterior_rule));
    root["defense"] = enum_name(kDefenseNames, static_cast<int>(cfg.defense));
    root["aggregator"] = enum_name(kAggregatorNames, static_cast<int>(cfg.aggregator));
    root["trim_fraction"] = cfg.trim_fraction;
    root["c0"] = cfg.c0;
    root["seed"] = cfg.seed;
    root["attack"] = {{"kind", enum_name(kAttackKindNames, static_cast<int>(cfg.attack.kind))},
                      {"pdr", cfg.attack.pdr},
                      {"scale_factor", cfg.attack.scale_factor},
                      {"alpha", cfg.attack.alpha},
                      {"seed", cfg.attack.seed}};
    root["trigger"] = {{"coords", cfg.trigger.trigger_coords},
                       {"value", cfg.trigger.trigger_value},
                       {"target_label", cfg.trigger.target_label}};
    root["detector"] = {
        {"mu0", cfg.detector.mu0},
        {"sigma0", cfg.detector.sigma0},
        {"tau0", cfg.detector.tau0},
        {"assignment_rule", enum_name(kAssignmentNames, static_cast<int>(cfg.detector.assignment_rule))},
        {"sigma_floor", cfg.detector.sigma_floor}};
    root["filter"] = {{"dup_epsilon", cfg.filter.dup_epsilon},
                      {"mode", enum_name(kFilterModeNames, static_cast<int>(cfg.filter.mode))}};
    root["data"] = {{"n_samples", cfg.data.n_samples},
                    {"n_test", cfg.data.n_test},
                    {"n_classes", cfg.data.n_classes},
                    {"feature_dim", cfg.data.feature_dim},
                    {"class_separation", cfg.data.class_separation},
                    {"init_std", cfg.data.init_std}};
    root["model"] = {{"hidden", cfg.model.hidden}};
    root["train"] = {{"learning_rate", cfg.train.learning_rate},
                     {"epochs", cfg.train.epochs},
                     {"batch_size", cfg.train.batch_size},
                     {"seed", cfg.train.seed}};
    return root;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
    if (cfg.n_clients < 2) fail("n_clients", "must be >= 2");
    if (cfg.pmr < 0.0 || cfg.pmr > 0.5) fail("pmr", "must be in [0, 0.5]; the adversary cannot control a majority");
    if (cfg.rounds < 1) fail("rounds", "must be >= 1");
    if (cfg.non_iid_degree < 0.0 || cfg.non_iid_degree > 1.0) fail("non_iid_degree", "must be in [0, 1]");
    if (cfg.attack.pdr < 0.0 || cfg.attack.pdr > 1.0) fail("attack.pdr", "must be in [0, 1]");
    if (cfg.attack.alpha < 0.0 || cfg.attack.alpha > 1.0) fail("attack.alpha", "must be in [0, 1]");
    if (cfg.attack.scale_factor <= 0.0) fail("attack.scale_factor", "must be > 0");
    if (cfg.trigger.target_label < 0 || cfg.trigger.target_label >= cfg.data.n_classes) {
        fail("trigger.target_label", "must name a valid class");
    }
    for (int c : cfg.trigger.trigger_coords) {
        if (c < 0 || c >= cfg.data.feature_dim) fail("trigger.coords", "coordinate out of range");
    }
    if (cfg.detector.sigma0 <= 0.0) fail("detector.sigma0", "must be > 0");
    if (cfg.detector.tau0 <= 0.0) fail("detector.tau0", "must be > 0");
    const double tau_expect = 1.0 / (cfg.detector.sigma0 * cfg.detector.sigma0);
    if (std::fabs(cfg.detector.tau0 - tau_expect) > 1e-9 * std::max(1.0, tau_expect)) {
        fail("detector.tau0", "must equal 1/sigma0^2");
    }
    if (cfg.detector.sigma_floor <= 0.0) fail("detector.sigma_floor", "must be > 0");
    if (!(cfg.filter.dup_epsilon >= 0.0) || !std::isfinite(cfg.filter.dup_epsilon)) {
        fail("filter.dup_epsilon", "must be finite and >= 0");
    }
    if (cfg.trim_fraction < 0.0 || cfg.trim_fraction >= 0.5) fail("trim_fraction", "must be in [0, 0.5)");
    if (cfg.data.n_classes < 2) fail("data.n_classes", "must be >= 2");
    if (cfg.data.feature_dim < 2) fail("data.feature_dim", "must be >= 2");
    if (cfg.data.n_samples < static_cast<std::size_t>(cfg.n_clients)) {
        fail("data.n_samples", "must cover at least one sample per client");
    }
    if (cfg.data.n_test == 0) fail("data.n_test", "must be >= 1");
    if (cfg.data.class_separation < 0.0) fail("data.class_separation", "must be >= 0");
    if (cfg.data.init_std <= 0.0) fail("data.init_std", "must be > 0");
    if (cfg.model.hidden < 1) fail("model.hidden", "must be >= 1");
    if (cfg.train.learning_rate <= 0.0) fail("train.learning_rate", "must be > 0");
    if (cfg.train.epochs < 1) fail("train.epochs", "must be >= 1");
    if (cfg.train.batch_size < 1) fail("train.batch_size", "must be >= 1");
    if (cfg.c0 <= 0.0) fail("c0", "must be > 0");
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("parse_config: cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_string(buf.str());
}

ExperimentConfig parse_config_string(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ValidationError("config: top level must be an object");
    return from_json(root);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    return to_json(cfg).dump(2);
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return to_json(a) == to_json(b);
}

}  // namespace baybfed
