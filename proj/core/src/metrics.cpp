#include "baybfed/metrics.hpp"

#include "baybfed/errors.hpp"

namespace baybfed {

std::optional<double> tpr(const std::vector<bool>& kept, const std::vector<bool>& truth_malicious) {
    if (kept.size() != truth_malicious.size()) throw InvalidInputError("tpr: length mismatch");
    std::size_t tp = 0, fn = 0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (!truth_malicious[i]) continue;
        if (kept[i]) {
            ++fn;
        } else {
            ++tp;
        }
    }
    if (tp + fn == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

std::optional<double> tnr(const std::vector<bool>& kept, const std::vector<bool>& truth_malicious) {
    if (kept.size() != truth_malicious.size()) throw InvalidInputError("tnr: length mismatch");
    std::size_t tn = 0, fp = 0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (truth_malicious[i]) continue;
        if (kept[i]) {
            ++tn;
        } else {
            ++fp;
        }
    }
    if (tn + fp == 0) return std::nullopt;
    return static_cast<double>(tn) / static_cast<double>(tn + fp);
}

double backdoor_accuracy(const TinyModel& model, const Dataset& clean_test,
                         const TriggerSpec& trig) {
    if (clean_test.size() == 0) throw InvalidInputError("backdoor_accuracy: empty test set");
    std::size_t eligible = 0, hits = 0;
    std::vector<double> row;
    for (std::size_t i = 0; i < clean_test.size(); ++i) {
        if (clean_test.labels[i] == trig.target_label) continue;
        ++eligible;
        row = clean_test.features[i];
        for (int c : trig.trigger_coords) row[static_cast<std::size_t>(c)] = trig.trigger_value;
        if (model.predict(row) == trig.target_label) ++hits;
    }
    if (eligible == 0) return 0.0;  // every sample already carries the target label
    return static_cast<double>(hits) / static_cast<double>(eligible);
}

double main_accuracy(const TinyModel& model, const Dataset& clean_test) {
    if (clean_test.size() == 0) throw InvalidInputError("main_accuracy: empty test set");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < clean_test.size(); ++i) {
        if (model.predict(clean_test.features[i]) == clean_test.labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(clean_test.size());
}

}  // namespace baybfed
