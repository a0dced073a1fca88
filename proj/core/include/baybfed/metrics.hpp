#pragma once

#include <optional>
#include <vector>

#include "baybfed/attacks.hpp"
#include "baybfed/dataset.hpp"
#include "baybfed/mlp.hpp"

namespace baybfed {

// Per-round evaluation snapshot. tpr/tnr are empty when the round had no
// malicious (resp. benign) clients; they are never silently reported as 0.
struct RoundMetrics {
    int round = 0;
    std::optional<double> tpr;
    std::optional<double> tnr;
    double ba = 0.0;
    double ma = 0.0;
    std::size_t kept_count = 0;
};

// Fraction of malicious updates that were filtered out: TP / (TP + FN).
std::optional<double> tpr(const std::vector<bool>& kept, const std::vector<bool>& truth_malicious);

// Fraction of benign updates that were kept: TN / (TN + FP).
std::optional<double> tnr(const std::vector<bool>& kept, const std::vector<bool>& truth_malicious);

// Fraction of trigger-stamped test samples predicted as the target label.
// Samples whose true label already equals the target are excluded so ordinary
// misclassifications cannot inflate the result.
double backdoor_accuracy(const TinyModel& model, const Dataset& clean_test,
                         const TriggerSpec& trig);

// Top-1 accuracy on the clean test set.
double main_accuracy(const TinyModel& model, const Dataset& clean_test);

}  // namespace baybfed
