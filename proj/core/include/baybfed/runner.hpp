#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "baybfed/simulation.hpp"

namespace baybfed {

// Sweepable experiment parameters.
enum class SweepAxis {
    pmr,
    non_iid,
    pdr,
    alpha,
    n_clients,
};

SweepAxis sweep_axis_from_name(const std::string& name);
std::string sweep_axis_name(SweepAxis axis);

// The trace rows as written to trace.csv, one per client per round:
//   round,client_id,is_malicious,max_jd,assigned_cluster,kept
// Column order and formatting are frozen; identical runs produce identical bytes.
std::string trace_csv(const Report& report);

// summary.json content: per-round metrics (undefined rates as null), final
// metrics, skipped rounds, the resolved config, and the seed.
std::string summary_json(const Report& report);

// Runs one experiment and writes trace.csv + summary.json under out_dir.
// Throws IoError when the directory cannot be created or written.
Report cmd_run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct SweepOutcome {
    std::size_t failures = 0;  // sub-runs that threw; partial results are kept
};

// Runs one experiment per axis value under out_dir/<axis>_<value>/ with
// derived seeds and writes sweep_summary.csv mapping each value to its final
// metrics. Failed sub-runs are listed with status "failed".
SweepOutcome cmd_sweep(const ExperimentConfig& base, SweepAxis axis,
                       const std::vector<double>& values, const std::filesystem::path& out_dir);

// Fast invariant checks (divergence axioms, posterior arithmetic, filter
// rules); returns the number of failed checks and prints one line per check.
int selftest();

}  // namespace baybfed
