#pragma once

#include <functional>
#include <string>
#include <vector>

#include "codescope/telly/tasks.hpp"

namespace codescope::telly {

/// Result of fine-tuning one task at every requested freeze level plus the
/// unfrozen baseline. runs[0] is always the baseline (k = -1).
struct SweepResult {
  std::string task;
  std::vector<RunReport> runs;
};

/// Runs `run_one(k)` for k = -1 then each entry of `ks`. A throwing run is
/// recorded as failed (with its message) and the sweep continues. Percentage
/// deltas and parameter reductions are computed against the baseline run.
SweepResult run_sweep(const std::string& task,
                      const std::function<RunReport(int)>& run_one,
                      const std::vector<int>& ks);

SweepResult sweep_search(const model::EncoderParams& base,
                         const TaskSplits<SearchExample>& data,
                         const std::vector<int>& ks, const FinetuneConfig& cfg);

SweepResult sweep_clone(const model::EncoderParams& base,
                        const TaskSplits<CloneExample>& data,
                        const std::vector<int>& ks, const FinetuneConfig& cfg);

SweepResult sweep_completion(const model::EncoderParams& base,
                             const TaskSplits<CompletionExample>& data,
                             const std::vector<int>& ks, const FinetuneConfig& cfg,
                             const corpus::Vocabulary& vocab);

/// Default freeze levels for a model: 0..L-1.
std::vector<int> default_freeze_levels(const model::ModelConfig& config);

/// CSV rows: model,K,params_trainable,params_reduction_pct,epoch_seconds,
/// convergence_seconds,<metrics...>,<delta_pct...>,seeds. Metric columns are
/// the union over runs, in sorted name order.
std::string sweep_csv(const SweepResult& r);

std::string sweep_json(const SweepResult& r, const std::string& config_hash);

}  // namespace codescope::telly
