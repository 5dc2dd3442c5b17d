#include "codescope/telly/sweep.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace codescope::telly {

SweepResult run_sweep(const std::string& task,
                      const std::function<RunReport(int)>& run_one,
                      const std::vector<int>& ks) {
  SweepResult out;
  out.task = task;
  std::vector<int> levels;
  levels.push_back(-1);
  levels.insert(levels.end(), ks.begin(), ks.end());
  for (int k : levels) {
    RunReport rep;
    try {
      rep = run_one(k);
    } catch (const std::exception& e) {
      rep.task = task;
      rep.k = k;
      rep.failed = true;
      rep.error = e.what();
    }
    out.runs.push_back(std::move(rep));
  }
  const RunReport& base = out.runs.front();
  for (auto& r : out.runs) {
    if (r.failed || base.failed) continue;
    if (base.params_trainable > 0)
      r.params_reduction_pct =
          100.0 * static_cast<double>(base.params_trainable - r.params_trainable) /
          static_cast<double>(base.params_trainable);
    for (const auto& [name, v] : r.metrics) {
      auto it = base.metrics.find(name);
      if (it != base.metrics.end() && std::abs(it->second) > 1e-12)
        r.delta_pct[name] = 100.0 * (v - it->second) / it->second;
    }
  }
  return out;
}

SweepResult sweep_search(const model::EncoderParams& base,
                         const TaskSplits<SearchExample>& data,
                         const std::vector<int>& ks, const FinetuneConfig& cfg) {
  return run_sweep(task_name(TaskKind::Search),
                   [&](int k) { return finetune_search(base, data, k, cfg); }, ks);
}

SweepResult sweep_clone(const model::EncoderParams& base,
                        const TaskSplits<CloneExample>& data,
                        const std::vector<int>& ks, const FinetuneConfig& cfg) {
  return run_sweep(task_name(TaskKind::Clone),
                   [&](int k) { return finetune_clone(base, data, k, cfg); }, ks);
}

SweepResult sweep_completion(const model::EncoderParams& base,
                             const TaskSplits<CompletionExample>& data,
                             const std::vector<int>& ks, const FinetuneConfig& cfg,
                             const corpus::Vocabulary& vocab) {
  return run_sweep(
      task_name(TaskKind::Completion),
      [&](int k) { return finetune_completion(base, data, k, cfg, vocab); }, ks);
}

std::vector<int> default_freeze_levels(const model::ModelConfig& config) {
  std::vector<int> ks;
  for (int k = 0; k < config.num_layers; ++k) ks.push_back(k);
  return ks;
}

namespace {
std::vector<std::string> metric_names(const SweepResult& r) {
  std::set<std::string> names;
  for (const auto& run : r.runs)
    for (const auto& [n, _] : run.metrics) names.insert(n);
  return {names.begin(), names.end()};
}
}  // namespace

std::string sweep_csv(const SweepResult& r) {
  auto names = metric_names(r);
  std::ostringstream os;
  os << "model,K,params_trainable,params_reduction_pct,epoch_seconds,"
        "convergence_seconds";
  for (const auto& n : names) os << "," << n;
  for (const auto& n : names) os << ",delta_" << n << "_pct";
  os << ",seeds\n";
  for (const auto& run : r.runs) {
    os << r.task << "," << (run.k < 0 ? "base" : std::to_string(run.k)) << ","
       << run.params_trainable << "," << run.params_reduction_pct << ","
       << run.epoch_seconds << "," << run.convergence_seconds;
    for (const auto& n : names) {
      auto it = run.metrics.find(n);
      os << ",";
      if (it != run.metrics.end()) os << it->second;
    }
    for (const auto& n : names) {
      auto it = run.delta_pct.find(n);
      os << ",";
      if (it != run.delta_pct.end()) os << it->second;
    }
    os << ",\"";
    for (size_t i = 0; i < run.seeds.size(); ++i)
      os << (i ? " " : "") << run.seeds[i];
    os << "\"\n";
  }
  return os.str();
}

std::string sweep_json(const SweepResult& r, const std::string& config_hash) {
  nlohmann::json j;
  j["task"] = r.task;
  j["config_hash"] = config_hash;
  j["runs"] = nlohmann::json::array();
  for (const auto& run : r.runs)
    j["runs"].push_back(nlohmann::json::parse(run_report_json(run, config_hash)));
  return j.dump(2);
}

}  // namespace codescope::telly
