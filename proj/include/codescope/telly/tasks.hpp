#pragma once

#include <map>
#include <string>
#include <vector>

#include "codescope/corpus/vocab.hpp"
#include "codescope/model/encoder.hpp"
#include "codescope/telly/freeze.hpp"
#include "codescope/telly/metrics.hpp"

namespace codescope::telly {

enum class TaskKind { Search, Clone, Completion };
const char* task_name(TaskKind k);

struct SearchExample {
  std::vector<int64_t> code;
  std::vector<int64_t> query;
};

struct CloneExample {
  std::vector<int64_t> a, b;
  int label = 0;
};

struct CompletionExample {
  std::vector<int64_t> context;     // tokens through the first line break
  std::vector<int64_t> full;        // whole function, for training
  std::string target_line;          // decoded second line (reference)
};

template <class E>
struct TaskSplits {
  std::vector<E> train, valid, test;
};

/// Builders truncate encoded sequences to max_len encoder positions.
TaskSplits<SearchExample> build_search_data(
    const std::vector<corpus::CorpusRecord>& records,
    const corpus::Vocabulary& vocab, int64_t max_len = 128);

/// Balanced clone pairs: positives within a semantic cluster, negatives
/// across clusters; variants are partitioned across splits first.
TaskSplits<CloneExample> build_clone_data(
    const std::vector<std::vector<corpus::CorpusRecord>>& clusters,
    const corpus::Vocabulary& vocab, nc::Rng& rng, int64_t max_len = 128);

TaskSplits<CompletionExample> build_completion_data(
    const std::vector<corpus::CorpusRecord>& records,
    const corpus::Vocabulary& vocab, int64_t max_len = 128);

struct FinetuneConfig {
  double lr = 1e-4;
  int batch_size = 8;
  int max_epochs = 30;
  int patience = 3;
  double tau = 0.05;  // contrastive temperature for search
  std::vector<uint64_t> seeds = {0, 1, 2};
  bool capture_timing = true;
  int timed_epochs = 3;  // median over these (after one warm-up epoch)
  int64_t newline_id = corpus::Vocabulary::kNewline;
  int max_generate = 32;
};

struct RunReport {
  std::string task;
  int k = -1;  // -1 = base full fine-tune
  int64_t params_trainable = 0;  // encoder trainable + head
  int64_t head_params = 0;
  double params_reduction_pct = 0.0;  // vs base trainable, timing-independent
  double epoch_seconds = 0.0;         // median of timed epochs, mean over seeds
  double convergence_seconds = 0.0;   // to the early-stopping best epoch
  std::map<std::string, double> metrics;  // seed-averaged
  std::map<std::string, double> delta_pct;  // vs base, filled by sweep
  std::vector<uint64_t> seeds;
  bool failed = false;
  std::string error;
};

/// k = -1 trains everything (base); k in [0, L] freezes groups 0..k and
/// runs the frozen prefix without gradient work. Frozen-group checksums are
/// verified after every seed's run (hard failure on drift). When `trained`
/// is non-null it receives the first seed's best model (with head params).
RunReport finetune_search(const model::EncoderParams& base,
                          const TaskSplits<SearchExample>& data, int k,
                          const FinetuneConfig& cfg,
                          model::EncoderParams* trained = nullptr);

RunReport finetune_clone(const model::EncoderParams& base,
                         const TaskSplits<CloneExample>& data, int k,
                         const FinetuneConfig& cfg,
                         model::EncoderParams* trained = nullptr);

RunReport finetune_completion(const model::EncoderParams& base,
                              const TaskSplits<CompletionExample>& data, int k,
                              const FinetuneConfig& cfg,
                              const corpus::Vocabulary& vocab,
                              model::EncoderParams* trained = nullptr);

/// Cosine similarity of mean-pooled top-layer representations.
double search_score(const model::EncoderParams& m, const std::vector<int64_t>& code,
                    const std::vector<int64_t>& query);

/// Clone probability from a trained model+head parameter set (head.* names).
double clone_probability(const model::EncoderParams& m_with_head,
                         const std::vector<int64_t>& a,
                         const std::vector<int64_t>& b);

/// Greedy causal decoding until the newline token or max_len; context is
/// left-truncated to max_positions if necessary.
std::vector<int64_t> complete_line(const model::EncoderParams& m_with_head,
                                   const std::vector<int64_t>& context,
                                   int64_t newline_id, int max_len);

/// 1-based retrieval ranks of each query's own code among all test codes.
std::vector<int> search_ranks(const model::EncoderParams& m,
                              const std::vector<SearchExample>& examples);

std::string run_report_json(const RunReport& r, const std::string& config_hash);

}  // namespace codescope::telly
