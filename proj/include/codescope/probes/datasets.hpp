#pragma once

#include <string>
#include <vector>

#include "codescope/corpus/splits.hpp"
#include "codescope/corpus/vocab.hpp"
#include "codescope/numcore/rng.hpp"

namespace codescope::probes {

enum class ProbeTask { Lexical, Syntactic, Semantic, Structural };

const char* probe_task_name(ProbeTask t);

struct ProbeExample {
  std::vector<int64_t> tokens;    // encoded code
  std::vector<int64_t> tokens_b;  // encoded serialized shape-only AST (pair tasks)
  int label = 0;                  // class / pair truth / cluster id / bucket
  std::vector<int> token_labels;  // per-position lexical class; -1 = not a code token
};

struct ProbeDataset {
  ProbeTask task = ProbeTask::Lexical;
  int num_classes = 0;
  std::vector<ProbeExample> train, valid, test;
};

/// Appends one synthetic record per input holding the serialized shape-only
/// AST, so vocabulary building covers AST node-kind tokens as well.
std::vector<corpus::CorpusRecord> with_ast_records(
    const std::vector<corpus::CorpusRecord>& records);

/// Masked-LM pretraining sequences: for every record, its code, its
/// serialized shape-only AST, and a paired half-code/half-shape sequence so
/// the two token spaces share attention context. Truncated to max_len.
std::vector<std::vector<int64_t>> build_mlm_sequences(
    const std::vector<corpus::CorpusRecord>& records,
    const corpus::Vocabulary& vocab, int64_t max_len = 128);

/// (docstring, code) sequence pairs for the bimodal alignment stage of
/// pretraining; records without a docstring are skipped.
std::vector<std::pair<std::vector<int64_t>, std::vector<int64_t>>>
build_align_pairs(const std::vector<corpus::CorpusRecord>& records,
                  const corpus::Vocabulary& vocab, int64_t max_len = 64);

/// Sequences are truncated to max_len positions so they fit the encoder's
/// position table (lexical labels stay aligned with the truncation).

/// Per-token class labels, aligned 1:1 with the encoder positions produced
/// by Vocabulary::encode (NEWLINE positions carry label -1).
ProbeDataset build_lexical_dataset(const std::vector<corpus::CorpusRecord>& records,
                                   const corpus::Vocabulary& vocab,
                                   int64_t max_len = 128);

/// Balanced (code, shape-only AST) pairs; negatives sampled from snippets
/// whose serialized shape differs from the code's own.
ProbeDataset build_syntactic_dataset(const std::vector<corpus::CorpusRecord>& records,
                                     const corpus::Vocabulary& vocab, nc::Rng& rng,
                                     int64_t max_len = 128);

/// Clusters of semantics-preserving variants; label = problem index.
ProbeDataset build_semantic_dataset(
    const std::vector<std::vector<corpus::CorpusRecord>>& clusters,
    const corpus::Vocabulary& vocab, int64_t max_len = 128);

/// Cyclomatic-complexity buckets {1..9, >=10} -> labels 0..9, computed from
/// each function's CFG.
ProbeDataset build_structural_dataset(
    const std::vector<corpus::CorpusRecord>& records,
    const corpus::Vocabulary& vocab, int64_t max_len = 128);

}  // namespace codescope::probes
