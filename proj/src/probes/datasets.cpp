#include "codescope/probes/datasets.hpp"

#include <stdexcept>

#include "codescope/codeprops/ast.hpp"
#include "codescope/codeprops/cfg.hpp"
#include "codescope/codeprops/parser.hpp"

namespace codescope::probes {

const char* probe_task_name(ProbeTask t) {
  switch (t) {
    case ProbeTask::Lexical: return "lexical";
    case ProbeTask::Syntactic: return "syntactic";
    case ProbeTask::Semantic: return "semantic";
    case ProbeTask::Structural: return "structural";
  }
  return "?";
}

namespace {

std::string shape_only_serialized(const std::string& code) {
  auto ast = props::parse(code);
  auto shape = props::ast_only(*ast);
  return props::serialize_ast(*shape);
}

void clamp(std::vector<int64_t>& toks, int64_t max_len) {
  if (max_len > 0 && static_cast<int64_t>(toks.size()) > max_len)
    toks.resize(static_cast<size_t>(max_len));
}

// Assigns records to train/valid/test via the shared hash-based splitter.
template <class MakeExample>
void fill_splits(const std::vector<corpus::CorpusRecord>& records,
                 ProbeDataset& ds, MakeExample make) {
  corpus::Splits sp = corpus::make_splits(records, {});
  for (const auto& r : sp.train) ds.train.push_back(make(r));
  for (const auto& r : sp.valid) ds.valid.push_back(make(r));
  for (const auto& r : sp.test) ds.test.push_back(make(r));
}

}  // namespace

std::vector<corpus::CorpusRecord> with_ast_records(
    const std::vector<corpus::CorpusRecord>& records) {
  std::vector<corpus::CorpusRecord> out = records;
  for (const auto& r : records) {
    corpus::CorpusRecord a;
    a.code = shape_only_serialized(r.code);
    a.id = corpus::content_hash(a.code, "");
    a.tag = "ast";
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<std::vector<int64_t>> build_mlm_sequences(
    const std::vector<corpus::CorpusRecord>& records,
    const corpus::Vocabulary& vocab, int64_t max_len) {
  std::vector<std::vector<int64_t>> seqs;
  seqs.reserve(records.size() * 4);
  for (const auto& r : records) {
    auto code = vocab.encode(r.code);
    clamp(code, max_len);
    auto shape = vocab.encode(shape_only_serialized(r.code));
    clamp(shape, max_len);
    // paired half/half sequences: code tokens attend to syntax-tree tokens
    // (ties the two token spaces together) and to docstring tokens (gives
    // every layer experience with natural-language inputs)
    auto pair = code;
    clamp(pair, max_len / 2);
    auto half = shape;
    clamp(half, max_len / 2);
    pair.insert(pair.end(), half.begin(), half.end());
    seqs.push_back(code);
    seqs.push_back(std::move(shape));
    seqs.push_back(std::move(pair));
    if (!r.doc.empty()) {
      auto doc = vocab.encode(r.doc);
      clamp(doc, max_len / 2);
      clamp(code, max_len / 2);
      doc.insert(doc.end(), code.begin(), code.end());
      seqs.push_back(std::move(doc));
    }
  }
  return seqs;
}

std::vector<std::pair<std::vector<int64_t>, std::vector<int64_t>>>
build_align_pairs(const std::vector<corpus::CorpusRecord>& records,
                  const corpus::Vocabulary& vocab, int64_t max_len) {
  std::vector<std::pair<std::vector<int64_t>, std::vector<int64_t>>> pairs;
  for (const auto& r : records) {
    if (r.doc.empty()) continue;
    auto doc = vocab.encode(r.doc);
    auto code = vocab.encode(r.code);
    clamp(doc, max_len);
    clamp(code, max_len);
    if (!doc.empty() && !code.empty())
      pairs.emplace_back(std::move(doc), std::move(code));
  }
  return pairs;
}

ProbeDataset build_lexical_dataset(const std::vector<corpus::CorpusRecord>& records,
                                   const corpus::Vocabulary& vocab,
                                   int64_t max_len) {
  ProbeDataset ds;
  ds.task = ProbeTask::Lexical;
  ds.num_classes = 5;
  fill_splits(records, ds, [&](const corpus::CorpusRecord& r) {
    ProbeExample ex;
    ex.tokens = vocab.encode(r.code);
    // Re-walk the line lexer so labels align position-for-position with
    // the encoding (one lexer token <-> one model token).
    for (const auto& lt : props::lex_lines(r.code)) {
      if (lt.kind == props::LineToken::Tok)
        ex.token_labels.push_back(static_cast<int>(lt.tok.cls));
      else if (lt.kind == props::LineToken::Newline)
        ex.token_labels.push_back(-1);
    }
    if (ex.token_labels.size() != ex.tokens.size())
      throw std::logic_error("lexical label/token misalignment");
    clamp(ex.tokens, max_len);
    ex.token_labels.resize(ex.tokens.size());
    return ex;
  });
  return ds;
}

ProbeDataset build_syntactic_dataset(const std::vector<corpus::CorpusRecord>& records,
                                     const corpus::Vocabulary& vocab, nc::Rng& rng,
                                     int64_t max_len) {
  if (records.size() < 2)
    throw std::invalid_argument("need at least 2 snippets for pair negatives");
  ProbeDataset ds;
  ds.task = ProbeTask::Syntactic;
  ds.num_classes = 2;
  // shapes as the encoder will see them (encoded and truncated), so the
  // collision check below matches what is actually distinguishable
  std::vector<std::vector<int64_t>> shapes(records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    shapes[i] = vocab.encode(shape_only_serialized(records[i].code));
    clamp(shapes[i], max_len);
  }

  // Pair up within the same split so splits stay disjoint at snippet level.
  corpus::Splits sp = corpus::make_splits(records, {});
  auto index_of = [&](const corpus::CorpusRecord& r) {
    for (size_t i = 0; i < records.size(); ++i)
      if (records[i].id == r.id) return i;
    throw std::logic_error("record not found");
  };
  auto build_part = [&](const std::vector<corpus::CorpusRecord>& part,
                        std::vector<ProbeExample>& out) {
    for (const auto& r : part) {
      size_t self = index_of(r);
      ProbeExample pos;
      pos.tokens = vocab.encode(r.code);
      clamp(pos.tokens, max_len);
      pos.tokens_b = shapes[self];
      pos.label = 1;
      out.push_back(std::move(pos));
      // negative: a different snippet's shape, skipping shape collisions
      for (int attempt = 0; attempt < 64; ++attempt) {
        size_t j = static_cast<size_t>(
            rng.uniform_int(static_cast<int64_t>(records.size())));
        if (j == self || shapes[j] == shapes[self]) continue;
        ProbeExample neg;
        neg.tokens = vocab.encode(r.code);
        clamp(neg.tokens, max_len);
        neg.tokens_b = shapes[j];
        neg.label = 0;
        out.push_back(std::move(neg));
        break;
      }
    }
    // enforce exact balance (a pathological corpus could starve negatives)
    size_t pos_n = 0, neg_n = 0;
    for (const auto& e : out) (e.label ? pos_n : neg_n)++;
    while (pos_n > neg_n) {
      for (size_t i = 0; i < out.size() && pos_n > neg_n; ++i)
        if (out[i].label == 1) {
          out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
          --pos_n;
        }
    }
  };
  build_part(sp.train, ds.train);
  build_part(sp.valid, ds.valid);
  build_part(sp.test, ds.test);
  return ds;
}

ProbeDataset build_semantic_dataset(
    const std::vector<std::vector<corpus::CorpusRecord>>& clusters,
    const corpus::Vocabulary& vocab, int64_t max_len) {
  ProbeDataset ds;
  ds.task = ProbeTask::Semantic;
  ds.num_classes = static_cast<int>(clusters.size());
  for (size_t c = 0; c < clusters.size(); ++c) {
    const auto& cluster = clusters[c];
    for (size_t i = 0; i < cluster.size(); ++i) {
      ProbeExample ex;
      ex.tokens = vocab.encode(cluster[i].code);
      clamp(ex.tokens, max_len);
      ex.label = static_cast<int>(c);
      // deterministic per-cluster round-robin: ~20% valid, ~20% test,
      // guaranteeing every cluster reaches every split for S >= 5
      if (i % 5 == 3) ds.valid.push_back(std::move(ex));
      else if (i % 5 == 4) ds.test.push_back(std::move(ex));
      else ds.train.push_back(std::move(ex));
    }
  }
  return ds;
}

ProbeDataset build_structural_dataset(
    const std::vector<corpus::CorpusRecord>& records,
    const corpus::Vocabulary& vocab, int64_t max_len) {
  ProbeDataset ds;
  ds.task = ProbeTask::Structural;
  ds.num_classes = 10;
  fill_splits(records, ds, [&](const corpus::CorpusRecord& r) {
    ProbeExample ex;
    ex.tokens = vocab.encode(r.code);
    clamp(ex.tokens, max_len);
    auto fn = props::parse_function(r.code);
    int m = props::cyclomatic(props::build_cfg(*fn));
    ex.label = std::min(m, 10) - 1;  // buckets 1..9, >=10
    return ex;
  });
  return ds;
}

}  // namespace codescope::probes
