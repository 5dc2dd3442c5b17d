#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "codescope/codeprops/lexer.hpp"
#include "codescope/numcore/rng.hpp"

namespace codescope::corpus {

struct CorpusRecord {
  std::string code;
  std::string doc;
  std::string lang = "minipy";
  std::string id;  // content hash
  // generator-side metadata
  std::string tag;       // semantic template tag
  int complexity = 0;    // cyclomatic complexity by construction
};

std::string content_hash(const std::string& code, const std::string& doc);

/// One generated program together with the generator's own token emission
/// labels (the independent oracle for lexical classification).
struct EmittedProgram {
  std::string code;
  std::string doc;
  std::string tag;
  int complexity = 0;
  std::vector<std::pair<std::string, props::TokenClass>> emission_labels;
};

EmittedProgram generate_program(nc::Rng& rng);

/// Deterministic toy corpus: grammar-valid MiniPy functions with templated
/// doc strings and ground-truth metadata.
std::vector<CorpusRecord> generate_toy_corpus(uint64_t seed, int size);

/// P problems x S semantics-preserving variants (renames, independent
/// statement order, loop-form rewrites). Cluster id == problem index.
std::vector<std::vector<CorpusRecord>> generate_semantic_clusters(int problems,
                                                                  int variants,
                                                                  uint64_t seed);

int template_count();

}  // namespace codescope::corpus
