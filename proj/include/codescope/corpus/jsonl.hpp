#pragma once

#include <string>
#include <vector>

#include "codescope/corpus/generator.hpp"

namespace codescope::corpus {

struct JsonlResult {
  std::vector<CorpusRecord> records;
  int skipped = 0;  // malformed or incomplete lines
};

/// Reads one JSON object per line. Field aliases: "code"|"function",
/// "docstring"|"doc". Lines that fail to parse or lack code are skipped
/// and counted. Throws std::runtime_error if the file cannot be opened.
JsonlResult read_jsonl(const std::string& path);

void write_jsonl(const std::string& path, const std::vector<CorpusRecord>& records);

}  // namespace codescope::corpus
