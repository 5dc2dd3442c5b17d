#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "codescope/corpus/generator.hpp"

namespace codescope::corpus {

/// Word-level vocabulary: one lexer token <-> one model token, with NEWLINE
/// as a real token so line boundaries survive encoding. Ids are dense with
/// the special tokens at the lowest ids.
class Vocabulary {
 public:
  static constexpr int64_t kPad = 0;
  static constexpr int64_t kUnk = 1;
  static constexpr int64_t kCls = 2;
  static constexpr int64_t kSep = 3;
  static constexpr int64_t kMask = 4;
  static constexpr int64_t kNewline = 5;
  static constexpr int64_t kNumSpecials = 6;

  /// Tokens from both code and doc fields; tokens below min_count dropped.
  /// The result is independent of record order (lexicographic id order).
  static Vocabulary build(const std::vector<CorpusRecord>& corpus, int min_count = 1);

  int64_t size() const { return static_cast<int64_t>(tokens_.size()); }
  int64_t id(const std::string& token) const;  // kUnk when absent
  bool contains(const std::string& token) const;
  const std::string& token(int64_t id) const;

  /// Word tokens + NEWLINE markers, no CLS/SEP framing (callers frame).
  std::vector<int64_t> encode(const std::string& text) const;
  /// Inverse at the token level: one line per NEWLINE, tokens space-joined.
  std::string decode(const std::vector<int64_t>& ids) const;

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  Vocabulary();
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int64_t> index_;
  void push(const std::string& tok);
};

}  // namespace codescope::corpus
