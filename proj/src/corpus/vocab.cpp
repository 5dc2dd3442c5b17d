#include "codescope/corpus/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

#include "codescope/codeprops/lexer.hpp"

namespace codescope::corpus {

namespace {

const char* kSpecialNames[] = {"<pad>", "<unk>", "<cls>", "<sep>", "<mask>",
                               "<newline>"};
const char* kFileHeader = "codescope-vocab v1";

// Word stream of one text: lexer tokens plus NEWLINE markers.
std::vector<std::string> words_of(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& lt : props::lex_lines(text)) {
    if (lt.kind == props::LineToken::Tok) out.push_back(lt.tok.text);
    else if (lt.kind == props::LineToken::Newline)
      out.push_back(kSpecialNames[Vocabulary::kNewline]);
  }
  return out;
}

}  // namespace

Vocabulary::Vocabulary() {
  for (const char* s : kSpecialNames) push(s);
}

void Vocabulary::push(const std::string& tok) {
  index_.emplace(tok, static_cast<int64_t>(tokens_.size()));
  tokens_.push_back(tok);
}

Vocabulary Vocabulary::build(const std::vector<CorpusRecord>& corpus, int min_count) {
  // std::map keeps the token order lexicographic, so the result does not
  // depend on record order.
  std::map<std::string, int64_t> counts;
  for (const auto& r : corpus) {
    for (const auto& w : words_of(r.code)) ++counts[w];
    for (const auto& w : words_of(r.doc)) ++counts[w];
  }
  Vocabulary v;
  for (const auto& [tok, n] : counts) {
    if (n < min_count) continue;
    if (v.index_.count(tok)) continue;  // a special surfaced in the text
    v.push(tok);
  }
  return v;
}

int64_t Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return index_.count(token) != 0;
}

const std::string& Vocabulary::token(int64_t id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("vocab id out of range");
  return tokens_[static_cast<size_t>(id)];
}

std::vector<int64_t> Vocabulary::encode(const std::string& text) const {
  std::vector<int64_t> ids;
  for (const auto& w : words_of(text)) ids.push_back(id(w));
  return ids;
}

std::string Vocabulary::decode(const std::vector<int64_t>& ids) const {
  std::string out;
  bool line_start = true;
  for (int64_t i : ids) {
    if (i == kPad) continue;
    if (i == kNewline) {
      out += "\n";
      line_start = true;
      continue;
    }
    if (!line_start) out += " ";
    out += token(i);
    line_start = false;
  }
  return out;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << kFileHeader << "\n";
  for (const auto& t : tokens_) out << t << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kFileHeader)
    throw std::runtime_error("bad vocabulary file header in " + path);
  Vocabulary v;
  size_t idx = 0;
  while (std::getline(in, line)) {
    if (idx < static_cast<size_t>(kNumSpecials)) {
      if (line != v.tokens_[idx])
        throw std::runtime_error("vocabulary file specials mismatch");
    } else {
      v.push(line);
    }
    ++idx;
  }
  if (idx < static_cast<size_t>(kNumSpecials))
    throw std::runtime_error("vocabulary file truncated");
  return v;
}

}  // namespace codescope::corpus
