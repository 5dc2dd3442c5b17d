#include "codescope/corpus/jsonl.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace codescope::corpus {

using nlohmann::json;

JsonlResult read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  JsonlResult res;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      ++res.skipped;
      continue;
    }
    CorpusRecord r;
    if (j.contains("code") && j["code"].is_string())
      r.code = j["code"].get<std::string>();
    else if (j.contains("function") && j["function"].is_string())
      r.code = j["function"].get<std::string>();
    if (r.code.empty()) {
      ++res.skipped;
      continue;
    }
    if (j.contains("docstring") && j["docstring"].is_string())
      r.doc = j["docstring"].get<std::string>();
    else if (j.contains("doc") && j["doc"].is_string())
      r.doc = j["doc"].get<std::string>();
    if (j.contains("lang") && j["lang"].is_string())
      r.lang = j["lang"].get<std::string>();
    if (j.contains("tag") && j["tag"].is_string())
      r.tag = j["tag"].get<std::string>();
    if (j.contains("complexity") && j["complexity"].is_number_integer())
      r.complexity = j["complexity"].get<int>();
    r.id = content_hash(r.code, r.doc);
    res.records.push_back(std::move(r));
  }
  return res;
}

void write_jsonl(const std::string& path, const std::vector<CorpusRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& r : records) {
    json j;
    j["code"] = r.code;
    j["docstring"] = r.doc;
    j["lang"] = r.lang;
    j["id"] = r.id;
    if (!r.tag.empty()) j["tag"] = r.tag;
    if (r.complexity > 0) j["complexity"] = r.complexity;
    out << j.dump() << "\n";
  }
}

}  // namespace codescope::corpus
