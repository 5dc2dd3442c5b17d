#include "codescope/util/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace codescope::util {

Config Config::defaults() {
  Config c;
  c.kv_ = {
      {"seed", "0"},
      {"seeds", "0,1,2"},
      {"precision", "32"},
      {"scale", "desk"},            // desk | full (full: accounting only)
      {"corpus", ""},               // JSONL path; empty = built-in generator
      {"corpus.programs", "300"},
      {"corpus.clusters", "14"},
      {"corpus.variants", "10"},
      {"vocab.min_count", "1"},
      {"pretrain.steps", "2000"},
      {"pretrain.batch", "16"},
      {"pretrain.lr", "3e-4"},
      {"pretrain.mask_prob", "0.15"},
      {"pretrain.align_steps", "1000"},
      {"pretrain.align_lr", "1e-4"},
      {"pretrain.align_tau", "0.05"},
      {"probe.lr", "1e-2"},
      {"probe.batch", "32"},
      {"probe.max_epochs", "150"},
      {"probe.patience", "30"},
      {"probe.tau", "0.05"},
      {"finetune.lr", "3e-4"},
      {"finetune.batch", "8"},
      {"finetune.max_epochs", "20"},
      {"finetune.patience", "4"},
      {"finetune.tau", "0.05"},
      {"freeze", "0"},
      {"rsa.n", "50"},
      {"noisy.timed_epochs", "3"},
  };
  return c;
}

Config Config::from_file(const std::string& path) {
  Config c = defaults();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t b = line.find_last_not_of(" \t\r");
    line = line.substr(a, b - a + 1);
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key=value");
    auto trim = [](std::string s) {
      size_t x = s.find_first_not_of(" \t");
      size_t y = s.find_last_not_of(" \t");
      return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!c.kv_.count(key))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
    c.kv_[key] = val;
  }
  return c;
}

const std::string& Config::get(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw std::out_of_range("unknown config key: " + key);
  return it->second;
}

int64_t Config::get_int(const std::string& key) const {
  return std::stoll(get(key));
}

double Config::get_double(const std::string& key) const {
  return std::stod(get(key));
}

std::vector<uint64_t> Config::get_seeds() const {
  std::vector<uint64_t> out;
  std::stringstream ss(get("seeds"));
  std::string part;
  while (std::getline(ss, part, ','))
    if (!part.empty()) out.push_back(std::stoull(part));
  if (out.empty()) throw std::runtime_error("config: empty seed list");
  return out;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!kv_.count(key)) throw std::out_of_range("unknown config key: " + key);
  kv_[key] = value;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::hash() const {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : kv_) {  // std::map iterates sorted
    if (k.rfind("noisy.", 0) == 0) continue;
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string Config::to_string() const {
  std::ostringstream os;
  for (const auto& [k, v] : kv_) os << k << "=" << v << "\n";
  return os.str();
}

std::string output_root(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("CODESCOPE_OUT"); env && *env) return env;
  return "out";
}

}  // namespace codescope::util
