#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace codescope::util {

/// Flat key=value experiment configuration. Values are kept as strings;
/// typed accessors parse on demand. Keys prefixed "noisy." never enter the
/// reproducibility hash (timing knobs live there).
class Config {
 public:
  static Config defaults();
  /// Parses '#'-comment / key=value lines; unknown keys are rejected so
  /// typos surface early. Starts from defaults().
  static Config from_file(const std::string& path);

  const std::string& get(const std::string& key) const;
  int64_t get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::vector<uint64_t> get_seeds() const;  // comma-separated "seeds"

  /// Overrides one key (command-line flags call this after file parsing).
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  /// FNV-1a over the sorted canonical "key=value\n" serialization,
  /// excluding noisy.* keys; hex string embedded in every output file.
  std::string hash() const;

  /// Canonical serialization (all keys, sorted), suitable for diffing.
  std::string to_string() const;

  const std::map<std::string, std::string>& items() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

/// Output root: --out flag beats CODESCOPE_OUT beats "./out".
std::string output_root(const std::string& flag_value);

constexpr const char* kArtifactVersion = "1";

}  // namespace codescope::util
