#include "codescope/model/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace codescope::model {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'C', 'S', 'C', 'K', 'P', 'T', '1', '\n'};

bool host_is_little_endian() {
  uint16_t x = 1;
  char c;
  std::memcpy(&c, &x, 1);
  return c == 1;
}

void byteswap_doubles(std::vector<double>& v) {
  for (double& d : v) {
    char b[8];
    std::memcpy(b, &d, 8);
    std::swap(b[0], b[7]);
    std::swap(b[1], b[6]);
    std::swap(b[2], b[5]);
    std::swap(b[3], b[4]);
    std::memcpy(&d, b, 8);
  }
}

json config_to_json(const ModelConfig& c) {
  return json{{"num_layers", c.num_layers},
              {"hidden_dim", c.hidden_dim},
              {"ffn_dim", c.ffn_dim},
              {"num_heads", c.num_heads},
              {"vocab_size", c.vocab_size},
              {"max_positions", c.max_positions},
              {"attention_mode",
               c.attention_mode == AttentionMode::Causal ? "causal"
                                                         : "bidirectional"}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.num_layers = j.at("num_layers").get<int64_t>();
  c.hidden_dim = j.at("hidden_dim").get<int64_t>();
  c.ffn_dim = j.at("ffn_dim").get<int64_t>();
  c.num_heads = j.at("num_heads").get<int64_t>();
  c.vocab_size = j.at("vocab_size").get<int64_t>();
  c.max_positions = j.at("max_positions").get<int64_t>();
  c.attention_mode = j.at("attention_mode").get<std::string>() == "causal"
                         ? AttentionMode::Causal
                         : AttentionMode::Bidirectional;
  return c;
}

}  // namespace

void save_checkpoint(const EncoderParams& params, const std::string& path) {
  json header;
  header["ckpt_version"] = 1;
  header["config"] = config_to_json(params.config);
  header["precision"] = nc::precision() == nc::Precision::f32 ? 32 : 64;
  header["tied_lm_head"] = params.tied_lm_head;
  json plist = json::array();
  int64_t offset = 0;
  for (const auto& p : params.set.all()) {
    const nc::Tensor& t = p.var.value();
    plist.push_back({{"name", p.name},
                     {"shape", t.shape()},
                     {"offset", offset},
                     {"numel", t.numel()}});
    offset += t.numel();
  }
  header["params"] = std::move(plist);
  header["payload_elements"] = offset;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open " + path + " for writing");
  std::string h = header.dump();
  uint64_t hlen = h.size();
  if (!host_is_little_endian()) {
    char b[8];
    std::memcpy(b, &hlen, 8);
    std::reverse(b, b + 8);
    std::memcpy(&hlen, b, 8);
  }
  out.write(kMagic, 8);
  out.write(reinterpret_cast<const char*>(&hlen), 8);
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  for (const auto& p : params.set.all()) {
    std::vector<double> data = p.var.value().vec();
    if (!host_is_little_endian()) byteswap_doubles(data);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
  }
  if (!out) throw CheckpointError("write failed for " + path);
}

EncoderParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw CheckpointError("bad checkpoint magic in " + path);
  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), 8);
  if (!host_is_little_endian()) {
    char b[8];
    std::memcpy(b, &hlen, 8);
    std::reverse(b, b + 8);
    std::memcpy(&hlen, b, 8);
  }
  if (!in || hlen == 0 || hlen > (1u << 30))
    throw CheckpointError("corrupt checkpoint header length");
  std::string h(hlen, '\0');
  in.read(h.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw CheckpointError("truncated checkpoint header");
  json header = json::parse(h, nullptr, false);
  if (header.is_discarded()) throw CheckpointError("corrupt checkpoint header");
  if (header.value("ckpt_version", -1) != 1)
    throw CheckpointError("unsupported checkpoint version");

  EncoderParams params;
  params.config = config_from_json(header.at("config"));
  params.config.validate();
  params.tied_lm_head = header.value("tied_lm_head", true);
  for (const auto& pj : header.at("params")) {
    std::vector<int64_t> shape = pj.at("shape").get<std::vector<int64_t>>();
    int64_t numel = pj.at("numel").get<int64_t>();
    nc::Tensor t(shape);
    if (t.numel() != numel)
      throw CheckpointError("shape/numel mismatch for " +
                            pj.at("name").get<std::string>());
    in.read(reinterpret_cast<char*>(t.vec().data()),
            static_cast<std::streamsize>(t.vec().size() * sizeof(double)));
    if (!in) throw CheckpointError("truncated checkpoint payload");
    if (!host_is_little_endian()) byteswap_doubles(t.vec());
    params.set.add(pj.at("name").get<std::string>(), std::move(t));
  }
  return params;
}

EncoderParams load_checkpoint(const std::string& path, const ModelConfig& expect) {
  EncoderParams p = load_checkpoint(path);
  if (!(p.config == expect))
    throw CheckpointError("checkpoint config does not match expected config");
  return p;
}

}  // namespace codescope::model
