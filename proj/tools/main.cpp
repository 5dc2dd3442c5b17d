// codescope: train, probe, compare and fine-tune a small code encoder.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "codescope/corpus/generator.hpp"
#include "codescope/corpus/jsonl.hpp"
#include "codescope/corpus/splits.hpp"
#include "codescope/corpus/vocab.hpp"
#include "codescope/model/checkpoint.hpp"
#include "codescope/model/pretrain.hpp"
#include "codescope/probes/probe.hpp"
#include "codescope/rsa/rsa.hpp"
#include "codescope/telly/sweep.hpp"
#include "codescope/util/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace codescope;

namespace {

struct Ctx {
  util::Config cfg = util::Config::defaults();
  std::string out;

  std::string path(const std::string& name) const {
    return (fs::path(out) / name).string();
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

json base_header(const Ctx& ctx) {
  json j;
  j["config_hash"] = ctx.cfg.hash();
  j["seeds"] = ctx.cfg.get_seeds();
  j["artifact_version"] = util::kArtifactVersion;
  return j;
}

struct CorpusBundle {
  std::vector<corpus::CorpusRecord> records;
  std::vector<std::vector<corpus::CorpusRecord>> clusters;  // generator only
  std::vector<corpus::CorpusRecord> all;                    // records + variants
};

CorpusBundle load_corpus(const Ctx& ctx) {
  CorpusBundle b;
  const std::string path = ctx.cfg.get("corpus");
  uint64_t seed = static_cast<uint64_t>(ctx.cfg.get_int("seed"));
  if (!path.empty()) {
    auto r = corpus::read_jsonl(path);
    if (r.skipped > 0)
      std::cerr << "corpus: skipped " << r.skipped << " malformed line(s)\n";
    b.records = std::move(r.records);
  } else {
    b.records = corpus::generate_toy_corpus(
        seed, static_cast<int>(ctx.cfg.get_int("corpus.programs")));
    b.clusters = corpus::generate_semantic_clusters(
        static_cast<int>(ctx.cfg.get_int("corpus.clusters")),
        static_cast<int>(ctx.cfg.get_int("corpus.variants")), seed + 1);
  }
  b.all = b.records;
  for (const auto& c : b.clusters)
    for (const auto& r : c) b.all.push_back(r);
  if (b.all.empty()) throw std::runtime_error("empty corpus");
  return b;
}

corpus::Vocabulary get_vocab(const Ctx& ctx, const CorpusBundle& b) {
  const std::string vpath = ctx.path("vocab.txt");
  if (fs::exists(vpath)) return corpus::Vocabulary::load(vpath);
  auto vocab = corpus::Vocabulary::build(
      probes::with_ast_records(b.all),
      static_cast<int>(ctx.cfg.get_int("vocab.min_count")));
  vocab.save(vpath);
  return vocab;
}

model::ModelConfig model_config(const Ctx& ctx, int64_t vocab_size) {
  const std::string scale = ctx.cfg.get("scale");
  if (scale == "desk") return model::ModelConfig::desk(vocab_size);
  if (scale == "full") return model::ModelConfig::full_scale(vocab_size);
  throw std::runtime_error("scale must be desk or full");
}

void apply_precision(const Ctx& ctx) {
  int64_t p = ctx.cfg.get_int("precision");
  if (p == 32) nc::set_precision(nc::Precision::f32);
  else if (p == 64) nc::set_precision(nc::Precision::f64);
  else throw std::runtime_error("precision must be 32 or 64");
}

telly::FinetuneConfig finetune_config(const Ctx& ctx) {
  telly::FinetuneConfig fc;
  fc.lr = ctx.cfg.get_double("finetune.lr");
  fc.batch_size = static_cast<int>(ctx.cfg.get_int("finetune.batch"));
  fc.max_epochs = static_cast<int>(ctx.cfg.get_int("finetune.max_epochs"));
  fc.patience = static_cast<int>(ctx.cfg.get_int("finetune.patience"));
  fc.tau = ctx.cfg.get_double("finetune.tau");
  fc.seeds = ctx.cfg.get_seeds();
  fc.timed_epochs = static_cast<int>(ctx.cfg.get_int("noisy.timed_epochs"));
  return fc;
}

// ---------- params ----------

int cmd_params(const Ctx& ctx, int freeze_k) {
  model::ModelConfig cfg;
  if (ctx.cfg.get("scale") == "full") {
    cfg = model::ModelConfig::full_scale();
  } else {
    CorpusBundle b = load_corpus(ctx);
    cfg = model_config(ctx, get_vocab(ctx, b).size());
  }
  std::optional<int> fk;
  if (freeze_k >= 0) fk = freeze_k;
  auto counts = model::param_count(cfg, fk);
  int64_t per_layer = model::per_layer_param_count(cfg);

  json j = base_header(ctx);
  j["scale"] = ctx.cfg.get("scale");
  j["vocab_size"] = cfg.vocab_size;
  j["per_layer"] = per_layer;
  j["per_group"] = counts.per_group;
  j["total"] = counts.total;
  j["trainable"] = counts.trainable;
  j["frozen"] = counts.frozen;
  j["freeze_k"] = freeze_k;
  write_file(ctx.path("params.json"), j.dump(2));

  std::cout << "scale " << ctx.cfg.get("scale") << "  L=" << cfg.num_layers
            << " d=" << cfg.hidden_dim << " f=" << cfg.ffn_dim
            << " V=" << cfg.vocab_size << "\n";
  std::cout << "per-layer parameters: " << per_layer << "\n";
  for (size_t g = 0; g < counts.per_group.size(); ++g)
    std::cout << "  group " << g << ": " << counts.per_group[g] << "\n";
  std::cout << "total " << counts.total << "  trainable " << counts.trainable
            << "  frozen " << counts.frozen;
  if (freeze_k >= 0) std::cout << "  (freeze K=" << freeze_k << ")";
  std::cout << "\n";
  return 0;
}

// ---------- pretrain ----------

int cmd_pretrain(const Ctx& ctx) {
  apply_precision(ctx);
  CorpusBundle b = load_corpus(ctx);
  auto vocab = get_vocab(ctx, b);
  auto cfg = model_config(ctx, vocab.size());
  uint64_t seed = static_cast<uint64_t>(ctx.cfg.get_int("seed"));
  nc::Rng rng(seed);
  auto params = model::init_params(cfg, rng);

  // the MLM corpus covers source code, serialized syntax-tree shapes, and
  // paired code+shape sequences, so syntax-side tokens are both learned
  // and tied to the code tokens they describe
  auto seqs = probes::build_mlm_sequences(b.all, vocab, cfg.max_positions);

  model::PretrainConfig pc;
  pc.lr = ctx.cfg.get_double("pretrain.lr");
  pc.batch_size = static_cast<int>(ctx.cfg.get_int("pretrain.batch"));
  pc.steps = static_cast<int>(ctx.cfg.get_int("pretrain.steps"));
  pc.mask_prob = ctx.cfg.get_double("pretrain.mask_prob");
  pc.seed = seed;
  auto res = model::pretrain_mlm(params, seqs, pc, [](int step, double loss) {
    if (step % 50 == 0) std::cout << "step " << step << " loss " << loss << "\n";
  });

  // bimodal alignment stage: contrastive docstring<->code training so every
  // layer places natural language and code in one representation space
  int align_steps = static_cast<int>(ctx.cfg.get_int("pretrain.align_steps"));
  if (align_steps > 0) {
    auto pairs = probes::build_align_pairs(b.all, vocab, cfg.max_positions / 2);
    model::AlignConfig ac;
    ac.steps = align_steps;
    ac.batch_size = pc.batch_size;
    ac.lr = ctx.cfg.get_double("pretrain.align_lr");
    ac.tau = ctx.cfg.get_double("pretrain.align_tau");
    ac.seed = seed + 11;
    auto ares =
        model::pretrain_align(params, pairs, ac, [](int step, double loss) {
          if (step % 50 == 0)
            std::cout << "align step " << step << " loss " << loss << "\n";
        });
    res.loss_curve.insert(res.loss_curve.end(), ares.loss_curve.begin(),
                          ares.loss_curve.end());
  }

  std::ostringstream csv;
  csv << "# config_hash=" << ctx.cfg.hash() << "\nstep,loss\n";
  for (size_t i = 0; i < res.loss_curve.size(); ++i)
    csv << i << "," << res.loss_curve[i] << "\n";
  write_file(ctx.path("pretrain_loss.csv"), csv.str());
  model::save_checkpoint(params, ctx.path("pretrained.ckpt"));
  std::cout << "checkpoint: " << ctx.path("pretrained.ckpt") << "  final loss "
            << res.loss_curve.back() << "\n";
  return 0;
}

// ---------- probe ----------

probes::ProbeDataset build_probe_dataset(const std::string& task,
                                         const CorpusBundle& b,
                                         const corpus::Vocabulary& vocab,
                                         int64_t max_len, uint64_t seed) {
  if (task == "lexical") return probes::build_lexical_dataset(b.records, vocab, max_len);
  if (task == "syntactic") {
    nc::Rng rng(seed);
    return probes::build_syntactic_dataset(b.records, vocab, rng, max_len);
  }
  if (task == "semantic") {
    if (b.clusters.empty())
      throw std::runtime_error("semantic probing needs the built-in generator corpus");
    return probes::build_semantic_dataset(b.clusters, vocab, max_len);
  }
  if (task == "structural")
    return probes::build_structural_dataset(b.records, vocab, max_len);
  throw std::runtime_error("unknown probe task: " + task);
}

int cmd_probe(const Ctx& ctx, const std::string& task_arg,
              const std::string& ckpt, const std::string& finetuned_ckpt) {
  apply_precision(ctx);
  CorpusBundle b = load_corpus(ctx);
  auto vocab = get_vocab(ctx, b);
  auto mcfg = model_config(ctx, vocab.size());
  uint64_t seed = static_cast<uint64_t>(ctx.cfg.get_int("seed"));

  auto pretrained = model::load_checkpoint(
      ckpt.empty() ? ctx.path("pretrained.ckpt") : ckpt, mcfg);
  nc::Rng rng_rand(seed + 1);
  auto random_model = model::init_params(mcfg, rng_rand);

  probes::ProbeConfig pcfg;
  pcfg.lr = ctx.cfg.get_double("probe.lr");
  pcfg.batch_size = static_cast<int>(ctx.cfg.get_int("probe.batch"));
  pcfg.max_epochs = static_cast<int>(ctx.cfg.get_int("probe.max_epochs"));
  pcfg.patience = static_cast<int>(ctx.cfg.get_int("probe.patience"));
  pcfg.contrastive_tau = ctx.cfg.get_double("probe.tau");
  pcfg.seeds = ctx.cfg.get_seeds();

  std::vector<std::string> tasks =
      task_arg == "all"
          ? std::vector<std::string>{"lexical", "syntactic", "semantic", "structural"}
          : std::vector<std::string>{task_arg};

  json summary = base_header(ctx);
  summary["tasks"] = json::array();
  bool all_pass = true;
  for (const auto& task : tasks) {
    auto ds = build_probe_dataset(task, b, vocab, mcfg.max_positions, seed);
    auto rep_r = probes::train_probe(random_model, ds, pcfg, "random");
    auto rep_p = probes::train_probe(pretrained, ds, pcfg, "pretrained");
    write_file(ctx.path("probe_" + task + "_random.json"),
               probes::report_json(rep_r, ctx.cfg.hash()));
    write_file(ctx.path("probe_" + task + "_pretrained.json"),
               probes::report_json(rep_p, ctx.cfg.hash()));
    json t;
    t["task"] = task;
    t["random"] = rep_r.metric;
    t["pretrained"] = rep_p.metric;
    if (!finetuned_ckpt.empty()) {
      auto ft = model::load_checkpoint(finetuned_ckpt, mcfg);
      auto rep_f = probes::train_probe(ft, ds, pcfg, "finetuned");
      write_file(ctx.path("probe_" + task + "_finetuned.json"),
                 probes::report_json(rep_f, ctx.cfg.hash()));
      t["finetuned"] = rep_f.metric;
    }
    bool pass = rep_p.metric > rep_r.metric;
    t["pretrained_beats_random"] = pass;
    all_pass = all_pass && pass;
    std::cout << task << ": random " << rep_r.metric << "  pretrained "
              << rep_p.metric << "  " << (pass ? "PASS" : "FAIL") << "\n";
    summary["tasks"].push_back(t);
  }
  summary["all_pretrained_beat_random"] = all_pass;
  write_file(ctx.path("probe_summary.json"), summary.dump(2));
  return 0;
}

// ---------- rsa ----------

int cmd_rsa(const Ctx& ctx, const std::string& ckpt_a, const std::string& ckpt_b,
            int rsa_n) {
  apply_precision(ctx);
  CorpusBundle b = load_corpus(ctx);
  auto vocab = get_vocab(ctx, b);
  auto mcfg = model_config(ctx, vocab.size());
  uint64_t seed = static_cast<uint64_t>(ctx.cfg.get_int("seed"));
  int n = rsa_n > 0 ? rsa_n : static_cast<int>(ctx.cfg.get_int("rsa.n"));

  auto a = model::load_checkpoint(ckpt_a, mcfg);
  auto bb = model::load_checkpoint(ckpt_b, mcfg);
  auto picked = rsa::sample_snippets(b.all, n, seed);
  std::vector<std::vector<int64_t>> snippets;
  for (const auto& r : picked) {
    auto toks = vocab.encode(r.code);
    if (static_cast<int64_t>(toks.size()) > mcfg.max_positions)
      toks.resize(static_cast<size_t>(mcfg.max_positions));
    snippets.push_back(std::move(toks));
  }
  auto rep = rsa::rsa_compare(a, bb, snippets);
  rep.model_a = ckpt_a;
  rep.model_b = ckpt_b;
  write_file(ctx.path("rsa.json"), rsa::report_json(rep, seed, ctx.cfg.hash()));
  write_file(ctx.path("rsa.csv"), rsa::report_csv(rep));
  for (size_t l = 0; l < rep.rho.size(); ++l)
    std::cout << "layer " << l << "  rho " << rep.rho[l] << "  " << rep.bands[l]
              << "\n";
  return 0;
}

// ---------- finetune / sweep ----------

struct TaskData {
  telly::TaskSplits<telly::SearchExample> search;
  telly::TaskSplits<telly::CloneExample> clone;
  telly::TaskSplits<telly::CompletionExample> completion;
};

TaskData build_task_data(const std::string& task, const Ctx& ctx,
                         const CorpusBundle& b, const corpus::Vocabulary& vocab,
                         int64_t max_len) {
  TaskData d;
  uint64_t seed = static_cast<uint64_t>(ctx.cfg.get_int("seed"));
  if (task == "search") d.search = telly::build_search_data(b.records, vocab, max_len);
  else if (task == "clone") {
    if (b.clusters.empty())
      throw std::runtime_error("clone detection needs the built-in generator corpus");
    nc::Rng rng(seed + 2);
    d.clone = telly::build_clone_data(b.clusters, vocab, rng, max_len);
  } else if (task == "completion")
    d.completion = telly::build_completion_data(b.records, vocab, max_len);
  else
    throw std::runtime_error("unknown task: " + task);
  return d;
}

telly::RunReport run_one_finetune(const std::string& task,
                                  const model::EncoderParams& base,
                                  const TaskData& d, int k,
                                  const telly::FinetuneConfig& fc,
                                  const corpus::Vocabulary& vocab) {
  if (task == "search") return telly::finetune_search(base, d.search, k, fc);
  if (task == "clone") return telly::finetune_clone(base, d.clone, k, fc);
  return telly::finetune_completion(base, d.completion, k, fc, vocab);
}

int cmd_finetune(const Ctx& ctx, const std::string& task, const std::string& ckpt,
                 int freeze_k) {
  apply_precision(ctx);
  CorpusBundle b = load_corpus(ctx);
  auto vocab = get_vocab(ctx, b);
  auto mcfg = model_config(ctx, vocab.size());
  auto base = model::load_checkpoint(
      ckpt.empty() ? ctx.path("pretrained.ckpt") : ckpt, mcfg);
  auto fc = finetune_config(ctx);
  auto d = build_task_data(task, ctx, b, vocab, mcfg.max_positions);
  auto rep = run_one_finetune(task, base, d, freeze_k, fc, vocab);
  std::string stem =
      "finetune_" + task + "_" + (freeze_k < 0 ? "base" : std::to_string(freeze_k));
  write_file(ctx.path(stem + ".json"), telly::run_report_json(rep, ctx.cfg.hash()));
  std::cout << task << " K=" << (freeze_k < 0 ? std::string("base")
                                              : std::to_string(freeze_k))
            << "  trainable " << rep.params_trainable << "\n";
  for (const auto& [nm, v] : rep.metrics) std::cout << "  " << nm << " " << v << "\n";
  return 0;
}

int cmd_sweep(const Ctx& ctx, const std::string& task, const std::string& ckpt) {
  apply_precision(ctx);
  CorpusBundle b = load_corpus(ctx);
  auto vocab = get_vocab(ctx, b);
  auto mcfg = model_config(ctx, vocab.size());
  auto base = model::load_checkpoint(
      ckpt.empty() ? ctx.path("pretrained.ckpt") : ckpt, mcfg);
  auto fc = finetune_config(ctx);
  auto d = build_task_data(task, ctx, b, vocab, mcfg.max_positions);
  auto ks = telly::default_freeze_levels(mcfg);
  auto res = telly::run_sweep(
      task, [&](int k) { return run_one_finetune(task, base, d, k, fc, vocab); },
      ks);
  write_file(ctx.path("sweep_" + task + ".csv"), telly::sweep_csv(res));
  write_file(ctx.path("sweep_" + task + ".json"),
             telly::sweep_json(res, ctx.cfg.hash()));
  std::cout << telly::sweep_csv(res);
  for (const auto& r : res.runs)
    if (r.failed) {
      std::cerr << "run K=" << r.k << " failed: " << r.error << "\n";
      return 1;
    }
  return 0;
}

// ---------- analyze / report ----------

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("missing artifact: " + path);
  return json::parse(f);
}

int cmd_analyze(const Ctx& ctx) {
  json out = base_header(ctx);
  bool ok = true;
  if (fs::exists(ctx.path("probe_summary.json"))) {
    json s = read_json(ctx.path("probe_summary.json"));
    out["probes"] = s["tasks"];
    bool p = s["all_pretrained_beat_random"].get<bool>();
    ok = ok && p;
    std::cout << "probes: pretrained beats random on all tasks: "
              << (p ? "PASS" : "FAIL") << "\n";
  }
  if (fs::exists(ctx.path("rsa.json"))) {
    json r = read_json(ctx.path("rsa.json"));
    out["rsa"] = r;
    std::cout << "rsa: " << r["layers"].size() << " layers\n";
  }
  for (const auto& task : {"search", "clone", "completion"}) {
    std::string p = ctx.path(std::string("sweep_") + task + ".json");
    if (!fs::exists(p)) continue;
    json s = read_json(p);
    bool dec = true, fails = false;
    int64_t prev = -1;
    for (const auto& run : s["runs"]) {
      if (run["failed"].get<bool>()) fails = true;
      int64_t tr = run["params_trainable"].get<int64_t>();
      if (prev >= 0 && tr >= prev) dec = false;
      prev = tr;
    }
    out["sweep_" + std::string(task)] = {{"params_strictly_decreasing", dec},
                                         {"any_failed", fails}};
    ok = ok && dec && !fails;
    std::cout << "sweep " << task << ": trainable strictly decreasing with K: "
              << (dec ? "PASS" : "FAIL") << (fails ? " (runs failed)" : "") << "\n";
  }
  out["all_checks_pass"] = ok;
  write_file(ctx.path("analyze.json"), out.dump(2));
  return ok ? 0 : 1;
}

int cmd_report(const Ctx& ctx) {
  std::ostringstream md;
  md << "# codescope report\n\nconfig hash: `" << ctx.cfg.hash() << "`\n";
  if (fs::exists(ctx.path("params.json"))) {
    json p = read_json(ctx.path("params.json"));
    md << "\n## Parameters\n\n| quantity | value |\n|---|---|\n"
       << "| per-layer | " << p["per_layer"] << " |\n"
       << "| total | " << p["total"] << " |\n"
       << "| trainable | " << p["trainable"] << " |\n"
       << "| frozen | " << p["frozen"] << " |\n";
  }
  if (fs::exists(ctx.path("probe_summary.json"))) {
    json s = read_json(ctx.path("probe_summary.json"));
    md << "\n## Probing\n\n| task | random | pretrained |\n|---|---|---|\n";
    for (const auto& t : s["tasks"])
      md << "| " << t["task"].get<std::string>() << " | " << t["random"] << " | "
         << t["pretrained"] << " |\n";
  }
  if (fs::exists(ctx.path("rsa.csv"))) {
    md << "\n## Representational similarity\n\n```\n";
    std::ifstream f(ctx.path("rsa.csv"));
    md << f.rdbuf() << "```\n";
  }
  for (const auto& task : {"search", "clone", "completion"}) {
    std::string p = ctx.path(std::string("sweep_") + task + ".csv");
    if (!fs::exists(p)) continue;
    md << "\n## Freeze sweep: " << task << "\n\n```\n";
    std::ifstream f(p);
    md << f.rdbuf() << "```\n";
  }
  write_file(ctx.path("report.md"), md.str());
  std::cout << md.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"codescope: code-model probing, similarity and freezing lab"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_file, out_flag, ckpt, ckpt_b, finetuned, task = "all";
  int freeze_k = -1, rsa_n = 0;
  long long seed_flag = -1;
  int precision_flag = 0;

  app.add_option("--config", config_file, "key=value experiment config file");
  app.add_option("--out", out_flag, "output root (overrides CODESCOPE_OUT)");
  app.add_option("--seed", seed_flag, "RNG seed (overrides config)");
  app.add_option("--precision", precision_flag, "compute precision")
      ->check(CLI::IsMember({32, 64}));

  auto* c_pre = app.add_subcommand("pretrain", "masked-LM pre-training");
  auto* c_probe = app.add_subcommand("probe", "train layer probes");
  c_probe->add_option("--task", task, "lexical|syntactic|semantic|structural|all");
  c_probe->add_option("--ckpt", ckpt, "pretrained checkpoint");
  c_probe->add_option("--finetuned", finetuned, "optional fine-tuned checkpoint");
  auto* c_rsa = app.add_subcommand("rsa", "representational similarity");
  c_rsa->add_option("--a", ckpt, "checkpoint A")->required();
  c_rsa->add_option("--b", ckpt_b, "checkpoint B")->required();
  c_rsa->add_option("--rsa-n", rsa_n, "snippet sample size");
  auto* c_ft = app.add_subcommand("finetune", "fine-tune one task");
  c_ft->add_option("--task", task, "search|clone|completion")->required();
  c_ft->add_option("--ckpt", ckpt, "base checkpoint");
  c_ft->add_option("--freeze", freeze_k, "freeze groups 0..K (-1 = none)");
  auto* c_sw = app.add_subcommand("sweep", "fine-tune across all freeze levels");
  c_sw->add_option("--task", task, "search|clone|completion")->required();
  c_sw->add_option("--ckpt", ckpt, "base checkpoint");
  auto* c_par = app.add_subcommand("params", "parameter accounting");
  c_par->add_option("--freeze", freeze_k, "freeze groups 0..K");
  auto* c_an = app.add_subcommand("analyze", "directional checks over artifacts");
  auto* c_rep = app.add_subcommand("report", "render human-readable report");

  CLI11_PARSE(app, argc, argv);

  try {
    Ctx ctx;
    if (!config_file.empty()) ctx.cfg = util::Config::from_file(config_file);
    if (seed_flag >= 0) ctx.cfg.set("seed", std::to_string(seed_flag));
    if (precision_flag != 0)
      ctx.cfg.set("precision", std::to_string(precision_flag));
    ctx.out = util::output_root(out_flag);
    fs::create_directories(ctx.out);

    if (c_pre->parsed()) return cmd_pretrain(ctx);
    if (c_probe->parsed()) return cmd_probe(ctx, task, ckpt, finetuned);
    if (c_rsa->parsed()) return cmd_rsa(ctx, ckpt, ckpt_b, rsa_n);
    if (c_ft->parsed()) return cmd_finetune(ctx, task, ckpt, freeze_k);
    if (c_sw->parsed()) return cmd_sweep(ctx, task, ckpt);
    if (c_par->parsed()) return cmd_params(ctx, freeze_k);
    if (c_an->parsed()) return cmd_analyze(ctx);
    if (c_rep->parsed()) return cmd_report(ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
