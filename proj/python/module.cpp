// Python bindings for the codescope core library.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "codescope/codeprops/cfg.hpp"
#include "codescope/codeprops/parser.hpp"
#include "codescope/corpus/generator.hpp"
#include "codescope/corpus/jsonl.hpp"
#include "codescope/corpus/splits.hpp"
#include "codescope/corpus/vocab.hpp"
#include "codescope/model/checkpoint.hpp"
#include "codescope/model/pretrain.hpp"
#include "codescope/probes/probe.hpp"
#include "codescope/rsa/rsa.hpp"
#include "codescope/telly/sweep.hpp"

namespace py = pybind11;
using namespace codescope;

namespace {

py::dict record_to_dict(const corpus::CorpusRecord& r) {
  py::dict d;
  d["code"] = r.code;
  d["doc"] = r.doc;
  d["lang"] = r.lang;
  d["id"] = r.id;
  d["tag"] = r.tag;
  d["complexity"] = r.complexity;
  return d;
}

corpus::CorpusRecord record_from_dict(const py::dict& d) {
  corpus::CorpusRecord r;
  r.code = py::cast<std::string>(d["code"]);
  if (d.contains("doc")) r.doc = py::cast<std::string>(d["doc"]);
  if (d.contains("lang")) r.lang = py::cast<std::string>(d["lang"]);
  if (d.contains("tag")) r.tag = py::cast<std::string>(d["tag"]);
  if (d.contains("complexity")) r.complexity = py::cast<int>(d["complexity"]);
  r.id = d.contains("id") && !py::cast<std::string>(d["id"]).empty()
             ? py::cast<std::string>(d["id"])
             : corpus::content_hash(r.code, r.doc);
  return r;
}

std::vector<corpus::CorpusRecord> records_from_list(const py::list& lst) {
  std::vector<corpus::CorpusRecord> out;
  for (auto item : lst) out.push_back(record_from_dict(py::cast<py::dict>(item)));
  return out;
}

py::list records_to_list(const std::vector<corpus::CorpusRecord>& recs) {
  py::list out;
  for (const auto& r : recs) out.append(record_to_dict(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_codescope, m) {
  m.doc() = "code-model probing, similarity and layer-freezing lab";

  // ---- corpus ----
  m.def("generate_toy_corpus",
        [](uint64_t seed, int size) {
          return records_to_list(corpus::generate_toy_corpus(seed, size));
        },
        py::arg("seed"), py::arg("size"));
  m.def("generate_semantic_clusters",
        [](int problems, int variants, uint64_t seed) {
          py::list out;
          for (const auto& c :
               corpus::generate_semantic_clusters(problems, variants, seed))
            out.append(records_to_list(c));
          return out;
        },
        py::arg("problems"), py::arg("variants"), py::arg("seed"));
  m.def("read_jsonl", [](const std::string& path) {
    auto r = corpus::read_jsonl(path);
    return py::make_tuple(records_to_list(r.records), r.skipped);
  });
  m.def("write_jsonl", [](const std::string& path, const py::list& recs) {
    corpus::write_jsonl(path, records_from_list(recs));
  });
  m.def("make_splits", [](const py::list& recs) {
    auto sp = corpus::make_splits(records_from_list(recs), {});
    py::dict d;
    d["train"] = records_to_list(sp.train);
    d["valid"] = records_to_list(sp.valid);
    d["test"] = records_to_list(sp.test);
    return d;
  });
  m.def("cyclomatic_complexity", [](const std::string& code) {
    return props::cyclomatic(props::build_cfg(*props::parse_function(code)));
  });

  py::class_<corpus::Vocabulary>(m, "Vocabulary")
      .def_static("build",
                  [](const py::list& recs, int min_count) {
                    return corpus::Vocabulary::build(records_from_list(recs),
                                                     min_count);
                  },
                  py::arg("records"), py::arg("min_count") = 1)
      .def_static("load", &corpus::Vocabulary::load)
      .def("save", &corpus::Vocabulary::save)
      .def("encode", &corpus::Vocabulary::encode)
      .def("decode", &corpus::Vocabulary::decode)
      .def("__len__", &corpus::Vocabulary::size);

  // ---- model ----
  py::class_<model::ModelConfig>(m, "ModelConfig")
      .def_readonly("num_layers", &model::ModelConfig::num_layers)
      .def_readonly("hidden_dim", &model::ModelConfig::hidden_dim)
      .def_readonly("ffn_dim", &model::ModelConfig::ffn_dim)
      .def_readonly("num_heads", &model::ModelConfig::num_heads)
      .def_readonly("vocab_size", &model::ModelConfig::vocab_size)
      .def_readonly("max_positions", &model::ModelConfig::max_positions)
      .def_static("desk", &model::ModelConfig::desk)
      .def_static("full_scale", &model::ModelConfig::full_scale,
                  py::arg("vocab_size") = 50000);

  py::class_<model::EncoderParams>(m, "EncoderParams")
      .def_property_readonly("config",
                             [](const model::EncoderParams& p) { return p.config; })
      .def("checksum",
           [](const model::EncoderParams& p) { return p.set.checksum_all(); })
      .def("total_elements",
           [](const model::EncoderParams& p) { return p.set.total_elements(); })
      .def("trainable_elements",
           [](const model::EncoderParams& p) { return p.set.trainable_elements(); });

  m.def(
      "init_params",
      [](const model::ModelConfig& cfg, uint64_t seed) {
        nc::Rng rng(seed);
        return model::init_params(cfg, rng);
      },
      py::arg("config"), py::arg("seed") = 0);
  m.def("per_layer_param_count", &model::per_layer_param_count);
  m.def("param_count",
        [](const model::ModelConfig& cfg, int freeze_k) {
          std::optional<int> fk;
          if (freeze_k >= 0) fk = freeze_k;
          auto c = model::param_count(cfg, fk);
          py::dict d;
          d["total"] = c.total;
          d["trainable"] = c.trainable;
          d["frozen"] = c.frozen;
          d["per_group"] = c.per_group;
          return d;
        },
        py::arg("config"), py::arg("freeze_k") = -1);
  m.def("save_checkpoint", &model::save_checkpoint);
  m.def("load_checkpoint",
        [](const std::string& path) { return model::load_checkpoint(path); });
  m.def("pretrain_mlm",
        [](model::EncoderParams& params,
           const std::vector<std::vector<int64_t>>& seqs, int steps,
           int batch_size, double lr, uint64_t seed) {
          model::PretrainConfig pc;
          pc.steps = steps;
          pc.batch_size = batch_size;
          pc.lr = lr;
          pc.seed = seed;
          auto r = model::pretrain_mlm(params, seqs, pc);
          return r.loss_curve;
        },
        py::arg("params"), py::arg("sequences"), py::arg("steps") = 100,
        py::arg("batch_size") = 32, py::arg("lr") = 1e-4, py::arg("seed") = 0);
  m.def("set_precision", [](int bits) {
    if (bits == 32) nc::set_precision(nc::Precision::f32);
    else if (bits == 64) nc::set_precision(nc::Precision::f64);
    else throw std::invalid_argument("precision must be 32 or 64");
  });

  // ---- rsa ----
  m.def("rsa_compare",
        [](const model::EncoderParams& a, const model::EncoderParams& b,
           const std::vector<std::vector<int64_t>>& snippets) {
          auto r = rsa::rsa_compare(a, b, snippets);
          py::dict d;
          d["rho"] = r.rho;
          d["bands"] = r.bands;
          d["n"] = r.n;
          d["snippet_hash"] = r.snippet_hash;
          return d;
        });
  m.def("rsa_band", &rsa::band);

  // ---- telly metrics & accounting ----
  m.def("metric_mrr", &telly::metric_mrr);
  m.def("metric_recall_at_k", &telly::metric_recall_at_k);
  m.def("metric_prf", [](const std::vector<int>& p, const std::vector<int>& l) {
    auto r = telly::metric_prf(p, l);
    py::dict d;
    d["precision"] = r.precision;
    d["recall"] = r.recall;
    d["f1"] = r.f1;
    return d;
  });
  m.def("levenshtein", &telly::levenshtein);
  m.def("metric_edit_sim", &telly::metric_edit_sim);
  m.def("metric_em", &telly::metric_em);
  m.def("freeze_plan", [](const model::ModelConfig& cfg, int k) {
    auto p = telly::make_freeze_plan(cfg, k);
    py::dict d;
    d["k"] = p.k;
    d["frozen_count"] = p.frozen_count;
    d["trainable_count"] = p.trainable_count;
    d["frozen_names"] = p.frozen_names;
    return d;
  });
}
