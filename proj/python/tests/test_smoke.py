import math

import pytest

import codescope as cs


def test_corpus_generation_deterministic():
    a = cs.generate_toy_corpus(seed=0, size=20)
    b = cs.generate_toy_corpus(seed=0, size=20)
    assert [r["code"] for r in a] == [r["code"] for r in b]
    assert all(r["code"].startswith("def ") for r in a)


def test_complexity_matches_cfg():
    for r in cs.generate_toy_corpus(seed=1, size=30):
        assert cs.cyclomatic_complexity(r["code"]) == r["complexity"]


def test_vocab_round_trip():
    recs = cs.generate_toy_corpus(seed=2, size=10)
    vocab = cs.Vocabulary.build(recs, min_count=1)
    code = recs[0]["code"]
    ids = vocab.encode(code)
    assert vocab.encode(vocab.decode(ids)) == ids


def test_paper_scale_parameter_accounting():
    cfg = cs.ModelConfig.full_scale()
    assert cs.per_layer_param_count(cfg) == 7_087_872
    counts = cs.param_count(cfg, freeze_k=0)
    assert counts["trainable"] == 85_054_464


def test_checkpoint_round_trip(tmp_path):
    recs = cs.generate_toy_corpus(seed=3, size=8)
    vocab = cs.Vocabulary.build(recs)
    params = cs.init_params(cs.ModelConfig.desk(len(vocab)), seed=0)
    path = str(tmp_path / "m.ckpt")
    cs.save_checkpoint(params, path)
    loaded = cs.load_checkpoint(path)
    assert loaded.checksum() == params.checksum()


def test_pretrain_runs_and_loss_is_finite():
    recs = cs.generate_toy_corpus(seed=4, size=12)
    vocab = cs.Vocabulary.build(recs)
    params = cs.init_params(cs.ModelConfig.desk(len(vocab)), seed=0)
    cs.set_precision(32)
    seqs = [vocab.encode(r["code"]) for r in recs]
    curve = cs.pretrain_mlm(params, seqs, steps=3, batch_size=4)
    assert len(curve) == 3 and all(math.isfinite(x) for x in curve)


def test_rsa_self_similarity_is_one():
    recs = cs.generate_toy_corpus(seed=5, size=10)
    vocab = cs.Vocabulary.build(recs)
    params = cs.init_params(cs.ModelConfig.desk(len(vocab)), seed=0)
    snippets = [vocab.encode(r["code"])[:128] for r in recs]
    rep = cs.rsa_compare(params, params, snippets)
    assert rep["rho"] == [1.0] * (params.config.num_layers + 1)
    assert all(b == "fairly similar" for b in rep["bands"])


def test_freeze_plan_counts():
    cfg = cs.ModelConfig.desk(500)
    plan = cs.freeze_plan(cfg, 2)
    counts = cs.param_count(cfg, freeze_k=2)
    assert plan["frozen_count"] == counts["frozen"]
    assert plan["trainable_count"] == counts["trainable"]


def test_metric_worked_examples():
    assert cs.metric_mrr([1, 2, 4]) == pytest.approx((1 + 0.5 + 0.25) / 3)
    assert cs.metric_recall_at_k([1, 3, 7], 3) == pytest.approx(2 / 3)
    assert cs.levenshtein("kitten", "sitting") == 3
    assert cs.metric_edit_sim("abc", "abc") == 1.0
    assert cs.metric_em("a  b", " a b ") == 1
    prf = cs.metric_prf([1, 1, 0, 0], [1, 0, 1, 0])
    assert prf["precision"] == 0.5 and prf["recall"] == 0.5


def test_splits_partition():
    recs = cs.generate_toy_corpus(seed=6, size=50)
    sp = cs.make_splits(recs)
    total = len(sp["train"]) + len(sp["valid"]) + len(sp["test"])
    assert total == len({r["id"] for r in recs})
