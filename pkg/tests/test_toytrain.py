import json

import numpy as np
import pytest

from srprune import deskdata, pipeline, scoring, selection, toytrain
from srprune.errors import ContractError, FingerprintMismatchError


@pytest.fixture(scope="module")
def tiny_setup(tmp_path_factory):
    """A minimal dataset + eval split for fast harness mechanics tests."""
    root = tmp_path_factory.mktemp("tiny")
    deskdata.generate_corpus(root / "hr", n_images=3, size=48, tile=24, seed=1)
    deskdata.generate_corpus(root / "eval", n_images=1, size=48, tile=24, seed=2)
    spec = pipeline.DatasetSpec(hr_dir=str(root / "hr"), patch_size=24, stride=24, scale=2)
    ds = pipeline.prepare(spec, root / "prepared")
    pairs = pipeline.load_pairs(ds)
    table = scoring.score_dataset_sobel(pairs, fingerprint=ds.fingerprint)
    return root, ds, table


def tiny_plan(root, ds, arms, steps=20):
    return toytrain.ExperimentPlan(
        dataset=ds,
        arms=arms,
        eval_dir=str(root / "eval"),
        steps=steps,
        batch_size=4,
        learning_rate=0.05,
        seed=3,
        n1=2,
        n2=2,
        init_std=0.05,
    )


def test_plan_rejects_duplicate_or_missing_arms(tiny_setup):
    root, ds, _ = tiny_setup
    with pytest.raises(ContractError):
        tiny_plan(root, ds, [toytrain.Arm("a"), toytrain.Arm("a")])
    with pytest.raises(ContractError):
        tiny_plan(root, ds, [])


def test_run_experiment_report_shape(tiny_setup):
    root, ds, table = tiny_setup
    des = selection.select_descending(table, 0.5)
    plan = tiny_plan(root, ds, [toytrain.Arm("full"), toytrain.Arm("des", des),
                                toytrain.Arm("short", des, steps=5)])
    report = toytrain.run_experiment(plan)
    assert report.dataset_fingerprint == ds.fingerprint
    full, desr, short = report.arm("full"), report.arm("des"), report.arm("short")
    assert full.train_size == len(ds)
    assert desr.train_size == des.size
    assert full.manifest_hash == "-"
    assert desr.manifest_hash == short.manifest_hash != "-"
    assert (full.steps, desr.steps, short.steps) == (20, 20, 5)
    for a in report.arms:
        assert np.isfinite(a.psnr) and 0.0 < a.ssim <= 1.0
        assert np.isfinite(a.final_loss)
    with pytest.raises(ContractError):
        report.arm("nope")


def test_run_experiment_is_deterministic(tiny_setup):
    root, ds, table = tiny_setup
    des = selection.select_descending(table, 0.5)
    plan = tiny_plan(root, ds, [toytrain.Arm("des", des)], steps=10)
    a = toytrain.run_experiment(plan)
    b = toytrain.run_experiment(plan)
    assert a.to_json_bytes() == b.to_json_bytes()


def test_run_experiment_rejects_foreign_manifest(tiny_setup):
    root, ds, table = tiny_setup
    foreign = scoring.ScoreTable("other-fp", table.scorer, table.scorer_hash,
                                 table.scale, table.entries)
    m = selection.select_descending(foreign, 0.5)
    plan = tiny_plan(root, ds, [toytrain.Arm("bad", m)], steps=5)
    with pytest.raises(FingerprintMismatchError):
        toytrain.run_experiment(plan)


def test_report_serialization(tiny_setup, tmp_path):
    root, ds, table = tiny_setup
    plan = tiny_plan(root, ds, [toytrain.Arm("full")], steps=5)
    report = toytrain.run_experiment(plan)
    jpath, cpath = tmp_path / "r.json", tmp_path / "r.csv"
    report.save_json(jpath)
    report.save_csv(cpath)
    doc = json.loads(jpath.read_text())
    assert doc["dataset_fingerprint"] == ds.fingerprint
    assert doc["arms"][0]["label"] == "full"
    lines = cpath.read_text().splitlines()
    assert lines[0] == "arm,psnr,ssim,steps,manifest_hash"
    assert lines[1].startswith("full,")


def test_compare_report_orders():
    arms = [
        toytrain.ArmResult("a", 10, 5, 25.0, 0.9, 1.0, 0.5, "-"),
        toytrain.ArmResult("b", 10, 5, 24.0, 0.9, 1.0, 0.5, "-"),
    ]
    report = toytrain.ExperimentReport("fp", 0, {}, arms)
    checks = toytrain.compare_report(report, [("a", "b", 0.0), ("b", "a", 0.5), ("b", "a", 2.0)])
    assert [p for _, p in checks] == [True, False, True]
