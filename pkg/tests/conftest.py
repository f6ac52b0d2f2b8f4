"""Shared fixtures.

The expensive desk-scale experiment (synthetic corpus, scorer training, six
training arms) is built once per session and shared by every test that needs
it, so the full suite stays within a few minutes.
"""

import numpy as np
import pytest

from srprune import deskdata, pipeline, scoring, selection, srcnn, toytrain

# The bring-up recipe: 20 mosaic images with a 4.5% admixture of binary-noise
# tiles (the detrimental long tail), 720 extracted 24px patch pairs at x2,
# a reduced-width scorer, and matched-step training arms.
CORPUS = dict(n_images=20, size=144, tile=24, seed=0, hard_frac=0.5, noise_frac=0.045)
EVALSET = dict(n_images=4, size=96, tile=24, seed=999, hard_frac=0.5, noise_frac=0.0)
PATCH, STRIDE, SCALE = 24, 24, 2
SCORER_SEED, SCORER_STEPS = 7, 600
ARM_STEPS, ARM_SEED, RANDOM_SEED = 2000, 7, 11


@pytest.fixture(scope="session")
def desk_dirs(tmp_path_factory):
    root = tmp_path_factory.mktemp("desk")
    deskdata.generate_corpus(root / "hr", **CORPUS)
    deskdata.generate_corpus(root / "eval", **EVALSET)
    return root


@pytest.fixture(scope="session")
def desk_dataset(desk_dirs):
    spec = pipeline.DatasetSpec(
        hr_dir=str(desk_dirs / "hr"), patch_size=PATCH, stride=STRIDE, scale=SCALE
    )
    return pipeline.prepare(spec, desk_dirs / "prepared")


@pytest.fixture(scope="session")
def desk_pairs(desk_dataset):
    return pipeline.load_pairs(desk_dataset)


@pytest.fixture(scope="session")
def scorer_weights(desk_dataset):
    pairs = toytrain._training_pairs(desk_dataset)
    w0 = srcnn.init_weights(SCORER_SEED, n1=8, n2=4, std=0.1)
    cfg = srcnn.TrainConfig(
        learning_rate=0.1, batch_size=8, steps=SCORER_STEPS, seed=SCORER_SEED, init_std=0.1
    )
    w, trace = srcnn.train(w0, pairs, cfg)
    assert trace[-1] < trace[0], "scorer training must reduce the loss"
    return w


@pytest.fixture(scope="session")
def loss_table(scorer_weights, desk_dataset, desk_pairs):
    return scoring.score_dataset(
        scorer_weights, desk_pairs, workers=4, fingerprint=desk_dataset.fingerprint
    )


@pytest.fixture(scope="session")
def sobel_table(desk_dataset, desk_pairs):
    return scoring.score_dataset_sobel(
        desk_pairs, workers=4, fingerprint=desk_dataset.fingerprint
    )


@pytest.fixture(scope="session")
def desk_report(desk_dirs, desk_dataset, loss_table):
    des50 = selection.select_descending(loss_table, 0.5)
    asc50 = selection.select_ascending(loss_table, 0.5)
    rand50 = selection.select_random(loss_table, 0.5, RANDOM_SEED)
    ref50 = selection.select_refined(loss_table, 0.5, 0.05)
    plan = toytrain.ExperimentPlan(
        dataset=desk_dataset,
        arms=[
            toytrain.Arm("full"),
            toytrain.Arm("des50", des50),
            toytrain.Arm("asc50", asc50),
            toytrain.Arm("rand50", rand50),
            toytrain.Arm("ref50", ref50),
            toytrain.Arm("des50short", des50, steps=ARM_STEPS // 2),
        ],
        eval_dir=str(desk_dirs / "eval"),
        steps=ARM_STEPS,
        batch_size=8,
        learning_rate=0.1,
        seed=ARM_SEED,
        n1=8,
        n2=4,
        init_std=0.1,
    )
    return toytrain.run_experiment(plan)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)


# One line per acceptance criterion, filled in by tests/test_acceptance.py
# and echoed after the run (fd-level capture would swallow plain prints).
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
