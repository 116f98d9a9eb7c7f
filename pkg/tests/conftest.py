"""Shared fixtures, including the desk-scale training runs used by several suites."""

import time
from types import SimpleNamespace

import pytest

from maya.augment import build_dataset, build_half_banks, stratified_split, synth_corpus
from maya.fer import build_maya_net, evaluate_arrays
from maya.nn import TrainConfig, train

DESK_SEED = 11
DESK_PER_CLASS = 20


@pytest.fixture(scope="session")
def desk_corpus():
    corpus = synth_corpus(per_class=DESK_PER_CLASS, seed=DESK_SEED)
    dataset = build_dataset(build_half_banks(corpus))
    return SimpleNamespace(corpus=corpus, dataset=dataset)


@pytest.fixture(scope="session")
def desk_scale_runs(desk_corpus):
    """Train the full network once per split mode (several CPU-minutes)."""
    runs = {}
    for mode, max_epochs in (("source-disjoint", 8), ("paper", 4)):
        manifest = stratified_split(desk_corpus.dataset, seed=DESK_SEED, leakage_mode=mode)
        train_x, train_y = desk_corpus.dataset.materialize(manifest.splits["train"])
        val_x, val_y = desk_corpus.dataset.materialize(manifest.splits["val"])
        test_x, test_y = desk_corpus.dataset.materialize(manifest.splits["test"])
        model = build_maya_net(seed=DESK_SEED)
        config = TrainConfig(learning_rate=0.003, batch_size=64, max_epochs=max_epochs,
                             seed=DESK_SEED, patience=max_epochs)
        cpu_start = time.process_time()
        result = train(model.network, train_x, train_y, val_x, val_y, config)
        cpu_seconds = time.process_time() - cpu_start
        matrix = evaluate_arrays(model, test_x, test_y)
        runs[mode] = SimpleNamespace(
            model=model,
            manifest=manifest,
            result=result,
            confusion=matrix,
            accuracy=matrix.accuracy,
            cpu_seconds=cpu_seconds,
            test_indices=manifest.splits["test"],
        )
    return runs
