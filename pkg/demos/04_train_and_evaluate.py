"""Train the network on a small synthetic corpus and read its confusion matrix.

Uses a reduced corpus (8 faces per class) so the run finishes in a couple of
minutes on one CPU core. For the full desk-scale experiment (20 per class,
both split policies, the leakage comparison) see the acceptance suite.
"""

import time

from maya.augment import build_dataset, build_half_banks, stratified_split, synth_corpus
from maya.fer import build_maya_net, evaluate_arrays
from maya.nn import TrainConfig, train

SEED = 5


def main():
    corpus = synth_corpus(per_class=8, seed=SEED)
    dataset = build_dataset(build_half_banks(corpus))
    manifest = stratified_split(dataset, seed=SEED, leakage_mode="source-disjoint")
    print(f"dataset: {len(dataset)} composites, split {manifest.split_sizes()}")

    train_x, train_y = dataset.materialize(manifest.splits["train"])
    val_x, val_y = dataset.materialize(manifest.splits["val"])
    test_x, test_y = dataset.materialize(manifest.splits["test"])

    model = build_maya_net(seed=SEED)
    config = TrainConfig(learning_rate=0.003, batch_size=32, max_epochs=14, seed=SEED,
                         patience=14)
    start = time.time()
    train(model.network, train_x, train_y, val_x, val_y, config,
          log=lambda m: print(
              f"epoch {m.epoch:2d}  train {m.train_loss:.3f}/{m.train_acc:.3f}  "
              f"val {m.val_loss:.3f}/{m.val_acc:.3f}  ({time.time() - start:.0f}s)"))

    matrix = evaluate_arrays(model, test_x, test_y)
    print("\nheld-out test set:")
    print(matrix.to_text())


if __name__ == "__main__":
    main()
