"""The recognition network, layer by layer.

Builds the two-inception-block network and prints the spatial trace of a
96x96x1 probe together with the trainable-parameter ledger. The trunk ends in
a 48-d L2-normalized embedding (reused for identity matching); a 7-way affine
head with softmax does the expression classification.
"""

import numpy as np

from maya.fer import build_maya_net
from maya.nn import format_kcount


def main():
    model = build_maya_net(seed=0)
    counts = dict(model.network.param_count()[0])
    print(f"{'layer':14s} {'output (HxWxC)':>16s} {'params':>10s}")
    for name, shape in model.network.trace(np.zeros((1, 96, 96, 1))):
        shape_text = "x".join(str(s) for s in shape)
        count = counts.get(name, 0)
        count_text = f"{count:,} ({format_kcount(count)})" if count else "-"
        print(f"{name:14s} {shape_text:>16s} {count_text:>18s}")
    _, trunk, head = model.param_ledger()
    print(f"\ntrunk total: {trunk:,} parameters; classification head adds {head}")


if __name__ == "__main__":
    main()
