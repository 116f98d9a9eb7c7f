"""Recognizing a returning child by embedding similarity.

The gallery enrolls unit-norm vectors and matches later queries by cosine
similarity with a deterministic tie-break. First the mechanics are shown with
hand-built embeddings; then, if you pass a trained checkpoint path, the same
flow runs on real 48-d face embeddings (an untrained network's embeddings
collapse together, so training is what makes identity matching meaningful).

    python demos/05_identity_gallery.py [path/to/maya.ckpt]
"""

import sys

import numpy as np

from maya.gallery import IdentityGallery


def unit(vector):
    v = np.asarray(vector, dtype=float)
    return v / np.linalg.norm(v)


def mechanics():
    gallery = IdentityGallery(threshold=0.80)
    ava = unit(np.r_[1.0, 0.2, np.zeros(46)])
    ben = unit(np.r_[0.0, 1.0, 0.3, np.zeros(45)])
    gallery.enroll("Ava", ava)
    gallery.enroll("Ben", ben)

    print("query: Ava's face, slightly changed")
    noisy = unit(ava + 0.1 * unit(np.r_[np.zeros(2), np.ones(46)]))
    match = gallery.identify(noisy)
    print(f"  -> {match.display_name}, similarity {match.similarity:.3f}")

    print("query: a stranger (orthogonal embedding)")
    stranger = unit(np.r_[np.zeros(3), 1.0, np.zeros(44)])
    print(f"  -> {gallery.identify(stranger)}")

    print("query: Ben again, exact")
    match = gallery.identify(ben)
    print(f"  -> {match.display_name}, similarity {match.similarity:.3f}")


def with_checkpoint(path):
    from maya.augment import synth_corpus
    from maya.checkpoint import load_checkpoint
    from maya.fer import FerModel, predict

    network, meta = load_checkpoint(path)
    model = FerModel(network=network, meta=meta)
    gallery = IdentityGallery(threshold=0.80)

    print(f"\nwith trained checkpoint {path}:")
    ids = {}
    for name, seed in (("Ava", 21), ("Ben", 22), ("Cyrus", 23)):
        face = synth_corpus(per_class=1, seed=seed)[6]
        ids[name] = gallery.enroll(name, predict(model, face).embedding)
    for name, seed in (("Ava", 21), ("Ben", 22), ("Cyrus", 23)):
        face = synth_corpus(per_class=2, seed=seed)[13]  # fresh jitter
        match = gallery.identify(predict(model, face).embedding)
        got = "no match" if match is None else (
            f"{match.display_name} (similarity {match.similarity:.3f})")
        print(f"  {name} returns -> {got}")


def main():
    mechanics()
    if len(sys.argv) > 1:
        with_checkpoint(sys.argv[1])


if __name__ == "__main__":
    main()
