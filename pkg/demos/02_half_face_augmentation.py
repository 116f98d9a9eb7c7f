"""Half-face permutation: how 107 stills per class become 80,143 composites.

Every upper half is paired with every lower half inside one emotion class, so
n sources yield n^2 composites. With the published class size of 107 that is
11,449 per class and 80,143 in total, and the 70/10/20 split (test rounded
first) lands on exactly 16,029 test composites. Also contrasts the two split
policies on a small corpus: the paper-style shuffle lets composites that share
a source half straddle train/test, while source-disjoint keeps them together
(dropping mixed pairs).
"""

from maya.augment import (
    build_dataset,
    build_half_banks,
    largest_remainder_sizes,
    stratified_split,
    synth_corpus,
)


def main():
    print("published arithmetic:")
    print(f"  107 sources/class -> {107 * 107:,} composites/class")
    print(f"  7 classes         -> {7 * 107 * 107:,} composites total")
    train, val, test = largest_remainder_sizes(80_143)
    print(f"  70/10/20 split    -> train {train:,}, val {val:,}, test {test:,}\n")

    corpus = synth_corpus(per_class=8, seed=3)
    dataset = build_dataset(build_half_banks(corpus))
    print(f"demo corpus: 7 x 8 sources -> {len(dataset)} composites")

    for mode in ("paper", "source-disjoint"):
        manifest = stratified_split(dataset, seed=3, leakage_mode=mode)
        sizes = manifest.split_sizes()
        kept = sum(sizes)
        print(f"\n{mode} split: train/val/test = {sizes}, kept {kept}/{len(dataset)}")
        test_sources = {s for i in manifest.splits["test"] for s in dataset.sources_of(i)}
        train_sources = {s for i in manifest.splits["train"] for s in dataset.sources_of(i)}
        shared = sorted(test_sources & train_sources)
        print(f"  sources contributing to both train and test: {len(shared)}")


if __name__ == "__main__":
    main()
