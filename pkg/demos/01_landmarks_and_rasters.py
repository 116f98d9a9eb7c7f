"""From 68 facial key points to the 96x96 network input.

Walks the front of the pipeline: generate a few synthetic landmark faces,
canonicalize them (feature box scaled to 80 px, nose tip pinned to row 48),
render the polyline raster, and show the upper/lower split that the
augmentation stage feeds on. Prints ASCII thumbnails so no display is needed.
"""

import numpy as np

from maya.augment import synth_corpus
from maya.landmarks import normalize, rasterize, split_halves

GLYPHS = " .:-=+*#%@"


def thumbnail(pixels, rows=24, cols=48):
    """Coarse ASCII rendering of a [0,1] image."""
    h, w = pixels.shape
    out = []
    for r in range(rows):
        line = []
        for c in range(cols):
            block = pixels[r * h // rows:(r + 1) * h // rows,
                           c * w // cols:(c + 1) * w // cols]
            line.append(GLYPHS[min(int(block.max() * (len(GLYPHS) - 1) * 2), len(GLYPHS) - 1)])
        out.append("".join(line))
    return "\n".join(out)


def main():
    corpus = synth_corpus(per_class=1, seed=7)
    for ls in corpus:
        norm = normalize(ls)
        raster = rasterize(norm)
        upper, lower = split_halves(raster)
        print(f"\n=== {ls.label.display_name} ({ls.subject_id}) ===")
        print(f"nose tip row after normalization: {norm.points[30, 1]:.1f} "
              f"(seam row {raster.seam_row})")
        print(f"lit pixels: {np.count_nonzero(raster.pixels)} "
              f"(upper {np.count_nonzero(upper)}, lower {np.count_nonzero(lower)})")
        print(thumbnail(raster.pixels))


if __name__ == "__main__":
    main()
