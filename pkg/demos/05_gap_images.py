"""
Rendering cone gaps as images
=============================

When features are pixels, a gap vector between two aligned class cones
is itself an image: bright and dark regions mark where the classes
disagree. This script builds two cone models of 8x8 "images", renders
the gap maps with Otsu highlight masks, and writes them as PGM files.
"""

import pathlib
import tempfile

import numpy as np

from coneset import (
    align_cones,
    cone_from_features,
    gap_image,
    gap_vectors,
    otsu_threshold,
    write_pgm,
)

rng = np.random.default_rng(5)
width = height = 8

# 1. Two classes of images: both light up a shared band, each adds its
#    own corner blob.
base = np.zeros((height, width))
base[3:5, :] = 1.0
blob_a = np.zeros((height, width))
blob_a[0:3, 0:3] = 1.0
blob_b = np.zeros((height, width))
blob_b[5:8, 5:8] = 1.0


def sample_set(blob):
    images = []
    for _ in range(25):
        img = (1.0 + rng.random()) * base + (0.5 + rng.random()) * blob
        img += 0.05 * rng.random((height, width))
        images.append(img.ravel())
    return np.column_stack(images)


cone_a = cone_from_features(sample_set(blob_a), 3, seed=0)
cone_b = cone_from_features(sample_set(blob_b), 3, seed=1)

# 2. Align the cones and turn each level's gap into an 8-bit image.
aligned = align_cones([cone_a, cone_b], 2)
gaps = gap_vectors(aligned)
out_dir = pathlib.Path(tempfile.mkdtemp(prefix="gap_images_"))
for level in range(gaps.gaps.shape[0]):
    vector = gaps.gaps[level, 0]
    img = gap_image(vector, width, height)
    path = out_dir / f"gap_level{level}.pgm"
    write_pgm(path, img.values, f"level {level}")
    thr = otsu_threshold(img.values)
    print(f"level {level}: range [{img.vmin:+.3f}, {img.vmax:+.3f}] "
          f"otsu={thr} highlighted={int(img.highlight_mask.sum())} px "
          f"-> {path}")

# 3. The mean of absolute gaps summarizes everything the classes
#    disagree on; the corner blobs light up, the shared band does not.
mean_abs = np.abs(gaps.gaps.reshape(-1, width * height)).mean(axis=0)
img = gap_image(mean_abs, width, height)
write_pgm(out_dir / "gap_mean.pgm", img.values, "mean absolute gap")
print(f"mean map: otsu={otsu_threshold(img.values)} "
      f"highlighted={int(img.highlight_mask.sum())} px")
print("\nhighlight mask of the mean map (X = above threshold):")
for row in img.highlight_mask:
    print("  " + "".join("X" if v else "." for v in row))
