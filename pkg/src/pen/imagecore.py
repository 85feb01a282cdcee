"""Image and mask data model, file I/O, and paired-dataset indexing.

Pixels live in a single canonical domain throughout the package: float32
arrays of shape (H, W, C) with C in {1, 3} and values in [0, 1]. Byte-space
conversion happens only at file boundaries (and inside metrics defined on
0-255 gray levels, which convert explicitly).
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    DecodeError,
    EmptyDatasetError,
    InvalidSizeError,
    ShapeMismatchError,
)

log = logging.getLogger(__name__)

# Luma weights for gray conversion (standard convention for gray-level metrics).
LUMA = (0.299, 0.587, 0.114)

IMAGE_EXTS = (".png", ".jpg", ".jpeg")


def validate_image(img: np.ndarray, name: str = "image") -> np.ndarray:
    """Check the (H, W, C) [0, 1] contract and return the array unchanged.

    Size floors (divisibility by 16, minimum side) are enforced where they
    actually bind, at the network entry points.
    """
    if img.ndim != 3 or img.shape[2] not in (1, 3):
        raise ShapeMismatchError(f"{name}: expected (H, W, C) with C in {{1, 3}}, got {img.shape}")
    if not np.isfinite(img).all():
        raise ValueError(f"{name}: contains non-finite values")
    if img.min() < 0.0 or img.max() > 1.0:
        raise ValueError(f"{name}: values outside [0, 1]")
    return img


def validate_mask(mask: np.ndarray, name: str = "mask") -> np.ndarray:
    if mask.ndim != 3 or mask.shape[2] != 1:
        raise ShapeMismatchError(f"{name}: expected (H, W, 1), got {mask.shape}")
    if mask.min() < 0.0 or mask.max() > 1.0:
        raise ValueError(f"{name}: values outside [0, 1]")
    return mask


@dataclass(frozen=True)
class SamplePair:
    """One training example: scene image, its erased counterpart, stroke target."""

    original: np.ndarray
    erased_gt: np.ndarray
    stroke_gt: np.ndarray
    id: str = ""

    def __post_init__(self):
        if self.original.shape != self.erased_gt.shape:
            raise ShapeMismatchError(
                f"original {self.original.shape} vs erased_gt {self.erased_gt.shape}"
            )
        if self.stroke_gt.shape[:2] != self.original.shape[:2]:
            raise ShapeMismatchError(
                f"stroke_gt {self.stroke_gt.shape} does not match images {self.original.shape}"
            )


@dataclass(frozen=True)
class DatasetIndex:
    """Sorted listing of paired files under a dataset root.

    entries holds (original_path, gt_path, id) tuples; gt_path is None for
    unlabeled (image-only) indexes. Files present on only one side are kept
    in `unmatched` and logged, never silently dropped.
    """

    root: Path
    entries: list
    split: str = "train"
    unmatched: list = field(default_factory=list)

    def __len__(self):
        return len(self.entries)


def load_image(path) -> np.ndarray:
    """Decode an 8-bit RGB or grayscale raster into a float32 (H, W, C) array.

    Values are scaled from {0..255} to [0, 1] by division by 255; channel
    order is RGB.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    try:
        with Image.open(path) as im:
            if im.mode in ("1", "L", "I", "I;16"):
                im = im.convert("L")
            elif im.mode != "RGB":
                im = im.convert("RGB")
            arr = np.asarray(im, dtype=np.float32) / 255.0
    except UnidentifiedImageError as e:
        raise DecodeError(f"cannot decode {path}: {e}") from e
    except OSError as e:
        raise DecodeError(f"cannot decode {path}: {e}") from e
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return arr


def save_image(img: np.ndarray, path) -> None:
    """Write a [0, 1] image as an 8-bit raster (PNG recommended).

    Round-tripping through save/load changes each element by at most 1/255
    (quantization).
    """
    validate_image(img)
    data = np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)
    if data.shape[2] == 1:
        pil = Image.fromarray(data[:, :, 0], mode="L")
    else:
        pil = Image.fromarray(data, mode="RGB")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pil.save(path)


def _list_images(d: Path) -> dict:
    out = {}
    if not d.is_dir():
        return out
    for name in sorted(os.listdir(d)):
        if name.lower().endswith(IMAGE_EXTS):
            out[name] = d / name
    return out


def index_dataset(root, split: str = "train") -> DatasetIndex:
    """Index a root with `images/` and `gt/` sibling dirs paired by filename.

    If `root/manifest.csv` exists it takes precedence (one
    `id,original_path,gt_path` line per sample, paths relative to root).
    """
    root = Path(root)
    manifest = root / "manifest.csv"
    if manifest.is_file():
        return index_manifest(manifest, split=split)
    images = _list_images(root / "images")
    gts = _list_images(root / "gt")
    entries = []
    unmatched = []
    for name in sorted(set(images) | set(gts)):
        if name in images and name in gts:
            entries.append((images[name], gts[name], Path(name).stem))
        else:
            side = "images" if name in images else "gt"
            unmatched.append(name)
            log.warning("unpaired file %s (only in %s/)", name, side)
    if not entries:
        raise EmptyDatasetError(f"no paired samples under {root}")
    return DatasetIndex(root=root, entries=entries, split=split, unmatched=unmatched)


def index_manifest(path, split: str = "train") -> DatasetIndex:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(str(path))
    base = path.parent
    entries = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise EmptyDatasetError(f"{path}:{lineno}: expected 'id,original_path,gt_path'")
        sid, orig, gt = (p.strip() for p in parts)
        entries.append((base / orig, base / gt, sid))
    if not entries:
        raise EmptyDatasetError(f"empty manifest {path}")
    entries.sort(key=lambda e: e[2])
    for orig, gt, sid in entries:
        if not orig.exists() or not gt.exists():
            raise FileNotFoundError(f"manifest sample {sid}: missing {orig if not orig.exists() else gt}")
    return DatasetIndex(root=base, entries=entries, split=split)


def index_images(root, split: str = "train") -> DatasetIndex:
    """Index a flat directory of images with no ground truth (unlabeled data)."""
    root = Path(root)
    images = _list_images(root)
    entries = [(p, None, Path(name).stem) for name, p in sorted(images.items())]
    if not entries:
        raise EmptyDatasetError(f"no images under {root}")
    return DatasetIndex(root=root, entries=entries, split=split)


def to_gray(img: np.ndarray) -> np.ndarray:
    """Luma grayscale in [0, 1], shape (H, W)."""
    if img.shape[2] == 1:
        return img[:, :, 0]
    r, g, b = LUMA
    return r * img[:, :, 0] + g * img[:, :, 1] + b * img[:, :, 2]


def resize_bilinear(img: np.ndarray, h: int, w: int) -> np.ndarray:
    """Bilinear resize with half-pixel-center sampling.

    Resizing to the same size is the exact identity, and constant images stay
    exactly constant (interpolation is computed as a + w*(b - a)).
    """
    validate_image(img)
    if h < 1 or w < 1:
        raise InvalidSizeError(f"invalid target size {h}x{w}")
    src_h, src_w = img.shape[:2]
    if (h, w) == (src_h, src_w):
        return img.copy()

    def axis_coords(dst, src):
        pos = (np.arange(dst, dtype=np.float64) + 0.5) * (src / dst) - 0.5
        pos = np.clip(pos, 0.0, src - 1.0)
        lo = np.floor(pos).astype(np.int64)
        hi = np.minimum(lo + 1, src - 1)
        return lo, hi, (pos - lo).astype(img.dtype)

    y0, y1, wy = axis_coords(h, src_h)
    x0, x1, wx = axis_coords(w, src_w)

    def lerp(a, b, t):
        return a + t * (b - a)

    rows0 = img[y0]
    rows1 = img[y1]
    wx3 = wx[None, :, None]
    top = lerp(rows0[:, x0], rows0[:, x1], wx3)
    bot = lerp(rows1[:, x0], rows1[:, x1], wx3)
    out = lerp(top, bot, wy[:, None, None])
    return np.clip(out, 0.0, 1.0).astype(img.dtype)
