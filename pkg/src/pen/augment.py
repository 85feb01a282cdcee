"""Photometric image variants for the consistency pretext task, plus the
geometric flip/rotation augmentation used when training on paired data.

Variants deliberately never touch geometry: crops, scales, or warps would
break the pixel correspondence between the two variants of a source image,
which the consistency objective depends on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InvalidFactorError
from .imagecore import SamplePair, to_gray, validate_image

KINDS = ("brightness", "saturation", "contrast", "sharpness")

DEFAULT_FACTOR_RANGE = (0.5, 1.5)
DEFAULT_ROTATION_DEG = 10.0
DEFAULT_FLIP_PROB = 0.5


@dataclass(frozen=True)
class VariantSpec:
    kind: str
    factor: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown variant kind {self.kind!r}")
        if not self.factor > 0:
            raise InvalidFactorError(f"factor must be > 0, got {self.factor}")


@dataclass(frozen=True)
class VariantPair:
    a: np.ndarray
    b: np.ndarray
    source_id: str
    spec_a: VariantSpec
    spec_b: VariantSpec


def _box_blur3(img: np.ndarray) -> np.ndarray:
    # 3x3 box mean with edge-replicate padding, per channel
    pad = np.pad(img, ((1, 1), (1, 1), (0, 0)), mode="edge")
    out = np.zeros_like(img, dtype=np.float64)
    for dy in (0, 1, 2):
        for dx in (0, 1, 2):
            out += pad[dy : dy + img.shape[0], dx : dx + img.shape[1]]
    return (out / 9.0).astype(img.dtype)


def apply_variant(img: np.ndarray, spec: VariantSpec) -> np.ndarray:
    """Apply one photometric enhancement; factor 1.0 is the exact identity.

    Definitions (f = factor, lerp(a, b, f) = a + f*(b - a)):
      brightness: x * f
      saturation: lerp(gray(x), x, f)
      contrast:   lerp(mean(gray(x)), x, f)
      sharpness:  lerp(blur3x3(x), x, f)
    Output is clamped to [0, 1].
    """
    validate_image(img)
    if not spec.factor > 0:
        raise InvalidFactorError(f"factor must be > 0, got {spec.factor}")
    f = img.dtype.type(spec.factor)
    if spec.factor == 1.0:
        return img.copy()
    if spec.kind == "brightness":
        out = img * f
    elif spec.kind == "saturation":
        base = to_gray(img)[:, :, None]
        out = base + f * (img - base)
    elif spec.kind == "contrast":
        base = img.dtype.type(to_gray(img).mean())
        out = base + f * (img - base)
    elif spec.kind == "sharpness":
        base = _box_blur3(img)
        out = base + f * (img - base)
    else:  # pragma: no cover - guarded by VariantSpec
        raise ValueError(spec.kind)
    return np.clip(out, 0.0, 1.0)


def sample_variant_pair(
    img: np.ndarray,
    rng: np.random.Generator,
    source_id: str = "",
    factor_range: tuple = DEFAULT_FACTOR_RANGE,
) -> VariantPair:
    """Draw two independent specs and apply them to copies of the image.

    Geometry is never changed. The two specs are sampled independently and
    may coincide.
    """

    def draw():
        kind = KINDS[int(rng.integers(len(KINDS)))]
        factor = float(rng.uniform(*factor_range))
        return VariantSpec(kind, factor)

    spec_a, spec_b = draw(), draw()
    return VariantPair(
        a=apply_variant(img, spec_a),
        b=apply_variant(img, spec_b),
        source_id=source_id,
        spec_a=spec_a,
        spec_b=spec_b,
    )


def _rotate_image(img: np.ndarray, angle_deg: float) -> np.ndarray:
    # bilinear, edge-replicate fill
    out = ndimage.rotate(
        img, angle_deg, axes=(1, 0), reshape=False, order=1, mode="nearest", prefilter=False
    )
    return np.clip(out, 0.0, 1.0).astype(img.dtype)


def _rotate_mask(mask: np.ndarray, angle_deg: float) -> np.ndarray:
    # nearest-neighbor, zero fill: masks stay hard
    out = ndimage.rotate(
        mask, angle_deg, axes=(1, 0), reshape=False, order=0, mode="constant", cval=0.0,
        prefilter=False,
    )
    return np.clip(out, 0.0, 1.0).astype(mask.dtype)


def train_augment(
    pair: SamplePair,
    rng: np.random.Generator,
    rotation_deg: float = DEFAULT_ROTATION_DEG,
    flip_prob: float = DEFAULT_FLIP_PROB,
) -> SamplePair:
    """Random horizontal flip and rotation, applied identically to the
    original, the erased ground truth, and the stroke target."""
    flip = bool(rng.random() < flip_prob)
    angle = float(rng.uniform(-rotation_deg, rotation_deg)) if rotation_deg > 0 else 0.0

    original, erased, stroke = pair.original, pair.erased_gt, pair.stroke_gt
    if flip:
        original = original[:, ::-1].copy()
        erased = erased[:, ::-1].copy()
        stroke = stroke[:, ::-1].copy()
    if angle != 0.0:
        original = _rotate_image(original, angle)
        erased = _rotate_image(erased, angle)
        stroke = _rotate_mask(stroke, angle)
    return SamplePair(original=original, erased_gt=erased, stroke_gt=stroke, id=pair.id)
