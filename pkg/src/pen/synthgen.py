"""Lite synthetic paired-data engine.

Composites rendered text onto background images to produce (original,
erased ground truth) pairs, and derives hard stroke targets by thresholded
subtraction. This is deliberately small: a bundled bitmap font, flat
placement, no perspective or scene-aware warping.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from . import fonts
from .errors import EmptyTextError, GlyphOverflowError, ShapeMismatchError
from .imagecore import DatasetIndex, SamplePair, resize_bilinear, save_image, to_gray

DEFAULT_TAU = 25.0 / 255.0

MIN_CONTRAST = 0.3


@dataclass(frozen=True)
class StrokeThreshold:
    """Gray-level threshold separating stroke pixels from background noise."""

    tau: float = DEFAULT_TAU

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must be in (0, 1), got {self.tau}")


@dataclass(frozen=True)
class RenderSpec:
    text: str
    font_id: int = 0
    size_px: int = 14
    color: tuple = None
    position: tuple = (0, 0)  # (row, col) of the glyph box top-left
    rotation_deg: float = 0.0


def derive_stroke_target(original: np.ndarray, gt: np.ndarray, tau=DEFAULT_TAU) -> np.ndarray:
    """Hard {0, 1} stroke mask: 1 where any channel differs by more than tau.

    Monotone in tau: raising the threshold can only clear pixels, never set
    new ones.
    """
    if isinstance(tau, StrokeThreshold):
        tau = tau.tau
    if original.shape != gt.shape:
        raise ShapeMismatchError(f"original {original.shape} vs gt {gt.shape}")
    diff = np.abs(original.astype(np.float32) - gt.astype(np.float32)).max(axis=2)
    return (diff > tau).astype(np.float32)[:, :, None]


def _glyph_alpha(spec: RenderSpec, antialias: bool = True) -> np.ndarray:
    if not spec.text:
        raise EmptyTextError("render spec with empty text")
    bitmap = fonts.text_bitmap(spec.text, spec.font_id)
    scale = spec.size_px / fonts.GLYPH_H
    h = max(1, int(round(bitmap.shape[0] * scale)))
    w = max(1, int(round(bitmap.shape[1] * scale)))
    alpha = resize_bilinear(bitmap[:, :, None], h, w)[:, :, 0]
    if spec.rotation_deg != 0.0:
        alpha = ndimage.rotate(
            alpha, spec.rotation_deg, reshape=True, order=1, mode="constant", cval=0.0,
            prefilter=False,
        )
        alpha = np.clip(alpha, 0.0, 1.0)
    if not antialias:
        alpha = (alpha > 0.5).astype(np.float32)
    return alpha.astype(np.float32)


def contrast_color(color: np.ndarray, bg_mean_gray: float, min_contrast: float = MIN_CONTRAST):
    """Push a candidate color toward black or white until its gray level
    differs from the local background mean by at least min_contrast."""
    color = np.asarray(color, dtype=np.float32)
    g = float(np.dot(color, np.array([0.299, 0.587, 0.114], dtype=np.float32)))
    if abs(g - bg_mean_gray) >= min_contrast:
        return color
    target = 0.0 if bg_mean_gray >= 0.5 else 1.0
    want = bg_mean_gray - min_contrast if target == 0.0 else bg_mean_gray + min_contrast
    denom = target - g
    alpha = 1.0 if abs(denom) < 1e-6 else float(np.clip((want - g) / denom, 0.0, 1.0))
    return np.clip(color + alpha * (target - color), 0.0, 1.0)


def render_text_pair(
    background: np.ndarray,
    specs,
    rng: np.random.Generator | None = None,
    tau: float = DEFAULT_TAU,
    antialias: bool = True,
    sample_id: str = "",
) -> SamplePair:
    """Composite glyphs onto a copy of the background.

    The erased ground truth is the untouched background; a spec with
    color=None gets a color sampled from rng with enforced contrast against
    the local background mean.
    """
    specs = list(specs)
    if not specs:
        raise EmptyTextError("no render specs given")
    if background.ndim != 3 or background.shape[2] != 3:
        raise ShapeMismatchError(f"background must be (H, W, 3), got {background.shape}")
    h, w = background.shape[:2]
    original = background.copy()
    for spec in specs:
        alpha = _glyph_alpha(spec, antialias=antialias)
        gh, gw = alpha.shape
        r, c = spec.position
        if r < 0 or c < 0 or r + gh > h or c + gw > w:
            raise GlyphOverflowError(
                f"glyph {spec.text!r} ({gh}x{gw} at {spec.position}) outside {h}x{w} image"
            )
        region = original[r : r + gh, c : c + gw]
        color = spec.color
        if color is None:
            if rng is None:
                raise ValueError("spec.color is None and no rng given to sample one")
            bg_mean = float(to_gray(region).mean())
            color = contrast_color(rng.uniform(0.0, 1.0, size=3), bg_mean)
        color = np.asarray(color, dtype=np.float32).reshape(1, 1, 3)
        a3 = alpha[:, :, None]
        original[r : r + gh, c : c + gw] = np.clip(region + a3 * (color - region), 0.0, 1.0)
    return SamplePair(
        original=original,
        erased_gt=background.copy(),
        stroke_gt=derive_stroke_target(original, background, tau),
        id=sample_id,
    )


def random_background(h: int, w: int, rng: np.random.Generator) -> np.ndarray:
    """Smooth procedural background: low-frequency noise over a soft gradient."""
    coarse = rng.uniform(0.15, 0.85, size=(4, 4, 3)).astype(np.float32)
    base = resize_bilinear(coarse, h, w)
    gy = np.linspace(-0.08, 0.08, h, dtype=np.float32)[:, None, None]
    gx = np.linspace(-0.08, 0.08, w, dtype=np.float32)[None, :, None]
    return np.clip(base + gy + gx, 0.0, 1.0)


def random_specs(h: int, w: int, rng: np.random.Generator, max_words: int = 2):
    """Sample render specs that are guaranteed to fit an h x w canvas."""
    specs = []
    for _ in range(int(rng.integers(1, max_words + 1))):
        n_chars = int(rng.integers(2, 5))
        text = "".join(rng.choice(list(fonts.CHARSET)) for _ in range(n_chars))
        size_lo = 10
        size_hi = max(size_lo + 1, min(h, w) // 3)
        for _ in range(20):
            spec = RenderSpec(
                text=text,
                font_id=int(rng.integers(fonts.NUM_FACES)),
                size_px=int(rng.integers(size_lo, size_hi + 1)),
                color=None,
                position=(0, 0),
                rotation_deg=float(rng.uniform(-15.0, 15.0)),
            )
            gh, gw = _glyph_alpha(spec).shape
            if gh < h and gw < w:
                r = int(rng.integers(0, h - gh))
                c = int(rng.integers(0, w - gw))
                specs.append(RenderSpec(**{**asdict(spec), "position": (r, c)}))
                break
    if not specs:  # degenerate canvas; fall back to a single small glyph
        specs.append(RenderSpec(text="A", size_px=10, color=None, position=(0, 0)))
    return specs


def _sample_rng(master_seed: int, index: int) -> np.random.Generator:
    # (master seed, sample index) -> independent stream; parallel == serial
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(index,)))


def generate_toy_dataset(
    backgrounds,
    n: int,
    out_root,
    rng,
    size: int = 64,
    tau: float = DEFAULT_TAU,
) -> DatasetIndex:
    """Write n synthetic pairs in the standard dataset layout.

    Layout: out_root/{images,gt,stroke}/NNNN.png plus meta.jsonl with one
    render record per sample. Deterministic for a fixed seed regardless of
    generation order.
    """
    backgrounds = list(backgrounds)
    if not backgrounds:
        raise EmptyTextError("need at least one background")
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(rng, np.random.Generator):
        master_seed = int(rng.integers(0, 2**63 - 1))
    else:
        master_seed = int(rng)
    out_root = Path(out_root)
    meta_lines = []
    entries = []
    for i in range(n):
        srng = _sample_rng(master_seed, i)
        bg = backgrounds[int(srng.integers(len(backgrounds)))]
        bg = resize_bilinear(np.asarray(bg, dtype=np.float32), size, size)
        sid = f"{i:04d}"
        specs = random_specs(size, size, srng)
        pair = render_text_pair(bg, specs, rng=srng, tau=tau, sample_id=sid)
        img_path = out_root / "images" / f"{sid}.png"
        gt_path = out_root / "gt" / f"{sid}.png"
        save_image(pair.original, img_path)
        save_image(pair.erased_gt, gt_path)
        save_image(pair.stroke_gt, out_root / "stroke" / f"{sid}.png")
        meta_lines.append(json.dumps({"id": sid, "specs": [asdict(s) for s in specs]}))
        entries.append((img_path, gt_path, sid))
    (out_root / "meta.jsonl").write_text("\n".join(meta_lines) + "\n", encoding="utf-8")
    return DatasetIndex(root=out_root, entries=entries, split="train")
