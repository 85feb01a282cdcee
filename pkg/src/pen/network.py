"""Generator: stroke-mask prediction network and the iterative erasing U-Net.

The erasing module is applied K times with a single shared weight set; the
stroke mask is predicted once up front and fed to every iteration. All
image-valued outputs pass through a terminal sigmoid, so they stay in
[0, 1] for any finite parameter values.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np
import torch
import torch.nn as nn

from .errors import BadShapeError

DOWNSCALE = 16  # four stride-2 stages each way


@dataclass(frozen=True)
class NetConfig:
    base_channels: int = 32
    iterations: int = 3
    dilation_rates: tuple = (2, 4, 8, 16)
    stroke_blocks: int = 2  # residual blocks per stroke-encoder stage
    repredict_stroke: bool = False  # predict a fresh mask each iteration

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not self.dilation_rates:
            raise ValueError("dilation_rates must be nonempty")
        if self.base_channels < 4:
            raise ValueError("base_channels must be >= 4")

    def arch_hash(self) -> str:
        """Hash of the fields that determine parameter shapes.

        iterations and repredict_stroke are runtime knobs (shared weights),
        so the same checkpoint loads under any iteration count.
        """
        payload = {
            "arch": 1,
            "base_channels": self.base_channels,
            "dilation_rates": list(self.dilation_rates),
            "stroke_blocks": self.stroke_blocks,
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class EraseResult:
    final: torch.Tensor
    intermediates: list
    stroke: torch.Tensor


def _check_spatial(x: torch.Tensor, what: str) -> None:
    h, w = x.shape[-2], x.shape[-1]
    if h % DOWNSCALE or w % DOWNSCALE or h < DOWNSCALE or w < DOWNSCALE:
        raise BadShapeError(f"{what}: H and W must be multiples of {DOWNSCALE}, got {h}x{w}")


def conv_in_relu(cin, cout, stride=1, kernel=3, dilation=1):
    pad = dilation * (kernel // 2)
    return nn.Sequential(
        nn.Conv2d(cin, cout, kernel, stride=stride, padding=pad, dilation=dilation),
        nn.InstanceNorm2d(cout, affine=True),
        nn.ReLU(inplace=True),
    )


class ResidualBlock(nn.Module):
    def __init__(self, ch):
        super().__init__()
        self.body = nn.Sequential(
            nn.Conv2d(ch, ch, 3, padding=1),
            nn.InstanceNorm2d(ch, affine=True),
            nn.ReLU(inplace=True),
            nn.Conv2d(ch, ch, 3, padding=1),
            nn.InstanceNorm2d(ch, affine=True),
        )
        self.act = nn.ReLU(inplace=True)

    def forward(self, x):
        return self.act(x + self.body(x))


class Upsample(nn.Module):
    """Nearest-neighbor x2 followed by a 3x3 conv."""

    def __init__(self, cin, cout):
        super().__init__()
        self.conv = conv_in_relu(cin, cout)

    def forward(self, x):
        return self.conv(nn.functional.interpolate(x, scale_factor=2, mode="nearest"))


class StrokeNet(nn.Module):
    """Encoder-decoder producing per-pixel text-stroke logits.

    Encoder downsamples x16 with residual stages; decoder upsamples x16 and
    element-wise sums the matching encoder feature at each scale.
    """

    def __init__(self, base_channels: int = 32, blocks_per_stage: int = 2):
        super().__init__()
        c = base_channels
        widths = [c, c, 2 * c, 4 * c, 8 * c]  # stem, /2, /4, /8, /16
        self.stem = conv_in_relu(3, widths[0])
        stages = []
        for cin, cout in zip(widths[:-1], widths[1:]):
            layers = [conv_in_relu(cin, cout, stride=2)]
            layers += [ResidualBlock(cout) for _ in range(blocks_per_stage)]
            stages.append(nn.Sequential(*layers))
        self.stages = nn.ModuleList(stages)
        self.ups = nn.ModuleList(
            Upsample(cin, cout) for cin, cout in zip(widths[:0:-1], widths[-2::-1])
        )
        self.head = nn.Conv2d(widths[0], 1, 3, padding=1)

    def forward(self, x):
        feats = [self.stem(x)]
        for stage in self.stages:
            feats.append(stage(feats[-1]))
        y = feats[-1]
        for up, skip in zip(self.ups, feats[-2::-1]):
            y = up(y) + skip
        return self.head(y)


class SkipTransform(nn.Module):
    """Residual transform applied to each encoder feature before it joins
    the decoder: 1x1 reduce, two 3x3 convs, 1x1 restore, plus identity."""

    def __init__(self, ch):
        super().__init__()
        mid = max(ch // 4, 4)
        self.body = nn.Sequential(
            conv_in_relu(ch, mid, kernel=1),
            conv_in_relu(mid, mid),
            conv_in_relu(mid, mid),
            nn.Conv2d(mid, ch, 1),
            nn.InstanceNorm2d(ch, affine=True),
        )

    def forward(self, x):
        return x + self.body(x)


class EraseNet(nn.Module):
    """One erasing pass: U-Net over (image, stroke mask) with a dilated
    bottleneck and residual skip transforms."""

    def __init__(self, base_channels: int = 32, dilation_rates=(2, 4, 8, 16)):
        super().__init__()
        c = base_channels
        widths = [c, 2 * c, 4 * c, 8 * c, 8 * c]  # stem, /2, /4, /8, /16
        self.stem = conv_in_relu(4, widths[0])
        self.downs = nn.ModuleList(
            conv_in_relu(cin, cout, stride=2) for cin, cout in zip(widths[:-1], widths[1:])
        )
        self.bottleneck = nn.Sequential(
            *[conv_in_relu(widths[-1], widths[-1], dilation=d) for d in dilation_rates]
        )
        self.skips = nn.ModuleList(SkipTransform(ch) for ch in widths[:-1])
        self.ups = nn.ModuleList(
            Upsample(cin, cout) for cin, cout in zip(widths[:0:-1], widths[-2::-1])
        )
        self.head = nn.Conv2d(widths[0], 3, 3, padding=1)

    def forward(self, img, stroke):
        x = torch.cat([img, stroke], dim=1)
        feats = [self.stem(x)]
        for down in self.downs:
            feats.append(down(feats[-1]))
        y = self.bottleneck(feats[-1])
        for up, skip_mod, skip in zip(self.ups, self.skips[::-1], feats[-2::-1]):
            y = up(y) + skip_mod(skip)
        return self.head(y)


class PenGenerator(nn.Module):
    """Stroke module + shared-weight erasing module."""

    def __init__(self, cfg: NetConfig):
        super().__init__()
        self.cfg = cfg
        self.stroke_net = StrokeNet(cfg.base_channels, cfg.stroke_blocks)
        self.erase_net = EraseNet(cfg.base_channels, cfg.dilation_rates)
        self.config_hash = cfg.arch_hash()

    def stroke_logits(self, img: torch.Tensor) -> torch.Tensor:
        _check_spatial(img, "stroke input")
        if img.shape[1] != 3:
            raise BadShapeError(f"expected 3-channel input, got {img.shape[1]}")
        return self.stroke_net(img)

    def forward_stroke(self, img: torch.Tensor) -> torch.Tensor:
        """Soft stroke mask in (0, 1), shape (N, 1, H, W)."""
        return torch.sigmoid(self.stroke_logits(img))

    def erase_once(self, img: torch.Tensor, stroke: torch.Tensor) -> torch.Tensor:
        """One refinement pass over (image, mask); output in (0, 1)."""
        _check_spatial(img, "erase input")
        if img.shape[-2:] != stroke.shape[-2:] or stroke.shape[1] != 1:
            raise BadShapeError(
                f"stroke {tuple(stroke.shape)} incompatible with image {tuple(img.shape)}"
            )
        return torch.sigmoid(self.erase_net(img, stroke))

    def erase_progressive(
        self, img: torch.Tensor, iterations: int | None = None, stroke: torch.Tensor | None = None
    ) -> EraseResult:
        """Predict the stroke mask once, then apply the erasing pass K times.

        Passing `stroke` skips the prediction (used when the caller needs
        gradient control over the mask). With cfg.repredict_stroke the mask
        is re-predicted from each intermediate result instead.
        """
        k = self.cfg.iterations if iterations is None else iterations
        if k < 1:
            raise ValueError("iterations must be >= 1")
        if stroke is None:
            stroke = self.forward_stroke(img)
        x = img
        intermediates = []
        for step in range(k):
            if self.cfg.repredict_stroke and step > 0:
                stroke = self.forward_stroke(x)
            x = self.erase_once(x, stroke)
            intermediates.append(x)
        return EraseResult(final=x, intermediates=intermediates, stroke=stroke)

    def forward(self, img):
        return self.erase_progressive(img)


def init_params(cfg: NetConfig, seed: int = 0) -> PenGenerator:
    """Build a generator with seed-deterministic initialization."""
    with torch.random.fork_rng():
        torch.manual_seed(seed)
        gen = PenGenerator(cfg)
    return gen


def param_count(module: nn.Module) -> int:
    return sum(p.numel() for p in module.parameters())


def to_tensor(img: np.ndarray, dtype=torch.float32) -> torch.Tensor:
    """(H, W, C) [0,1] numpy image -> (1, C, H, W) torch tensor."""
    if img.ndim != 3:
        raise BadShapeError(f"expected (H, W, C), got {img.shape}")
    return torch.from_numpy(np.ascontiguousarray(img.transpose(2, 0, 1))).to(dtype).unsqueeze(0)


def from_tensor(x: torch.Tensor) -> np.ndarray:
    """(1, C, H, W) or (C, H, W) torch tensor -> (H, W, C) float32 numpy."""
    if x.ndim == 4:
        if x.shape[0] != 1:
            raise BadShapeError("from_tensor expects a single image")
        x = x[0]
    arr = x.detach().cpu().numpy().transpose(1, 2, 0)
    return np.ascontiguousarray(arr, dtype=np.float32)
