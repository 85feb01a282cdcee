"""Bundled 5x7 bitmap font used by the synthetic text renderer.

Two faces are provided: face 0 is the plain bitmap, face 1 is a bold
variant derived by 1-pixel horizontal dilation. Glyphs cover A-Z and 0-9;
unknown characters render as a filled block, space as a gap.
"""

from __future__ import annotations

import numpy as np

_RAW = {
    "A": (".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "B": ("####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."),
    "C": (".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."),
    "D": ("####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."),
    "E": ("#####", "#....", "#....", "####.", "#....", "#....", "#####"),
    "F": ("#####", "#....", "#....", "####.", "#....", "#....", "#...."),
    "G": (".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".###."),
    "H": ("#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "I": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "#####"),
    "J": ("..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."),
    "K": ("#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"),
    "L": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "M": ("#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"),
    "N": ("#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"),
    "O": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "P": ("####.", "#...#", "#...#", "####.", "#....", "#....", "#...."),
    "Q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "R": ("####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"),
    "S": (".####", "#....", "#....", ".###.", "....#", "....#", "####."),
    "T": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "U": ("#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "V": ("#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."),
    "W": ("#...#", "#...#", "#...#", "#.#.#", "#.#.#", "##.##", "#...#"),
    "X": ("#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"),
    "Y": ("#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."),
    "Z": ("#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"),
    "0": (".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."),
    "1": ("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", "#####"),
    "2": (".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"),
    "3": (".###.", "#...#", "....#", "..##.", "....#", "#...#", ".###."),
    "4": ("...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."),
    "5": ("#####", "#....", "####.", "....#", "....#", "#...#", ".###."),
    "6": (".###.", "#....", "#....", "####.", "#...#", "#...#", ".###."),
    "7": ("#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."),
    "8": (".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),
    "9": (".###.", "#...#", "#...#", ".####", "....#", "....#", ".###."),
}

GLYPH_H = 7
GLYPH_W = 5
NUM_FACES = 2

_BLOCK = ("#####",) * GLYPH_H

CHARSET = "".join(sorted(_RAW))


def _to_bits(rows) -> np.ndarray:
    return np.array([[1.0 if ch == "#" else 0.0 for ch in row] for row in rows], dtype=np.float32)


_GLYPHS = {ch: _to_bits(rows) for ch, rows in _RAW.items()}


def glyph(ch: str, face: int = 0) -> np.ndarray:
    """Binary (7, 5) bitmap for one character."""
    if face not in range(NUM_FACES):
        raise ValueError(f"unknown font face {face}")
    if ch == " ":
        base = np.zeros((GLYPH_H, GLYPH_W), dtype=np.float32)
    else:
        base = _GLYPHS.get(ch.upper(), _to_bits(_BLOCK))
    if face == 1 and ch != " ":
        shifted = np.zeros_like(base)
        shifted[:, 1:] = base[:, :-1]
        base = np.maximum(base, shifted)
    return base.copy()


def text_bitmap(text: str, face: int = 0) -> np.ndarray:
    """Binary bitmap for a string: glyphs side by side with 1-column gaps."""
    if not text:
        raise ValueError("empty text")
    cols = []
    gap = np.zeros((GLYPH_H, 1), dtype=np.float32)
    for i, ch in enumerate(text):
        if i:
            cols.append(gap)
        cols.append(glyph(ch, face))
    return np.concatenate(cols, axis=1)
