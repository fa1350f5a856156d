"""Pictures of a planar configuration on B_n: ASCII art and binary PPM (P6)."""
from __future__ import annotations

import numpy as np

from .lattice import BoxSpec, vertex_coords
from .percolation import EdgeSampler

BACKGROUND = (255, 255, 255)
BOND = (20, 20, 120)
VERTEX = (160, 160, 160)


def open_bonds(n: int, p: float, seed: int, d: int = 2) -> np.ndarray:
    """(k, 3) array of open bonds of B_n as rows (x, y, axis)."""
    if d != 2:
        raise ValueError(f"rendering is only defined for d = 2, got d = {d}")
    box = BoxSpec(2, n)
    v = vertex_coords(box)
    bases = np.concatenate([v[v[:, 0] < n], v[v[:, 1] < n]])
    axes = np.concatenate([np.zeros((v[:, 0] < n).sum(), np.int64),
                           np.ones((v[:, 1] < n).sum(), np.int64)])
    u = EdgeSampler(seed, p).uniforms(bases, axes)
    keep = u < p
    return np.column_stack([bases[keep], axes[keep]])


def render_ascii(n: int, p: float, seed: int) -> str:
    """'+' vertices, '-' and '|' open bonds; north is up."""
    side = 2 * n + 1
    grid = [[" "] * (2 * side - 1) for _ in range(2 * side - 1)]
    for r in range(0, 2 * side - 1, 2):
        for c in range(0, 2 * side - 1, 2):
            grid[r][c] = "+"
    for x, y, axis in open_bonds(n, p, seed):
        r, c = 2 * (n - y), 2 * (x + n)
        if axis == 0:
            grid[r][c + 1] = "-"
        else:
            grid[r - 1][c] = "|"
    return "\n".join("".join(row).rstrip() for row in grid) + "\n"


def render_image(n: int, p: float, seed: int, cell: int = 8) -> np.ndarray:
    """RGB array of shape ((2n+1)*cell, (2n+1)*cell, 3)."""
    if cell < 2:
        raise ValueError("cell size must be >= 2 so that bonds are visible")
    side = 2 * n + 1
    img = np.empty((side * cell, side * cell, 3), dtype=np.uint8)
    img[:] = BACKGROUND
    half = cell // 2

    def centre(x, y):
        return (n - y) * cell + half, (x + n) * cell + half

    for x, y, axis in open_bonds(n, p, seed):
        r, c = centre(x, y)
        if axis == 0:
            img[r, c:c + cell + 1] = BOND
        else:
            img[r - cell:r + 1, c] = BOND
    rows = np.arange(side) * cell + half
    img[np.ix_(rows, rows)] = VERTEX
    return img


def ppm_bytes(img: np.ndarray) -> bytes:
    h, w, _ = img.shape
    return b"P6\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(img, dtype=np.uint8).tobytes()


def render_ppm(n: int, p: float, seed: int, cell: int = 8) -> bytes:
    return ppm_bytes(render_image(n, p, seed, cell))


def read_ppm(data: bytes) -> np.ndarray:
    """Parse a binary P6 image with maxval 255 (comments are not supported)."""
    tokens, pos = [], 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PPM header")
        tokens.append(data[start:pos])
    if tokens[0] != b"P6":
        raise ValueError("not a binary PPM (P6) image")
    w, h, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    # exactly one whitespace byte separates the header from the pixels
    body = data[pos + 1:]
    if len(body) != w * h * 3:
        raise ValueError(f"pixel data has {len(body)} bytes, expected {w * h * 3}")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3)


def bond_pixels(img: np.ndarray) -> int:
    return int(np.all(img == BOND, axis=-1).sum())
