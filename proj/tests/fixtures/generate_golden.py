#!/usr/bin/env python3
"""Regenerates the golden raster and feature-cache fixtures.

The blur here is written from scratch in numpy so the stored outputs act as an
independent reference for the C++ implementation. Run from any directory:

    python3 tests/fixtures/generate_golden.py
"""

import json
import math
import struct
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent


def golden_input(h=24, w=20):
    y, x = np.mgrid[0:h, 0:w].astype(np.float64)
    r = 0.5 + 0.5 * np.sin(0.9 * x) * np.cos(0.7 * y)
    g = ((x // 3 + y // 3) % 2).astype(np.float64) * 0.8 + 0.1
    b = np.clip((x + 2 * y) / (w + 2 * h), 0.0, 1.0)
    b[h // 3, w // 4] = 1.0
    img = np.stack([r, g, b])
    # Stored as f32; all computation starts from the quantized values.
    return img.astype(np.float32).astype(np.float64)


def kernel_for_radius(radius):
    if radius < 1.0:
        return None
    k = max(1, int(math.floor((radius - 1.0) / 2.0 + 0.5)))
    sigma = (2 * k + 1) / 6.0
    i = np.arange(-k, k + 1, dtype=np.float64)
    wts = np.exp(-(i * i) / (2.0 * sigma * sigma))
    return wts / wts.sum()


def reflect101(idx, n):
    if n == 1:
        return np.zeros_like(idx)
    period = 2 * (n - 1)
    idx = np.mod(idx, period)
    return np.where(idx < n, idx, period - idx)


def conv_axis(plane, wts, axis):
    k = (len(wts) - 1) // 2
    n = plane.shape[axis]
    out = np.zeros_like(plane)
    pos = np.arange(n)
    for m in range(-k, k + 1):
        src = reflect101(pos - m, n)
        out += wts[m + k] * np.take(plane, src, axis=axis)
    return out


def uniform_blur(img, wts):
    if wts is None:
        return img.copy()
    out = np.empty_like(img)
    for c in range(img.shape[0]):
        tmp = conv_axis(img[c], wts, axis=1)
        out[c] = np.clip(conv_axis(tmp, wts, axis=0), 0.0, 1.0)
    return out


def alpha_map(h, w, lam, center=None):
    cy, cx = center if center is not None else ((h - 1) / 2.0, (w - 1) / 2.0)
    far = math.hypot(max(cy, h - 1 - cy), max(cx, w - 1 - cx))
    if far == 0.0 or lam == 0.0:
        return np.ones((h, w))
    y, x = np.mgrid[0:h, 0:w].astype(np.float64)
    return np.exp(-lam * np.hypot(y - cy, x - cx) / far)


def fovea_blur(img, radius, lam, center=None):
    wts = kernel_for_radius(radius)
    if wts is None or lam == 0.0:
        return img.copy()
    blurred = uniform_blur(img, wts)
    a = alpha_map(img.shape[1], img.shape[2], lam, center)
    return np.clip(a * img + (1.0 - a) * blurred, 0.0, 1.0)


def write_raster(path, img):
    c, h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"UBPI")
        f.write(struct.pack("<IIB", h, w, c))
        f.write(img.astype("<f4").tobytes())


def write_ubpf(path, tag, entries):
    dim = len(entries[0][1][0])
    with open(path, "wb") as f:
        f.write(b"UBPF")
        f.write(struct.pack("<III", 1, len(entries), dim))
        raw = tag.encode("utf-8")
        f.write(struct.pack("<I", len(raw)))
        f.write(raw)
        for image_id, levels in entries:
            f.write(struct.pack("<I", image_id))
            for v in levels:
                f.write(np.asarray(v, dtype="<f4").tobytes())


def golden_features(n=5, dim=12):
    entries = []
    for i in range(n):
        levels = []
        for lvl in range(3):
            t = np.arange(dim, dtype=np.float64)
            v = np.cos(0.37 * (i + 1) * t + 0.5 * lvl) + 0.1 * (lvl + 1)
            levels.append(v / np.linalg.norm(v))
        entries.append((100 + 7 * i, levels))
    return entries


def main():
    img = golden_input()
    write_raster(HERE / "golden_input.ubpi", img)
    cases = [
        {"file": "golden_fovea_r11.ubpi", "radius": 11.0, "lambda": 2.0},
        {"file": "golden_fovea_r5_offcenter.ubpi", "radius": 5.0, "lambda": 0.5, "center": [3.0, 15.5]},
        {"file": "golden_fovea_r21_steep.ubpi", "radius": 21.0, "lambda": 8.0},
        {"file": "golden_fovea_r0_5.ubpi", "radius": 0.5, "lambda": 2.0},
    ]
    for case in cases:
        out = fovea_blur(img, case["radius"], case["lambda"], case.get("center"))
        write_raster(HERE / case["file"], out)
    uniform = {"file": "golden_uniform_r41.ubpi", "radius": 41.0}
    write_raster(HERE / uniform["file"], uniform_blur(img, kernel_for_radius(41.0)))

    entries = golden_features()
    write_ubpf(HERE / "golden_features.ubpf", "golden-cos-12", entries)

    manifest = {
        "input": "golden_input.ubpi",
        "fovea": cases,
        "uniform": [uniform],
        "features": {"file": "golden_features.ubpf", "tag": "golden-cos-12", "dim": 12,
                     "ids": [e[0] for e in entries]},
        "tolerance": 1e-5,
    }
    (HERE / "golden.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
