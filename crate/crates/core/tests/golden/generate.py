#!/usr/bin/env python3
"""Regenerates the golden outputs with a per-pixel reference written from the
formulas alone (no shared code with the Rust crate).

Seeded images: pixel i = splitmix64(seed + i) >> 56, row-major.
"""
import math
import os

MASK = (1 << 64) - 1
HERE = os.path.dirname(os.path.abspath(__file__))


def splitmix64(x):
    z = (x + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def seeded(rows, cols, seed):
    return [[splitmix64((seed + r * cols + c) & MASK) >> 56 for c in range(cols)] for r in range(rows)]


def round_half_away(t):
    return math.floor(t + 0.5) if t >= 0 else math.ceil(t - 0.5)


def sample(img, r, c):
    if 0 <= r < len(img) and 0 <= c < len(img[0]):
        return img[r][c]
    return 0


def radial(img, u, v, rays, radii):
    out = []
    for m in range(rays):
        theta = 2.0 * math.pi * m / rays
        row = []
        for r in range(radii):
            dx = round_half_away(r * math.cos(theta))
            dy = round_half_away(r * math.sin(theta))
            row.append(sample(img, u + dx, v + dy))
        out.append(row)
    return out


def affine_rotation(img, angle):
    rows, cols = len(img), len(img[0])
    cr, cc = (rows - 1) / 2, (cols - 1) / 2
    s, c = math.sin(angle), math.cos(angle)
    # forward: p' = R (p - center) + center, R = [[c, s], [-s, c]]; inverse uses R^T
    out = []
    for r in range(rows):
        row = []
        for k in range(cols):
            dr, dc = r - cr, k - cc
            sr = c * dr - s * dc + cr
            sc = s * dr + c * dc + cc
            row.append(sample(img, round_half_away(sr), round_half_away(sc)))
        out.append(row)
    return out


def write_pgm(path, img):
    rows, cols = len(img), len(img[0])
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (cols, rows))
        f.write(bytes(v for row in img for v in row))


def distinct_pole_outputs(img, rays, radii):
    seen = set()
    for u in range(len(img)):
        for v in range(len(img[0])):
            seen.add(tuple(tuple(row) for row in radial(img, u, v, rays, radii)))
    return len(seen)


if __name__ == "__main__":
    src16 = seeded(16, 16, 2024)
    write_pgm(os.path.join(HERE, "radial_16x16_seed2024_pole5_9_m16_r16.pgm"), radial(src16, 5, 9, 16, 16))
    src7 = seeded(7, 7, 77)
    write_pgm(os.path.join(HERE, "affine_7x7_seed77_rot90.pgm"), affine_rotation(src7, math.pi / 2))
    print("distinct outputs, seeded 8x8 (seed 8), M=8, R=8, zero fill:",
          distinct_pole_outputs(seeded(8, 8, 8), 8, 8))
