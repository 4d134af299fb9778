"""Seedable uniform sampling from closed Euclidean balls.

RNG contract (pinned so traces reproduce across platforms): a PCG64
bit generator produces 53-bit uniform doubles in [0,1) (one double per
64-bit raw draw); Gaussians come from those via Box-Muller. The sampler's
`position` counts consumed doubles, so a stream can be reopened at any
point with PCG64(seed).advance(position).
"""

from __future__ import annotations

import numpy as np
from numpy.random import PCG64, Generator


class BallSampler:
    """Single-owner uniform ball sampler; identical (seed, position) pairs
    yield identical sample sequences."""

    def __init__(self, seed: int, position: int = 0):
        if seed < 0:
            raise ValueError("seed must be an unsigned integer")
        self.seed = int(seed)
        self.position = 0
        bg = PCG64(self.seed)
        self._gen = Generator(bg)
        if position:
            bg.advance(int(position))
            self.position = int(position)

    def uniforms(self, count: int) -> np.ndarray:
        """`count` doubles uniform on [0,1), advancing the stream."""
        u = self._gen.random(int(count))
        self.position += int(count)
        return u

    def gaussians(self, count: int) -> np.ndarray:
        """Standard normals via Box-Muller, consumed in pairs: ceil(count/2)
        pairs of uniforms are always drawn, the last normal of an odd
        request is discarded (keeps the double count a function of count)."""
        pairs = (count + 1) // 2
        if pairs == 0:
            return np.empty(0)
        u = self.uniforms(2 * pairs)
        u1 = 1.0 - u[0::2]  # (0,1]: keeps log() finite
        u2 = u[1::2]
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(2.0 * np.pi * u2)
        z[1::2] = r * np.sin(2.0 * np.pi * u2)
        return z[:count]


def sample_ball(center, radius: float, count: int, sampler: BallSampler) -> list[np.ndarray]:
    """`count` i.i.d. points uniform on the closed ball B(center, radius).

    Direction = normalized Gaussian vector, radial factor = radius * U^(1/n)
    with U on (0,1]; exact uniformity in any dimension. One call draws all
    direction uniforms first (count points, pair-padded per point), then all
    radial uniforms. radius = 0 returns copies of the center and consumes
    no randomness.
    """
    center = np.asarray(center, dtype=float)
    if not np.all(np.isfinite(center)):
        raise ValueError("center must be finite")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    count = int(count)
    if count == 0:
        return []
    n = center.size
    if radius == 0.0:
        return [center.copy() for _ in range(count)]
    per = 2 * ((n + 1) // 2)  # doubles consumed per point for the direction
    u = sampler.uniforms(count * per).reshape(count, per)
    u1 = 1.0 - u[:, 0::2]
    u2 = u[:, 1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty((count, per))
    z[:, 0::2] = r * np.cos(2.0 * np.pi * u2)
    z[:, 1::2] = r * np.sin(2.0 * np.pi * u2)
    z = z[:, :n]
    norms = np.linalg.norm(z, axis=1)
    degenerate = norms == 0.0  # probability ~2^-53 per point; pin e_1
    if np.any(degenerate):
        z[degenerate, :] = 0.0
        z[degenerate, 0] = 1.0
        norms[degenerate] = 1.0
    directions = z / norms[:, None]
    radial = (1.0 - sampler.uniforms(count)) ** (1.0 / n)
    pts = center[None, :] + radius * radial[:, None] * directions
    return [pts[i] for i in range(count)]


def perturb_within(center, bound: float, sampler: BallSampler) -> np.ndarray:
    """A point y with 0 < ||y - center||_2 <= bound, uniform on the ball.

    If the offset underflows to zero at tiny bounds, the first coordinate
    is bumped by one ulp instead (the smallest representable perturbation
    at the center's magnitude), so the center itself is never returned.
    """
    if not bound > 0:
        raise ValueError("bound must be positive")
    center = np.asarray(center, dtype=float)
    y = sample_ball(center, bound, 1, sampler)[0]
    if np.array_equal(y, center):
        direction = 1.0 if sampler.uniforms(1)[0] < 0.5 else -1.0
        y = center.copy()
        y[0] = np.nextafter(y[0], direction * np.inf)
    return y
