"""Fringe metrics on detector frequency profiles.

`find_extrema` locates statistically significant local maxima in a
binned frequency profile.  Significance is measured by topographic
prominence against the Poisson noise floor of the underlying counts: a
peak must rise more than k_sigma standard deviations of its local count
above its surrounding saddles.  Minima are the separating troughs
between accepted maxima, so maxima and minima always alternate.

`oscillation_index` and `total_variation` compare whole profiles, e.g.
across values of the time step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import HistogramSpec


@dataclass(frozen=True)
class ExtremaReport:
    """Significant maxima and the troughs between them.

    Each entry is (bin_center, smoothed_height, prominence); maxima and
    minima alternate along the axis.
    """

    maxima: list[tuple[float, float, float]]
    minima: list[tuple[float, float, float]]
    smoothing_window: int


def smooth(values: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average; the window shrinks symmetrically at the edges."""
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be odd and >= 1")
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise ValueError("expected a 1-d array")
    if v.size < window:
        raise ValueError(f"array of length {v.size} shorter than window {window}")
    if window == 1:
        return v.copy()
    half = window // 2
    csum = np.concatenate(([0.0], np.cumsum(v)))
    idx = np.arange(v.size)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, v.size)
    return (csum[hi] - csum[lo]) / (hi - lo)


def _local_maxima(v: np.ndarray) -> list[int]:
    """Interior local maxima; a plateau reports its center index."""
    out = []
    n = v.size
    i = 1
    while i < n - 1:
        if v[i] > v[i - 1]:
            j = i
            while j + 1 < n and v[j + 1] == v[i]:
                j += 1
            if j < n - 1 and v[j + 1] < v[i]:
                out.append((i + j) // 2)
            i = j + 1
        else:
            i += 1
    return out


def _prominence(v: np.ndarray, peak: int) -> float:
    """Height of v[peak] above the higher of its two key saddles."""
    left_min = v[peak]
    i = peak - 1
    while i >= 0 and v[i] <= v[peak]:
        left_min = min(left_min, v[i])
        i -= 1
    right_min = v[peak]
    i = peak + 1
    while i < v.size and v[i] <= v[peak]:
        right_min = min(right_min, v[i])
        i += 1
    return v[peak] - max(left_min, right_min)


def find_extrema(freqs: np.ndarray, spec: HistogramSpec, n_detected: int,
                 window: int = 5, k_sigma: float = 5.0) -> ExtremaReport:
    """Report significant maxima and the troughs separating them.

    freqs are bin counts divided by n_detected; n_detected sets the
    Poisson noise floor.  A maximum is kept when its prominence exceeds
    k_sigma * sqrt(local mean count) / n_detected.
    """
    if not (k_sigma > 0):
        raise ValueError("k_sigma must be > 0")
    if n_detected < 0:
        raise ValueError("n_detected must be >= 0")
    f = smooth(freqs, window)
    centers = spec.bin_centers()
    if centers.size != f.size:
        raise ValueError("freqs length does not match the histogram spec")

    maxima: list[tuple[int, float, float]] = []
    if n_detected > 0:
        for i in _local_maxima(f):
            prom = _prominence(f, i)
            local_count = max(f[i] * n_detected, 0.0)
            if prom > k_sigma * np.sqrt(local_count) / n_detected:
                maxima.append((i, f[i], prom))

    minima: list[tuple[int, float, float]] = []
    for (i0, _, _), (i1, _, _) in zip(maxima, maxima[1:]):
        j = i0 + 1 + int(np.argmin(f[i0 + 1:i1]))
        minima.append((j, f[j], _prominence(-f, j)))

    return ExtremaReport(
        maxima=[(float(centers[i]), float(h), float(p)) for i, h, p in maxima],
        minima=[(float(centers[i]), float(h), float(p)) for i, h, p in minima],
        smoothing_window=window,
    )


def total_variation(f1: np.ndarray, f2: np.ndarray) -> float:
    """Total variation distance between two (sub-)probability vectors."""
    a = np.asarray(f1, dtype=float)
    b = np.asarray(f2, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return 0.5 * float(np.abs(a - b).sum())


def oscillation_index(freqs: np.ndarray, window: int = 5) -> float:
    """Arc-length of the smoothed profile relative to its range.

    1 for any monotone profile, larger the more the profile oscillates;
    defined as 0 for a flat profile.
    """
    raw = np.asarray(freqs, dtype=float)
    if raw.size and raw.max() == raw.min():
        return 0.0
    f = smooth(raw, window)
    rng = float(f.max() - f.min())
    if rng == 0.0:
        return 0.0
    return float(np.abs(np.diff(f)).sum()) / rng
