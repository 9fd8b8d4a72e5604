"""Trajectory ensembles: reproducible emission, fast stepping, histograms.

Determinism contract: the histogram produced by `run_ensemble` is a pure
function of (emission spec, geometry, field, step params, histogram spec).
Worker count and scheduling never change a single bit of the result.  Two
mechanisms guarantee this:

  * each trajectory's launch angle comes from a counter-based generator
    keyed by (seed, trajectory index), not from a shared stream;
  * trajectories are processed in fixed-size index chunks; workers only
    decide *where* a chunk is computed, and the integer merge of chunk
    histograms is order-independent.

The hot loop advances whole chunks as numpy arrays and retires finished
trajectories as it goes; the last few survivors of a chunk are finished
with a scalar loop, which is faster than sub-SIMD-width array work.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import StepParams
from .errors import EmptyHistogramError, SpecMismatchError
from .field import FieldParams, force_batch, _force_scalar
from .scattering import Geometry, check_consistent, _segment_event

CHUNK_SIZE = 16384
_SCALAR_CUTOFF = 48

_BLOCKED, _DETECTED, _ESCAPED, _STEPLIMIT = 1, 2, 3, 4

_GAMMA = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class EmissionSpec:
    """Launch speed, angle range (radians) and draw mode.

    mode "random": angle of trajectory i is uniform in [alpha_min,
    alpha_max), drawn from the substream keyed by (seed, i).
    mode "sweep": n angles evenly spaced over the closed range; a
    single-trajectory sweep uses the midpoint.
    """

    v0: float
    alpha_min: float
    alpha_max: float
    n: int
    mode: str = "random"
    seed: int = 0

    def __post_init__(self) -> None:
        if not (self.v0 > 0):
            raise ValueError("v0 must be > 0")
        if not (self.alpha_min < self.alpha_max):
            raise ValueError("alpha_min must be < alpha_max")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.mode not in ("random", "sweep"):
            raise ValueError(f"unknown emission mode {self.mode!r}")
        if not (0 <= self.seed <= _MASK):
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class HistogramSpec:
    """Detector binning: equal-width cells over [y_min, y_max)."""

    bin_width: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        if not (self.bin_width > 0):
            raise ValueError("bin_width must be > 0")
        if not (self.y_min < self.y_max):
            raise ValueError("y_min must be < y_max")

    @property
    def n_bins(self) -> int:
        return int(math.ceil((self.y_max - self.y_min) / self.bin_width))

    def bin_centers(self) -> np.ndarray:
        return self.y_min + (np.arange(self.n_bins) + 0.5) * self.bin_width


@dataclass
class Histogram:
    """Binned detector hits plus emission bookkeeping.

    counts holds in-range detections only; hits outside [y_min, y_max)
    land in the underflow/overflow tallies, so
    counts.sum() + underflow + overflow == n_detected and the four
    outcome tallies sum to n_emitted.
    """

    spec: HistogramSpec
    counts: np.ndarray
    n_emitted: int = 0
    n_detected: int = 0
    n_blocked: int = 0
    n_escaped: int = 0
    n_steplimit: int = 0
    underflow: int = 0
    overflow: int = 0

    @classmethod
    def zero(cls, spec: HistogramSpec) -> "Histogram":
        return cls(spec=spec, counts=np.zeros(spec.n_bins, dtype=np.int64))

    def check_conservation(self) -> None:
        if self.n_emitted != (self.n_detected + self.n_blocked
                              + self.n_escaped + self.n_steplimit):
            raise AssertionError("outcome tallies do not sum to n_emitted")
        if int(self.counts.sum()) + self.underflow + self.overflow != self.n_detected:
            raise AssertionError("bin counts do not sum to n_detected")


def merge(a: Histogram, b: Histogram) -> Histogram:
    """Elementwise sum; commutative and associative, identity Histogram.zero."""
    if a.spec != b.spec:
        raise SpecMismatchError(f"histogram specs differ: {a.spec} vs {b.spec}")
    return Histogram(
        spec=a.spec,
        counts=a.counts + b.counts,
        n_emitted=a.n_emitted + b.n_emitted,
        n_detected=a.n_detected + b.n_detected,
        n_blocked=a.n_blocked + b.n_blocked,
        n_escaped=a.n_escaped + b.n_escaped,
        n_steplimit=a.n_steplimit + b.n_steplimit,
        underflow=a.underflow + b.underflow,
        overflow=a.overflow + b.overflow,
    )


def normalize(h: Histogram) -> np.ndarray:
    """Frequencies counts / n_detected; sums to 1 minus the out-of-range share."""
    if h.n_detected <= 0:
        raise EmptyHistogramError("no detected particles to normalize")
    return h.counts / float(h.n_detected)


def _mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer, elementwise on uint64."""
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def uniform01(seed: int, lo: int, hi: int) -> np.ndarray:
    """Uniform [0, 1) draws for trajectory indices lo..hi-1.

    Counter-based: draw i depends only on (seed, i), so any slicing of
    the index range yields identical values.
    """
    idx = np.arange(lo, hi, dtype=np.uint64)
    z = _mix64(np.uint64(seed) + idx * np.uint64(_GAMMA))
    return (z >> np.uint64(11)) * (2.0 ** -53)


def emission_angles(e: EmissionSpec, lo: int, hi: int) -> np.ndarray:
    """Launch angles (radians) for trajectory indices lo..hi-1."""
    if not (0 <= lo <= hi <= e.n):
        raise ValueError("index range out of bounds")
    span = e.alpha_max - e.alpha_min
    if e.mode == "random":
        return e.alpha_min + uniform01(e.seed, lo, hi) * span
    if e.n == 1:
        return np.full(hi - lo, e.alpha_min + 0.5 * span)
    idx = np.arange(lo, hi, dtype=np.float64)
    return e.alpha_min + idx * (span / (e.n - 1))


def _finish_scalar(x: float, y: float, vx: float, vy: float, budget: int,
                   qs: float, R: float, aperture: float, d: float,
                   y_bound: float, x_escape: float, k: float,
                   tau: float) -> tuple[int, float, int]:
    """Run one in-flight trajectory to termination; mirrors the array kernel."""
    for step in range(1, budget + 1):
        fx, fy = _force_scalar(x, y, qs, R)
        vx += k * fx
        vy += k * fy
        xn = x + tau * vx
        yn = y + tau * vy
        ev = _segment_event(x, y, xn, yn, aperture, d)
        if ev is not None:
            kind, yc, _ = ev
            return (_BLOCKED if kind == "blocked" else _DETECTED, yc, step)
        if abs(yn) > y_bound or xn < x_escape:
            return (_ESCAPED, math.nan, step)
        x, y = xn, yn
    return (_STEPLIMIT, math.nan, budget)


def simulate_batch(alphas: np.ndarray, v0: float, g: Geometry, f: FieldParams,
                   sp: StepParams) -> tuple[np.ndarray, np.ndarray]:
    """Advance one batch of trajectories to termination.

    Returns (codes, y_final): outcome code per trajectory and the impact
    or hit y for blocked/detected ones (NaN otherwise).

    Hot loop notes: all float work goes through preallocated scratch
    buffers; finished lanes are masked out and physically removed only
    when enough of them accumulate, which keeps the per-step cost at one
    pass over the arrays instead of one compaction copy per event.
    """
    n = alphas.size
    codes = np.zeros(n, dtype=np.uint8)
    y_final = np.full(n, np.nan)

    aperture = g.aperture
    d = g.screen_gap
    y_bound = g.y_bound
    x_escape = g.x_escape
    qs = f.charge_product
    two_qs = 2.0 * qs
    R = f.slit_half_height
    tau = sp.tau
    k = tau / sp.mass

    idx = np.arange(n, dtype=np.int64)
    x = np.full(n, -g.emitter_distance)
    y = np.zeros(n)
    vx = v0 * np.cos(alphas)
    vy = v0 * np.sin(alphas)
    alive = np.ones(n, dtype=bool)
    n_alive = n
    n_dead = 0

    scratch = np.empty((8, n))

    with np.errstate(invalid="ignore", divide="ignore"):
        for step in range(1, g.max_steps + 1):
            if n_alive == 0:
                return codes, y_final
            if n_alive <= _SCALAR_CUTOFF:
                budget = g.max_steps - step + 1
                for j in np.flatnonzero(alive):
                    code, yc_j, _ = _finish_scalar(
                        x[j], y[j], vx[j], vy[j], budget, qs, R, aperture, d,
                        y_bound, x_escape, k, tau)
                    codes[idx[j]] = code
                    y_final[idx[j]] = yc_j
                return codes, y_final

            m = idx.size
            ay, d1, d2, t1, t2, t3, xv, yv = scratch[:, :m]

            # closed-form force, |x|/|y| canonicalized so mirror symmetry
            # is exact (kept in sync with field.force_batch)
            np.abs(y, out=ay)
            np.subtract(ay, R, out=d1)
            np.add(ay, R, out=d2)
            np.abs(x, out=t1)
            np.divide(1.0, t1, out=t1)
            np.multiply(d1, t1, out=t2)
            np.arctan(t2, out=t2)
            np.multiply(d2, t1, out=t1)
            np.arctan(t1, out=t1)
            np.subtract(t2, t1, out=t1)
            np.add(t1, np.pi, out=t1)
            np.multiply(t1, two_qs, out=t1)
            np.negative(t1, out=t2)
            np.copyto(t1, t2, where=x < 0.0)            # t1 = F_x
            np.multiply(x, x, out=t2)
            np.multiply(d1, d1, out=d1)
            np.add(d1, t2, out=d1)
            np.multiply(d2, d2, out=d2)
            np.add(d2, t2, out=d2)
            np.divide(d1, d2, out=d1)
            np.log(d1, out=d1)
            np.multiply(d1, qs, out=d1)
            np.negative(d1, out=d2)
            np.copyto(d1, d2, where=y < 0.0)            # d1 = F_y

            # velocity-first update into the position scratch xv, yv
            np.multiply(t1, k, out=t1)
            np.add(vx, t1, out=vx)
            np.multiply(d1, k, out=d1)
            np.add(vy, d1, out=vy)
            np.multiply(vx, tau, out=t1)
            np.add(x, t1, out=xv)
            np.multiply(vy, tau, out=d1)
            np.add(y, d1, out=yv)

            cross0 = ((x < 0.0) & (xv >= 0.0)) | ((x > 0.0) & (xv <= 0.0))
            np.subtract(x, xv, out=t1)
            np.divide(x, t1, out=t1)                    # t1 = lam at plane
            np.subtract(yv, y, out=t2)
            np.multiply(t1, t2, out=t3)
            np.add(y, t3, out=t3)                       # t3 = y at plane
            np.abs(t3, out=d1)
            blocked = cross0 & (d1 >= aperture) & alive
            det = (xv >= d) & alive
            np.subtract(xv, x, out=d2)
            np.divide(d - x, d2, out=d2)                # d2 = lam at detector
            # Same-segment double crossing: the earlier event wins, and a
            # pass through the slit does not cancel a later detector hit.
            blocked &= ~det | (t1 <= d2)
            det &= ~blocked
            esc = ~blocked & ~det & alive & ((np.abs(yv) > y_bound)
                                             | (xv < x_escape))

            done = blocked | det | esc
            n_done = int(done.sum())
            if n_done:
                sel = idx[blocked]
                codes[sel] = _BLOCKED
                y_final[sel] = t3[blocked]
                sel = idx[det]
                codes[sel] = _DETECTED
                np.multiply(d2, t2, out=t2)
                np.add(y, t2, out=t2)                   # y at detector
                y_final[sel] = t2[det]
                codes[idx[esc]] = _ESCAPED
                alive &= ~done
                n_alive -= n_done
                n_dead += n_done

            np.copyto(x, xv)
            np.copyto(y, yv)

            if n_dead > max(64, m // 8):
                idx = idx[alive]
                x = x[alive]
                y = y[alive]
                vx = vx[alive]
                vy = vy[alive]
                alive = np.ones(n_alive, dtype=bool)
                n_dead = 0

    codes[idx[alive]] = _STEPLIMIT
    return codes, y_final


def _bin_hits(ys: np.ndarray, spec: HistogramSpec) -> tuple[np.ndarray, int, int]:
    ix = np.floor((ys - spec.y_min) / spec.bin_width).astype(np.int64)
    under = int((ix < 0).sum())
    over = int((ix >= spec.n_bins).sum())
    ok = (ix >= 0) & (ix < spec.n_bins)
    counts = np.bincount(ix[ok], minlength=spec.n_bins).astype(np.int64)
    return counts, under, over


def _simulate_chunk(args) -> Histogram:
    e, g, f, sp, hspec, lo, hi = args
    alphas = emission_angles(e, lo, hi)
    codes, y_final = simulate_batch(alphas, e.v0, g, f, sp)
    det = codes == _DETECTED
    counts, under, over = _bin_hits(y_final[det], hspec)
    h = Histogram(
        spec=hspec,
        counts=counts,
        n_emitted=hi - lo,
        n_detected=int(det.sum()),
        n_blocked=int((codes == _BLOCKED).sum()),
        n_escaped=int((codes == _ESCAPED).sum()),
        n_steplimit=int((codes == _STEPLIMIT).sum()),
        underflow=under,
        overflow=over,
    )
    return h


def run_ensemble(e: EmissionSpec, g: Geometry, f: FieldParams, sp: StepParams,
                 h: HistogramSpec, workers: int = 1) -> Histogram:
    """Run the full ensemble and accumulate the detector histogram.

    The result is bit-identical for every workers value.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    check_consistent(g, f)
    chunks = [(e, g, f, sp, h, lo, min(lo + CHUNK_SIZE, e.n))
              for lo in range(0, e.n, CHUNK_SIZE)]
    total = Histogram.zero(h)
    if workers == 1 or len(chunks) == 1:
        for chunk in chunks:
            total = merge(total, _simulate_chunk(chunk))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_simulate_chunk, chunks):
                total = merge(total, part)
    total.check_conservation()
    return total
