"""Single-particle runs from emitter to termination.

A particle starts at (-D, 0) with speed v0 at angle alpha and is stepped
until one of four things happens:

  Blocked   - its segment crossed the screen plane x = 0 with the
              interpolated |y| at or beyond the effective aperture R - r
              (finite particle radius shrinks the opening);
  Detected  - its segment crossed the detector plane x = +d; the hit
              position and time are interpolated onto the plane;
  Escaped   - it left the tracked region (|y| > y_bound or x < -2D);
  StepLimit - the step budget ran out.

Crossings are tested on the straight segment between consecutive
positions, so a coarse step cannot jump through either plane unnoticed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .dynamics import ParticleState, StepParams, rk4_step, step_discrete
from .errors import ConfigurationError
from .field import FieldParams, Vec2


@dataclass(frozen=True)
class Geometry:
    """Scattering arena: emitter, screen, detector and termination bounds."""

    emitter_distance: float
    screen_gap: float
    slit_half_height: float
    particle_radius: float
    y_bound: float = 50.0
    max_steps: int = 1_000_000

    def __post_init__(self) -> None:
        if not (self.emitter_distance > 0 and self.screen_gap > 0):
            raise ValueError("emitter_distance and screen_gap must be > 0")
        if not (0 <= self.particle_radius < self.slit_half_height):
            raise ValueError("particle_radius must satisfy 0 <= r < R")
        if not (self.y_bound > self.slit_half_height):
            raise ValueError("y_bound must exceed slit_half_height")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")

    @property
    def aperture(self) -> float:
        """Effective slit half-opening for the particle center."""
        return self.slit_half_height - self.particle_radius

    @property
    def x_escape(self) -> float:
        """Left termination bound."""
        return -2.0 * self.emitter_distance


@dataclass(frozen=True)
class Blocked:
    y_impact: float


@dataclass(frozen=True)
class Detected:
    y_hit: float
    t_hit: float


@dataclass(frozen=True)
class Escaped:
    pass


@dataclass(frozen=True)
class StepLimit:
    pass


Outcome = Blocked | Detected | Escaped | StepLimit


@dataclass(frozen=True)
class TrajectoryRecord:
    outcome: Outcome
    path: Optional[list[ParticleState]]
    steps_taken: int


def check_consistent(g: Geometry, f: FieldParams) -> None:
    """The slit half-height enters both the force and the collision rule."""
    if g.slit_half_height != f.slit_half_height:
        raise ConfigurationError(
            f"slit_half_height mismatch: geometry {g.slit_half_height} "
            f"vs field {f.slit_half_height}")


def _segment_event(x0: float, y0: float, x1: float, y1: float,
                   aperture: float, detector_x: float):
    """Earliest terminal event on the segment (x0,y0) -> (x1,y1).

    Returns ("blocked", y, lam), ("detected", y, lam) or None.  A screen
    crossing inside the aperture is a pass-through, not an event, so a
    later detector crossing on the same segment still terminates it.
    """
    events = []
    if (x0 < 0.0 and x1 >= 0.0) or (x0 > 0.0 and x1 <= 0.0):
        events.append((x0 / (x0 - x1), "plane"))
    if x0 < detector_x <= x1:
        events.append(((detector_x - x0) / (x1 - x0), "detector"))
    events.sort()
    for lam, kind in events:
        yc = y0 + lam * (y1 - y0)
        if kind == "plane":
            if abs(yc) >= aperture:
                return ("blocked", yc, lam)
        else:
            return ("detected", yc, lam)
    return None


def _emission_state(alpha: float, v0: float, g: Geometry) -> ParticleState:
    return ParticleState(
        pos=Vec2(-g.emitter_distance, 0.0),
        vel=Vec2(v0 * math.cos(alpha), v0 * math.sin(alpha)),
        t=0.0,
    )


def _interp_state(s0: ParticleState, s1: ParticleState, lam: float, y: float,
                  x: float) -> ParticleState:
    return ParticleState(pos=Vec2(x, y), vel=s1.vel,
                         t=s0.t + lam * (s1.t - s0.t))


def _run(s: ParticleState, advance, g: Geometry, record: bool) -> TrajectoryRecord:
    path = [s] if record else None
    aperture = g.aperture
    d = g.screen_gap
    cur = s
    for step in range(1, g.max_steps + 1):
        nxt = advance(cur)
        ev = _segment_event(cur.pos[0], cur.pos[1], nxt.pos[0], nxt.pos[1],
                            aperture, d)
        if ev is not None:
            kind, yc, lam = ev
            if record:
                xc = 0.0 if kind == "blocked" else d
                path.append(_interp_state(cur, nxt, lam, yc, xc))
            if kind == "blocked":
                return TrajectoryRecord(Blocked(y_impact=yc), path, step)
            return TrajectoryRecord(
                Detected(y_hit=yc, t_hit=cur.t + lam * (nxt.t - cur.t)), path, step)
        if record:
            path.append(nxt)
        if abs(nxt.pos[1]) > g.y_bound or nxt.pos[0] < g.x_escape:
            return TrajectoryRecord(Escaped(), path, step)
        cur = nxt
    return TrajectoryRecord(StepLimit(), path, g.max_steps)


def run_discrete_trajectory(alpha: float, v0: float, g: Geometry,
                            f: FieldParams, sp: StepParams,
                            record: bool = False) -> TrajectoryRecord:
    """Run one particle under the discrete-time update rule.

    alpha is the launch angle in radians measured from the +x axis.
    """
    if not (v0 > 0):
        raise ValueError("v0 must be > 0")
    check_consistent(g, f)
    return _run(_emission_state(alpha, v0, g),
                lambda s: step_discrete(s, f, sp), g, record)


def run_continuous_trajectory(alpha: float, v0: float, g: Geometry,
                              f: FieldParams, mass: float = 1.0,
                              h: float | None = None,
                              record: bool = False) -> TrajectoryRecord:
    """Reference run with the 4th-order integrator, the tau -> 0 limit.

    Default step: h = 1e-4 * D / v0.  Crossing rules are identical to the
    discrete runner.
    """
    if not (v0 > 0):
        raise ValueError("v0 must be > 0")
    check_consistent(g, f)
    if h is None:
        h = 1e-4 * g.emitter_distance / v0
    if not (h > 0):
        raise ValueError("h must be > 0")
    return _run(_emission_state(alpha, v0, g),
                lambda s: rk4_step(s, f, mass, h), g, record)
