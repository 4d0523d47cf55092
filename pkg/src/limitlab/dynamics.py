"""Discrete-time maps on guarded domains, and finite-orbit iteration.

States are plain float64 arrays of shape ``(d,)`` (scalars promote to shape
``(1,)``). A :class:`DiscreteMap` bundles the step function with the region it
is allowed to act on; iteration records exactly what happened — early
termination (domain exit, singularity, divergence) is data on the returned
:class:`Trajectory`, not an exception.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import config
from .errors import DomainError, NoInverseError

# Termination causes.
COMPLETED = "completed"
LEFT_DOMAIN = "left-domain"
SINGULAR = "singular"
DIVERGED = "diverged"

TERMINATIONS = (COMPLETED, LEFT_DOMAIN, SINGULAR, DIVERGED)


def as_state(x, dim: Optional[int] = None) -> np.ndarray:
    """Coerce ``x`` to a finite float64 state vector of shape ``(d,)``.

    Scalars become 1-vectors. Non-finite coordinates are rejected outright:
    NaN/inf states are never legal inputs anywhere in the library.
    """
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.ndim != 1:
        raise ValueError(f"state must be a scalar or 1-d vector, got shape {p.shape}")
    if dim is not None and p.shape[0] != dim:
        raise ValueError(f"state has dimension {p.shape[0]}, expected {dim}")
    if not np.isfinite(p).all():
        raise ValueError(f"state has non-finite coordinates: {p}")
    return p


@dataclass(frozen=True)
class DomainRegion:
    """A region of state space with optional excluded points.

    ``kind`` is one of ``interval``, ``box``, ``annulus``, ``punctured-box``,
    ``full-space``. Interval/box bounds are closed and may be infinite on a
    side; ``annulus`` bounds are radial ``(r_min, r_max)``. Excluded points
    carry a protective radius ``eps_excl``: anything within it is outside the
    region. (Closed bounds are deliberate — orbits that converge to a boundary
    fixed point land exactly on it in float64 and must stay legal.)
    """

    kind: str
    dim: int
    bounds: Optional[np.ndarray] = None          # (dim, 2) or (1, 2) radial
    excluded: Optional[np.ndarray] = None        # (n_excl, dim)
    eps_excl: float = config.EPS_EXCL

    def __post_init__(self):
        if self.kind not in ("interval", "box", "annulus", "punctured-box", "full-space"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.bounds is not None:
            b = np.asarray(self.bounds, dtype=float)
            if b.ndim != 2 or b.shape[1] != 2:
                raise ValueError("bounds must be (k, 2) [lo, hi] pairs")
            if np.isnan(b).any():
                raise ValueError("bounds may not be NaN")
            if not (b[:, 0] < b[:, 1]).all():
                raise ValueError("each bounds pair needs lo < hi")
            object.__setattr__(self, "bounds", b)
        if self.excluded is not None:
            e = np.atleast_2d(np.asarray(self.excluded, dtype=float))
            if e.shape[0] == 0:
                e = None
            elif e.shape[1] != self.dim or not np.isfinite(e).all():
                raise ValueError("excluded points must be finite and match the region dimension")
            object.__setattr__(self, "excluded", e)
        if not (self.eps_excl > 0):
            raise ValueError("eps_excl must be positive")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def interval(lo: float, hi: float, excluded=None, eps_excl: float = config.EPS_EXCL) -> "DomainRegion":
        return DomainRegion("interval", 1, np.array([[lo, hi]], dtype=float),
                            _column(excluded), eps_excl)

    @staticmethod
    def box(bounds, excluded=None, eps_excl: float = config.EPS_EXCL) -> "DomainRegion":
        b = np.asarray(bounds, dtype=float)
        kind = "punctured-box" if excluded is not None and len(np.atleast_2d(excluded)) else "box"
        return DomainRegion(kind, b.shape[0], b, excluded, eps_excl)

    @staticmethod
    def annulus(r_min: float, r_max: float, dim: int = 2,
                eps_excl: float = config.EPS_EXCL) -> "DomainRegion":
        if r_min < 0:
            raise ValueError("annulus needs r_min >= 0")
        return DomainRegion("annulus", dim, np.array([[r_min, r_max]], dtype=float),
                            None, eps_excl)

    @staticmethod
    def full_space(dim: int, excluded=None, eps_excl: float = config.EPS_EXCL) -> "DomainRegion":
        return DomainRegion("full-space", dim, None, excluded, eps_excl)

    # -- membership --------------------------------------------------------

    def violation(self, x) -> Optional[str]:
        """None if ``x`` is inside; otherwise the reason it is not."""
        x = np.asarray(x, dtype=float)
        if self.excluded is not None:
            d = np.linalg.norm(self.excluded - x[None, :], axis=1)
            if (d <= self.eps_excl).any():
                return "excluded-point"
        if self.bounds is not None:
            if self.kind == "annulus":
                r = float(np.linalg.norm(x))
                if not (self.bounds[0, 0] <= r <= self.bounds[0, 1]):
                    return "out-of-bounds"
            else:
                if ((x < self.bounds[:, 0]) | (x > self.bounds[:, 1])).any():
                    return "out-of-bounds"
        return None

    def contains(self, x) -> bool:
        return self.violation(x) is None

    def contains_batch(self, X: np.ndarray) -> np.ndarray:
        """Vectorized membership for an (m, d) batch; returns a bool mask."""
        ok = np.ones(len(X), dtype=bool)
        if self.bounds is not None:
            if self.kind == "annulus":
                r = np.linalg.norm(X, axis=1)
                ok &= (r >= self.bounds[0, 0]) & (r <= self.bounds[0, 1])
            else:
                ok &= ((X >= self.bounds[:, 0]) & (X <= self.bounds[:, 1])).all(axis=1)
        if self.excluded is not None:
            for e in self.excluded:
                ok &= np.linalg.norm(X - e[None, :], axis=1) > self.eps_excl
        return ok

    def exclusion_batch(self, X: np.ndarray) -> np.ndarray:
        """Mask of batch rows inside some excluded-point ball."""
        hit = np.zeros(len(X), dtype=bool)
        if self.excluded is not None:
            for e in self.excluded:
                hit |= np.linalg.norm(X - e[None, :], axis=1) <= self.eps_excl
        return hit

    # -- sampling ----------------------------------------------------------

    def sample(self, n: int, rng: np.random.Generator, box=None) -> np.ndarray:
        """Draw ``n`` points from the region (uniform per axis / radius).

        Unbounded regions need an explicit ``box`` to draw from. Samples that
        land inside an exclusion ball are redrawn.
        """
        if self.kind == "annulus":
            r = rng.uniform(self.bounds[0, 0], self.bounds[0, 1], size=n)
            theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
            if self.dim != 2:
                raise NotImplementedError("annulus sampling implemented for dim 2")
            pts = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        else:
            if self.bounds is not None and np.isfinite(self.bounds).all():
                lo, hi = self.bounds[:, 0], self.bounds[:, 1]
            elif box is not None:
                b = np.asarray(box, dtype=float)
                lo, hi = b[:, 0], b[:, 1]
            else:
                raise ValueError("unbounded region: pass an explicit sample box")
            pts = rng.uniform(lo, hi, size=(n, self.dim))
        if self.excluded is not None:
            bad = ~self.contains_batch(pts)
            while bad.any():
                pts[bad] = self.sample(int(bad.sum()), rng, box=box)
                bad = ~self.contains_batch(pts)
        return pts

    def grid(self, resolution) -> list[np.ndarray]:
        """Per-axis sample nodes: ``resolution[i]`` points spanning axis i inclusive."""
        if self.bounds is None or self.kind == "annulus":
            raise ValueError("grids need finite per-axis bounds")
        if not np.isfinite(self.bounds).all():
            raise ValueError("grids need finite per-axis bounds")
        res = np.broadcast_to(np.asarray(resolution, dtype=int), (self.dim,))
        return [np.linspace(self.bounds[i, 0], self.bounds[i, 1], int(res[i]))
                for i in range(self.dim)]


def _column(excluded):
    if excluded is None:
        return None
    e = np.atleast_1d(np.asarray(excluded, dtype=float))
    return e[:, None] if e.ndim == 1 else e


@dataclass(frozen=True)
class DiscreteMap:
    """A discrete-time system ``x_{k+1} = forward(x_k)`` on a domain.

    ``forward`` (and ``inverse`` when present) act on float64 arrays shaped
    ``(..., dim)`` — catalog maps broadcast over leading axes, which the basin
    mapper exploits; set ``vectorized=False`` for evaluators that only accept
    single states. ``inverse_domain`` guards backward iteration (defaults to
    ``domain``).
    """

    dim: int
    forward: Callable[[np.ndarray], np.ndarray]
    domain: DomainRegion
    inverse: Optional[Callable[[np.ndarray], np.ndarray]] = None
    inverse_domain: Optional[DomainRegion] = None
    name: str = "map"
    vectorized: bool = True

    def __post_init__(self):
        if self.domain.dim != self.dim:
            raise ValueError("domain dimension does not match map dimension")

    def reversed(self) -> "DiscreteMap":
        """The time-reversed system (forward <-> inverse)."""
        if self.inverse is None:
            raise NoInverseError(f"{self.name} has no inverse")
        return DiscreteMap(
            dim=self.dim,
            forward=self.inverse,
            inverse=self.forward,
            domain=self.inverse_domain or self.domain,
            inverse_domain=self.domain,
            name=f"{self.name}^-1",
            vectorized=self.vectorized,
        )

    def restrict(self, region: DomainRegion) -> "DiscreteMap":
        """Same dynamics on a smaller domain (used for basin/limit studies)."""
        if region.dim != self.dim:
            raise ValueError("region dimension does not match map dimension")
        return replace(self, domain=region)


@dataclass(frozen=True)
class Trajectory:
    """A stored finite orbit. ``points[k+1] = f(points[k])`` by construction."""

    points: np.ndarray          # (m, dim)
    direction: str              # "forward" | "backward"
    termination: str            # one of TERMINATIONS
    steps_taken: int

    @property
    def last(self) -> np.ndarray:
        return self.points[-1]

    def __len__(self) -> int:
        return len(self.points)


def evaluate(system: DiscreteMap, x) -> np.ndarray:
    """One forward step with domain checking.

    Raises :class:`DomainError` when ``x`` is outside the domain (reason
    ``excluded-point`` / ``out-of-bounds``) or when the image has non-finite
    coordinates (reason ``non-finite-image``).
    """
    x = as_state(x, system.dim)
    reason = system.domain.violation(x)
    if reason is not None:
        raise DomainError(x, reason, detail=system.name)
    y = np.asarray(system.forward(x), dtype=float).reshape(system.dim)
    if not np.isfinite(y).all():
        raise DomainError(x, "non-finite-image", detail=system.name)
    return y


def _run(system: DiscreteMap, step, domain: DomainRegion, x0, k: int,
         direction: str, r_div: float) -> Trajectory:
    x0 = as_state(x0, system.dim)
    if k < 0:
        raise ValueError("step count must be >= 0")
    points = [x0]
    termination = COMPLETED
    for _ in range(int(k)):
        x = points[-1]
        reason = domain.violation(x)
        if reason is not None:
            termination = SINGULAR if reason == "excluded-point" else LEFT_DOMAIN
            break
        if np.abs(x).max() > r_div:
            termination = DIVERGED
            break
        with np.errstate(all="ignore"):
            y = np.asarray(step(x), dtype=float).reshape(system.dim)
        if not np.isfinite(y).all():
            termination = SINGULAR
            break
        points.append(y)
        if np.abs(y).max() > r_div:
            termination = DIVERGED
            break
    pts = np.vstack(points)
    return Trajectory(points=pts, direction=direction,
                      termination=termination, steps_taken=len(pts) - 1)


def iterate(system: DiscreteMap, x0, k: int, r_div: float = config.R_DIV) -> Trajectory:
    """Forward orbit of up to ``k`` steps; stops early on domain exit,
    singularity, or once a coordinate magnitude exceeds ``r_div``."""
    return _run(system, system.forward, system.domain, x0, k, "forward", r_div)


def iterate_back(system: DiscreteMap, x0, k: int, r_div: float = config.R_DIV) -> Trajectory:
    """Backward orbit under the inverse dynamics (:class:`NoInverseError` if absent)."""
    if system.inverse is None:
        raise NoInverseError(f"{system.name} has no inverse")
    domain = system.inverse_domain or system.domain
    return _run(system, system.inverse, domain, x0, k, "backward", r_div)


@dataclass(frozen=True)
class OrbitTail:
    points: np.ndarray
    termination: str


def orbit_tail(system: DiscreteMap, x0, burn: int, n: int,
               r_div: float = config.R_DIV) -> OrbitTail:
    """Points ``f^burn(x0) .. f^{burn+n-1}(x0)`` — fewer if the orbit terminated."""
    if burn < 0 or n <= 0:
        raise ValueError("need burn >= 0 and n >= 1")
    traj = iterate(system, x0, burn + n - 1, r_div=r_div)
    return OrbitTail(points=traj.points[burn: burn + n], termination=traj.termination)


# -- trajectory CSV ---------------------------------------------------------

def write_trajectory_csv(traj: Trajectory, path) -> None:
    """``k,x1,...,xd`` rows plus a trailing ``# termination=<cause>`` comment."""
    d = traj.points.shape[1]
    lines = ["k," + ",".join(f"x{i+1}" for i in range(d))]
    for k, row in enumerate(traj.points):
        lines.append(f"{k}," + ",".join(repr(float(v)) for v in row))
    lines.append(f"# termination={traj.termination}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trajectory_csv(path) -> Trajectory:
    """Inverse of :func:`write_trajectory_csv` (round-trips exactly)."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    termination = COMPLETED
    rows = []
    for ln in lines[1:]:
        if ln.startswith("#"):
            if "termination=" in ln:
                termination = ln.split("termination=", 1)[1].strip()
            continue
        rows.append([float(v) for v in ln.split(",")[1:]])
    pts = np.asarray(rows, dtype=float)
    return Trajectory(points=pts, direction="forward",
                      termination=termination, steps_taken=len(pts) - 1)
