"""Limit-set estimation, boundedness, basins of attraction, and closedness probes.

The forward limit set of a seed is estimated from tail windows of its orbit:
consecutive windows must agree in Hausdorff distance before the estimate
counts as converged. Two finite windows sampled from the same curve disagree
by about as much as two random halves of a single window do, so the settle
tolerance is ``max(tol_settle, gap_factor * split_discrepancy(window))`` —
fixed points and periodic orbits have discrepancy ~0 and are held to the
strict tolerance, while dense orbits settle once they stop moving at the
scale they are sampled at. The discrepancy is taken from the later of the
two windows, so a decaying transient is still measured against a tight
tolerance. The effective tolerance is recorded on the estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import config
from .dynamics import (COMPLETED, DIVERGED, LEFT_DOMAIN, SINGULAR,
                       DiscreteMap, DomainRegion, as_state, iterate)
from .errors import UnconvergedError
from .geometry import (diameter, directed_hausdorff, hausdorff, sampling_gap,
                       split_discrepancy)


@dataclass(frozen=True)
class EstimatorConfig:
    burn: int = config.BURN
    tail: int = config.TAIL
    max_rounds: int = config.MAX_ROUNDS
    tol_settle: float = config.TOL_SETTLE
    gap_factor: float = config.GAP_FACTOR
    tol_fp: float = config.TOL_FP
    max_period: int = config.MAX_PERIOD
    r_div: float = config.R_DIV


@dataclass(frozen=True)
class LimitSetEstimate:
    """A tail-window point cloud standing in for an omega/alpha-limit set."""

    points: np.ndarray           # (m, d); the last tail window
    source: str                  # "omega" | "alpha"
    seed: np.ndarray             # the starting state
    diameter: float
    shape: str                   # "fixed-point" | "periodic-orbit" | "curve" | "unknown"
    period: Optional[int]
    converged: bool
    status: str                  # "converged" | "unconverged" | "escaped" | "singular"
    settle_gap: float            # Hausdorff distance between the last two windows
    settle_tol: float            # effective tolerance that was applied to it


def _classify_shape(points: np.ndarray, tol_fp: float, max_period: int):
    diam = diameter(points)
    if diam < tol_fp:
        return "fixed-point", 1, diam
    for p in range(1, min(max_period, len(points) - 1) + 1):
        lagged = np.linalg.norm(points[p:] - points[:-p], axis=1)
        if lagged.max() < tol_fp:
            return "periodic-orbit", p, diam
    if sampling_gap(points) < 0.05 * diam:
        return "curve", None, diam
    return "unknown", None, diam


def estimate_omega(system: DiscreteMap, x0, cfg: Optional[EstimatorConfig] = None,
                   source: str = "omega") -> LimitSetEstimate:
    """Forward limit-set estimate at ``x0``.

    Escape (divergence or leaving the domain) and singular hits are embedded
    in the returned status rather than raised — an orbit with no forward limit
    set is a result, not a failure.
    """
    cfg = cfg or EstimatorConfig()
    seed = as_state(x0, system.dim)

    def fail(status, pts):
        pts = np.atleast_2d(pts)
        return LimitSetEstimate(points=pts, source=source, seed=seed,
                                diameter=float(diameter(pts)), shape="unknown",
                                period=None, converged=False, status=status,
                                settle_gap=float("inf"), settle_tol=cfg.tol_settle)

    status_of = {DIVERGED: "escaped", LEFT_DOMAIN: "escaped", SINGULAR: "singular"}

    burn_traj = iterate(system, seed, cfg.burn, r_div=cfg.r_div)
    if burn_traj.termination != COMPLETED:
        return fail(status_of[burn_traj.termination], burn_traj.points[-1:])
    current = burn_traj.last

    windows: list[np.ndarray] = []
    prev = None
    gap = float("inf")
    tol_eff = cfg.tol_settle
    for _ in range(cfg.max_rounds + 1):
        traj = iterate(system, current, cfg.tail, r_div=cfg.r_div)
        window = traj.points[: cfg.tail]
        if traj.termination != COMPLETED:
            return fail(status_of[traj.termination], traj.points[-1:])
        current = traj.last
        windows.append(window)
        if prev is not None:
            gap = hausdorff(prev, window)
            tol_eff = max(cfg.tol_settle, cfg.gap_factor * split_discrepancy(window))
            if gap <= tol_eff:
                shape, period, diam = _classify_shape(window, cfg.tol_fp, cfg.max_period)
                return LimitSetEstimate(points=window, source=source, seed=seed,
                                        diameter=diam, shape=shape, period=period,
                                        converged=True, status="converged",
                                        settle_gap=float(gap), settle_tol=float(tol_eff))
        prev = window

    shape, period, diam = _classify_shape(windows[-1], cfg.tol_fp, cfg.max_period)
    return LimitSetEstimate(points=windows[-1], source=source, seed=seed,
                            diameter=diam, shape=shape, period=period,
                            converged=False, status="unconverged",
                            settle_gap=float(gap), settle_tol=float(tol_eff))


def estimate_alpha(system: DiscreteMap, x0,
                   cfg: Optional[EstimatorConfig] = None) -> LimitSetEstimate:
    """Backward limit-set estimate: the omega estimate of the inverse dynamics."""
    return estimate_omega(system.reversed(), x0, cfg, source="alpha")


# -- boundedness -------------------------------------------------------------

@dataclass(frozen=True)
class BoundednessVerdict:
    verdict: str                 # "bounded" | "unbounded" | "undetermined"
    escape_radius: float
    steps_used: int
    max_norm: float


def classify_boundedness(system: DiscreteMap, x0,
                         horizon: int = config.BOUND_HORIZON,
                         r_bound: float = config.R_BOUND,
                         escape_radius: float = config.ESCAPE_RADIUS) -> BoundednessVerdict:
    """Bounded: stayed within ``r_bound`` for the whole horizon. Unbounded:
    crossed ``escape_radius`` with non-decreasing norms over the final quarter
    of what was recorded. Anything else: undetermined."""
    traj = iterate(system, x0, horizon)
    norms = np.linalg.norm(traj.points, axis=1)
    max_norm = float(norms.max())
    steps = traj.steps_taken
    if traj.termination == COMPLETED and max_norm <= r_bound:
        return BoundednessVerdict("bounded", escape_radius, steps, max_norm)
    if max_norm > escape_radius:
        q = max(2, len(norms) // 4)
        tail = norms[-q:]
        if np.all(np.diff(tail) >= -1e-9 * tail[:-1]):
            return BoundednessVerdict("unbounded", escape_radius, steps, max_norm)
    return BoundednessVerdict("undetermined", escape_radius, steps, max_norm)


# -- clustering --------------------------------------------------------------

_MEMBER_CAP = 2048  # union clouds are thinned deterministically beyond this


@dataclass(frozen=True)
class CatalogMember:
    label: str
    points: np.ndarray
    shape: str
    period: Optional[int]
    diameter: float
    first_seed: np.ndarray
    n_estimates: int
    precompact: bool
    resolution: float            # sampling gap of the stored cloud


@dataclass(frozen=True)
class LimitSetCatalog:
    members: tuple[CatalogMember, ...]
    tol_cluster: float
    gap_factor: float = config.GAP_FACTOR

    def __len__(self) -> int:
        return len(self.members)

    @property
    def labels(self) -> list[str]:
        return [m.label for m in self.members]

    def member(self, label: str) -> CatalogMember:
        for m in self.members:
            if m.label == label:
                return m
        raise KeyError(label)

    def min_separation(self) -> float:
        if len(self.members) < 2:
            return float("inf")
        best = float("inf")
        for i, a in enumerate(self.members):
            for b in self.members[i + 1:]:
                best = min(best, hausdorff(a.points, b.points))
        return best

    def match_tolerance(self, member: CatalogMember) -> float:
        return max(self.tol_cluster, self.gap_factor * member.resolution)

    def match(self, points) -> Optional[str]:
        """Label of the member the cloud sits on (one-sided, resolution-aware)."""
        best_label, best_d = None, float("inf")
        for m in self.members:
            d = directed_hausdorff(points, m.points)
            if d <= self.match_tolerance(m) and d < best_d:
                best_label, best_d = m.label, d
        return best_label


def _thin(points: np.ndarray, cap: int = _MEMBER_CAP) -> np.ndarray:
    if len(points) <= cap:
        return points
    idx = np.linspace(0, len(points) - 1, cap).astype(int)
    return points[idx]


def cluster_limit_sets(estimates: Sequence[LimitSetEstimate],
                       tol_cluster: float = config.TOL_CLUSTER,
                       gap_factor: float = config.GAP_FACTOR) -> LimitSetCatalog:
    """Greedy Hausdorff clustering of converged estimates into distinct limit
    sets. Labels are assigned in order of each member's first-seen seed, so
    the catalog is reproducible regardless of estimate order."""
    if len(estimates) == 0:
        raise ValueError("no estimates to cluster")
    bad = [i for i, e in enumerate(estimates) if not e.converged]
    if bad:
        raise UnconvergedError(f"estimates at positions {bad} did not converge; "
                               "cluster only converged estimates", estimates[bad[0]])

    clusters: list[dict] = []
    for est in estimates:
        res = sampling_gap(est.points)
        hit = None
        best = float("inf")
        for c in clusters:
            d = hausdorff(est.points, c["points"])
            # two samples of one curve can sit half a sampling gap apart, so
            # the merge tolerance adapts to the coarser of the two resolutions
            tol_eff = max(tol_cluster, gap_factor * max(res, c["res"]))
            if d < tol_eff and d < best:
                hit, best = c, d
        if hit is None:
            clusters.append({"points": est.points, "ests": [est], "res": res})
        else:
            hit["points"] = _thin(np.vstack([hit["points"], est.points]))
            hit["ests"].append(est)
            hit["res"] = sampling_gap(hit["points"])

    clusters.sort(key=lambda c: tuple(c["ests"][0].seed))
    members = []
    for i, c in enumerate(clusters):
        first = c["ests"][0]
        members.append(CatalogMember(
            label=f"S{i}",
            points=c["points"],
            shape=first.shape,
            period=first.period,
            diameter=float(diameter(c["points"])),
            first_seed=first.seed,
            n_estimates=len(c["ests"]),
            precompact=all(e.status == "converged" for e in c["ests"]),
            resolution=float(sampling_gap(c["points"])),
        ))
    return LimitSetCatalog(members=tuple(members), tol_cluster=tol_cluster,
                           gap_factor=gap_factor)


def catalog_from_seeds(system: DiscreteMap, seeds,
                       cfg: Optional[EstimatorConfig] = None,
                       tol_cluster: float = config.TOL_CLUSTER):
    """Estimate omega at each seed and cluster what converged.

    Returns ``(catalog, skipped)`` where skipped lists (seed, status) for
    orbits that escaped, hit a singularity, or failed to settle.
    """
    ests, skipped = [], []
    for s in np.atleast_2d(np.asarray(seeds, dtype=float)):
        est = estimate_omega(system, s, cfg)
        if est.converged:
            ests.append(est)
        else:
            skipped.append((s, est.status))
    if not ests:
        raise UnconvergedError("no seed produced a converged estimate")
    return cluster_limit_sets(ests, tol_cluster=tol_cluster), skipped


# -- basins ------------------------------------------------------------------

CODE_UNDETERMINED = -1
CODE_SINGULAR = -2
CODE_ESCAPED = -3

_SPECIAL_LABELS = {CODE_UNDETERMINED: "undetermined",
                   CODE_SINGULAR: "singular",
                   CODE_ESCAPED: "escaped"}


@dataclass(frozen=True)
class BasinConfig:
    burn: int = config.BASIN_BURN
    window: int = config.BASIN_WINDOW
    escape_radius: float = config.ESCAPE_RADIUS
    batch: int = 65536


@dataclass(frozen=True)
class BasinMap:
    """Grid of limit-set labels: each node's orbit was settled and matched."""

    region: DomainRegion
    resolution: tuple[int, ...]
    axes: tuple[np.ndarray, ...]     # per-axis node coordinates (inclusive)
    codes: np.ndarray                # member index or a CODE_* sentinel
    catalog: LimitSetCatalog
    params: dict

    def label_of_code(self, code: int) -> str:
        if code >= 0:
            return self.catalog.members[code].label
        return _SPECIAL_LABELS[int(code)]

    def node(self, idx: tuple[int, ...]) -> np.ndarray:
        return np.array([self.axes[a][i] for a, i in enumerate(idx)], dtype=float)

    def label_at(self, idx: tuple[int, ...]) -> str:
        return self.label_of_code(int(self.codes[idx]))


def _batch_forward(system: DiscreteMap, X: np.ndarray) -> np.ndarray:
    if system.vectorized:
        return np.asarray(system.forward(X), dtype=float).reshape(X.shape)
    return np.stack([np.asarray(system.forward(x), dtype=float).reshape(system.dim)
                     for x in X])


def _settle_batch(system: DiscreteMap, X0: np.ndarray, catalog: LimitSetCatalog,
                  cfg: BasinConfig) -> np.ndarray:
    """Settle a batch of start points and match each tail to a catalog member."""
    n = len(X0)
    codes = np.full(n, CODE_UNDETERMINED, dtype=np.int16)
    X = X0.astype(float).copy()
    alive = np.ones(n, dtype=bool)
    dom = system.domain

    member_pts = [m.points for m in catalog.members]
    owners = np.concatenate([np.full(len(p), i) for i, p in enumerate(member_pts)])
    tree = cKDTree(np.vstack(member_pts))
    tol_by_member = np.array([catalog.match_tolerance(m) for m in catalog.members])

    def cull(idx_alive):
        """Flag exclusion hits / domain exits / escapes among currently alive rows."""
        pts = X[idx_alive]
        sing = dom.exclusion_batch(pts) | ~np.isfinite(pts).all(axis=1)
        inside = dom.contains_batch(np.where(np.isfinite(pts), pts, 0.0))
        with np.errstate(over="ignore", invalid="ignore"):
            nrm = np.linalg.norm(np.where(np.isfinite(pts), pts, np.inf), axis=1)
        esc = (~inside & ~sing) | (nrm > cfg.escape_radius)
        codes[idx_alive[sing]] = CODE_SINGULAR
        codes[idx_alive[esc & ~sing]] = CODE_ESCAPED
        alive[idx_alive[sing | esc]] = False

    for _ in range(cfg.burn):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            return codes
        cull(idx)
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            return codes
        with np.errstate(all="ignore"):
            X[idx] = _batch_forward(system, X[idx])

    max_dist = np.zeros(n)
    owner = np.full(n, -1, dtype=np.int32)
    consistent = np.ones(n, dtype=bool)
    for _ in range(cfg.window):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        cull(idx)
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        d, nearest = tree.query(X[idx], k=1)
        who = owners[nearest]
        first = owner[idx] == -1
        owner[idx[first]] = who[first]
        consistent[idx] &= owner[idx] == who
        max_dist[idx] = np.maximum(max_dist[idx], d)
        with np.errstate(all="ignore"):
            X[idx] = _batch_forward(system, X[idx])

    idx = np.flatnonzero(alive)
    ok = consistent[idx] & (owner[idx] >= 0) & (max_dist[idx] <= tol_by_member[np.maximum(owner[idx], 0)])
    codes[idx[ok]] = owner[idx[ok]].astype(np.int16)
    return codes


def compute_basins(system: DiscreteMap, catalog: LimitSetCatalog,
                   region: Optional[DomainRegion] = None, resolution=101,
                   cfg: Optional[BasinConfig] = None, threads: int = 1) -> BasinMap:
    """Label every grid node of ``region`` with the catalog member its orbit
    settles onto (``resolution`` nodes per axis, endpoints included).

    A node is labeled only when the trailing window of its orbit sits entirely
    within the member's match tolerance; orbits that hit an excluded point are
    ``singular``, orbits that leave the domain or blow past the escape radius
    are ``escaped``, everything else is ``undetermined``.
    """
    cfg = cfg or BasinConfig()
    region = region or system.domain
    axes = region.grid(resolution)
    res = tuple(len(a) for a in axes)
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.column_stack([m.ravel() for m in mesh])

    chunks = [(s, min(s + cfg.batch, len(centers)))
              for s in range(0, len(centers), cfg.batch)]
    results: dict[int, np.ndarray] = {}
    if threads > 1 and len(chunks) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = {pool.submit(_settle_batch, system, centers[a:b], catalog, cfg): i
                    for i, (a, b) in enumerate(chunks)}
            for f, i in futs.items():
                results[i] = f.result()
    else:
        for i, (a, b) in enumerate(chunks):
            results[i] = _settle_batch(system, centers[a:b], catalog, cfg)
    codes = np.concatenate([results[i] for i in range(len(chunks))]).reshape(res)

    params = {
        "burn": cfg.burn, "window": cfg.window,
        "escape_radius": cfg.escape_radius,
        "tol_cluster": catalog.tol_cluster,
        "match_tolerances": {m.label: catalog.match_tolerance(m)
                             for m in catalog.members},
    }
    return BasinMap(region=region, resolution=res, axes=tuple(axes),
                    codes=codes, catalog=catalog, params=params)


# -- closedness witnesses ------------------------------------------------------

@dataclass(frozen=True)
class ClosednessWitness:
    """A shrinking sequence whose limit leaves the basin it rode in on.

    Every ``sequence`` point has limit set ``sequence_label``; the limit point
    has ``limit_label != sequence_label`` — so the domain of attraction of
    ``sequence_label`` is not closed.
    """

    sequence_seed: np.ndarray
    limit_point: np.ndarray
    sequence: np.ndarray
    sequence_label: str
    limit_label: str


def _boundary_pairs(basins: BasinMap):
    codes = basins.codes
    shape = codes.shape
    for idx in np.ndindex(shape):
        for axis in range(len(shape)):
            j = list(idx)
            j[axis] += 1
            if j[axis] >= shape[axis]:
                continue
            j = tuple(j)
            a, b = int(codes[idx]), int(codes[j])
            if a == b:
                continue
            if a >= 0:
                yield idx, j
            if b >= 0:
                yield j, idx


def basin_closedness_witness(system: DiscreteMap, basins: BasinMap,
                             cfg: Optional[EstimatorConfig] = None,
                             depth: int = config.WITNESS_DEPTH,
                             max_pairs: int = config.WITNESS_MAX_PAIRS) -> list[ClosednessWitness]:
    """Search basin boundaries for evidence that a domain of attraction is not
    closed: a sequence shrinking toward a neighboring node whose members all
    settle on one limit set while the node itself settles on another.

    Heuristic and bounded (first ``max_pairs`` boundary pairs in row-major
    order, ``depth`` sequence points each); an empty result is consistent
    with closed basins on the sampled grid, not a proof.
    """
    cfg = cfg or EstimatorConfig()
    catalog = basins.catalog
    witnesses: list[ClosednessWitness] = []
    seen: set[tuple] = set()

    for count, (a_idx, b_idx) in enumerate(_boundary_pairs(basins)):
        if count >= max_pairs:
            break
        label_a = basins.label_at(a_idx)
        xa, xb = basins.node(a_idx), basins.node(b_idx)

        sequence = np.array([xb + (xa - xb) * 2.0 ** (-j) for j in range(1, depth + 1)])
        ok = True
        for x in sequence:
            est = estimate_omega(system, x, cfg)
            if not est.converged or catalog.match(est.points) != label_a:
                ok = False
                break
        if not ok:
            continue

        est_b = estimate_omega(system, xb, cfg)
        if not est_b.converged:
            continue
        label_b = catalog.match(est_b.points)
        if label_b is None or label_b == label_a:
            continue

        key = (label_a, label_b, tuple(np.round(xb, 12)))
        if key in seen:
            continue
        seen.add(key)
        witnesses.append(ClosednessWitness(
            sequence_seed=xa, limit_point=xb, sequence=sequence,
            sequence_label=label_a, limit_label=label_b))
    return witnesses


# -- serialization -----------------------------------------------------------

def write_basin_csv(basins: BasinMap, path) -> None:
    """One row per grid node, row-major: ``i,j,...,label``."""
    dims = len(basins.resolution)
    header = ",".join(chr(ord("i") + a) for a in range(dims)) + ",label"
    lines = [header]
    for idx in np.ndindex(basins.codes.shape):
        lines.append(",".join(str(i) for i in idx) + "," + basins.label_at(idx))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def catalog_to_dict(catalog: LimitSetCatalog, max_points: int = 128) -> dict:
    members = []
    for m in catalog.members:
        pts = _thin(m.points, max_points)
        members.append({
            "label": m.label,
            "shape": m.shape,
            "period": m.period,
            "diameter": float(m.diameter),
            "precompact": bool(m.precompact),
            "first_seed": [float(v) for v in m.first_seed],
            "n_estimates": int(m.n_estimates),
            "resolution": float(m.resolution),
            "representative_points": [[float(v) for v in p] for p in pts],
        })
    return {
        "schema_version": 1,
        "kind": "limit-set-catalog",
        "tol_cluster": float(catalog.tol_cluster),
        "gap_factor": float(catalog.gap_factor),
        "min_separation": (None if len(catalog) < 2
                           else float(catalog.min_separation())),
        "members": members,
    }
