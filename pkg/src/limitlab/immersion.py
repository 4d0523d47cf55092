"""Diagnostics for candidate immersions between discrete-time systems.

An immersion candidate F is judged by (i) how well it intertwines the two
step maps (`F(f(x)) ~ g(F(x))`), (ii) whether it pushes estimated limit sets
of the source onto limit sets of the target, (iii) whether it glues distinct
limit sets together (collapse), and (iv) whether it glues any *points*
together (injectivity probing). None of these are proofs — they are sampled
evidence with explicit tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import cdist

from . import config
from .dynamics import DiscreteMap, DomainRegion, as_state
from .errors import DomainError, UnconvergedError
from .geometry import diameter, directed_hausdorff, hausdorff, split_discrepancy
from .limits import (EstimatorConfig, LimitSetCatalog, LimitSetEstimate,
                     estimate_alpha, estimate_omega)


@dataclass(frozen=True)
class ImmersionMap:
    """A candidate immersion ``F: domain -> R^{dim_out}``.

    ``func`` acts on arrays shaped ``(..., dim_in)`` and broadcasts over
    leading axes (set ``vectorized=False`` otherwise). Calls check the domain
    and reject non-finite images with :class:`DomainError`.
    """

    dim_in: int
    dim_out: int
    func: Callable[[np.ndarray], np.ndarray]
    domain: DomainRegion
    name: str = "immersion"
    vectorized: bool = True

    def __call__(self, x) -> np.ndarray:
        x = as_state(x, self.dim_in)
        reason = self.domain.violation(x)
        if reason is not None:
            raise DomainError(x, reason, detail=self.name)
        with np.errstate(all="ignore"):
            y = np.asarray(self.func(x), dtype=float).reshape(self.dim_out)
        if not np.isfinite(y).all():
            raise DomainError(x, "non-finite-image", detail=self.name)
        return y

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Batch map with domain checks; raises on the first offending point."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        ok = self.domain.contains_batch(P)
        if not ok.all():
            bad = P[~ok][0]
            raise DomainError(bad, self.domain.violation(bad) or "out-of-bounds",
                              detail=self.name)
        if self.vectorized:
            with np.errstate(all="ignore"):
                out = np.asarray(self.func(P), dtype=float).reshape(len(P), self.dim_out)
        else:
            out = np.stack([np.asarray(self.func(p), dtype=float).reshape(self.dim_out)
                            for p in P])
        if not np.isfinite(out).all():
            bad = P[~np.isfinite(out).all(axis=1)][0]
            raise DomainError(bad, "non-finite-image", detail=self.name)
        return out

    def restricted(self, region: DomainRegion) -> "ImmersionMap":
        return replace(self, domain=region)


# -- conjugacy ---------------------------------------------------------------

@dataclass(frozen=True)
class ConjugacyReport:
    max_residual: float
    mean_residual: float
    worst_point: np.ndarray
    samples_used: int
    samples_skipped: int

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "conjugacy-report",
            "max_residual": float(self.max_residual),
            "mean_residual": float(self.mean_residual),
            "worst_point": [float(v) for v in np.atleast_1d(self.worst_point)],
            "samples_used": int(self.samples_used),
            "samples_skipped": int(self.samples_skipped),
        }


def conjugacy_residual(F: ImmersionMap, f: DiscreteMap, g: DiscreteMap,
                       samples) -> ConjugacyReport:
    """Sampled residual ``||F(f(x)) - g(F(x))||`` over the given states.

    Samples that fall outside any participating domain (or whose step image
    does) are skipped and counted, not fatal — but at least one sample must
    survive.
    """
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    if X.shape[1] != f.dim or f.dim != F.dim_in:
        raise ValueError("sample dimension does not match the source system")

    ok = np.isfinite(X).all(axis=1)
    ok &= F.domain.contains_batch(X) & f.domain.contains_batch(X)
    Xv = X[ok]
    with np.errstate(all="ignore"):
        if f.vectorized:
            Y = np.asarray(f.forward(Xv), dtype=float).reshape(len(Xv), f.dim)
        else:
            Y = np.stack([np.asarray(f.forward(x), dtype=float).reshape(f.dim) for x in Xv])
    good = np.isfinite(Y).all(axis=1)
    good &= F.domain.contains_batch(np.where(np.isfinite(Y), Y, 0.0))

    Xv, Y = Xv[good], Y[good]
    if len(Xv) == 0:
        raise DomainError(X[0], "out-of-bounds",
                          detail="no usable conjugacy samples on this domain")

    FX = _apply_unchecked(F, Xv)
    FY = _apply_unchecked(F, Y)
    with np.errstate(all="ignore"):
        if g.vectorized:
            GFX = np.asarray(g.forward(FX), dtype=float).reshape(len(FX), g.dim)
        else:
            GFX = np.stack([np.asarray(g.forward(z), dtype=float).reshape(g.dim) for z in FX])
    finite = np.isfinite(GFX).all(axis=1) & np.isfinite(FY).all(axis=1) & np.isfinite(FX).all(axis=1)
    Xv, FY, GFX = Xv[finite], FY[finite], GFX[finite]
    if len(Xv) == 0:
        raise DomainError(X[0], "non-finite-image",
                          detail="no usable conjugacy samples on this domain")

    res = np.linalg.norm(FY - GFX, axis=1)
    worst = int(np.argmax(res))
    return ConjugacyReport(
        max_residual=float(res[worst]),
        mean_residual=float(res.mean()),
        worst_point=Xv[worst],
        samples_used=int(len(Xv)),
        samples_skipped=int(len(X) - len(Xv)),
    )


def _apply_unchecked(F: ImmersionMap, P: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        if F.vectorized:
            return np.asarray(F.func(P), dtype=float).reshape(len(P), F.dim_out)
        return np.stack([np.asarray(F.func(p), dtype=float).reshape(F.dim_out) for p in P])


# -- limit-set pushforward -----------------------------------------------------

@dataclass(frozen=True)
class PushforwardReport:
    hausdorff_omega: float
    one_sided_omega: float
    hausdorff_alpha: Optional[float]
    one_sided_alpha: Optional[float]
    alpha_status: str            # "checked" | "escape-vacuous" | "no-inverse"
    omega_source: LimitSetEstimate
    omega_target: LimitSetEstimate

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "pushforward-report",
            "hausdorff_omega": float(self.hausdorff_omega),
            "one_sided_omega": float(self.one_sided_omega),
            "hausdorff_alpha": None if self.hausdorff_alpha is None else float(self.hausdorff_alpha),
            "one_sided_alpha": None if self.one_sided_alpha is None else float(self.one_sided_alpha),
            "alpha_status": self.alpha_status,
            "omega_shapes": [self.omega_source.shape, self.omega_target.shape],
        }


def pushforward_check(F: ImmersionMap, f: DiscreteMap, g: DiscreteMap, xi,
                      cfg: Optional[EstimatorConfig] = None) -> PushforwardReport:
    """Compare the image of the source limit-set estimate with the target's own.

    Both omega estimates must converge (:class:`UnconvergedError` otherwise).
    The alpha variant runs when both systems have inverses; backward escape on
    either side is recorded as vacuous rather than failing.
    """
    cfg = cfg or EstimatorConfig()
    xi = as_state(xi, f.dim)
    z0 = F(xi)

    est_x = estimate_omega(f, xi, cfg)
    est_z = estimate_omega(g, z0, cfg)
    for est, side in ((est_x, "source"), (est_z, "target")):
        if not est.converged:
            raise UnconvergedError(
                f"omega estimate on the {side} side did not converge "
                f"(status={est.status})", est)

    image = F.apply(est_x.points)
    h_omega = hausdorff(image, est_z.points)
    one_omega = directed_hausdorff(image, est_z.points)

    h_alpha = one_alpha = None
    if f.inverse is None or g.inverse is None:
        alpha_status = "no-inverse"
    else:
        est_xa = estimate_alpha(f, xi, cfg)
        est_za = estimate_alpha(g, z0, cfg)
        if est_xa.status in ("escaped", "singular") or est_za.status in ("escaped", "singular"):
            # the backward orbit leaves the domain, so there is nothing to compare
            alpha_status = "escape-vacuous"
        elif est_xa.converged and est_za.converged:
            image_a = F.apply(est_xa.points)
            h_alpha = hausdorff(image_a, est_za.points)
            one_alpha = directed_hausdorff(image_a, est_za.points)
            alpha_status = "checked"
        else:
            raise UnconvergedError("alpha estimate did not converge and did not escape")

    return PushforwardReport(
        hausdorff_omega=float(h_omega), one_sided_omega=float(one_omega),
        hausdorff_alpha=h_alpha, one_sided_alpha=one_alpha,
        alpha_status=alpha_status, omega_source=est_x, omega_target=est_z)


# -- collapse ------------------------------------------------------------------

@dataclass(frozen=True)
class CollapseReport:
    labels: tuple[str, ...]
    pairwise: np.ndarray             # Hausdorff distances between member images
    maximal_member: Optional[str]
    collapse_ratio: Optional[float]  # min pairwise / image diameter; None if <2 members
    image_diameter: float
    samples_used: int

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "collapse-report",
            "labels": list(self.labels),
            "pairwise_hausdorff": [[float(v) for v in row] for row in self.pairwise],
            "maximal_member": self.maximal_member,
            "collapse_ratio": None if self.collapse_ratio is None else float(self.collapse_ratio),
            "image_diameter": float(self.image_diameter),
            "samples_used": int(self.samples_used),
        }


def collapse_report(F: ImmersionMap, catalog: LimitSetCatalog,
                    samples=None, seed: int = config.DEFAULT_SEED,
                    n_samples: int = 512,
                    tol_cluster: float = config.TOL_CLUSTER) -> CollapseReport:
    """How far apart the images of the catalog's limit sets sit, relative to
    the overall spread of F over its domain.

    Raises :class:`DomainError` if any member point falls outside F's domain —
    that failure is itself evidence (the candidate cannot even represent the
    limit set). ``maximal_member`` is the member whose image contains every
    other image within ``tol_cluster`` one-sidedly, when one exists.
    """
    images = [F.apply(m.points) for m in catalog.members]
    labels = tuple(m.label for m in catalog.members)
    k = len(images)
    pairwise = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            pairwise[i, j] = pairwise[j, i] = hausdorff(images[i], images[j])

    maximal = None
    for i in range(k):
        if all(directed_hausdorff(images[j], images[i]) < tol_cluster
               for j in range(k) if j != i):
            maximal = labels[i]
            break

    if samples is None:
        rng = np.random.default_rng(seed)
        box = _bounding_box(catalog, F.domain)
        samples = F.domain.sample(n_samples, rng, box=box)
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    img_diam = diameter(F.apply(samples))

    ratio = None
    if k >= 2:
        off = pairwise[np.triu_indices(k, 1)]
        if img_diam > 0:
            ratio = float(off.min() / img_diam)
        else:
            # the whole domain maps to one point: total collapse, not separation
            ratio = 0.0 if off.min() == 0 else float("inf")

    return CollapseReport(labels=labels, pairwise=pairwise, maximal_member=maximal,
                          collapse_ratio=ratio, image_diameter=float(img_diam),
                          samples_used=int(len(samples)))


def _bounding_box(catalog: LimitSetCatalog, domain: DomainRegion) -> np.ndarray:
    """Fallback sample box: the catalog's spread, padded, for unbounded domains."""
    pts = np.vstack([m.points for m in catalog.members])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.maximum(hi - lo, 1.0)
    return np.column_stack([lo - 0.5 * span, hi + 0.5 * span])


# -- injectivity ----------------------------------------------------------------

@dataclass(frozen=True)
class InjectivityReport:
    collisions: tuple               # rows (x, x_prime, input_dist, image_dist), capped
    n_collisions: int               # total found (may exceed len(collisions))
    min_separation_ratio: float     # min ||F(x)-F(x')|| / ||x-x'|| over separated pairs
    pairs_checked: int
    delta_sep: float
    delta_img: float

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "injectivity-report",
            "collisions": [
                {
                    "x": [float(v) for v in a],
                    "x_prime": [float(v) for v in b],
                    "input_dist": float(dx),
                    "image_dist": float(di),
                }
                for a, b, dx, di in self.collisions
            ],
            "n_collisions": int(self.n_collisions),
            "min_separation_ratio": float(self.min_separation_ratio),
            "pairs_checked": int(self.pairs_checked),
            "delta_sep": float(self.delta_sep),
            "delta_img": float(self.delta_img),
        }


def injectivity_probe(F: ImmersionMap, samples,
                      delta_sep: float = config.DELTA_SEP,
                      delta_img: float = config.DELTA_IMG,
                      max_recorded: int = 256) -> InjectivityReport:
    """All-pairs search for samples that are far apart but map close together.

    A collision is ``||x - x'|| > delta_sep`` with ``||F(x) - F(x')|| <
    delta_img``. Also reports the worst contraction ratio over separated
    pairs (zero collisions implies it is positive). Only the first
    ``max_recorded`` collision pairs are kept; ``n_collisions`` counts all.
    """
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    X = X[F.domain.contains_batch(X)]
    if len(X) < 2:
        raise ValueError("need at least two in-domain samples")
    FX = F.apply(X)

    collisions = []
    n_collisions = 0
    min_ratio = float("inf")
    pairs = 0
    chunk = 512
    for i in range(0, len(X), chunk):
        dx = cdist(X[i:i + chunk], X)
        di = cdist(FX[i:i + chunk], FX)
        rows, cols = np.nonzero(dx > delta_sep)
        keep = (rows + i) < cols          # upper triangle only
        rows, cols = rows[keep], cols[keep]
        pairs += len(rows)
        if len(rows):
            ratios = di[rows, cols] / dx[rows, cols]
            min_ratio = min(min_ratio, float(ratios.min()))
            hit = di[rows, cols] < delta_img
            n_collisions += int(hit.sum())
            for r, c in zip(rows[hit], cols[hit]):
                if len(collisions) >= max_recorded:
                    break
                collisions.append((X[r + i], X[c], float(dx[r, c]), float(di[r, c])))
    return InjectivityReport(collisions=tuple(collisions),
                             n_collisions=n_collisions,
                             min_separation_ratio=min_ratio,
                             pairs_checked=pairs,
                             delta_sep=delta_sep, delta_img=delta_img)


# -- forward/backward consistency ------------------------------------------------

@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    detail: str
    hausdorff_distance: Optional[float]
    tolerance: Optional[float]
    omega: LimitSetEstimate
    alpha: Optional[LimitSetEstimate]

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "consistency-report",
            "consistent": bool(self.consistent),
            "detail": self.detail,
            "hausdorff_distance": (None if self.hausdorff_distance is None
                                   else float(self.hausdorff_distance)),
            "tolerance": (None if self.tolerance is None
                          else float(self.tolerance)),
        }


def omega_alpha_consistency(g: DiscreteMap, z0,
                            cfg: Optional[EstimatorConfig] = None,
                            tol_cluster: float = config.TOL_CLUSTER) -> ConsistencyReport:
    """Do the forward and backward limit sets of ``z0`` agree?

    For a system whose domains of attraction/repulsion are closed, a point in
    both (with precompact orbits both ways) must have matching limit sets —
    a flagged mismatch is evidence the basins are not closed on this domain.
    Escape on either side makes the check vacuous (consistent).
    """
    cfg = cfg or EstimatorConfig()
    est_o = estimate_omega(g, z0, cfg)
    est_a = estimate_alpha(g, z0, cfg)

    if est_o.status in ("escaped", "singular") or est_a.status in ("escaped", "singular"):
        return ConsistencyReport(consistent=True, detail="escape (vacuous)",
                                 hausdorff_distance=None, tolerance=None,
                                 omega=est_o, alpha=est_a)
    if not (est_o.converged and est_a.converged):
        raise UnconvergedError(
            f"limit-set estimates did not converge (omega={est_o.status}, "
            f"alpha={est_a.status})")
    d = hausdorff(est_o.points, est_a.points)
    # two finite samplings of one curve disagree by about as much as two
    # random halves of either sampling do, so the comparison tolerance
    # adapts to the noisier estimate
    tol_eff = max(tol_cluster, cfg.gap_factor * max(split_discrepancy(est_o.points),
                                                    split_discrepancy(est_a.points)))
    consistent = d < tol_eff
    detail = "matched" if consistent else "inconsistent: forward and backward limit sets differ"
    return ConsistencyReport(consistent=consistent, detail=detail,
                             hausdorff_distance=float(d), tolerance=float(tol_eff),
                             omega=est_o, alpha=est_a)
