"""Learning linear representations of a nonlinear step map.

Fits a square matrix ``K`` so that ``Phi(f(x)) ~ K Phi(x)`` over a training
region, where ``Phi`` stacks dictionary functions. The learned ``Phi`` is then
treated as a candidate immersion into the linear system ``z -> K z`` and run
through the same diagnostics as hand-built candidates: conjugacy residual on
held-out samples, limit-set collapse against a catalog, and injectivity
probing. The sweep makes the residual/collapse/injectivity trade-off visible
across dictionary families and sizes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import config
from .dynamics import DiscreteMap, DomainRegion
from .errors import (CatalogGuardError, DomainError, InvalidParamError,
                     SingularGramError)
from .immersion import (CollapseReport, ImmersionMap, InjectivityReport,
                        collapse_report, conjugacy_residual, injectivity_probe)
from .limits import LimitSetCatalog
from .serialize import dumps, write_csv


# -- dictionaries -------------------------------------------------------------

@dataclass(frozen=True)
class Dictionary:
    """A finite family of observables ``R^dim -> R``, evaluated as columns."""

    kind: str
    dim: int
    labels: tuple[str, ...]
    _funcs: tuple[Callable[[np.ndarray], np.ndarray], ...] = field(repr=False)
    params: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.labels)

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        """Columns ``Phi(X)`` for ``X`` shaped ``(m, dim)`` -> ``(m, size)``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise ValueError(f"dictionary expects dim {self.dim}, got {X.shape[1]}")
        with np.errstate(all="ignore"):
            cols = [np.asarray(fn(X), dtype=float).reshape(len(X)) for fn in self._funcs]
        return np.column_stack(cols)

    def __call__(self, x) -> np.ndarray:
        return self.evaluate(np.atleast_2d(x))[0]


def _monomial_funcs(dim: int, order: int, include_constant: bool):
    funcs, labels = [], []
    degrees = range(0 if include_constant else 1, order + 1)
    for total in degrees:
        for combo in itertools.combinations_with_replacement(range(dim), total):
            counts = np.bincount(combo, minlength=dim) if combo else np.zeros(dim, dtype=int)

            def fn(X, c=counts.astype(float)):
                return np.prod(X ** c, axis=1)

            if not combo:
                labels.append("1")
            else:
                labels.append("*".join(
                    f"x{i + 1}" if c == 1 else f"x{i + 1}^{c}"
                    for i, c in enumerate(counts) if c > 0))
            funcs.append(fn)
    return funcs, labels


def _fourier_funcs(order: int, include_constant: bool):
    funcs, labels = [], []
    if include_constant:
        funcs.append(lambda X: np.ones(len(X)))
        labels.append("1")
    for j in range(1, order + 1):
        funcs.append(lambda X, j=j: np.cos(j * X[:, 0]))
        labels.append(f"cos({j}x)")
        funcs.append(lambda X, j=j: np.sin(j * X[:, 0]))
        labels.append(f"sin({j}x)")
    return funcs, labels


def _rational_pole_funcs(order: int, pole: float, include_constant: bool):
    funcs, labels = [], []
    if include_constant:
        funcs.append(lambda X: np.ones(len(X)))
        labels.append("1")
    for j in range(1, order + 1):
        def fn(X, j=j, p=pole):
            return ((X[:, 0] + p) / (X[:, 0] - p)) ** j

        funcs.append(fn)
        labels.append(f"((x+{pole:g})/(x-{pole:g}))^{j}" if j > 1
                      else f"(x+{pole:g})/(x-{pole:g})")
    return funcs, labels


def build_dictionary(kind: str, dim: int, order: int = 2, *,
                     include_constant: bool = True, pole: float = 1.0,
                     funcs: Optional[Sequence[Callable]] = None,
                     labels: Optional[Sequence[str]] = None) -> Dictionary:
    """Construct a dictionary of observables.

    Kinds: ``monomial`` (all monomials up to total degree ``order``),
    ``fourier`` (1D, ``cos(jx)/sin(jx)`` up to ``order``), ``rational-pole``
    (1D, powers of ``(x+pole)/(x-pole)``), ``custom`` (explicit callables on
    ``(m, dim)`` arrays).
    """
    if order < 0 or order > config.MAX_DICT_ORDER:
        raise InvalidParamError(
            f"dictionary order must lie in [0, {config.MAX_DICT_ORDER}], got {order}")
    if kind == "monomial":
        fns, labs = _monomial_funcs(dim, order, include_constant)
        params = {"order": order, "include_constant": include_constant}
    elif kind == "fourier":
        if dim != 1:
            raise InvalidParamError("fourier dictionaries are one-dimensional")
        fns, labs = _fourier_funcs(order, include_constant)
        params = {"order": order, "include_constant": include_constant}
    elif kind == "rational-pole":
        if dim != 1:
            raise InvalidParamError("rational-pole dictionaries are one-dimensional")
        fns, labs = _rational_pole_funcs(order, pole, include_constant)
        params = {"order": order, "pole": pole, "include_constant": include_constant}
    elif kind == "custom":
        if not funcs:
            raise InvalidParamError("custom dictionaries need explicit funcs")
        fns = list(funcs)
        labs = list(labels) if labels else [f"phi{i}" for i in range(len(fns))]
        if len(labs) != len(fns):
            raise InvalidParamError("labels must match funcs one-to-one")
        params = {}
    else:
        raise InvalidParamError(f"unknown dictionary kind {kind!r}")
    if not fns:
        raise InvalidParamError("dictionary is empty")
    return Dictionary(kind=kind, dim=dim, labels=tuple(labs), _funcs=tuple(fns),
                      params=params)


# -- training data ------------------------------------------------------------

def training_pairs(system: DiscreteMap, region: Optional[DomainRegion] = None,
                   n_grid: int = config.GRID_SAMPLES,
                   n_random: int = config.RANDOM_SAMPLES,
                   seed: int = config.DEFAULT_SEED,
                   box=None) -> tuple[np.ndarray, np.ndarray]:
    """State/next-state pairs over ``region``: a regular grid plus seeded
    uniform draws. Rows whose step image is non-finite are dropped.
    """
    region = region or system.domain
    rng = np.random.default_rng(seed)
    parts = []
    if region.bounds is not None and np.isfinite(region.bounds).all() \
            and region.kind != "annulus":
        per_axis = max(2, int(round(n_grid ** (1.0 / region.dim))))
        axes = region.grid(per_axis)
        mesh = np.meshgrid(*axes, indexing="ij")
        G = np.column_stack([m.ravel() for m in mesh])
        parts.append(G[region.contains_batch(G)])
    if n_random > 0:
        parts.append(region.sample(n_random, rng, box=box))
    X = np.vstack(parts)
    X = X[system.domain.contains_batch(X)]

    with np.errstate(all="ignore"):
        if system.vectorized:
            Y = np.asarray(system.forward(X), dtype=float).reshape(len(X), system.dim)
        else:
            Y = np.stack([np.asarray(system.forward(x), dtype=float).reshape(system.dim)
                          for x in X])
    keep = np.isfinite(Y).all(axis=1)
    return X[keep], Y[keep]


# -- regression ---------------------------------------------------------------

@dataclass(frozen=True)
class FitReport:
    rms_residual: float
    max_residual: float
    gram_condition: float
    samples_used: int
    ridge: float
    method: str                     # "normal-equations" | "qr"

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "fit-report",
            "rms_residual": float(self.rms_residual),
            "max_residual": float(self.max_residual),
            "gram_condition": float(self.gram_condition),
            "samples_used": int(self.samples_used),
            "ridge": float(self.ridge),
            "method": self.method,
        }


@dataclass(frozen=True)
class LearnedLift:
    """A fitted dictionary immersion together with its linear target."""

    dictionary: Dictionary
    K: np.ndarray
    domain: DomainRegion
    report: FitReport
    system_name: str = ""

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.sort_complex(np.linalg.eigvals(self.K))[::-1]

    def as_immersion(self) -> ImmersionMap:
        d = self.dictionary
        return ImmersionMap(dim_in=d.dim, dim_out=d.size, func=d.evaluate,
                            domain=self.domain,
                            name=f"{d.kind}-lift[{d.size}]")

    def lifted_map(self) -> DiscreteMap:
        K = self.K
        size = self.dictionary.size
        inv = None
        if np.linalg.matrix_rank(K) == size:
            K_inv = np.linalg.inv(K)
            inv = lambda Z: np.atleast_2d(Z) @ K_inv.T if np.ndim(Z) > 1 else K_inv @ Z
        fwd = lambda Z: np.atleast_2d(Z) @ K.T if np.ndim(Z) > 1 else K @ Z
        return DiscreteMap(dim=size, forward=fwd,
                           domain=DomainRegion.full_space(size),
                           inverse=inv,
                           inverse_domain=DomainRegion.full_space(size) if inv else None,
                           name=f"lifted[{self.dictionary.kind},{size}]")

    def predict(self, x) -> np.ndarray:
        return self.K @ self.dictionary(x)


def fit_lift(system: DiscreteMap, dictionary: Dictionary,
             region: Optional[DomainRegion] = None, ridge: float = 0.0,
             seed: int = config.DEFAULT_SEED,
             n_grid: int = config.GRID_SAMPLES,
             n_random: int = config.RANDOM_SAMPLES,
             box=None) -> LearnedLift:
    """Least-squares fit of ``K`` with ``Phi(f(x)) ~ K Phi(x)``.

    Uses normal equations while the Gram matrix is comfortably conditioned,
    switching to a QR solve past ``QR_COND_SWITCH``; a Gram condition beyond
    ``SINGULAR_COND`` with no ridge raises :class:`SingularGramError` instead
    of returning garbage coefficients.
    """
    if ridge < 0:
        raise InvalidParamError("ridge must be non-negative")
    region = region or system.domain
    X, Y = training_pairs(system, region, n_grid=n_grid, n_random=n_random,
                          seed=seed, box=box)
    PhiX = dictionary.evaluate(X)
    PhiY = dictionary.evaluate(Y)
    keep = np.isfinite(PhiX).all(axis=1) & np.isfinite(PhiY).all(axis=1)
    PhiX, PhiY = PhiX[keep], PhiY[keep]
    m, N = PhiX.shape
    if m < N:
        raise SingularGramError(
            f"only {m} usable samples for a {N}-function dictionary")

    G = PhiX.T @ PhiX + ridge * np.eye(N)
    cond = float(np.linalg.cond(G))
    if cond > config.SINGULAR_COND and ridge == 0.0:
        raise SingularGramError(
            f"gram condition {cond:.3e} exceeds {config.SINGULAR_COND:.1e}; "
            "add ridge regularisation or shrink the dictionary")
    if cond > config.QR_COND_SWITCH:
        if ridge > 0.0:
            A = np.vstack([PhiX, np.sqrt(ridge) * np.eye(N)])
            B = np.vstack([PhiY, np.zeros((N, N))])
        else:
            A, B = PhiX, PhiY
        Kt, *_ = np.linalg.lstsq(A, B, rcond=None)
        method = "qr"
    else:
        Kt = np.linalg.solve(G, PhiX.T @ PhiY)
        method = "normal-equations"
    K = Kt.T

    resid = np.linalg.norm(PhiY - PhiX @ Kt, axis=1)
    report = FitReport(rms_residual=float(np.sqrt(np.mean(resid ** 2))),
                       max_residual=float(resid.max()),
                       gram_condition=cond, samples_used=int(m),
                       ridge=float(ridge), method=method)
    return LearnedLift(dictionary=dictionary, K=K, domain=region, report=report,
                       system_name=system.name)


# -- sweep --------------------------------------------------------------------

@dataclass(frozen=True)
class TradeoffRow:
    dict_kind: str
    dict_size: int
    ridge: float
    residual_heldout: Optional[float]
    collapse_ratio: Optional[float]
    min_sep_ratio: Optional[float]
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "dict_kind": self.dict_kind,
            "dict_size": int(self.dict_size),
            "ridge": float(self.ridge),
            "residual_heldout": (None if self.residual_heldout is None
                                 else float(self.residual_heldout)),
            "collapse_ratio": (None if self.collapse_ratio is None
                               else float(self.collapse_ratio)),
            "min_sep_ratio": (None if self.min_sep_ratio is None
                              else float(self.min_sep_ratio)),
            "error": self.error,
        }


@dataclass(frozen=True)
class TradeoffReport:
    system_name: str
    rows: tuple[TradeoffRow, ...]
    seed: int

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "tradeoff-report",
            "system": self.system_name,
            "seed": int(self.seed),
            "rows": [r.to_dict() for r in self.rows],
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def write_csv(self, path) -> None:
        header = ["dict_kind", "dict_size", "ridge", "residual_heldout",
                  "collapse_ratio", "min_sep_ratio"]
        rows = [[r.dict_kind, r.dict_size, r.ridge,
                 r.residual_heldout, r.collapse_ratio, r.min_sep_ratio]
                for r in self.rows]
        write_csv(path, header, rows)


def obstruction_sweep(system: DiscreteMap, catalog: LimitSetCatalog,
                      specs: Sequence[tuple[str, int]],
                      ridges: Sequence[float] = (0.0,),
                      region: Optional[DomainRegion] = None,
                      seed: int = config.DEFAULT_SEED,
                      tol_cluster: float = config.TOL_CLUSTER,
                      pole: float = 1.0, box=None) -> TradeoffReport:
    """Fit every (dictionary spec, ridge) combination and score the resulting
    immersion candidate on held-out samples.

    ``specs`` are ``(kind, order)`` pairs. Scores per row: held-out conjugacy
    RMS residual against the lifted linear system, limit-set collapse ratio
    against ``catalog``, and the worst injectivity separation ratio. Rows that
    fail to fit (singular Gram, domain escapes) are kept with an ``error``
    field so the sweep output is total.
    """
    if len(catalog) > config.CATALOG_GUARD:
        raise CatalogGuardError(
            f"catalog has {len(catalog)} members; sweeps are guarded at "
            f"{config.CATALOG_GUARD} to keep pairwise image costs sane")
    region = region or system.domain
    rng = np.random.default_rng(seed + 1)          # held-out draw, distinct stream
    heldout = region.sample(config.RANDOM_SAMPLES, rng, box=box)

    rows = []
    for kind, order in specs:
        for ridge in ridges:
            try:
                dictionary = build_dictionary(kind, system.dim, order, pole=pole)
                lift = fit_lift(system, dictionary, region=region, ridge=ridge,
                                seed=seed, box=box)
                F = lift.as_immersion()
                g = lift.lifted_map()
                conj = conjugacy_residual(F, system, g, heldout)
                resid = _rms_conjugacy(F, system, g, heldout)
                try:
                    col = collapse_report(F, catalog, seed=seed,
                                          tol_cluster=tol_cluster)
                    ratio = col.collapse_ratio
                except DomainError as exc:
                    rows.append(TradeoffRow(kind, dictionary.size, float(ridge),
                                            resid, None, None,
                                            error=f"collapse: {exc}"))
                    continue
                inj = injectivity_probe(F, heldout)
                rows.append(TradeoffRow(kind, dictionary.size, float(ridge),
                                        resid, ratio, inj.min_separation_ratio))
            except (SingularGramError, DomainError, InvalidParamError) as exc:
                size = _spec_size(kind, system.dim, order)
                rows.append(TradeoffRow(kind, size, float(ridge),
                                        None, None, None, error=str(exc)))
    rows.sort(key=lambda r: (r.dict_size, r.dict_kind, r.ridge))
    return TradeoffReport(system_name=system.name, rows=tuple(rows), seed=seed)


def _rms_conjugacy(F: ImmersionMap, f: DiscreteMap, g: DiscreteMap, samples) -> float:
    """Held-out RMS of ``||F(f(x)) - g(F(x))||`` (the sweep's residual column)."""
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    ok = F.domain.contains_batch(X) & f.domain.contains_batch(X)
    X = X[ok]
    with np.errstate(all="ignore"):
        Y = (np.asarray(f.forward(X), dtype=float).reshape(len(X), f.dim)
             if f.vectorized else
             np.stack([np.asarray(f.forward(x), dtype=float).reshape(f.dim) for x in X]))
        FY = _eval(F, Y)
        GFX = (np.asarray(g.forward(_eval(F, X)), dtype=float)
               .reshape(len(X), g.dim))
    res = np.linalg.norm(FY - GFX, axis=1)
    res = res[np.isfinite(res)]
    if len(res) == 0:
        raise DomainError(X[0] if len(X) else np.zeros(f.dim), "non-finite-image",
                          detail="no usable held-out samples")
    return float(np.sqrt(np.mean(res ** 2)))


def _eval(F: ImmersionMap, P: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        return np.asarray(F.func(P), dtype=float).reshape(len(P), F.dim_out)


def _spec_size(kind: str, dim: int, order: int) -> int:
    try:
        return build_dictionary(kind, dim, order).size
    except InvalidParamError:
        return -1
