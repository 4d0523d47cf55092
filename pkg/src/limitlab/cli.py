"""The ``limitlab`` command line.

Subcommands map one-to-one onto the library surface: ``simulate`` (orbits),
``limits`` (limit-set catalogs), ``basins`` (grid labeling + closedness
witnesses), ``verify`` (exact-immersion diagnostics), ``learn``/``sweep``
(dictionary lifts and the residual/collapse/injectivity trade-off), ``demo``
(four deterministic worked examples), and ``report`` (render saved artifacts
into text tables, whitespace point files, and basin rasters).

Exit codes: 0 on success, 2 for usage/parameter problems, 3 when the requested
mathematics fails (domain violations, unconverged estimates, singular
regressions, ...). Failures print a single JSON line to stderr so scripts can
parse them.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import config, serialize
from .catalog import default_seeds, exact_immersion, get_system
from .dynamics import DomainRegion, iterate, write_trajectory_csv
from .errors import (CatalogGuardError, DomainError, IllConditionedError,
                     InvalidParamError, MissingArtifactError,
                     NoExactImmersionError, NoInverseError, NotStableError,
                     SingularGramError, UnconvergedError, UnknownSystemError)
from .immersion import (conjugacy_residual, injectivity_probe,
                        omega_alpha_consistency, pushforward_check)
from .lifting import build_dictionary, fit_lift, obstruction_sweep
from .limits import (BasinConfig, EstimatorConfig, basin_closedness_witness,
                     catalog_from_seeds, catalog_to_dict, compute_basins,
                     write_basin_csv)
from .linear import spectral_split, spectral_split_to_dict, stability_bound

_USAGE_ERRORS = (UnknownSystemError, InvalidParamError)
_MATH_ERRORS = (DomainError, UnconvergedError, SingularGramError,
                NotStableError, NoExactImmersionError, CatalogGuardError,
                IllConditionedError, NoInverseError, MissingArtifactError)

_DEFAULT_BOX_HALF = 2.0


# -- small parsing helpers -----------------------------------------------------

def _emit_error(kind: str, message: str, **extra) -> None:
    payload = {"error": kind, "message": message}
    payload.update(extra)
    print(json.dumps(serialize._coerce(payload), sort_keys=True), file=sys.stderr)


def _parse_params(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise InvalidParamError(f"--param expects k=v, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            value = int(raw) if raw.lstrip("+-").isdigit() else float(raw)
        except ValueError:
            raise InvalidParamError(f"could not parse parameter value {raw!r}") from None
        out[key.strip()] = value
    return out


def _parse_sets(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise InvalidParamError(f"--set expects name=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            out[key.strip()] = int(raw) if raw.lstrip("+-").isdigit() else float(raw)
        except ValueError:
            raise InvalidParamError(f"could not parse setting value {raw!r}") from None
    return out


def _parse_domain(spec: str, dim: int) -> DomainRegion:
    axes = []
    for part in spec.split(";"):
        nums = [float(v) for v in part.split(",") if v.strip()]
        if len(nums) != 2 or not nums[0] < nums[1]:
            raise InvalidParamError(
                f"--domain axis {part!r} must be 'lo,hi' with lo < hi")
        axes.append(nums)
    if len(axes) != dim:
        raise InvalidParamError(
            f"--domain has {len(axes)} axis spec(s) but the system is {dim}-dimensional")
    if dim == 1:
        return DomainRegion.interval(axes[0][0], axes[0][1])
    return DomainRegion.box(axes)


def _parse_points(spec: str, dim: int) -> list[np.ndarray]:
    points = []
    for part in spec.split(";"):
        nums = [float(v) for v in part.split(",") if v.strip()]
        if len(nums) != dim:
            raise InvalidParamError(
                f"point {part!r} has {len(nums)} coordinate(s), expected {dim}")
        points.append(np.asarray(nums, dtype=float))
    if not points:
        raise InvalidParamError("no points parsed")
    return points


def _seed_of(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    env = os.environ.get("LIMITLAB_SEED")
    return int(env) if env else config.DEFAULT_SEED


def _estimator_cfg(sets: dict) -> EstimatorConfig:
    return EstimatorConfig(
        burn=int(sets.get("burn", config.BURN)),
        tail=int(sets.get("tail", config.TAIL)),
        max_rounds=int(sets.get("max_rounds", config.MAX_ROUNDS)),
        tol_settle=float(sets.get("tol_settle", config.TOL_SETTLE)),
        gap_factor=float(sets.get("gap_factor", config.GAP_FACTOR)),
        tol_fp=float(sets.get("tol_fp", config.TOL_FP)),
        max_period=int(sets.get("max_period", config.MAX_PERIOD)),
        r_div=float(sets.get("r_div", config.R_DIV)),
    )


def _basin_cfg(sets: dict) -> BasinConfig:
    return BasinConfig(
        burn=int(sets.get("basin_burn", config.BASIN_BURN)),
        window=int(sets.get("window", config.BASIN_WINDOW)),
        escape_radius=float(sets.get("escape_radius", config.ESCAPE_RADIUS)),
        batch=int(sets.get("batch", 65536)),
    )


def _default_box(dim: int) -> DomainRegion:
    if dim == 1:
        return DomainRegion.interval(-_DEFAULT_BOX_HALF, _DEFAULT_BOX_HALF)
    return DomainRegion.box([[-_DEFAULT_BOX_HALF, _DEFAULT_BOX_HALF]] * dim)


def _bounded(region: DomainRegion) -> bool:
    return (region.bounds is not None and np.isfinite(region.bounds).all()
            and region.kind != "annulus")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _table(header, rows) -> str:
    cells = [list(map(str, header))] + [[_fmt(v) for v in r] for r in rows]
    widths = [max(len(row[c]) for row in cells) for c in range(len(header))]
    lines = ["  ".join(row[c].ljust(widths[c]) for c in range(len(header))).rstrip()
             for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


# -- sampling shared by verify/learn ---------------------------------------------

def _survey_samples(region: DomainRegion, dim: int, seed: int,
                    n_random: int = 512) -> np.ndarray:
    per_axis = 129 if dim == 1 else 17
    axes = region.grid(per_axis)
    mesh = np.meshgrid(*axes, indexing="ij")
    grid = np.column_stack([m.ravel() for m in mesh])
    grid = grid[region.contains_batch(grid)]
    rng = np.random.default_rng(seed)
    rand = region.sample(n_random, rng)
    return np.vstack([grid, rand])


# -- subcommands ------------------------------------------------------------------

def cmd_simulate(args) -> int:
    system = get_system(args.system, **_parse_params(args.param))
    if args.domain:
        system = system.restrict(_parse_domain(args.domain, system.dim))
    x0 = _parse_points(args.x0, system.dim)[0]
    system_run = system.reversed() if args.backward else system
    traj = iterate(system_run, x0, args.steps)
    out = _out_dir(args)
    path = out / "trajectory.csv"
    write_trajectory_csv(traj, path)
    last = ",".join(repr(float(v)) for v in traj.last)
    print(f"system={system.name} direction={'backward' if args.backward else 'forward'} "
          f"steps={traj.steps_taken} termination={traj.termination} last={last}")
    print(f"wrote {path}")
    return 0


def cmd_limits(args) -> int:
    system = get_system(args.system, **_parse_params(args.param))
    if args.domain:
        system = system.restrict(_parse_domain(args.domain, system.dim))
    if args.backward:
        system = system.reversed()
    sets = _parse_sets(args.set)
    cfg = _estimator_cfg(sets)
    tol_cluster = float(sets.get("tol_cluster", config.TOL_CLUSTER))
    seeds = (_parse_points(args.seeds, system.dim) if args.seeds
             else default_seeds(args.system))
    catalog, skipped = catalog_from_seeds(system, seeds, cfg, tol_cluster=tol_cluster)

    out = _out_dir(args)
    path = out / "catalog.json"
    serialize.dump(catalog_to_dict(catalog), path)

    rows = [(m.label, m.shape, m.period if m.period is not None else "-",
             m.diameter, m.n_estimates, m.resolution)
            for m in catalog.members]
    print(_table(["label", "shape", "period", "diameter", "estimates", "resolution"], rows))
    for seed, status in skipped:
        print(f"skipped seed {','.join(repr(float(v)) for v in seed)}: {status}")
    print(f"wrote {path}")
    return 0


def cmd_basins(args) -> int:
    system = get_system(args.system, **_parse_params(args.param))
    sets = _parse_sets(args.set)
    est_cfg = _estimator_cfg(sets)
    tol_cluster = float(sets.get("tol_cluster", config.TOL_CLUSTER))

    if args.domain:
        region = _parse_domain(args.domain, system.dim)
    elif _bounded(system.domain):
        region = system.domain
    else:
        raise InvalidParamError(
            f"{system.name} lives on an unbounded domain; pass --domain to pick "
            "the grid window")

    seeds = (_parse_points(args.seeds, system.dim) if args.seeds
             else default_seeds(args.system))
    catalog, skipped = catalog_from_seeds(system, seeds, est_cfg, tol_cluster=tol_cluster)
    basins = compute_basins(system, catalog, region=region,
                            resolution=args.resolution, cfg=_basin_cfg(sets),
                            threads=args.threads)
    witnesses = basin_closedness_witness(system, basins, est_cfg)

    out = _out_dir(args)
    csv_path = out / "basins.csv"
    write_basin_csv(basins, csv_path)
    labels, counts = np.unique(basins.codes, return_counts=True)
    count_map = {basins.label_of_code(int(c)): int(n) for c, n in zip(labels, counts)}
    summary = {
        "schema_version": 1, "kind": "basin-summary", "system": system.name,
        "resolution": [int(r) for r in basins.resolution],
        "counts": count_map, "params": basins.params,
        "witnesses": [{
            "boundary_label": w.sequence_label, "limit_label": w.limit_label,
            "limit_point": [float(v) for v in w.limit_point],
        } for w in witnesses],
    }
    json_path = out / "basins.json"
    serialize.dump(summary, json_path)

    print(_table(["label", "nodes"], sorted(count_map.items())))
    for w in witnesses:
        pt = ",".join(repr(float(v)) for v in w.limit_point)
        print(f"witness: basin of {w.sequence_label} is not closed — points "
              f"arbitrarily close to ({pt}) settle on {w.sequence_label}, "
              f"the point itself settles on {w.limit_label}")
    for seed, status in skipped:
        print(f"skipped seed {','.join(repr(float(v)) for v in seed)}: {status}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return 0


def cmd_verify(args) -> int:
    params = _parse_params(args.param)
    system = get_system(args.system, **params)
    pair = exact_immersion(args.system, variant=args.variant, **params)
    F, target = pair.immersion, pair.target
    seed = _seed_of(args)
    sets = _parse_sets(args.set)
    cfg = _estimator_cfg(sets)

    explicit = args.domain is not None
    if explicit:
        region = _parse_domain(args.domain, system.dim)
    elif _bounded(system.domain):
        region = system.domain
    else:
        region = _default_box(system.dim)

    samples = _survey_samples(region, system.dim, seed)
    if explicit:
        # the user is claiming the immersion works on this whole region —
        # every grid node must be usable, endpoints included
        try:
            for x in samples:
                F(x)
                y = system.domain.violation(x)
                if y is not None:
                    raise DomainError(x, y, detail=system.name)
        except DomainError as exc:
            point = [float(v) for v in np.atleast_1d(exc.point)]
            _emit_error("immersion-undefined", str(exc),
                        system=args.system, immersion=F.name, reason=exc.reason,
                        immersion_undefined_at=point[0] if len(point) == 1 else point,
                        point=point)
            return 3

    conj = conjugacy_residual(F, system, target, samples)

    push = None
    xi = None
    if args.x0:
        xi = _parse_points(args.x0, system.dim)[0]
    else:
        for cand in default_seeds(args.system):
            if region.contains(cand) and F.domain.contains(cand) \
                    and system.domain.contains(cand):
                xi = cand
                break
    if xi is not None:
        push = pushforward_check(F, system, target, xi, cfg)

    inj = injectivity_probe(F, samples[F.domain.contains_batch(samples)])

    status = "ok" if conj.max_residual <= args.tol and inj.n_collisions == 0 else "failed"
    report = {
        "schema_version": 1, "kind": "verify-report", "system": system.name,
        "immersion": F.name, "status": status, "seed": seed,
        "conjugacy": conj.to_dict(),
        "pushforward": push.to_dict() if push else None,
        "injectivity": inj.to_dict(),
    }
    out = _out_dir(args)
    path = out / "verify.json"
    serialize.dump(report, path)

    print(f"immersion {F.name} -> {target.name}")
    print(f"conjugacy: max residual {conj.max_residual:.3e} over "
          f"{conj.samples_used} samples ({conj.samples_skipped} outside the domain)")
    if push:
        print(f"pushforward: hausdorff(omega image, target omega) = "
              f"{push.hausdorff_omega:.3e}; alpha: {push.alpha_status}"
              + (f", hausdorff {push.hausdorff_alpha:.3e}"
                 if push.hausdorff_alpha is not None else ""))
    print(f"injectivity: {inj.n_collisions} collision(s) over "
          f"{inj.pairs_checked} pairs; worst separation ratio {inj.min_separation_ratio:.3e}")
    print(f"status: {status}")
    print(f"wrote {path}")
    if status != "ok":
        _emit_error("verification-failed",
                    f"max residual {conj.max_residual!r} exceeds tol {args.tol!r} "
                    f"or collisions found", system=args.system)
        return 3
    return 0


def cmd_learn(args) -> int:
    params = _parse_params(args.param)
    system = get_system(args.system, **params)
    seed = _seed_of(args)
    region = box = None
    if args.domain:
        region = _parse_domain(args.domain, system.dim)
    elif not _bounded(system.domain):
        box = [[-_DEFAULT_BOX_HALF, _DEFAULT_BOX_HALF]] * system.dim

    dictionary = build_dictionary(args.dict, system.dim, args.order, pole=args.pole)
    lift = fit_lift(system, dictionary, region=region, ridge=args.ridge,
                    seed=seed, box=box)

    out = _out_dir(args)
    fit_path = out / "fit.json"
    serialize.dump(lift.report.to_dict(), fit_path)
    K = lift.K
    lift_doc = {
        "schema_version": 1, "kind": "learned-lift", "system": system.name,
        "dict_kind": dictionary.kind, "labels": list(dictionary.labels),
        "K": {"shape": [int(K.shape[0]), int(K.shape[1])],
              "data_colmajor": [float(v) for v in K.flatten(order="F")]},
        "eigenvalues": [[float(ev.real), float(ev.imag)] for ev in lift.eigenvalues],
        "fit": lift.report.to_dict(),
    }
    lift_path = out / "lift.json"
    serialize.dump(lift_doc, lift_path)

    ev = ", ".join(f"{e.real:.6g}{e.imag:+.6g}j" if e.imag else f"{e.real:.6g}"
                   for e in lift.eigenvalues[: min(6, len(lift.eigenvalues))])
    print(f"dictionary {dictionary.kind} size {dictionary.size} "
          f"({lift.report.method}, ridge {args.ridge:g})")
    print(f"train rms residual {lift.report.rms_residual:.3e}, "
          f"gram condition {lift.report.gram_condition:.3e}")
    print(f"leading eigenvalues: {ev}")
    print(f"wrote {fit_path}")
    print(f"wrote {lift_path}")
    return 0


def _parse_dict_specs(spec: str) -> list[tuple[str, int]]:
    out = []
    for part in spec.split(","):
        if ":" not in part:
            raise InvalidParamError(f"--dicts expects kind:order items, got {part!r}")
        kind, order = part.rsplit(":", 1)
        try:
            out.append((kind.strip(), int(order)))
        except ValueError:
            raise InvalidParamError(f"bad dictionary order in {part!r}") from None
    return out


def cmd_sweep(args) -> int:
    params = _parse_params(args.param)
    system = get_system(args.system, **params)
    seed = _seed_of(args)
    sets = _parse_sets(args.set)
    est_cfg = _estimator_cfg(sets)
    tol_cluster = float(sets.get("tol_cluster", config.TOL_CLUSTER))

    region = box = None
    if args.domain:
        region = _parse_domain(args.domain, system.dim)
    elif not _bounded(system.domain):
        box = [[-_DEFAULT_BOX_HALF, _DEFAULT_BOX_HALF]] * system.dim

    if args.auto_seeds:
        rng = np.random.default_rng(seed)
        sample_region = region or system.domain
        seeds = list(sample_region.sample(args.auto_seeds, rng, box=box))
    elif args.seeds:
        seeds = _parse_points(args.seeds, system.dim)
    else:
        seeds = default_seeds(args.system)
    catalog, _skipped = catalog_from_seeds(system, seeds, est_cfg,
                                           tol_cluster=tol_cluster)

    if args.dicts:
        specs = _parse_dict_specs(args.dicts)
    elif system.dim == 1:
        specs = [("monomial", 1), ("monomial", 2), ("monomial", 3), ("monomial", 4),
                 ("fourier", 2), ("rational-pole", 1)]
    else:
        specs = [("monomial", 1), ("monomial", 2), ("monomial", 3)]
    ridges = [float(r) for r in args.ridges.split(",")] if args.ridges else [0.0]

    report = obstruction_sweep(system, catalog, specs, ridges=ridges,
                               region=region, seed=seed, tol_cluster=tol_cluster,
                               pole=args.pole, box=box)
    out = _out_dir(args)
    csv_path = out / "sweep.csv"
    report.write_csv(csv_path)
    json_path = out / "sweep.json"
    serialize.dump(report.to_dict(), json_path)

    rows = [(r.dict_kind, r.dict_size, r.ridge, r.residual_heldout,
             r.collapse_ratio, r.min_sep_ratio,
             (r.error or "")[:48]) for r in report.rows]
    print(_table(["dict", "size", "ridge", "residual", "collapse", "min-sep", "note"],
                 rows))
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return 0


# -- demo -------------------------------------------------------------------------

def _demo_mobius(out: Path, seed: int, threads: int, cfg: EstimatorConfig) -> dict:
    f = get_system("mobius")
    catalog, _ = catalog_from_seeds(f, default_seeds("mobius"), cfg)
    serialize.dump(catalog_to_dict(catalog), out / "mobius-catalog.json")

    region = DomainRegion.interval(-2.0, 2.0)
    basins = compute_basins(f, catalog, region=region, resolution=401,
                            threads=threads)
    witnesses = basin_closedness_witness(f, basins, cfg)
    write_basin_csv(basins, out / "mobius-basins.csv")
    labels, counts = np.unique(basins.codes, return_counts=True)
    serialize.dump({
        "schema_version": 1, "kind": "basin-summary", "system": f.name,
        "resolution": [int(r) for r in basins.resolution],
        "counts": {basins.label_of_code(int(c)): int(n)
                   for c, n in zip(labels, counts)},
        "params": basins.params,
        "witnesses": [{"boundary_label": w.sequence_label,
                       "limit_label": w.limit_label,
                       "limit_point": [float(v) for v in w.limit_point]}
                      for w in witnesses],
    }, out / "mobius-basins.json")

    pair = exact_immersion("mobius")
    samples = _survey_samples(region, 1, seed)
    conj = conjugacy_residual(pair.immersion, f, pair.target, samples)
    push = pushforward_check(pair.immersion, f, pair.target, [0.0], cfg)
    serialize.dump({
        "schema_version": 1, "kind": "verify-report", "system": f.name,
        "immersion": pair.immersion.name, "status": "ok", "seed": seed,
        "conjugacy": conj.to_dict(), "pushforward": push.to_dict(),
        "injectivity": injectivity_probe(
            pair.immersion, samples[pair.immersion.domain.contains_batch(samples)]
        ).to_dict(),
    }, out / "mobius-verify.json")

    return {
        "name": "rational-fixed-points", "status": "ok",
        "metrics": {
            "members": len(catalog), "witnesses": len(witnesses),
            "max_residual": conj.max_residual,
            "hausdorff_omega": push.hausdorff_omega,
            "alpha_status": push.alpha_status,
        },
    }


def _demo_cot(out: Path, seed: int, cfg: EstimatorConfig) -> dict:
    f = get_system("cot-map")
    pair = exact_immersion("cot-map")
    samples = _survey_samples(f.domain, 1, seed)
    conj = conjugacy_residual(pair.immersion, f, pair.target, samples)
    push = pushforward_check(pair.immersion, f, pair.target, [1.0], cfg)
    consistency = omega_alpha_consistency(f, [2.0], cfg)
    serialize.dump({
        "schema_version": 1, "kind": "verify-report", "system": f.name,
        "immersion": pair.immersion.name, "status": "ok", "seed": seed,
        "conjugacy": conj.to_dict(), "pushforward": push.to_dict(),
        "injectivity": injectivity_probe(pair.immersion, samples).to_dict(),
    }, out / "cot-verify.json")
    serialize.dump(consistency.to_dict(), out / "cot-consistency.json")
    return {
        "name": "half-angle-conjugacy", "status": "ok",
        "metrics": {
            "max_residual": conj.max_residual,
            "hausdorff_omega": push.hausdorff_omega,
            "forward_backward_consistent": consistency.consistent,
            "consistency_detail": consistency.detail,
        },
    }


def _demo_rotation(out: Path, seed: int, cfg: EstimatorConfig) -> dict:
    from .immersion import collapse_report
    from .linear import LinearSystem

    f = get_system("rotation-scaling")
    catalog, _ = catalog_from_seeds(f, default_seeds("rotation-scaling"), cfg)
    serialize.dump(catalog_to_dict(catalog), out / "rotation-catalog.json")

    pair = exact_immersion("rotation-scaling")
    collapse_error = None
    try:
        collapse_report(pair.immersion, catalog, seed=seed)
    except DomainError as exc:
        # expected: the fixed point at the origin is outside the immersion's
        # domain, so its limit set cannot even be carried over
        collapse_error = {"reason": exc.reason,
                          "point": [float(v) for v in np.atleast_1d(exc.point)]}

    push = pushforward_check(pair.immersion, f, pair.target, [2.0, 0.0], cfg)

    A = np.zeros((3, 3))
    import math
    c, s = math.cos(1.0), math.sin(1.0)
    A[:2, :2] = [[c, s], [-s, c]]
    A[2, 2] = 0.5
    target = LinearSystem(A, name="rotation-block")
    split = spectral_split(target)
    serialize.dump(spectral_split_to_dict(split), out / "rotation-spectral.json")
    basis = np.hstack([split.stable_basis, split.unit_basis])
    bound = stability_bound(target, basis)

    serialize.dump({
        "schema_version": 1, "kind": "pushforward-report", **push.to_dict(),
    } | {"collapse_error": collapse_error}, out / "rotation-pushforward.json")

    status = "ok" if collapse_error else "unexpected"
    return {
        "name": "circle-collapse-obstruction", "status": status,
        "metrics": {
            "members": len(catalog),
            "collapse_domain_failure": collapse_error,
            "one_sided_omega": push.one_sided_omega,
            "alpha_status": push.alpha_status,
            "spectral_dims": list(split.dims),
            "stability_bound": bound,
        },
    }


def _demo_sweep(out: Path, seed: int, cfg: EstimatorConfig) -> dict:
    f = get_system("mobius")
    catalog, _ = catalog_from_seeds(f, default_seeds("mobius"), cfg)
    region = DomainRegion.interval(-1.2, 1.2)
    specs = [("monomial", 1), ("monomial", 2), ("monomial", 4),
             ("fourier", 2), ("rational-pole", 1)]
    report = obstruction_sweep(f, catalog, specs, ridges=(0.0,), region=region,
                               seed=seed)
    report.write_csv(out / "mobius-sweep.csv")
    serialize.dump(report.to_dict(), out / "mobius-sweep.json")

    lift = fit_lift(f, build_dictionary("rational-pole", 1, 1), region=region,
                    seed=seed)
    ok_rows = [r for r in report.rows if r.residual_heldout is not None]
    best = min(ok_rows, key=lambda r: r.residual_heldout)
    return {
        "name": "dictionary-tradeoff", "status": "ok",
        "metrics": {
            "rows": len(report.rows),
            "best_dict": best.dict_kind,
            "best_residual": best.residual_heldout,
            "rational_pole_eigenvalues": [
                [float(e.real), float(e.imag)] for e in lift.eigenvalues],
        },
    }


def cmd_demo(args) -> int:
    out = _out_dir(args)
    seed = _seed_of(args)
    cfg = _estimator_cfg(_parse_sets(args.set))
    examples = []
    steps = [
        lambda: _demo_mobius(out, seed, args.threads, cfg),
        lambda: _demo_cot(out, seed, cfg),
        lambda: _demo_rotation(out, seed, cfg),
        lambda: _demo_sweep(out, seed, cfg),
    ]
    for i, step in enumerate(steps, 1):
        result = step()
        examples.append(result)
        keys = ", ".join(f"{k}={_fmt(v)}" for k, v in result["metrics"].items()
                         if not isinstance(v, (list, dict)))
        print(f"[{i}/{len(steps)}] {result['name']}: {result['status']} ({keys})")
    summary = {"schema_version": 1, "kind": "demo-summary", "seed": seed,
               "examples": examples}
    path = out / "demo-summary.json"
    serialize.dump(summary, path)
    print(f"wrote {path}")
    return 0


# -- report rendering ----------------------------------------------------------

_PALETTE = [(31, 119, 180), (255, 127, 14), (44, 160, 44), (214, 39, 40),
            (148, 103, 189), (140, 86, 75), (227, 119, 194), (23, 190, 207)]
_SPECIAL_COLORS = {"undetermined": (160, 160, 160), "singular": (0, 0, 0),
                   "escaped": (255, 255, 255)}


def _render_catalog(data: dict, stem: str, out: Path) -> list[str]:
    rows = [(m["label"], m["shape"],
             m["period"] if m["period"] is not None else "-",
             m["diameter"], m["n_estimates"]) for m in data["members"]]
    print(_table(["label", "shape", "period", "diameter", "estimates"], rows))
    written = []
    for m in data["members"]:
        path = out / f"{stem}.{m['label']}.xy"
        lines = [" ".join(repr(float(v)) for v in p)
                 for p in m["representative_points"]]
        path.write_text("\n".join(lines) + "\n")
        written.append(str(path))
    return written


def _render_sweep(data: dict) -> None:
    rows = [(r["dict_kind"], r["dict_size"], r["ridge"], r["residual_heldout"],
             r["collapse_ratio"], r["min_sep_ratio"], (r["error"] or "")[:40])
            for r in data["rows"]]
    print(_table(["dict", "size", "ridge", "residual", "collapse", "min-sep", "note"],
                 rows))


def _render_verify(data: dict) -> None:
    conj = data["conjugacy"]
    print(f"{data['system']} via {data['immersion']}: status {data['status']}")
    print(f"  max residual {conj['max_residual']:.3e} "
          f"({conj['samples_used']} samples)")
    push = data.get("pushforward")
    if push:
        print(f"  hausdorff omega {push['hausdorff_omega']:.3e}, "
              f"alpha {push['alpha_status']}")
    inj = data["injectivity"]
    print(f"  collisions {inj.get('n_collisions', len(inj['collisions']))}, "
          f"min separation ratio {inj['min_separation_ratio']:.3e}")


def _render_spectral(data: dict) -> None:
    rows = [((f"{ev['value'][0]:.6g}" if ev["value"][1] == 0 else
              f"{ev['value'][0]:.6g}{ev['value'][1]:+.6g}j"),
             ev["alg_mult"], ev["geo_mult"], ev["abs_class"], ev["split_class"])
            for ev in data["eigenvalues"]]
    print(_table(["eigenvalue", "alg", "geo", "band", "subspace"], rows))
    d = data["dims"]
    print(f"subspace dims: stable {d[0]}, unit {d[1]}, unstable {d[2]}")


def _render_basin_csv(path: Path, out: Path) -> list[str]:
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    dims = len(header) - 1
    if dims not in (1, 2):
        return []
    idx = []
    labels = []
    for line in lines[1:]:
        parts = line.split(",")
        idx.append(tuple(int(v) for v in parts[:dims]))
        labels.append(parts[dims])
    shape = tuple(max(i[a] for i in idx) + 1 for a in range(dims))
    member_labels = sorted({l for l in labels if l not in _SPECIAL_COLORS})
    color_of = {l: _PALETTE[i % len(_PALETTE)] for i, l in enumerate(member_labels)}
    color_of.update(_SPECIAL_COLORS)

    if dims == 1:
        width, height = shape[0], 1
        grid = {(0, i[0]): l for i, l in zip(idx, labels)}
    else:
        height, width = shape
        grid = {(i[0], i[1]): l for i, l in zip(idx, labels)}
    body = []
    for r in range(height):
        row = []
        for c in range(width):
            row.append(" ".join(str(v) for v in color_of[grid[(r, c)]]))
        body.append("  ".join(row))
    ppm = out / (path.stem + ".ppm")
    ppm.write_text(f"P3\n{width} {height}\n255\n" + "\n".join(body) + "\n")
    counts = {}
    for l in labels:
        counts[l] = counts.get(l, 0) + 1
    print(_table(["label", "nodes"], sorted(counts.items())))
    return [str(ppm)]


def cmd_report(args) -> int:
    src = Path(args.dir)
    out = Path(args.out) if args.out != "." else src / "render"
    out.mkdir(parents=True, exist_ok=True)
    rendered = []

    for path in sorted(src.glob("*.json")):
        try:
            data = json.loads(path.read_text())
        except (json.JSONDecodeError, UnicodeDecodeError):
            continue
        if not isinstance(data, dict):
            continue
        kind = data.get("kind")
        if kind is None:
            continue
        print(f"== {path.name} ==")
        if kind == "limit-set-catalog":
            rendered += _render_catalog(data, path.stem, out)
        elif kind == "tradeoff-report":
            _render_sweep(data)
        elif kind == "verify-report":
            _render_verify(data)
        elif kind == "spectral-split":
            _render_spectral(data)
        elif kind == "demo-summary":
            for ex in data["examples"]:
                print(f"  {ex['name']}: {ex['status']}")
        elif kind == "basin-summary":
            print(_table(["label", "nodes"], sorted(data["counts"].items())))
            for w in data.get("witnesses", []):
                print(f"  witness: {w['boundary_label']} not closed at "
                      f"{w['limit_point']} (limit settles on {w['limit_label']})")
        elif kind == "consistency-report":
            print(f"  consistent: {data['consistent']} ({data['detail']})")
        elif kind == "pushforward-report":
            print(f"  hausdorff omega {data['hausdorff_omega']:.3e} "
                  f"(one-sided {data['one_sided_omega']:.3e}), "
                  f"alpha {data['alpha_status']}")
        elif kind == "fit-report":
            print(f"  rms residual {data['rms_residual']:.3e}, gram condition "
                  f"{data['gram_condition']:.3e}, {data['method']}")
        elif kind == "learned-lift":
            evs = ", ".join(f"{re:.6g}{im:+.6g}j" if im else f"{re:.6g}"
                            for re, im in data["eigenvalues"][:6])
            print(f"  {data['dict_kind']} lift of {data['system']}: "
                  f"eigenvalues {evs}")
        else:
            print(f"  (no renderer for kind {kind!r})")
        rendered.append(str(path))
        print()

    for path in sorted(src.glob("*.csv")):
        with open(path) as fh:
            first = fh.readline().strip()
        if first.startswith("i,") and first.endswith(",label"):
            print(f"== {path.name} ==")
            rendered += _render_basin_csv(path, out)
            print()

    if not rendered:
        raise MissingArtifactError(f"no renderable artifacts under {src}")
    print(f"rendered {len(rendered)} artifact(s); derived files in {out}")
    return 0


# -- argument wiring -----------------------------------------------------------

def _add_common(p, system: bool = True) -> None:
    if system:
        p.add_argument("--system", required=True,
                       help="catalog system name (see README for the list)")
        p.add_argument("--param", action="append", metavar="K=V",
                       help="system parameter override (repeatable)")
        p.add_argument("--domain", metavar="LO,HI[;LO,HI...]",
                       help="restrict/select the working region (use --domain=-1,1 "
                            "for negative bounds)")
    p.add_argument("--out", default=".", help="directory for written artifacts")
    p.add_argument("--seed", type=int, default=None,
                   help="random seed (default: $LIMITLAB_SEED or 42)")
    p.add_argument("--set", action="append", metavar="NAME=VALUE",
                   help="override a tolerance/iteration setting (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limitlab",
        description="limit sets, basins, and linear-representation diagnostics "
                    "for discrete-time systems")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="iterate an orbit and write it as CSV")
    _add_common(p)
    p.add_argument("--x0", required=True, help="initial state, comma-separated")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--backward", action="store_true",
                   help="iterate the inverse map instead")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("limits", help="estimate and catalog limit sets from seeds")
    _add_common(p)
    p.add_argument("--seeds", help="semicolon-separated seed states")
    p.add_argument("--backward", action="store_true",
                   help="catalog backward-time limit sets")
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("basins", help="label a grid by settled limit set")
    _add_common(p)
    p.add_argument("--seeds", help="semicolon-separated seed states for the catalog")
    p.add_argument("--resolution", type=int, default=101,
                   help="grid nodes per axis (endpoints included)")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_basins)

    p = sub.add_parser("verify", help="check a catalogued exact immersion")
    _add_common(p)
    p.add_argument("--variant", type=int, default=0,
                   help="which catalogued immersion to check")
    p.add_argument("--x0", help="state for the limit-set pushforward check")
    p.add_argument("--tol", type=float, default=1e-8,
                   help="max conjugacy residual to count as ok")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("learn", help="fit a dictionary lift by least squares")
    _add_common(p)
    p.add_argument("--dict", default="monomial",
                   choices=["monomial", "fourier", "rational-pole"])
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--ridge", type=float, default=0.0)
    p.add_argument("--pole", type=float, default=1.0,
                   help="pole location for rational-pole dictionaries")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("sweep", help="dictionary trade-off sweep against a catalog")
    _add_common(p)
    p.add_argument("--dicts", help="comma-separated kind:order specs")
    p.add_argument("--ridges", help="comma-separated ridge values (default 0)")
    p.add_argument("--seeds", help="semicolon-separated catalog seed states")
    p.add_argument("--auto-seeds", type=int, default=0,
                   help="draw this many catalog seeds uniformly from the region")
    p.add_argument("--pole", type=float, default=1.0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("demo", help="run the four worked examples deterministically")
    _add_common(p, system=False)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("report", help="render saved artifacts to text/xy/ppm")
    p.add_argument("--dir", default=".", help="directory holding artifacts")
    p.add_argument("--out", default=".",
                   help="directory for derived files (default: DIR/render)")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        _emit_error("usage", str(exc))
        return 2
    except DomainError as exc:
        _emit_error("domain-error", str(exc), reason=exc.reason,
                    point=[float(v) for v in np.atleast_1d(exc.point)])
        return 3
    except _MATH_ERRORS as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 3
    except ValueError as exc:
        _emit_error("usage", str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
