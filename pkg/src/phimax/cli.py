"""Command-line front end.

Exit codes: 0 pass/converged, 1 analytic failure (non-convergence or a
violated inequality), 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import engines
from .comparison import ComparisonFunction, certify
from .errors import CapExceededError, ConfigError, PhimaxError
from .geometry import PointSet, format_float, hausdorff, points_from_csv
from .ifs import (
    Box,
    IfsSystem,
    PairSampler,
    check_convex,
    check_phi_max,
    check_piifs_conditions,
    parse_maps,
    system_from_dict,
    to_phi_max,
)
from .output import rasterize, to_pgm
from .shiftspace import DEFAULT_CAP, parse_word

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

BUNDLED = ("cantor", "sierpinski", "convex_pair", "identity", "ladder", "slope_growth")

CLAUSE_NAMES = {
    "a": "bounded union of images",
    "b": "equal uniform continuity",
    "c": "phi-max contraction",
}


class UsageError(Exception):
    pass


def load_document(ref: str) -> tuple[dict, str]:
    """Load a config from a path, or a bundled config by name."""
    path = Path(ref)
    if path.is_file():
        text, name = path.read_text(), path.stem
        suffix = path.suffix.lower()
    elif ref in BUNDLED:
        text = resources.files("phimax.configs").joinpath(f"{ref}.json").read_text()
        name, suffix = ref, ".json"
    else:
        raise UsageError(f"no config file or bundled config named {ref!r} (bundled: {', '.join(BUNDLED)})")
    try:
        doc = yaml.safe_load(text) if suffix in (".yaml", ".yml") else json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise UsageError(f"cannot parse {ref}: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError(f"{ref}: config must be a mapping")
    return doc, name


def _parse_pgm(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in str(text).lower().split("x"))
    except ValueError:
        raise UsageError(f"--pgm expects WxH, got {text!r}") from None
    if w < 1 or h < 1:
        raise UsageError("--pgm dimensions must be positive")
    return w, h


def _parse_point(value) -> list[float]:
    if isinstance(value, str):
        value = value.split(",")
    try:
        return [float(v) for v in value]
    except (TypeError, ValueError):
        raise UsageError(f"bad seed point {value!r}") from None


@dataclass
class RunConfig:
    doc: dict
    name: str
    tol: float | None = None
    # --tol as given on the command line, bypassing the config default
    flag_tol: float | None = None
    depth: int | None = None
    max_depth: int = 20
    max_iter: int = 100
    seed_point: list[float] | None = None
    out: str | None = None
    pgm: tuple[int, int] | None = None
    max_points: int = engines.DEFAULT_MAX_POINTS
    report_format: str = "text"
    timing: bool = False
    depths: list[int] = field(default_factory=lambda: list(range(7)))
    certify: dict = field(default_factory=dict)

    @classmethod
    def build(cls, args: argparse.Namespace) -> "RunConfig":
        doc, name = load_document(args.config)
        run = doc.get("run", {})
        if not isinstance(run, dict):
            raise UsageError("'run' must be a mapping")
        cfg = cls(doc=doc, name=name)

        def pick(key, flag):
            v = getattr(args, flag, None)
            return v if v is not None else run.get(key)

        cfg.flag_tol = getattr(args, "tol", None)
        tol = pick("tol", "tol")
        if tol is not None:
            cfg.tol = float(tol)
            if not cfg.tol > 0:
                raise UsageError("tolerance must be positive")
        depth = pick("depth", "depth")
        if depth is not None:
            cfg.depth = int(depth)
            if cfg.depth < 0:
                raise UsageError("depth must be >= 0")
        if run.get("max_depth") is not None:
            cfg.max_depth = int(run["max_depth"])
        max_iter = pick("max_iter", "max_iter")
        if max_iter is not None:
            cfg.max_iter = int(max_iter)
            if cfg.max_iter < 1:
                raise UsageError("max-iter must be >= 1")
        seed = pick("seed_point", "seed_point")
        if seed is not None:
            cfg.seed_point = _parse_point(seed)
        cfg.out = getattr(args, "out", None) or run.get("out")
        pgm = pick("pgm", "pgm")
        if pgm is not None:
            cfg.pgm = _parse_pgm(pgm)
        mp = pick("max_points", "max_points")
        if mp is not None:
            cfg.max_points = int(mp)
            if cfg.max_points < 1:
                raise UsageError("max-points must be >= 1")
        cfg.report_format = getattr(args, "report_format", None) or "text"
        cfg.timing = bool(getattr(args, "timing", False))
        if run.get("depths") is not None:
            cfg.depths = [int(n) for n in run["depths"]]
        if getattr(args, "depth", None) is not None:
            cfg.depths = list(range(cfg.depth + 1))
        cfg.certify = dict(run.get("certify", {}))
        return cfg

    @property
    def prefix(self) -> Path:
        return Path(self.out) if self.out else Path(self.name)

    def system(self) -> IfsSystem:
        return system_from_dict(self.doc)

    def seed_for(self, box: Box) -> np.ndarray:
        seed = np.asarray(self.seed_point if self.seed_point is not None else box.lo, dtype=float)
        if seed.size != box.dimension:
            raise UsageError(f"seed point has {seed.size} coordinates for a {box.dimension}-d box")
        if not box.contains(seed[None, :])[0]:
            raise UsageError(f"seed point {seed.tolist()} lies outside the box {box.to_list()}")
        return seed


def _write(path: Path, text: str, partial: bool = False) -> Path:
    if partial:
        path = path.with_name(path.name + ".partial")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def _emit(cfg: RunConfig, payload: dict, lines: list[str]) -> None:
    if cfg.report_format == "structured":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))


# commands


def cmd_check(cfg: RunConfig) -> int:
    system = cfg.system()
    if system.certificate is None and system.convex is None:
        raise UsageError("config has neither 'phi'/'p' nor 'convex_coefficients'; nothing to check")
    sampler = PairSampler()
    grid = cfg.certify.get("grid", [0.1, 1.0, 10.0, 100.0])
    n_max = int(cfg.certify.get("n_max", 10_000))
    eps = float(cfg.certify.get("eps_decay", 1e-9))
    checks: list[dict] = []
    lines: list[str] = []

    def record(name: str, passed: bool, payload: dict, summary: str):
        checks.append({"check": name, **payload, "passed": passed})
        lines.append(f"{'PASS' if passed else 'FAIL'} {name}: {summary}")

    def record_inequality(name, rep):
        summary = f"worst_margin={format_float(rep.worst_margin)} samples={rep.samples_used}"
        if not rep.passed:
            summary += f"; violated {rep.inequality} at x={rep.witness[0]} y={rep.witness[1]}"
            if "pair" in rep.detail:
                summary += f" (i, j)={tuple(rep.detail['pair'])}"
        record(name, rep.passed, rep.to_dict(), summary)

    def record_certify(name, phi: ComparisonFunction):
        rep = certify(phi, grid, n_max, eps)
        summary = f"max decay steps={rep.max_decay_steps}"
        if not rep.passed:
            summary += f"; failed clauses {rep.failed_clauses} on grid {rep.grid}"
        record(name, rep.passed, rep.to_dict(), summary)

    if system.certificate is not None:
        cert = system.certificate
        record_inequality(f"phi-max (p={cert.p})", check_phi_max(system, cert.phi, cert.p, sampler))
        record_certify("comparison function", cert.phi)
    if system.convex is not None:
        cc = system.convex
        if not cc.alpha_holds:
            record("convex coefficients", False, {"max_sum": cc.max_sum},
                   f"max a+b+c = {format_float(cc.max_sum)} is not below 1")
        else:
            record_inequality("convex contraction", check_convex(system, cc, sampler))
            derived = to_phi_max(cc)
            record_inequality("derived phi-max (p=2)", check_phi_max(system, derived.phi, derived.p, sampler))
            record_certify("derived comparison function", derived.phi)
    ok = all(c["passed"] for c in checks)
    _emit(cfg, {"passed": ok, "checks": checks}, lines)
    return EXIT_OK if ok else EXIT_FAIL


def _run_attractor(cfg: RunConfig, system: IfsSystem):
    seed = cfg.seed_for(system.box)
    return engines.hutchinson_attractor(
        system,
        PointSet([seed]),
        tol=cfg.tol if cfg.tol is not None else engines.DEFAULT_SET_TOL,
        max_iter=cfg.max_iter,
        max_points=cfg.max_points,
    )


def cmd_attract(cfg: RunConfig) -> int:
    system = cfg.system()
    if cfg.pgm is not None and system.dimension != 2:
        raise UsageError("--pgm needs a 2-D system")
    cfg.seed_for(system.box)
    res = _run_attractor(cfg, system)
    partial = not res.converged
    prefix = cfg.prefix
    written = [
        _write(prefix.with_suffix(".csv"), res.attractor.to_csv(), partial),
        _write(prefix.with_suffix(".trace.tsv"), res.trace.to_tsv(cfg.timing), partial),
    ]
    if cfg.pgm is not None:
        grid = rasterize(res.attractor, system.box, *cfg.pgm)
        written.append(_write(prefix.with_suffix(".pgm"), to_pgm(grid), partial))
    payload = {
        "converged": res.converged,
        "iterations": res.iterations,
        "final_step": res.trace.last_step,
        "step_ratio": res.trace.step_ratio(),
        "points": len(res.attractor),
        "snap": res.snap,
        "outputs": [str(p) for p in written],
    }
    lines = [
        f"{'converged' if res.converged else 'NOT converged'} after {res.iterations} iterations",
        f"final_hausdorff_step={format_float(res.trace.last_step)}",
        f"points={len(res.attractor)} snap={res.snap:g}",
    ] + [f"wrote {p}" for p in written]
    _emit(cfg, payload, lines)
    return EXIT_OK if res.converged else EXIT_FAIL


def cmd_codespace(cfg: RunConfig, against: str | None, with_attract: bool) -> int:
    system = cfg.system()
    seed = cfg.seed_for(system.box)
    depth_needed = cfg.depth if cfg.depth is not None else cfg.max_depth
    if cfg.depth is not None and system.size**cfg.depth > DEFAULT_CAP:
        print(
            f"depth {cfg.depth} needs {system.size}^{cfg.depth} = {system.size**cfg.depth} table rows, "
            f"above the cap {DEFAULT_CAP}; lower --depth",
            file=sys.stderr,
        )
        return EXIT_FAIL
    other_points = None
    if against is not None:
        try:
            other_points = PointSet(points_from_csv(Path(against).read_text()))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read {against}: {exc}") from None
    tol = cfg.tol if cfg.tol is not None else engines.DEFAULT_SET_TOL
    if cfg.depth is not None:
        res = engines.code_iterate(system, seed, cfg.depth)
    else:
        res = engines.code_fixed_point(system, seed, tol=tol, max_depth=depth_needed)
    if res.capped:
        print(
            f"stopped at depth {res.g.depth}: the next table would exceed the cap {DEFAULT_CAP} rows; "
            "raise --tol or use a smaller --depth",
            file=sys.stderr,
        )
    prefix = cfg.prefix
    partial = not res.converged
    written = [
        _write(prefix.with_suffix(".table.csv"), res.g.to_csv(), partial),
        _write(prefix.with_suffix(".code.trace.tsv"), res.trace.to_tsv(cfg.timing), partial),
    ]
    payload: dict[str, Any] = {
        "converged": res.converged,
        "depth": res.g.depth,
        "rows": len(res.g.table),
        "final_step": res.trace.last_step,
    }
    lines = [
        f"{'converged' if res.converged else 'NOT converged'} at depth {res.g.depth} ({len(res.g.table)} rows)",
        f"final_sup_step={format_float(res.trace.last_step)}",
    ]
    if with_attract:
        att = _run_attractor(cfg, system)
        written.append(_write(prefix.with_suffix(".csv"), att.attractor.to_csv(), not att.converged))
        other_points = att.attractor if other_points is None else other_points
        partial = partial or not att.converged
    if other_points is not None:
        # compare through the serialized form so the figure matches the files on disk
        image = PointSet(points_from_csv(PointSet(res.g.table).to_csv()))
        gap = hausdorff(image, PointSet(points_from_csv(other_points.to_csv())))
        payload["cross_check_hausdorff"] = gap
        lines.append(f"cross_check_hausdorff={format_float(gap)}")
    payload["outputs"] = [str(p) for p in written]
    lines += [f"wrote {p}" for p in written]
    _emit(cfg, payload, lines)
    return EXIT_FAIL if partial else EXIT_OK


def cmd_project(cfg: RunConfig, word_text: str) -> int:
    system = cfg.system()
    try:
        w = parse_word(word_text, system.size)
    except (ValueError, PhimaxError) as exc:
        raise UsageError(f"cannot parse word {word_text!r}: {exc}") from None
    # config tolerances are set tolerances; points need their own default
    tol = cfg.flag_tol if cfg.flag_tol is not None else engines.DEFAULT_POINT_TOL
    seed = cfg.seed_for(system.box) if cfg.seed_point is not None else None
    res = engines.project(system, w, seed, tol)
    if not res.converged:
        print(f"projection did not settle within {engines.PROJECTION_LETTER_CAP} letters", file=sys.stderr)
        return EXIT_FAIL

    def pi(v):
        return engines.canonical_projection(system, v, seed, tol)

    residual = engines.verify_conjugacy(system, pi, [w])
    payload = {
        "word": str(w),
        "point": res.point.tolist(),
        "seed_gap": res.seed_gap,
        "letters_used": res.letters_used,
        "conjugacy_residual": residual,
    }
    lines = [
        " ".join(format_float(v) for v in res.point),
        f"conjugacy_residual={format_float(residual)} seed_gap={format_float(res.seed_gap)}",
    ]
    _emit(cfg, payload, lines)
    return EXIT_OK


def ladder_from_dict(doc: dict):
    """Box and truncation ladder (smallest first) of a family config."""
    if "family" not in doc:
        raise ConfigError("ladder config is missing 'family'")
    family = parse_maps(doc["family"])
    levels = doc.get("levels", [len(family)])
    try:
        levels = [int(n) for n in levels]
    except (TypeError, ValueError):
        raise ConfigError("'levels' must be a list of integers") from None
    if not levels or any(n < 1 or n > len(family) for n in levels) or levels != sorted(levels):
        raise ConfigError(f"levels must be increasing and within 1..{len(family)}")
    if "box" not in doc:
        raise ConfigError("config is missing 'box'")
    box = Box.from_intervals(doc["box"])
    return box, [family[:n] for n in levels]


def cmd_conjecture(cfg: RunConfig) -> int:
    doc = cfg.doc
    box, ladder = ladder_from_dict(doc)
    eps = float(doc.get("epsilon", 0.1))
    phi = ComparisonFunction.from_dict(doc["phi"]) if "phi" in doc else None
    p = doc.get("p")
    seed = cfg.seed_for(box)
    conditions = check_piifs_conditions(ladder, box, eps, phi=phi, p=p)
    if not conditions.passed:
        failed = ", ".join(f"clause {c} ({CLAUSE_NAMES[c]})" for c in conditions.failed_clauses)
        payload = {"conditions": conditions.to_dict()}
        lines = [f"FAIL family conditions: {failed}"] + [f"  {n}" for n in conditions.notes]
        _emit(cfg, payload, lines)
        return EXIT_FAIL
    tol = cfg.tol if cfg.tol is not None else 1e-4
    report = engines.open_problem_experiment(
        ladder, box, seed, tol=tol, depths=cfg.depths, max_iter=cfg.max_iter, max_points=cfg.max_points
    )
    path = _write(cfg.prefix.with_suffix(".conjecture.tsv"), report.to_tsv())
    monotone = {n: report.monotone(n) for n in report.levels}
    payload = {
        "label": report.label,
        "conditions": conditions.to_dict(),
        "rows": [r.__dict__ for r in report.rows],
        "monotone_in_depth": monotone,
        "attractor_converged": {n: a.converged for n, a in report.attractors.items()},
        "outputs": [str(path)],
    }
    lines = [report.label, "level\tdepth\tdistance"]
    lines += [f"{r.level}\t{r.depth}\t{format_float(r.distance)}" for r in report.rows]
    lines += [f"level {n}: {'monotone' if m else 'NOT monotone'} in depth" for n, m in monotone.items()]
    lines.append(f"wrote {path}")
    _emit(cfg, payload, lines)
    return EXIT_OK


def cmd_compare(a: str, b: str) -> int:
    try:
        sa = PointSet(points_from_csv(Path(a).read_text()))
        sb = PointSet(points_from_csv(Path(b).read_text()))
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    print(format_float(hausdorff(sa, sb)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="phimax", description="Attractors of iterated function systems")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, *, point=True):
        p.add_argument("config", help=f"config path or bundled name ({', '.join(BUNDLED)})")
        p.add_argument("--tol", type=float)
        p.add_argument("--max-iter", dest="max_iter", type=int)
        if point:
            p.add_argument("--seed-point", dest="seed_point", help="comma-separated coordinates")
        p.add_argument("--out", help="output path prefix")
        p.add_argument("--report-format", dest="report_format", choices=("text", "structured"))
        p.add_argument("--timing", action="store_true", help="write wall-clock times into traces")
        return p

    common(sub.add_parser("check", help="certify the contraction hypotheses by sampling"))
    p = common(sub.add_parser("attract", help="iterate the Hutchinson operator"))
    p.add_argument("--pgm", help="also write a WxH plain PGM raster (2-D only)")
    p.add_argument("--max-points", dest="max_points", type=int)
    p = common(sub.add_parser("codespace", help="iterate the code-space operator"))
    p.add_argument("--depth", type=int, help="exact number of steps from the constant function")
    p.add_argument("--against", help="attractor CSV to cross-check the table image against")
    p.add_argument("--attract", action="store_true", help="also compute the attractor and cross-check")
    p.add_argument("--max-points", dest="max_points", type=int)
    p = common(sub.add_parser("project", help="evaluate the canonical projection at a word"))
    p.add_argument("word", help='eventually periodic word, e.g. "12(3)"')
    p = common(sub.add_parser("conjecture", help="truncation-ladder experiment for infinite families"))
    p.add_argument("--depth", type=int, help="largest depth to tabulate")
    p.add_argument("--max-points", dest="max_points", type=int)
    p = sub.add_parser("compare", help="Hausdorff distance between two CSV point clouds")
    p.add_argument("a")
    p.add_argument("b")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "compare":
            return cmd_compare(args.a, args.b)
        cfg = RunConfig.build(args)
        if args.command == "check":
            return cmd_check(cfg)
        if args.command == "attract":
            return cmd_attract(cfg)
        if args.command == "codespace":
            return cmd_codespace(cfg, args.against, args.attract)
        if args.command == "project":
            return cmd_project(cfg, args.word)
        if args.command == "conjecture":
            return cmd_conjecture(cfg)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceededError as exc:
        print(f"error: {exc}; lower the depth or raise the tolerance", file=sys.stderr)
        return EXIT_FAIL
    except (ValueError, TypeError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    ap.error(f"unknown command {args.command}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
