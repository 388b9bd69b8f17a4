"""Fixed-point engines.

Two routes to the attractor of a system are provided: iterating the
Hutchinson operator ``K -> union_i f_i(K)`` on point sets, and iterating
the code-space operator ``g -> (w -> f_{w_1}(g(shift w)))`` on cylinder
functions. Started from a constant function at a point ``x0``, the n-th
code-space iterate is exactly the table of ``f_sigma(x0)`` over words of
length n, so the two routes can be compared exactly.

All engines stop on the distance between successive iterates and record
it in a :class:`ConvergenceTrace`.
"""
from __future__ import annotations

import io
import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import CapExceededError, ConvergenceError, DomainError
from .geometry import DEFAULT_SNAP, PointSet, as_point, distance, format_float, hausdorff
from .ifs import Box, IfsSystem, MapSpec, Poly1d, apply, check_p_step
from .shiftspace import (
    DEFAULT_CAP,
    PeriodicWord,
    _check_cap,
    branch,
    enumerate_level,
    first_letters,
    format_finite,
    word_index,
)

DEFAULT_POINT_TOL = 1e-9
DEFAULT_SET_TOL = 1e-6
DEFAULT_MAX_POINTS = 2_000_000
PROJECTION_LETTER_CAP = 10_000


@dataclass
class TraceRecord:
    iteration: int
    step: float
    millis: float


@dataclass
class ConvergenceTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def add(self, iteration: int, step: float, millis: float) -> None:
        if step < 0:
            raise ValueError("step distances are nonnegative")
        if self.records and iteration <= self.records[-1].iteration:
            raise ValueError("trace indices must increase")
        self.records.append(TraceRecord(iteration, float(step), float(millis)))

    def __len__(self) -> int:
        return len(self.records)

    @property
    def steps(self) -> list[float]:
        return [r.step for r in self.records]

    @property
    def last_step(self) -> float:
        return self.records[-1].step if self.records else float("nan")

    def ratios(self) -> list[float]:
        s = self.steps
        return [b / a for a, b in zip(s, s[1:]) if a > 0]

    def step_ratio(self) -> float:
        """Median ratio of successive steps; NaN with fewer than two steps."""
        r = self.ratios()
        return statistics.median(r) if r else float("nan")

    def to_tsv(self, timing: bool = True) -> str:
        buf = io.StringIO()
        buf.write("iter\tstep_distance\tmillis\n")
        for r in self.records:
            millis = f"{r.millis:.3f}" if timing else "0"
            buf.write(f"{r.iteration}\t{format_float(r.step)}\t{millis}\n")
        return buf.getvalue()

    @classmethod
    def from_tsv(cls, text: str) -> "ConvergenceTrace":
        lines = text.splitlines()
        if not lines or lines[0].split("\t") != ["iter", "step_distance", "millis"]:
            raise ValueError("not a trace TSV")
        trace = cls()
        for line in lines[1:]:
            if line.strip():
                it, step, ms = line.split("\t")
                trace.add(int(it), float(step), float(ms))
        return trace


class _Clock:
    def __init__(self):
        self._t = time.perf_counter()

    def lap(self) -> float:
        now = time.perf_counter()
        ms, self._t = (now - self._t) * 1e3, now
        return ms


# Picard iteration of a single map


@dataclass
class PicardResult:
    fixed_point: np.ndarray
    trace: ConvergenceTrace
    converged: bool
    residual: float

    @property
    def iterations(self) -> int:
        return len(self.trace)


def picard(
    f: MapSpec,
    x0,
    tol: float = DEFAULT_POINT_TOL,
    max_iter: int = 10_000,
) -> PicardResult:
    """Iterate ``f`` from ``x0`` until successive iterates are within ``tol``.

    Non-convergence is reported through ``converged``; the last iterate is
    returned either way.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    x = as_point(x0)
    if isinstance(f, Poly1d):
        f.check_domain(x)
    trace = ConvergenceTrace()
    clock = _Clock()
    converged = False
    for k in range(1, max_iter + 1):
        nxt = apply(f, x)
        step = distance(x, nxt)
        trace.add(k, step, clock.lap())
        x = nxt
        if step < tol:
            converged = True
            break
    residual = distance(apply(f, x), x)
    return PicardResult(x, trace, converged, residual)


# Hutchinson operator on point sets


def hutchinson_step(system: IfsSystem, k: PointSet, snap: float | None = None) -> PointSet:
    if k.dimension != system.dimension:
        raise DomainError(f"set of dimension {k.dimension} for a {system.dimension}-d system")
    if not np.all(system.box.contains(k.points)):
        raise DomainError("set is not contained in the system box")
    images = np.vstack([f.apply_array(k.points) for f in system.maps])
    return PointSet(images, k.snap if snap is None else snap)


@dataclass
class AttractorResult:
    attractor: PointSet
    trace: ConvergenceTrace
    converged: bool
    snap: float
    coarsened: bool
    hit_max_iter: bool

    @property
    def iterations(self) -> int:
        return len(self.trace)


def hutchinson_attractor(
    system: IfsSystem,
    k0: PointSet | None = None,
    tol: float = DEFAULT_SET_TOL,
    max_iter: int = 100,
    max_points: int = DEFAULT_MAX_POINTS,
) -> AttractorResult:
    """Iterate the Hutchinson operator until the Hausdorff step is below ``tol``.

    When a step would hold more than ``max_points`` points the snap
    resolution is doubled until it fits; the resolution used is reported.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if k0 is None:
        k0 = PointSet([system.box.lo_array])
    snap = k0.snap
    coarsened = False
    k = k0
    trace = ConvergenceTrace()
    clock = _Clock()
    converged = False
    for it in range(1, max_iter + 1):
        nxt = hutchinson_step(system, k, snap)
        while len(nxt) > max_points:
            snap *= 2
            coarsened = True
            nxt = nxt.resnap(snap)
        step = hausdorff(k, nxt)
        trace.add(it, step, clock.lap())
        k = nxt
        if step < tol:
            converged = True
            break
    return AttractorResult(k, trace, converged, snap, coarsened, not converged)


# code space: cylinder functions on infinite words


@dataclass(frozen=True)
class CodeFunction:
    """A function on infinite words that depends on the first ``depth`` letters.

    ``table[index]`` is the value on the cylinder of the ``index``-th word
    of length ``depth`` in lexicographic order.
    """

    depth: int
    table: np.ndarray
    size: int

    def __post_init__(self):
        if self.table.ndim != 2 or self.table.shape[0] != self.size**self.depth:
            raise ValueError(f"table of shape {self.table.shape} for depth {self.depth} over {self.size} letters")

    @classmethod
    def constant(cls, x0, size: int) -> "CodeFunction":
        return cls(0, np.asarray(as_point(x0))[None, :].copy(), size)

    @property
    def dimension(self) -> int:
        return self.table.shape[1]

    def words(self) -> list[tuple[int, ...]]:
        return enumerate_level(self.size, self.depth, cap=max(DEFAULT_CAP, len(self.table)))

    def value_at(self, sigma: Sequence[int]) -> np.ndarray:
        """Value on the cylinder of a finite word of length at least ``depth``."""
        sigma = tuple(sigma)
        if len(sigma) < self.depth:
            raise ValueError(f"need at least {self.depth} letters, got {len(sigma)}")
        return self.table[word_index(sigma[: self.depth], self.size)]

    def __call__(self, w: PeriodicWord) -> np.ndarray:
        if w.size != self.size:
            raise ValueError("word over a different alphabet")
        return self.value_at(first_letters(w, self.depth))

    def refine(self, depth: int) -> np.ndarray:
        """The table of the same function at a finer ``depth``."""
        if depth < self.depth:
            raise ValueError("can only refine to a larger depth")
        return np.repeat(self.table, self.size ** (depth - self.depth), axis=0)

    def image(self, snap: float = DEFAULT_SNAP) -> PointSet:
        return PointSet(self.table, snap)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for sigma, row in zip(self.words(), self.table):
            buf.write(format_finite(sigma, self.size))
            for v in row:
                buf.write("," + format_float(v))
            buf.write("\n")
        return buf.getvalue()


def sup_distance(g: CodeFunction, h: CodeFunction) -> float:
    """Uniform distance, computed at the finer of the two depths."""
    depth = max(g.depth, h.depth)
    a, b = g.refine(depth), h.refine(depth)
    return float(np.max(np.sqrt(np.sum((a - b) ** 2, axis=1))))


def code_step(system: IfsSystem, g: CodeFunction, cap: int = DEFAULT_CAP) -> CodeFunction:
    """One application of the code-space operator; depth grows by one."""
    if g.size != system.size:
        raise ValueError("code function and system have different alphabets")
    _check_cap(system.size ** (g.depth + 1), cap)
    table = np.concatenate([f.apply_array(g.table) for f in system.maps], axis=0)
    return CodeFunction(g.depth + 1, table, g.size)


@dataclass
class CodeResult:
    g: CodeFunction
    trace: ConvergenceTrace
    converged: bool
    capped: bool = False


def code_iterate(system: IfsSystem, x0, depth: int, cap: int = DEFAULT_CAP) -> CodeResult:
    """Exactly ``depth`` code-space steps from the constant function ``x0``."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    _check_cap(system.size**depth, cap)
    g = CodeFunction.constant(system.check_point(x0), system.size)
    trace = ConvergenceTrace()
    clock = _Clock()
    for n in range(1, depth + 1):
        nxt = code_step(system, g, cap)
        trace.add(n, sup_distance(g, nxt), clock.lap())
        g = nxt
    return CodeResult(g, trace, converged=True)


def code_fixed_point(
    system: IfsSystem,
    x0,
    tol: float = DEFAULT_SET_TOL,
    max_depth: int = 30,
    cap: int = DEFAULT_CAP,
) -> CodeResult:
    """Iterate the code-space operator from the constant ``x0`` until the sup step is below ``tol``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    g = CodeFunction.constant(system.check_point(x0), system.size)
    trace = ConvergenceTrace()
    clock = _Clock()
    while g.depth < max_depth:
        if system.size ** (g.depth + 1) > cap:
            return CodeResult(g, trace, converged=False, capped=True)
        nxt = code_step(system, g, cap)
        step = sup_distance(g, nxt)
        trace.add(nxt.depth, step, clock.lap())
        g = nxt
        if step < tol:
            return CodeResult(g, trace, converged=True)
    return CodeResult(g, trace, converged=False)


def code_hutchinson_gap(system: IfsSystem, x0, n: int, snap: float = DEFAULT_SNAP) -> float:
    """Hausdorff distance between the n-th code iterate's image and F^n({x0})."""
    g = code_iterate(system, x0, n).g
    k = PointSet([system.check_point(x0)], snap)
    for _ in range(n):
        k = hutchinson_step(system, k)
    return hausdorff(g.image(snap), k)


# canonical projection


@dataclass
class ProjectionResult:
    point: np.ndarray
    letters_used: int
    step: float
    seed_gap: float
    converged: bool


def _default_seeds(system: IfsSystem, x_seed) -> np.ndarray:
    box = system.box
    first = system.check_point(x_seed) if x_seed is not None else 0.5 * (box.lo_array + box.hi_array)
    corners = box.corners()
    second = corners[np.argmax(np.sum((corners - first) ** 2, axis=1))]
    return np.vstack([first, second])


def project(
    system: IfsSystem,
    w: PeriodicWord,
    x_seed=None,
    tol: float = DEFAULT_POINT_TOL,
    max_letters: int = PROJECTION_LETTER_CAP,
) -> ProjectionResult:
    """Evaluate ``lim f_{w_1...w_n}(x)`` for an eventually periodic word.

    The sequence is sampled at ``n = len(prefix) + k * len(cycle)``, where
    it equals ``f_prefix(f_cycle^k(x))``; a second seed (the box corner
    farthest from the first) measures seed dependence.
    """
    if w.size != system.size:
        raise ValueError(f"word over {w.size} letters for a system with {system.size} maps")
    if not tol > 0:
        raise ValueError("tol must be positive")
    seeds = _default_seeds(system, x_seed)
    maps = system.maps

    def compose(word, pts):
        for i in reversed(word):
            pts = maps[i - 1].apply_array(pts)
        return pts

    y = seeds
    current = compose(w.prefix, y)
    letters = len(w.prefix)
    step = float("inf")
    while letters + len(w.cycle) <= max_letters:
        y = compose(w.cycle, y)
        letters += len(w.cycle)
        nxt = compose(w.prefix, y)
        steps = np.sqrt(np.sum((nxt - current) ** 2, axis=1))
        current = nxt
        step = float(steps[0])
        if np.all(steps < tol):
            gap = float(np.sqrt(np.sum((current[0] - current[1]) ** 2)))
            return ProjectionResult(current[0].copy(), letters, step, gap, True)
    gap = float(np.sqrt(np.sum((current[0] - current[1]) ** 2)))
    return ProjectionResult(current[0].copy(), letters, step, gap, False)


def canonical_projection(
    system: IfsSystem,
    w: PeriodicWord,
    x_seed=None,
    tol: float = DEFAULT_POINT_TOL,
    max_letters: int = PROJECTION_LETTER_CAP,
) -> np.ndarray:
    res = project(system, w, x_seed, tol, max_letters)
    if not res.converged:
        raise ConvergenceError(
            f"projection of {w} did not settle within {max_letters} letters "
            f"(last step {res.step:.3g}); the contraction hypothesis may fail"
        )
    return res.point


def verify_conjugacy(
    system: IfsSystem,
    evaluate: CodeFunction | Callable[[PeriodicWord], np.ndarray],
    words: Sequence[PeriodicWord],
    letters: Sequence[int] | None = None,
) -> float:
    """max over words and letters of d(evaluate(i w), f_i(evaluate(w)))."""
    letters = range(1, system.size + 1) if letters is None else letters
    worst = 0.0
    for w in words:
        base = np.asarray(evaluate(w), dtype=float)
        for i in letters:
            lhs = np.asarray(evaluate(branch(i, w)), dtype=float)
            rhs = system.map(i).apply_array(base[None, :])[0]
            worst = max(worst, float(np.sqrt(np.sum((lhs - rhs) ** 2))))
    return worst


def check_picard_hypothesis(f: MapSpec, phi, p: int, sampler=None, box: Box | None = None):
    """The p-step inequality under which a single map is a Picard operator."""
    return check_p_step(f, phi, p, sampler, box)


# truncation-ladder experiment for possibly infinite families

EVIDENCE_LABEL = "numerical evidence only; not a resolution of the open question"


@dataclass
class ExperimentRow:
    level: int
    depth: int
    distance: float


@dataclass
class ExperimentReport:
    rows: list[ExperimentRow]
    attractors: dict[int, AttractorResult]
    label: str = EVIDENCE_LABEL

    def distances(self, level: int) -> list[float]:
        return [r.distance for r in self.rows if r.level == level]

    def monotone(self, level: int) -> bool:
        d = self.distances(level)
        return all(b <= a for a, b in zip(d, d[1:]))

    @property
    def levels(self) -> list[int]:
        return sorted({r.level for r in self.rows})

    def to_tsv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {self.label}\n")
        buf.write("level\tdepth\tdistance\n")
        for r in self.rows:
            buf.write(f"{r.level}\t{r.depth}\t{format_float(r.distance)}\n")
        return buf.getvalue()


def open_problem_experiment(
    family: Sequence[Sequence[MapSpec]],
    box: Box,
    x0,
    tol: float = DEFAULT_SET_TOL,
    depths: Sequence[int] = range(7),
    max_iter: int = 100,
    max_points: int = DEFAULT_MAX_POINTS,
    cap: int = DEFAULT_CAP,
) -> ExperimentReport:
    """Tabulate Hausdorff distances between code iterates and Hutchinson attractors.

    For each truncation of the ladder, the image of the depth-n code
    iterate from ``x0`` is compared with the attractor obtained by
    iterating the Hutchinson operator from ``{x0}``.
    """
    depths = sorted(set(int(n) for n in depths))
    rows: list[ExperimentRow] = []
    attractors: dict[int, AttractorResult] = {}
    for maps in family:
        system = IfsSystem(box, maps)
        start = PointSet([system.check_point(x0)])
        att = hutchinson_attractor(system, start, tol=tol, max_iter=max_iter, max_points=max_points)
        attractors[len(maps)] = att
        for n in depths:
            try:
                g = code_iterate(system, x0, n, cap).g
            except CapExceededError:
                break
            rows.append(ExperimentRow(len(maps), n, hausdorff(g.image(), att.attractor)))
    return ExperimentReport(rows, attractors)
