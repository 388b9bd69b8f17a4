"""Maps, iterated function systems and sampling certifiers.

Maps act on points of a Euclidean box and on ``(..., d)`` arrays of points.
The certifiers test the contraction inequalities on sampled pairs and
report the most adverse margin ``LHS - RHS``; a pass is evidence, not
proof.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.stats import qmc

from .comparison import ComparisonFunction, certify
from .errors import ConfigError, DimensionError, DomainError
from .geometry import as_point
from .shiftspace import DEFAULT_CAP, _check_cap

# relative slack for "point lies in the box / domain" tests
_DOMAIN_RTOL = 1e-12
# margins this close to zero (scaled by the box magnitude) are rounding noise
_NOISE_ULPS = 64


@dataclass(frozen=True)
class Box:
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not self.lo:
            raise ConfigError("box needs matching nonempty lo/hi bounds")
        for a, b in zip(self.lo, self.hi):
            if not (np.isfinite(a) and np.isfinite(b) and a <= b):
                raise ConfigError(f"bad box interval [{a}, {b}]")

    @classmethod
    def from_intervals(cls, intervals) -> "Box":
        try:
            lo = tuple(float(a) for a, _ in intervals)
            hi = tuple(float(b) for _, b in intervals)
        except (TypeError, ValueError):
            raise ConfigError(f"box must be a list of [lo, hi] pairs, got {intervals!r}") from None
        return cls(lo, hi)

    @classmethod
    def unit(cls, d: int) -> "Box":
        return cls((0.0,) * d, (1.0,) * d)

    @property
    def dimension(self) -> int:
        return len(self.lo)

    @property
    def lo_array(self) -> np.ndarray:
        return np.asarray(self.lo)

    @property
    def hi_array(self) -> np.ndarray:
        return np.asarray(self.hi)

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi_array - self.lo_array))

    @property
    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(np.concatenate([self.lo, self.hi])))))

    def corners(self) -> np.ndarray:
        return np.array(list(itertools.product(*zip(self.lo, self.hi))), dtype=float)

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        slack = _DOMAIN_RTOL * self.scale
        return np.all((pts >= self.lo_array - slack) & (pts <= self.hi_array + slack), axis=-1)

    def to_list(self) -> list[list[float]]:
        return [[a, b] for a, b in zip(self.lo, self.hi)]


class MapSpec:
    """A continuous self-map; subclasses implement :meth:`apply_array`."""

    dimension: int

    def apply_array(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def image_bounds(self, box: Box) -> tuple[np.ndarray, np.ndarray]:
        """Exact coordinate-wise bounds of the image of ``box``."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __call__(self, x):
        return apply(self, x)


class Affine(MapSpec):
    def __init__(self, matrix, offset):
        m = np.atleast_2d(np.asarray(matrix, dtype=float))
        b = np.atleast_1d(np.asarray(offset, dtype=float))
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != b.size:
            raise ConfigError(f"affine map needs a d x d matrix and d offsets, got {m.shape} and {b.shape}")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(b))):
            raise ConfigError("affine map entries must be finite")
        m.flags.writeable = False
        b.flags.writeable = False
        self.matrix = m
        self.offset = b
        self.dimension = b.size

    @classmethod
    def scaling(cls, factor: float, offset: Sequence[float]) -> "Affine":
        d = len(offset)
        return cls(factor * np.eye(d), offset)

    def apply_array(self, pts):
        return pts @ self.matrix.T + self.offset

    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))

    def image_bounds(self, box):
        img = self.apply_array(box.corners())
        return img.min(axis=0), img.max(axis=0)

    def to_dict(self):
        return {"type": "affine", "matrix": self.matrix.tolist(), "offset": self.offset.tolist()}

    def __repr__(self):
        return f"Affine(matrix={self.matrix.tolist()}, offset={self.offset.tolist()})"


class Poly1d(MapSpec):
    """Univariate polynomial ``sum coeffs[k] * x**k`` on an invariant interval."""

    dimension = 1

    def __init__(self, coeffs, domain):
        c = np.atleast_1d(np.asarray(coeffs, dtype=float))
        if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
            raise ConfigError("poly1d needs a nonempty list of finite coefficients")
        try:
            lo, hi = (float(v) for v in domain)
        except (TypeError, ValueError):
            raise ConfigError(f"poly1d domain must be [lo, hi], got {domain!r}") from None
        if not lo <= hi:
            raise ConfigError(f"poly1d domain [{lo}, {hi}] is empty")
        c.flags.writeable = False
        self.coeffs = c
        self.domain = (lo, hi)
        self._box = Box((lo,), (hi,))
        rlo, rhi = self._range_on(lo, hi)
        slack = _DOMAIN_RTOL * self._box.scale
        if rlo < lo - slack or rhi > hi + slack:
            raise ConfigError(
                f"poly1d maps [{lo}, {hi}] onto [{rlo}, {rhi}], which leaves the domain"
            )

    def _critical_points(self, lo: float, hi: float) -> np.ndarray:
        if self.coeffs.size < 3:
            return np.empty(0)
        roots = P.polyroots(P.polyder(self.coeffs))
        real = roots[np.abs(roots.imag) <= 1e-12].real
        return real[(real >= lo) & (real <= hi)]

    def _range_on(self, lo: float, hi: float) -> tuple[float, float]:
        xs = np.concatenate([np.linspace(lo, hi, 1000), [lo, hi], self._critical_points(lo, hi)])
        ys = P.polyval(xs, self.coeffs)
        return float(ys.min()), float(ys.max())

    def apply_array(self, pts):
        return P.polyval(pts, self.coeffs)

    def derivative(self, x):
        return P.polyval(x, P.polyder(self.coeffs))

    def image_bounds(self, box):
        lo = max(box.lo[0], self.domain[0])
        hi = min(box.hi[0], self.domain[1])
        rlo, rhi = self._range_on(lo, hi)
        return np.array([rlo]), np.array([rhi])

    def check_domain(self, pts) -> None:
        if not np.all(self._box.contains(np.reshape(pts, (-1, 1)))):
            raise DomainError(f"point outside poly1d domain {list(self.domain)}")

    def to_dict(self):
        return {"type": "poly1d", "coeffs": self.coeffs.tolist(), "domain": list(self.domain)}

    def __repr__(self):
        return f"Poly1d(coeffs={self.coeffs.tolist()}, domain={list(self.domain)})"


def map_from_dict(doc: dict) -> MapSpec:
    if not isinstance(doc, dict):
        raise ConfigError(f"map entry must be an object, got {doc!r}")
    kind = doc.get("type")
    try:
        if kind == "affine":
            return Affine(doc["matrix"], doc["offset"])
        if kind == "poly1d":
            return Poly1d(doc["coeffs"], doc["domain"])
    except KeyError as exc:
        raise ConfigError(f"{kind} map is missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad {kind} map: {exc}") from None
    raise ConfigError(f"unknown map type {kind!r}; expected 'affine' or 'poly1d'")


def apply(f: MapSpec, x) -> np.ndarray:
    p = as_point(x)
    if p.size != f.dimension:
        raise DimensionError(f"map of dimension {f.dimension} applied to a {p.size}-point")
    if isinstance(f, Poly1d):
        f.check_domain(p)
    return np.asarray(f.apply_array(p[None, :])[0], dtype=float)


@dataclass(frozen=True)
class ConvexCoefficients:
    """Per-pair coefficients ``a, b, c`` of the convex-contraction bound."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @classmethod
    def build(cls, n: int, a=0.0, b=0.0, c=0.0) -> "ConvexCoefficients":
        def grid(v, name):
            arr = np.broadcast_to(np.asarray(v, dtype=float), (n, n)).copy()
            if np.any(arr < 0) or not np.all(np.isfinite(arr)):
                raise ConfigError(f"convex coefficients '{name}' must be finite and nonnegative")
            arr.flags.writeable = False
            return arr

        try:
            return cls(grid(a, "a"), grid(b, "b"), grid(c, "c"))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"convex coefficients must be scalars or {n}x{n} matrices: {exc}") from None

    @property
    def size(self) -> int:
        return self.a.shape[0]

    @property
    def sums(self) -> np.ndarray:
        return self.a + self.b + self.c

    @property
    def max_sum(self) -> float:
        return float(self.sums.max())

    @property
    def alpha_holds(self) -> bool:
        return self.max_sum < 1

    def to_dict(self) -> dict:
        return {"a": self.a.tolist(), "b": self.b.tolist(), "c": self.c.tolist()}


@dataclass(frozen=True)
class PhiMaxCertificate:
    phi: ComparisonFunction
    p: int


class IfsSystem:
    """A finite family of maps on a box, alphabet ``1..len(maps)``."""

    def __init__(
        self,
        box: Box,
        maps: Sequence[MapSpec],
        phi: ComparisonFunction | None = None,
        p: int | None = None,
        convex: ConvexCoefficients | None = None,
        check_invariance: bool = True,
    ):
        maps = tuple(maps)
        if not maps:
            raise ConfigError("a system needs at least one map")
        for f in maps:
            if f.dimension != box.dimension:
                raise ConfigError(f"map dimension {f.dimension} differs from box dimension {box.dimension}")
        if (phi is None) != (p is None):
            raise ConfigError("'phi' and 'p' must be given together")
        if p is not None and (int(p) != p or p < 1):
            raise ConfigError(f"p must be a positive integer, got {p}")
        if convex is not None and convex.size != len(maps):
            raise ConfigError(f"convex coefficients are {convex.size}x{convex.size} for {len(maps)} maps")
        self.box = box
        self.maps = maps
        self.certificate = PhiMaxCertificate(phi, int(p)) if phi is not None else None
        self.convex = convex
        for k, f in enumerate(maps, start=1):
            if isinstance(f, Poly1d) and not (
                f.domain[0] <= box.lo[0] and box.hi[0] <= f.domain[1]
            ):
                raise ConfigError(f"map {k} is a poly1d whose domain {list(f.domain)} does not cover the box")
        if check_invariance:
            for k, f in enumerate(maps, start=1):
                lo, hi = f.image_bounds(box)
                if not (box.contains(lo[None, :])[0] and box.contains(hi[None, :])[0]):
                    raise ConfigError(f"map {k} does not send the box into itself (image [{lo}, {hi}])")

    @property
    def dimension(self) -> int:
        return self.box.dimension

    @property
    def size(self) -> int:
        return len(self.maps)

    def __len__(self) -> int:
        return len(self.maps)

    def map(self, i: int) -> MapSpec:
        if not 1 <= i <= len(self.maps):
            raise DomainError(f"letter {i} not in alphabet 1..{len(self.maps)}")
        return self.maps[i - 1]

    def check_point(self, x) -> np.ndarray:
        p = as_point(x)
        if p.size != self.dimension:
            raise DimensionError(f"system of dimension {self.dimension} given a {p.size}-point")
        if not self.box.contains(p[None, :])[0]:
            raise DomainError(f"point {p.tolist()} outside the system box {self.box.to_list()}")
        return p

    def to_dict(self) -> dict:
        doc: dict = {
            "dimension": self.dimension,
            "box": self.box.to_list(),
            "maps": [f.to_dict() for f in self.maps],
        }
        if self.certificate is not None:
            doc["phi"] = self.certificate.phi.to_dict()
            doc["p"] = self.certificate.p
        if self.convex is not None:
            doc["convex_coefficients"] = self.convex.to_dict()
        return doc


def _parse_box(doc: dict) -> Box:
    if "box" not in doc:
        raise ConfigError("config is missing 'box'")
    box = Box.from_intervals(doc["box"])
    if "dimension" in doc and int(doc["dimension"]) != box.dimension:
        raise ConfigError(f"dimension {doc['dimension']} does not match a {box.dimension}-d box")
    return box


def parse_maps(entries) -> list[MapSpec]:
    if not isinstance(entries, list) or not entries:
        raise ConfigError("'maps' must be a nonempty list")
    return [map_from_dict(m) for m in entries]


def system_from_dict(doc: dict) -> IfsSystem:
    if not isinstance(doc, dict):
        raise ConfigError("system config must be an object")
    if "maps" not in doc:
        raise ConfigError("config is missing 'maps'")
    box = _parse_box(doc)
    maps = parse_maps(doc["maps"])
    phi = ComparisonFunction.from_dict(doc["phi"]) if "phi" in doc else None
    p = doc.get("p")
    if phi is not None and p is None:
        raise ConfigError("'phi' given without 'p'")
    convex = None
    if "convex_coefficients" in doc:
        cc = doc["convex_coefficients"]
        if not isinstance(cc, dict):
            raise ConfigError("'convex_coefficients' must be an object with a, b, c")
        convex = ConvexCoefficients.build(len(maps), cc.get("a", 0.0), cc.get("b", 0.0), cc.get("c", 0.0))
    return IfsSystem(box, maps, phi=phi, p=p, convex=convex)


# word-indexed composition


def apply_word(system: IfsSystem, sigma: Sequence[int], x) -> np.ndarray:
    """f_{s1} o f_{s2} o ... o f_{sn} applied to ``x``; the empty word is the identity."""
    p = system.check_point(x)
    pts = p[None, :]
    for i in reversed(tuple(sigma)):
        pts = system.map(i).apply_array(pts)
    return np.asarray(pts[0], dtype=float)


def word_images(maps: Sequence[MapSpec], pts: np.ndarray, depth: int, cap: int = DEFAULT_CAP):
    """Yield ``(k, images)`` for k = 0..depth.

    ``images`` has shape ``(|I|**k, *pts.shape)``; entry ``w`` holds
    f_w applied to ``pts`` for the ``w``-th word of length k in
    lexicographic order.
    """
    _check_cap(len(maps) ** depth, cap)
    level = np.asarray(pts, dtype=float)[None, ...]
    yield 0, level
    for k in range(1, depth + 1):
        level = np.concatenate([f.apply_array(level) for f in maps], axis=0)
        yield k, level


# sampling plans


@dataclass(frozen=True)
class PairSampler:
    """Quasi-random pairs, all corner pairs, and near-coincident pairs."""

    n_quasi: int = 10_000
    n_near: int = 100
    near_distance: float = 1e-6
    corners: bool = True
    seed: int = 0

    def pairs(self, box: Box) -> tuple[np.ndarray, np.ndarray]:
        d = box.dimension
        lo, hi = box.lo_array, box.hi_array
        xs, ys = [], []
        if self.n_quasi:
            u = qmc.Halton(d=2 * d, scramble=True, seed=self.seed).random(self.n_quasi)
            pts = np.tile(lo, 2) + u * np.tile(hi - lo, 2)
            xs.append(pts[:, :d])
            ys.append(pts[:, d:])
        if self.corners:
            c = box.corners()
            idx = np.array(list(itertools.product(range(len(c)), repeat=2)))
            xs.append(c[idx[:, 0]])
            ys.append(c[idx[:, 1]])
        if self.n_near:
            rng = np.random.default_rng(self.seed)
            base = lo + rng.random((self.n_near, d)) * (hi - lo)
            direction = rng.normal(size=(self.n_near, d))
            direction /= np.linalg.norm(direction, axis=1, keepdims=True)
            step = self.near_distance * direction
            other = base + step
            outside = ~box.contains(other)
            other[outside] = base[outside] - step[outside]
            xs.append(base)
            ys.append(np.clip(other, lo, hi))
        return np.vstack(xs), np.vstack(ys)


@dataclass
class CheckReport:
    passed: bool
    worst_margin: float
    witness: tuple[list[float], list[float]] | None
    samples_used: int
    inequality: str = ""
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "inequality": self.inequality,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "witness": self.witness,
            "samples_used": self.samples_used,
            "detail": self.detail,
        }


def _dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum((a - b) ** 2, axis=-1))


def _report(margins: np.ndarray, xs, ys, box: Box, inequality: str, labels=None, **detail) -> CheckReport:
    noise = _NOISE_ULPS * np.finfo(float).eps * box.scale
    margins = np.where(np.abs(margins) <= noise, 0.0, margins)
    # argmax takes the first maximum, so the witness is deterministic
    k = int(np.argmax(margins))
    worst = float(margins[k])
    if labels is not None:
        detail["pair"] = np.asarray(labels[k]).tolist()
    return CheckReport(
        passed=worst <= 0,
        worst_margin=worst,
        witness=(xs[k].tolist(), ys[k].tolist()),
        samples_used=int(len(margins)),
        inequality=inequality,
        detail=detail,
    )


PHI_MAX_INEQUALITY = "max_{w in L_p} d(f_w x, f_w y) <= phi(max_{w in V_p} d(f_w x, f_w y))"
CONVEX_INEQUALITY = "d(f_i f_j x, f_i f_j y) <= a_ij d(x,y) + b_ij d(f_i x, f_i y) + c_ij d(f_j x, f_j y)"
P_STEP_INEQUALITY = "d(f^p x, f^p y) <= phi(max_{j<p} d(f^j x, f^j y))"


def phi_max_margins(maps, phi, p: int, xs, ys, cap: int = DEFAULT_CAP) -> np.ndarray:
    if p < 1:
        raise ValueError("p must be >= 1")
    lower = np.zeros(len(xs))
    top = None
    for (k, ix), (_, iy) in zip(word_images(maps, xs, p, cap), word_images(maps, ys, p, cap)):
        dist = _dist(ix, iy).max(axis=0)
        if k < p:
            lower = np.maximum(lower, dist)
        else:
            top = dist
    return top - np.asarray(phi(lower), dtype=float)


def check_phi_max(
    system: IfsSystem,
    phi: ComparisonFunction,
    p: int,
    sampler: PairSampler | None = None,
    cap: int = DEFAULT_CAP,
) -> CheckReport:
    sampler = sampler or PairSampler()
    _check_cap(system.size**p, cap)
    xs, ys = sampler.pairs(system.box)
    margins = phi_max_margins(system.maps, phi, p, xs, ys, cap)
    return _report(margins, xs, ys, system.box, PHI_MAX_INEQUALITY, phi=phi.to_dict(), p=p)


def check_convex(
    system: IfsSystem,
    coeffs: ConvexCoefficients,
    sampler: PairSampler | None = None,
) -> CheckReport:
    if coeffs.size != system.size:
        raise ValueError(f"coefficients are for {coeffs.size} maps, system has {system.size}")
    if not coeffs.alpha_holds:
        raise ValueError(f"max a+b+c = {coeffs.max_sum} is not below 1")
    sampler = sampler or PairSampler()
    xs, ys = sampler.pairs(system.box)
    d0 = _dist(xs, ys)
    fx = [f.apply_array(xs) for f in system.maps]
    fy = [f.apply_array(ys) for f in system.maps]
    d1 = [_dist(a, b) for a, b in zip(fx, fy)]
    worst = np.full(len(xs), -np.inf)
    worst_pair = np.zeros((len(xs), 2), dtype=int)
    n = system.size
    for i in range(n):
        fi = system.maps[i]
        for j in range(n):
            lhs = _dist(fi.apply_array(fx[j]), fi.apply_array(fy[j]))
            rhs = coeffs.a[i, j] * d0 + coeffs.b[i, j] * d1[i] + coeffs.c[i, j] * d1[j]
            m = lhs - rhs
            better = m > worst
            worst = np.where(better, m, worst)
            worst_pair[better] = (i + 1, j + 1)
    return _report(worst, xs, ys, system.box, CONVEX_INEQUALITY, labels=worst_pair, coefficients=coeffs.to_dict())


def to_phi_max(coeffs: ConvexCoefficients) -> PhiMaxCertificate:
    """The linear comparison function and p = 2 that a convex contraction induces."""
    if not coeffs.alpha_holds:
        raise ValueError(f"max a+b+c = {coeffs.max_sum} is not below 1")
    return PhiMaxCertificate(ComparisonFunction.linear(coeffs.max_sum), 2)


def check_p_step(
    f: MapSpec,
    phi: ComparisonFunction,
    p: int,
    sampler: PairSampler | None = None,
    box: Box | None = None,
) -> CheckReport:
    """Single-map p-step inequality, the hypothesis of the Picard criterion."""
    if box is None:
        if not isinstance(f, Poly1d):
            raise ValueError("a box is required for maps without an intrinsic domain")
        box = Box((f.domain[0],), (f.domain[1],))
    sampler = sampler or PairSampler()
    xs, ys = sampler.pairs(box)
    lower = np.zeros(len(xs))
    ax, ay = xs, ys
    for _ in range(p):
        lower = np.maximum(lower, _dist(ax, ay))
        ax, ay = f.apply_array(ax), f.apply_array(ay)
    margins = _dist(ax, ay) - np.asarray(phi(lower), dtype=float)
    return _report(margins, xs, ys, box, P_STEP_INEQUALITY, phi=phi.to_dict(), p=p)


# possibly infinite families, seen through a ladder of finite truncations


@dataclass
class PiifsReport:
    levels: list[int]
    image_bounds: list[float]
    clause_a_flagged: bool
    epsilon: float
    deltas: list[float]
    clause_b_flagged: bool
    clause_c: list[CheckReport] | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def delta(self) -> float:
        """Modulus valid for every map of the largest truncation."""
        return self.deltas[-1]

    @property
    def failed_clauses(self) -> list[str]:
        out = []
        if self.clause_a_flagged:
            out.append("a")
        if self.clause_b_flagged:
            out.append("b")
        if self.clause_c is not None and not all(r.passed for r in self.clause_c):
            out.append("c")
        return out

    @property
    def passed(self) -> bool:
        return not self.failed_clauses

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "failed_clauses": self.failed_clauses,
            "levels": self.levels,
            "image_bounds": self.image_bounds,
            "epsilon": self.epsilon,
            "deltas": self.deltas,
            "clause_c": None if self.clause_c is None else [r.to_dict() for r in self.clause_c],
            "notes": self.notes,
        }


def _union_extent(maps: Sequence[MapSpec], box: Box) -> float:
    bounds = [f.image_bounds(box) for f in maps]
    lo = np.min([b[0] for b in bounds], axis=0)
    hi = np.max([b[1] for b in bounds], axis=0)
    return float(np.linalg.norm(hi - lo))


def _probe_directions(d: int, seed: int) -> np.ndarray:
    eye = np.eye(d)
    dirs = [eye, -eye]
    if d > 1:
        r = np.random.default_rng(seed).normal(size=(8, d))
        dirs.append(r / np.linalg.norm(r, axis=1, keepdims=True))
    return np.vstack(dirs)


_PROBE_FRACTIONS = (1 - 1e-9, 0.5, 0.25, 0.1)


def _modulus_holds(maps, box: Box, base: np.ndarray, dirs: np.ndarray, delta: float, eps: float) -> bool:
    for s in _PROBE_FRACTIONS:
        for u in dirs:
            other = base + (s * delta) * u
            inside = box.contains(other)
            if not inside.any():
                continue
            x, y = base[inside], other[inside]
            for f in maps:
                if np.any(_dist(f.apply_array(x), f.apply_array(y)) >= eps):
                    return False
    return True


def common_modulus(maps, box: Box, eps: float, sampler: PairSampler | None = None, iterations: int = 60) -> float:
    """Largest delta found by bisection with d(f x, f y) < eps whenever d(x, y) < delta."""
    sampler = sampler or PairSampler()
    n_base = max(1, min(sampler.n_quasi, 1000))
    u = qmc.Halton(d=box.dimension, scramble=True, seed=sampler.seed).random(n_base)
    base = np.vstack([box.lo_array + u * (box.hi_array - box.lo_array), box.corners()])
    dirs = _probe_directions(box.dimension, sampler.seed)
    hi = box.diameter * (1 + 1e-9)
    if hi == 0 or _modulus_holds(maps, box, base, dirs, hi, eps):
        return max(hi, np.finfo(float).tiny)
    lo = 0.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if _modulus_holds(maps, box, base, dirs, mid, eps):
            lo = mid
        else:
            hi = mid
    return lo


def check_piifs_conditions(
    family: Sequence[Sequence[MapSpec]],
    box: Box,
    eps: float,
    sampler: PairSampler | None = None,
    phi: ComparisonFunction | None = None,
    p: int | None = None,
    growth_limit: float = 2.0,
    shrink_limit: float = 0.5,
) -> PiifsReport:
    """Evidence for the boundedness, equicontinuity and contraction clauses.

    ``family`` is a ladder of truncations, smallest first. Clause a is
    flagged when the union of images keeps growing past ``growth_limit``
    times its initial extent (or the box diameter); clause b when the
    common modulus keeps shrinking below ``shrink_limit`` of its initial
    value. Clause c runs the phi-max check per level when ``phi`` and
    ``p`` are given.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not family:
        raise ValueError("the truncation ladder is empty")
    sampler = sampler or PairSampler()
    levels = [len(t) for t in family]
    bounds = [_union_extent(t, box) for t in family]
    deltas = [common_modulus(t, box, eps, sampler) for t in family]
    notes = []
    a_flag = False
    if len(bounds) >= 2 and bounds[-1] > bounds[-2]:
        reference = max(bounds[0], box.diameter)
        a_flag = bounds[-1] > growth_limit * reference
    if a_flag:
        notes.append(f"union of images grows across levels: {bounds}")
    b_flag = False
    if len(deltas) >= 2 and deltas[-1] < deltas[-2]:
        b_flag = deltas[-1] < shrink_limit * deltas[0]
    if b_flag:
        notes.append(f"common modulus for eps={eps} shrinks across levels: {deltas}")
    clause_c = None
    if phi is not None:
        if p is None:
            raise ValueError("phi given without p")
        clause_c = []
        xs, ys = sampler.pairs(box)
        for t in family:
            try:
                margins = phi_max_margins(t, phi, p, xs, ys)
                clause_c.append(_report(margins, xs, ys, box, PHI_MAX_INEQUALITY, level=len(t)))
            except DomainError as exc:
                clause_c.append(CheckReport(False, float("inf"), None, 0, PHI_MAX_INEQUALITY, {"error": str(exc)}))
    return PiifsReport(levels, bounds, a_flag, float(eps), deltas, b_flag, clause_c, notes)


def certify_certificate(cert: PhiMaxCertificate, grid=(0.1, 1.0, 10.0, 100.0), n_max=10_000, eps_decay=1e-9):
    return certify(cert.phi, grid, n_max, eps_decay)
