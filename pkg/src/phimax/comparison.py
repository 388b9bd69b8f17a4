"""Comparison functions from a closed catalog of parametric forms.

A comparison function is increasing on ``[0, inf)`` and its iterates tend
to zero pointwise. The catalog:

* ``linear``          ``c * t`` with ``0 <= c < 1``
* ``rational``        ``t / (1 + t)``
* ``scaled_rational`` ``t / (1 + a * t)`` with ``a > 0``

:func:`certify` checks the axioms by sampling on a grid; it is evidence,
not a proof.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError

FORMS = ("linear", "rational", "scaled_rational")


@dataclass(frozen=True)
class ComparisonFunction:
    form: str
    c: float = 0.0
    a: float = 1.0

    def __post_init__(self):
        if self.form not in FORMS:
            raise ConfigError(f"unknown comparison form {self.form!r}; expected one of {FORMS}")
        if self.form == "linear" and not (0 <= self.c < 1):
            raise ConfigError(f"linear comparison needs 0 <= c < 1, got {self.c}")
        if self.form == "scaled_rational" and not self.a > 0:
            raise ConfigError(f"scaled_rational comparison needs a > 0, got {self.a}")

    @classmethod
    def linear(cls, c: float) -> "ComparisonFunction":
        return cls("linear", c=float(c))

    @classmethod
    def rational(cls) -> "ComparisonFunction":
        return cls("rational")

    @classmethod
    def scaled_rational(cls, a: float) -> "ComparisonFunction":
        return cls("scaled_rational", a=float(a))

    def __call__(self, t):
        if isinstance(t, (int, float)):
            if t < 0:
                raise ValueError("comparison functions are defined on [0, inf)")
            return _raw(self, float(t))
        return evaluate(self, t)

    def to_dict(self) -> dict:
        if self.form == "linear":
            return {"form": "linear", "c": self.c}
        if self.form == "scaled_rational":
            return {"form": "scaled_rational", "a": self.a}
        return {"form": "rational"}

    @classmethod
    def from_dict(cls, doc: dict) -> "ComparisonFunction":
        if not isinstance(doc, dict) or "form" not in doc:
            raise ConfigError(f"comparison function needs a 'form' field, got {doc!r}")
        form = doc["form"]
        try:
            if form == "linear":
                return cls.linear(float(doc["c"]))
            if form == "rational":
                return cls.rational()
            if form == "scaled_rational":
                return cls.scaled_rational(float(doc["a"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad parameters for comparison form {form!r}: {exc}") from None
        raise ConfigError(f"unknown comparison form {form!r}")


def _raw(phi: ComparisonFunction, t):
    if phi.form == "linear":
        return phi.c * t
    if phi.form == "rational":
        return t / (1.0 + t)
    return t / (1.0 + phi.a * t)


def evaluate(phi: ComparisonFunction, t):
    """phi(t); accepts scalars or numpy arrays."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise ValueError("comparison functions are defined on [0, inf)")
    out = _raw(phi, arr)
    return float(out) if np.ndim(out) == 0 else out


def iterate(phi: ComparisonFunction | Callable[[float], float], t: float, n: int) -> float:
    if t < 0:
        raise ValueError("comparison functions are defined on [0, inf)")
    x = float(t)
    for _ in range(n):
        x = float(phi(x))
    return x


@dataclass
class CertifyReport:
    grid: list[float]
    n_max: int
    eps_decay: float
    monotonicity_violations: list[tuple[float, float]] = field(default_factory=list)
    # grid point -> first n with phi^[n](t) < eps_decay, None if not reached
    decay_steps: dict[float, int | None] = field(default_factory=dict)
    strictness_violations: list[float] = field(default_factory=list)

    @property
    def decay_failures(self) -> list[float]:
        return [t for t, n in self.decay_steps.items() if n is None]

    @property
    def failed_clauses(self) -> list[str]:
        out = []
        if self.monotonicity_violations:
            out.append("i")
        if self.decay_failures:
            out.append("ii")
        if self.strictness_violations:
            out.append("phi(t) < t")
        return out

    @property
    def passed(self) -> bool:
        return not self.failed_clauses

    @property
    def max_decay_steps(self) -> int | None:
        steps = [n for n in self.decay_steps.values() if n is not None]
        return max(steps) if steps else None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "failed_clauses": self.failed_clauses,
            "grid": self.grid,
            "n_max": self.n_max,
            "eps_decay": self.eps_decay,
            "monotonicity_violations": self.monotonicity_violations,
            "decay_steps": {repr(t): n for t, n in self.decay_steps.items()},
            "strictness_violations": self.strictness_violations,
        }


def certify(
    phi: ComparisonFunction | Callable[[float], float],
    grid: Sequence[float],
    n_max: int,
    eps_decay: float,
) -> CertifyReport:
    """Sample the comparison-function axioms on ``grid``.

    ``phi`` may be any callable, which lets tests probe forms outside the
    catalog.
    """
    grid = [float(t) for t in grid]
    if not grid:
        raise ValueError("grid must be nonempty")
    if any(t < 0 for t in grid) or grid != sorted(grid):
        raise ValueError("grid must be sorted and nonnegative")
    report = CertifyReport(grid=grid, n_max=int(n_max), eps_decay=float(eps_decay))
    values = [float(phi(t)) for t in grid]
    for (t0, v0), (t1, v1) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        if v0 > v1:
            report.monotonicity_violations.append((t0, t1))
    for t, v in zip(grid, values):
        if t > 0 and not v < t:
            report.strictness_violations.append(t)
        x, reached = t, None
        for n in range(n_max + 1):
            if x < eps_decay:
                reached = n
                break
            x = float(phi(x))
        report.decay_steps[t] = reached
    return report
