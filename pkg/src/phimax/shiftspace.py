"""Words over a finite alphabet ``{1, ..., size}``.

Finite words are plain tuples of ints; the empty tuple is the empty word.
Infinite words are restricted to eventually periodic ones, held by
:class:`PeriodicWord` in a unique normal form: the cycle is primitive and
the prefix is as short as possible.
"""
from __future__ import annotations

import itertools
import math
import numbers
import re
from dataclasses import dataclass
from typing import Sequence

from .errors import AlphabetError, CapExceededError

FiniteWord = tuple[int, ...]

DEFAULT_CAP = 10**6


def _check_letters(letters: Sequence[int], size: int) -> None:
    for a in letters:
        if not (isinstance(a, numbers.Integral) and 1 <= a <= size):
            raise AlphabetError(f"letter {a!r} not in alphabet 1..{size}")


def _primitive_root(cycle: tuple[int, ...]) -> tuple[int, ...]:
    n = len(cycle)
    for k in range(1, n + 1):
        if n % k == 0 and cycle[:k] * (n // k) == cycle:
            return cycle[:k]
    return cycle


@dataclass(frozen=True)
class PeriodicWord:
    """The infinite word ``prefix . cycle . cycle ...`` over ``1..size``.

    Build with :func:`periodic`, which normalizes; the constructor
    assumes normal form.
    """

    prefix: FiniteWord
    cycle: FiniteWord
    size: int

    def __str__(self) -> str:
        return format_word(self)


def periodic(prefix: Sequence[int], cycle: Sequence[int], size: int) -> PeriodicWord:
    """Normalized eventually periodic word."""
    if size < 1:
        raise AlphabetError("alphabet size must be >= 1")
    if not len(cycle):
        raise ValueError("cycle must be nonempty")
    _check_letters(prefix, size)
    _check_letters(cycle, size)
    prefix, cycle = tuple(int(a) for a in prefix), tuple(int(a) for a in cycle)
    cycle = _primitive_root(cycle)
    # absorb trailing prefix letters into a rotated cycle
    while prefix and prefix[-1] == cycle[-1]:
        prefix = prefix[:-1]
        cycle = cycle[-1:] + cycle[:-1]
    return PeriodicWord(prefix, cycle, size)


def constant_word(letter: int, size: int) -> PeriodicWord:
    return periodic((), (letter,), size)


def letter_at(w: PeriodicWord, k: int) -> int:
    """The ``k``-th letter (1-based) of the infinite expansion."""
    if k < 1:
        raise ValueError("positions start at 1")
    if k <= len(w.prefix):
        return w.prefix[k - 1]
    return w.cycle[(k - len(w.prefix) - 1) % len(w.cycle)]


def first_letters(w: PeriodicWord, n: int) -> FiniteWord:
    out = list(w.prefix[:n])
    while len(out) < n:
        out.extend(w.cycle)
    return tuple(out[:n])


def _same_alphabet(w: PeriodicWord, v: PeriodicWord) -> None:
    if w.size != v.size:
        raise AlphabetError(f"alphabet mismatch: {w.size} vs {v.size}")


def first_mismatch(w: PeriodicWord, v: PeriodicWord) -> int | None:
    """1-based first position where the words differ, ``None`` if equal."""
    _same_alphabet(w, v)
    bound = max(len(w.prefix), len(v.prefix)) + math.lcm(len(w.cycle), len(v.cycle))
    for k in range(1, bound + 1):
        if letter_at(w, k) != letter_at(v, k):
            return k
    return None


def word_metric(w: PeriodicWord, v: PeriodicWord) -> float:
    m = first_mismatch(w, v)
    return 0.0 if m is None else 2.0 ** (-m)


def shift(w: PeriodicWord) -> PeriodicWord:
    if w.prefix:
        return periodic(w.prefix[1:], w.cycle, w.size)
    return periodic((), w.cycle[1:] + w.cycle[:1], w.size)


def branch(i: int, w: PeriodicWord) -> PeriodicWord:
    """Prepend the letter ``i``."""
    _check_letters((i,), w.size)
    return periodic((i,) + w.prefix, w.cycle, w.size)


def concat(sigma: Sequence[int], w: PeriodicWord) -> PeriodicWord:
    sigma = tuple(sigma)
    _check_letters(sigma, w.size)
    return periodic(sigma + w.prefix, w.cycle, w.size)


def _check_cap(count: int, cap: int) -> None:
    if count > cap:
        raise CapExceededError(f"{count} words exceed the enumeration cap {cap}")


def level_count(size: int, n: int) -> int:
    return size**n


def enumerate_level(size: int, n: int, cap: int = DEFAULT_CAP) -> list[FiniteWord]:
    """All words of length ``n`` in lexicographic order."""
    if n < 0:
        raise ValueError("word length must be >= 0")
    _check_cap(size**n, cap)
    return list(itertools.product(range(1, size + 1), repeat=n))


def enumerate_below(size: int, p: int, cap: int = DEFAULT_CAP) -> list[FiniteWord]:
    """All words of length ``0`` through ``p - 1``, shortest first."""
    if p < 1:
        raise ValueError("p must be >= 1")
    _check_cap(sum(size**k for k in range(p)), cap)
    out: list[FiniteWord] = []
    for k in range(p):
        out.extend(itertools.product(range(1, size + 1), repeat=k))
    return out


def word_index(sigma: Sequence[int], size: int) -> int:
    """Position of ``sigma`` within :func:`enumerate_level` for its length."""
    idx = 0
    for a in sigma:
        idx = idx * size + (a - 1)
    return idx


# textual syntax: "12(3)"; letters joined with "." once size exceeds 9


def _format_letters(letters: Sequence[int], size: int) -> str:
    if size > 9:
        return ".".join(str(a) for a in letters)
    return "".join(str(a) for a in letters)


def format_finite(sigma: Sequence[int], size: int) -> str:
    return _format_letters(sigma, size)


def format_word(w: PeriodicWord) -> str:
    return f"{_format_letters(w.prefix, w.size)}({_format_letters(w.cycle, w.size)})"


def _parse_letters(text: str, size: int) -> FiniteWord:
    text = text.strip()
    if not text:
        return ()
    if size > 9:
        parts = text.split(".")
    else:
        parts = list(text.replace(".", ""))
    try:
        letters = tuple(int(p) for p in parts)
    except ValueError:
        raise AlphabetError(f"cannot parse letters from {text!r}") from None
    _check_letters(letters, size)
    return letters


_WORD_RE = re.compile(r"^\s*([0-9.]*)\s*\(\s*([0-9.]+)\s*\)\s*$")


def parse_finite(text: str, size: int) -> FiniteWord:
    if "(" in text or ")" in text:
        raise AlphabetError(f"{text!r} is not a finite word")
    return _parse_letters(text, size)


def parse_word(text: str, size: int) -> PeriodicWord:
    """Parse ``"12(3)"`` style syntax into a normalized word."""
    m = _WORD_RE.match(text)
    if not m:
        raise AlphabetError(f"cannot parse periodic word {text!r}")
    return periodic(_parse_letters(m.group(1), size), _parse_letters(m.group(2), size), size)
