"""Affine realizations of tree automorphisms.

A boundary word ``a_0 a_1 a_2 ...`` is read as the power series
``a_0 + a_1 t + a_2 t^2 + ...``, so the leftmost letter is the constant
coefficient.  Everything infinite is truncated to an explicit depth and the
comparison functions say which depth they checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import gcd
from typing import Sequence

from .algebra import NotAUnit, TruncSeries, parse_series, series_add, series_shift
from .mealy import builtin
from .treeact import BudgetExceeded, DEFAULT_ORACLE_BUDGET, GroupWord, act, parse_word

DEFAULT_DEPTH = 64


class DepthExceeded(ValueError):
    pass


def _unit(c: int, d: int) -> bool:
    return gcd(c % d, d) == 1


@dataclass(frozen=True)
class TauMap:
    """``h(t) -> g(t) + h(t) f(t)`` with ``f(0)`` a unit."""

    f: TruncSeries
    g: TruncSeries

    def __post_init__(self):
        if self.f.modulus != self.g.modulus:
            raise ValueError("f and g must share a modulus")
        if self.f.depth != self.g.depth:
            raise ValueError("f and g must share a depth")
        if not _unit(self.f.coeffs[0], self.f.modulus):
            raise NotAUnit("the multiplier needs a unit constant term")

    @classmethod
    def parse(cls, f: str, g: str, depth: int = DEFAULT_DEPTH, modulus: int = 2) -> "TauMap":
        return cls(parse_series(f, depth, modulus), parse_series(g, depth, modulus))

    @property
    def depth(self) -> int:
        return self.f.depth

    @property
    def modulus(self) -> int:
        return self.f.modulus


def _check_word(v: Sequence[int], depth: int, d: int):
    if len(v) > depth:
        raise DepthExceeded(f"word of length {len(v)} exceeds depth {depth}")
    if any(not 0 <= x < d for x in v):
        raise ValueError(f"letters must lie in 0..{d - 1}")


def tau_apply(m: TauMap, v: Sequence[int]) -> tuple[int, ...]:
    d = m.modulus
    _check_word(v, m.depth, d)
    n = len(v)
    if n == 0:
        return ()
    f, g = m.f.coeffs, m.g.coeffs
    return tuple((g[j] + sum(v[i] * f[j - i] for i in range(j + 1))) % d for j in range(n))


def tau_section(m: TauMap, x: int) -> TauMap:
    """``tau_{f,g}|_x = tau_{f, x*shift(f) + shift(g)}``, one level shallower."""
    if m.depth < 2:
        raise DepthExceeded("a section needs depth >= 2")
    f = series_shift(m.f)
    g = series_add(f.scale(x), series_shift(m.g))
    return TauMap(m.f.truncate(m.depth - 1), g)


# --- upper-triangular matrices -------------------------------------------------

@dataclass(frozen=True)
class ToeplitzAffine:
    """``v -> b + v A`` where row ``i`` of ``A`` is ``first_row`` shifted right by ``i``."""

    first_row: TruncSeries
    offset: TruncSeries

    def __post_init__(self):
        if self.first_row.modulus != self.offset.modulus:
            raise ValueError("row and offset must share a modulus")
        if not _unit(self.first_row.coeffs[0], self.first_row.modulus):
            raise NotAUnit("diagonal entries must be units")

    @property
    def depth(self) -> int:
        return min(self.first_row.depth, self.offset.depth)

    @property
    def modulus(self) -> int:
        return self.offset.modulus

    def entry(self, i: int, j: int) -> int:
        return self.first_row.coeffs[j - i] if j >= i else 0


@dataclass(frozen=True)
class ExplicitAffine:
    """Upper-triangular ``A`` given row by row; row ``i`` starts at column ``i``."""

    rows: tuple[tuple[int, ...], ...]
    offset: TruncSeries

    def __post_init__(self):
        d = self.offset.modulus
        for i, row in enumerate(self.rows):
            if len(row) != len(self.rows) - i:
                raise ValueError(f"row {i} must have {len(self.rows) - i} entries")
            if not _unit(row[0], d):
                raise NotAUnit(f"diagonal entry {i} is not a unit")

    @property
    def depth(self) -> int:
        return min(len(self.rows), self.offset.depth)

    @property
    def modulus(self) -> int:
        return self.offset.modulus

    def entry(self, i: int, j: int) -> int:
        return self.rows[i][j - i] if j >= i else 0


def tau_to_toeplitz(m: TauMap) -> ToeplitzAffine:
    return ToeplitzAffine(m.f, m.g)


def toeplitz_apply(A: ToeplitzAffine | ExplicitAffine, v: Sequence[int]) -> tuple[int, ...]:
    d = A.modulus
    _check_word(v, A.depth, d)
    b = A.offset.coeffs
    return tuple((b[j] + sum(v[i] * A.entry(i, j) for i in range(j + 1))) % d
                 for j in range(len(v)))


def matrix_minor(A: ToeplitzAffine | ExplicitAffine, n: int) -> list[list[int]]:
    if not 1 <= n <= A.depth:
        raise DepthExceeded(f"minor size must lie in 1..{A.depth}")
    return [[A.entry(i, j) for j in range(n)] for i in range(n)]


def format_minor(rows: Sequence[Sequence[int]]) -> str:
    return "\n".join(" ".join(map(str, r)) for r in rows)


def affine_from_action(g: GroupWord, depth: int) -> ExplicitAffine:
    """Read off ``b = g(0^N)`` and row ``i = g(e_i) - b``.

    This only describes ``g`` when ``g`` really is affine; compare with
    :func:`toeplitz_apply` before trusting it.
    """
    d = g.automaton.d
    b = act(g, [0] * depth)
    rows = []
    for i in range(depth):
        e = [0] * depth
        e[i] = 1
        img = act(g, e)
        rows.append(tuple((img[j] - b[j]) % d for j in range(i, depth)))
    return ExplicitAffine(tuple(rows), TruncSeries(d, tuple(b)))


# --- spherically homogeneous shifts ------------------------------------------------

@dataclass(frozen=True)
class ShiftAut:
    """Binary-tree shift: flip coordinate ``k`` of a word wherever bit ``k`` is set."""

    bits: TruncSeries

    def __post_init__(self):
        if self.bits.modulus != 2:
            raise ValueError("shift automorphisms live on the binary tree")

    def __mul__(self, other: "ShiftAut") -> "ShiftAut":
        return shift_compose(self, other)


def shift_aut(n: int, depth: int = DEFAULT_DEPTH) -> ShiftAut:
    if not 0 <= n < depth:
        raise DepthExceeded(f"level {n} is outside depth {depth}")
    return ShiftAut(TruncSeries.monomial(n, depth))


def shift_apply(s: ShiftAut, v: Sequence[int]) -> tuple[int, ...]:
    _check_word(v, s.bits.depth, 2)
    return tuple(x ^ b for x, b in zip(v, s.bits.coeffs))


def shift_compose(s: ShiftAut, t: ShiftAut) -> ShiftAut:
    return ShiftAut(series_add(s.bits, t.bits))


# --- comparisons against the automaton --------------------------------------------

def _all_words(d: int, n: int, budget: int):
    if d ** n > budget:
        raise BudgetExceeded(f"level {n} has {d ** n} vertices", budget)
    return product(range(d), repeat=n)


def conj_shift_pattern(g: GroupWord, n: int, depth: int,
                       budget: int = DEFAULT_ORACLE_BUDGET) -> tuple[int, ...] | None:
    """XOR mask of ``g^-1 sigma^(n) g`` on words of length ``depth``, or None.

    The conjugate acts as ``v -> g(shift(g^-1(v)))``.  It is spherically
    homogeneous to this depth exactly when ``image XOR v`` is one mask for
    every word; None means some two words disagree.
    """
    if g.automaton.d != 2:
        raise ValueError("shift conjugation is defined on the binary tree")
    s = shift_aut(n, max(depth, n + 1))
    ginv = g.inverse()
    mask = None
    for v in _all_words(2, depth, budget):
        img = act(g, shift_apply(s, act(ginv, v)))
        m = tuple(x ^ y for x, y in zip(v, img))
        if mask is None:
            mask = m
        elif m != mask:
            return None
    return mask


def conj_shift_check(g: GroupWord, n: int, depth: int,
                     budget: int = DEFAULT_ORACLE_BUDGET) -> bool:
    return conj_shift_pattern(g, n, depth, budget) is not None


@dataclass(frozen=True)
class Comparison:
    match: bool
    depth: int
    witness: tuple[int, ...] | None = None
    # index of the first coordinate where the images differ
    first_difference: int | None = None

    def __bool__(self):
        return self.match

    @property
    def prefix(self) -> tuple[int, ...] | None:
        """Shortest prefix of the witness on which the two maps already differ."""
        return self.witness[:self.first_difference + 1] if self.witness is not None else None


def compare_tau_to_word(m: TauMap, g: GroupWord, depth: int,
                        budget: int = DEFAULT_ORACLE_BUDGET) -> Comparison:
    """Compare on every word of length ``depth``; the witness is the
    lexicographically first word where they differ."""
    if depth > m.depth:
        raise DepthExceeded(f"map is only known to depth {m.depth}")
    if g.automaton.d != m.modulus:
        raise ValueError("alphabet size and modulus differ")
    for v in _all_words(m.modulus, depth, budget):
        lhs, rhs = tau_apply(m, v), act(g, v)
        if lhs != rhs:
            k = next(i for i, (x, y) in enumerate(zip(lhs, rhs)) if x != y)
            return Comparison(False, depth, tuple(v), k)
    return Comparison(True, depth)


GENERATOR_TAU_TEXT = {
    "a": ("(t^2+t+1)/(t^2+1)", "1/(t+1)^3"),
    "b": ("(t^2+t+1)/(t^2+1)", "(t^2+t+1)/(t+1)^3"),
    "c": ("(t^2+t+1)/(t^2+1)", "t/(t+1)^3"),
    "d": ("(t^2+t+1)/(t^2+1)", "t^2/(t+1)^3"),
}


def generator_taus(depth: int = DEFAULT_DEPTH) -> dict[str, TauMap]:
    """The affine maps inducing the four generators of the builtin lamplighter automaton."""
    return {k: TauMap.parse(f, g, depth) for k, (f, g) in GENERATOR_TAU_TEXT.items()}


def generator_words() -> dict[str, GroupWord]:
    aut = builtin("paper_G")
    return {k: parse_word(aut, k) for k in GENERATOR_TAU_TEXT}
