"""Exact arithmetic kernels.

Polynomials over GF(2) are stored packed into a Python ``int``: the polynomial
``c_0 + c_1 a + ... + c_n a^n`` is the integer ``c_0 + 2 c_1 + ... + 2^n c_n``.
Power series over Z_d are truncated to an explicit depth and never compared
as infinite objects.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

NEG_INF = float("-inf")


class NotAUnit(ArithmeticError):
    """Raised when inverting a series whose constant term is not a unit."""


class PolySyntaxError(ValueError):
    pass


def check_modulus(d: int) -> int:
    if not isinstance(d, int) or d < 2:
        raise ValueError(f"modulus must be an integer >= 2, got {d!r}")
    return d


# --- permutations of {0, ..., d-1} in one-line image notation -------------

def is_perm(images: Sequence[int]) -> bool:
    return sorted(images) == list(range(len(images)))


def perm_inverse(images: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(images)
    for i, j in enumerate(images):
        inv[j] = i
    return tuple(inv)


def perm_then(first: Sequence[int], second: Sequence[int]) -> tuple[int, ...]:
    """Apply ``first`` and then ``second`` (left-to-right composition)."""
    return tuple(second[i] for i in first)


def perm_cycles(images: Sequence[int]) -> list[tuple[int, ...]]:
    seen = set()
    cycles = []
    for start in range(len(images)):
        if start in seen or images[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        j = images[start]
        while j != start:
            cyc.append(j)
            seen.add(j)
            j = images[j]
        cycles.append(tuple(cyc))
    return cycles


# --- GF(2)[a] -----------------------------------------------------------

def clmul(x: int, y: int) -> int:
    """Carry-less product of two bit-packed GF(2) polynomials."""
    if x < y:
        x, y = y, x
    out = 0
    while y:
        if y & 1:
            out ^= x
        x <<= 1
        y >>= 1
    return out


@dataclass(frozen=True, order=False)
class BinPoly:
    """A polynomial over Z_2, bit-packed.  ``BinPoly(0b101)`` is ``1 + a^2``."""

    bits: int = 0

    def __post_init__(self):
        if self.bits < 0:
            raise ValueError("coefficient bits must be non-negative")

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int]) -> "BinPoly":
        bits = 0
        for i, c in enumerate(coeffs):
            if c % 2:
                bits |= 1 << i
        return cls(bits)

    @classmethod
    def monomial(cls, n: int) -> "BinPoly":
        return cls(1 << n)

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(self.bits.bit_length()))

    @property
    def deg(self):
        """Degree; the zero polynomial has degree ``-inf``."""
        return self.bits.bit_length() - 1 if self.bits else NEG_INF

    def __bool__(self):
        return self.bits != 0

    def __add__(self, other: "BinPoly") -> "BinPoly":
        return BinPoly(self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: "BinPoly") -> "BinPoly":
        return BinPoly(clmul(self.bits, other.bits))

    def shift(self, k: int) -> "BinPoly":
        """Multiply by ``a^k`` (k >= 0)."""
        return BinPoly(self.bits << k)

    def __call__(self, point: int) -> int:
        return poly_eval01(self, point)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"BinPoly({format_poly(self)!r})"


def poly_add(p: BinPoly, q: BinPoly) -> BinPoly:
    return p + q


def poly_mul(p: BinPoly, q: BinPoly) -> BinPoly:
    return p * q


def poly_eval01(p: BinPoly, point: int) -> int:
    """Evaluate at 0 (constant term) or at 1 (parity of the term count)."""
    if point == 0:
        return p.bits & 1
    if point == 1:
        return bin(p.bits).count("1") & 1
    raise ValueError(f"evaluation point must be 0 or 1, got {point!r}")


def format_poly(p: BinPoly, var: str = "a") -> str:
    if not p.bits:
        return "0"
    terms = []
    for i, c in enumerate(p.coeffs):
        if not c:
            continue
        if i == 0:
            terms.append("1")
        elif i == 1:
            terms.append(var)
        else:
            terms.append(f"{var}^{i}")
    return "+".join(terms)


# Recursive-descent parser for GF(2) polynomial expressions:
#   expr   := term ('+' term)*
#   term   := factor ('*'? factor)*
#   factor := atom ('^' INT)?
#   atom   := INT | VAR | '(' expr ')'
_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z])|(\^)|(\+)|(\*)|(\()|(\))|(-))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolySyntaxError(f"unexpected character {text[pos]!r} at {pos} in {text!r}")
        kinds = ("int", "var", "^", "+", "*", "(", ")", "-")
        for kind, val in zip(kinds, m.groups()):
            if val is not None:
                toks.append((kind, val))
                break
        pos = m.end()
    return toks


class _PolyParser:
    def __init__(self, text: str, var: str):
        self.text = text
        self.var = var
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, kind):
        if self.peek() != kind:
            raise PolySyntaxError(f"expected {kind!r} in {self.text!r}")
        val = self.toks[self.i][1]
        self.i += 1
        return val

    def parse(self) -> BinPoly:
        if not self.toks:
            raise PolySyntaxError("empty polynomial")
        p = self.expr()
        if self.i != len(self.toks):
            raise PolySyntaxError(f"trailing input in {self.text!r}")
        return p

    def expr(self):
        p = self.term()
        while self.peek() in ("+", "-"):
            self.i += 1
            p = p + self.term()
        return p

    def term(self):
        p = self.factor()
        while self.peek() in ("*", "int", "var", "("):
            if self.peek() == "*":
                self.i += 1
            p = p * self.factor()
        return p

    def factor(self):
        base = self.atom()
        if self.peek() == "^":
            self.i += 1
            e = int(self.take("int"))
            out = BinPoly(1)
            for _ in range(e):
                out = out * base
            return out
        return base

    def atom(self):
        kind = self.peek()
        if kind == "int":
            return BinPoly(int(self.take("int")) & 1)
        if kind == "var":
            name = self.take("var")
            if name != self.var:
                raise PolySyntaxError(f"unknown variable {name!r} (expected {self.var!r})")
            return BinPoly(0b10)
        if kind == "(":
            self.i += 1
            p = self.expr()
            self.take(")")
            return p
        raise PolySyntaxError(f"unexpected token in {self.text!r}")


def parse_poly(text: str, var: str = "a") -> BinPoly:
    """Parse ``1+a^2+a^5``-style text (products and parentheses also allowed)."""
    return _PolyParser(text, var).parse()


def parse_rational(text: str, var: str = "t") -> tuple[BinPoly, BinPoly]:
    """Parse ``num/den`` (or a bare polynomial) into a numerator/denominator pair."""
    depth = 0
    split = None
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            if split is not None:
                raise PolySyntaxError(f"more than one '/' in {text!r}")
            split = i
    if split is None:
        return parse_poly(text, var), BinPoly(1)
    return parse_poly(text[:split], var), parse_poly(text[split + 1:], var)


# --- Laurent polynomials over Z_2 ----------------------------------------

@dataclass(frozen=True)
class LaurentBinPoly:
    """``a^valuation * coeffs``; canonical form has an odd ``coeffs`` (or is zero)."""

    valuation: int = 0
    coeffs: BinPoly = BinPoly(0)

    def __post_init__(self):
        bits = self.coeffs.bits
        if bits == 0:
            if self.valuation != 0:
                object.__setattr__(self, "valuation", 0)
            return
        low = (bits & -bits).bit_length() - 1
        if low:
            object.__setattr__(self, "coeffs", BinPoly(bits >> low))
            object.__setattr__(self, "valuation", self.valuation + low)

    @classmethod
    def from_poly(cls, p: BinPoly) -> "LaurentBinPoly":
        return cls(0, p)

    @classmethod
    def from_exponents(cls, exps: Iterable[int]) -> "LaurentBinPoly":
        out = cls()
        for e in exps:
            out = out + cls(e, BinPoly(1))
        return out

    @property
    def exponents(self) -> list[int]:
        return [self.valuation + i for i, c in enumerate(self.coeffs.coeffs) if c]

    @property
    def deg(self):
        return self.valuation + self.coeffs.deg if self.coeffs else NEG_INF

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other: "LaurentBinPoly") -> "LaurentBinPoly":
        if not self:
            return other
        if not other:
            return self
        v = min(self.valuation, other.valuation)
        bits = (self.coeffs.bits << (self.valuation - v)) ^ (other.coeffs.bits << (other.valuation - v))
        return LaurentBinPoly(v, BinPoly(bits))

    __sub__ = __add__

    def __mul__(self, other: "LaurentBinPoly") -> "LaurentBinPoly":
        return LaurentBinPoly(self.valuation + other.valuation, self.coeffs * other.coeffs)

    def shift(self, k: int) -> "LaurentBinPoly":
        """Multiply by ``a^k`` for any integer k."""
        if not self:
            return self
        return LaurentBinPoly(self.valuation + k, self.coeffs)

    def to_poly(self) -> BinPoly:
        if self and self.valuation < 0:
            raise ValueError(f"{self} has negative exponents")
        return BinPoly(self.coeffs.bits << self.valuation) if self else BinPoly(0)

    def __str__(self):
        if not self:
            return "0"
        terms = []
        for e in self.exponents:
            terms.append("1" if e == 0 else "a" if e == 1 else f"a^{e}")
        return "+".join(terms)


# --- truncated power series over Z_d --------------------------------------

@dataclass(frozen=True)
class TruncSeries:
    """``c_0 + c_1 t + ... + c_{N-1} t^{N-1}`` over Z_d, known only up to depth N.

    ``==`` is structural (same modulus, same depth, same coefficients).  Use
    :func:`series_agree` to compare values up to an explicit depth.
    """

    modulus: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        check_modulus(self.modulus)
        if len(self.coeffs) < 1:
            raise ValueError("series depth must be >= 1")
        object.__setattr__(self, "coeffs", tuple(int(c) % self.modulus for c in self.coeffs))

    @classmethod
    def zero(cls, depth: int, modulus: int = 2) -> "TruncSeries":
        return cls(modulus, (0,) * depth)

    @classmethod
    def one(cls, depth: int, modulus: int = 2) -> "TruncSeries":
        return cls(modulus, (1,) + (0,) * (depth - 1))

    @classmethod
    def from_poly(cls, p: BinPoly, depth: int, modulus: int = 2) -> "TruncSeries":
        c = p.coeffs[:depth]
        return cls(modulus, tuple(c) + (0,) * (depth - len(c)))

    @classmethod
    def monomial(cls, n: int, depth: int, modulus: int = 2) -> "TruncSeries":
        c = [0] * depth
        if n < depth:
            c[n] = 1
        return cls(modulus, tuple(c))

    @property
    def depth(self) -> int:
        return len(self.coeffs)

    def truncate(self, depth: int) -> "TruncSeries":
        if depth > self.depth:
            raise ValueError(f"cannot extend a depth-{self.depth} series to depth {depth}")
        return TruncSeries(self.modulus, self.coeffs[:depth])

    def _check(self, other: "TruncSeries"):
        if self.modulus != other.modulus:
            raise ValueError(f"modulus mismatch: {self.modulus} vs {other.modulus}")

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        return series_add(self, other)

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.modulus, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return series_add(self, -other)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        return series_mul(self, other)

    def scale(self, k: int) -> "TruncSeries":
        return TruncSeries(self.modulus, tuple(k * c for c in self.coeffs))

    def __str__(self):
        return " ".join(str(c) for c in self.coeffs)


def series_add(u: TruncSeries, v: TruncSeries) -> TruncSeries:
    u._check(v)
    n = min(u.depth, v.depth)
    return TruncSeries(u.modulus, tuple(u.coeffs[i] + v.coeffs[i] for i in range(n)))


def series_mul(u: TruncSeries, v: TruncSeries) -> TruncSeries:
    u._check(v)
    n = min(u.depth, v.depth)
    a, b, d = u.coeffs, v.coeffs, u.modulus
    out = [0] * n
    for i in range(n):
        ai = a[i]
        if not ai:
            continue
        for j in range(n - i):
            out[i + j] += ai * b[j]
    return TruncSeries(d, tuple(c % d for c in out))


def series_inverse(u: TruncSeries) -> TruncSeries:
    d = u.modulus
    try:
        inv0 = pow(u.coeffs[0], -1, d)
    except ValueError:
        raise NotAUnit(f"constant term {u.coeffs[0]} is not a unit mod {d}") from None
    a = u.coeffs
    b = [inv0]
    for k in range(1, u.depth):
        s = sum(a[i] * b[k - i] for i in range(1, k + 1))
        b.append((-inv0 * s) % d)
    return TruncSeries(d, tuple(b))


def series_shift(u: TruncSeries) -> TruncSeries:
    """Drop the constant coefficient: ``c_0 + c_1 t + ...  ->  c_1 + c_2 t + ...``."""
    if u.depth < 2:
        raise ValueError("series_shift needs depth >= 2")
    return TruncSeries(u.modulus, u.coeffs[1:])


def series_agree(u: TruncSeries, v: TruncSeries, depth: int | None = None) -> bool:
    """Truncated equality: coefficients agree below ``depth`` (default: the smaller depth)."""
    u._check(v)
    n = min(u.depth, v.depth) if depth is None else depth
    if n > min(u.depth, v.depth):
        raise ValueError(f"cannot compare to depth {n}; series known to {min(u.depth, v.depth)}")
    return u.coeffs[:n] == v.coeffs[:n]


def rational_to_series(num: BinPoly, den: BinPoly, depth: int, modulus: int = 2) -> TruncSeries:
    """Expand ``num / den`` (polynomials in t with 0/1 coefficients) to ``depth`` terms."""
    if not den.bits & 1:
        raise NotAUnit("denominator must have constant term 1")
    n = TruncSeries.from_poly(num, depth, modulus)
    dd = TruncSeries.from_poly(den, depth, modulus)
    return series_mul(n, series_inverse(dd))


def parse_series(text: str, depth: int, modulus: int = 2) -> TruncSeries:
    """``"(t^2+t+1)/(t^2+1)"`` to a truncated series."""
    num, den = parse_rational(text, "t")
    return rational_to_series(num, den, depth, modulus)
