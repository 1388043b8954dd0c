"""Exponent-pair calculus for the lamplighter group generated by ``paper_G``.

With ``x = a b^-1`` and ``z = a d^-1`` the group is generated by ``x, z, a``.
For a polynomial ``p(a) = sum a^i`` over Z_2, ``x^p`` is the product of the
commuting conjugates ``x^(a^i) = a^-i x a^i``.  The pair ``(p, q)`` denotes
``x^p z^q``; every such element is spherically homogeneous, so one pair
describes its section at every vertex of a level.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field

from .algebra import NEG_INF, BinPoly, LaurentBinPoly, format_poly
from .mealy import MealyAutomaton, builtin
from .treeact import (DEFAULT_CLOSURE_CAP, GroupWord, equal, format_word, free_reduce,
                      is_trivial, order_probe)

ZERO = BinPoly(0)
ONE = BinPoly(1)
A = BinPoly(0b10)


class ProofMismatch(AssertionError):
    """A step of the transcribed descent argument did not hold."""

    def __init__(self, message: str, pair: "Pair"):
        self.pair = pair
        super().__init__(f"{message} at {pair}")


@dataclass(frozen=True)
class Pair:
    """``x^p z^q`` for ordinary polynomials p, q over Z_2."""

    p: BinPoly = ZERO
    q: BinPoly = ZERO

    @classmethod
    def parse(cls, p: str, q: str) -> "Pair":
        from .algebra import parse_poly
        return cls(parse_poly(p), parse_poly(q))

    @property
    def degrees(self):
        return self.p.deg, self.q.deg

    @property
    def max_deg(self):
        return max(self.p.deg, self.q.deg)

    def __bool__(self):
        return bool(self.p) or bool(self.q)

    def __add__(self, other: "Pair") -> "Pair":
        return Pair(self.p + other.p, self.q + other.q)

    def sort_key(self):
        return (self.p.deg, self.q.deg, self.p.bits, self.q.bits)

    def __str__(self):
        return f"({format_poly(self.p)}, {format_poly(self.q)})"


def phi(n: int) -> BinPoly:
    """``a + a^2 + ... + a^n`` (zero for n = 0)."""
    if n < 0:
        raise ValueError("phi needs n >= 0")
    return BinPoly(((1 << n) - 1) << 1)


def psi(q: BinPoly) -> BinPoly:
    """``sum_{i>=1} c_i phi_{i-1}`` for ``q = sum c_i a^i``."""
    out = 0
    bits = q.bits >> 2
    i = 2
    while bits:
        if bits & 1:
            out ^= ((1 << (i - 1)) - 1) << 1
        bits >>= 1
        i += 1
    return BinPoly(out)


def activity(q: BinPoly) -> int:
    """Root permutation bit of ``x^p z^q``: the parity ``q(1)``."""
    return q(1)


def section_pair(pair: Pair) -> Pair:
    """First-level section: ``p' = p + psi_q + q(0)``, ``q' = p + a psi_q + a q(1) + a q(0)``."""
    p, q = pair.p, pair.q
    ps = psi(q)
    c0, c1 = q(0), q(1)
    new_p = p + ps + BinPoly(c0)
    new_q = p + A * ps + BinPoly((c0 ^ c1) << 1)
    return Pair(new_p, new_q)


@dataclass(frozen=True)
class PairTriviality:
    trivial: bool
    witness_level: int | None
    orbit_length: int


def is_trivial_pair(pair: Pair) -> PairTriviality:
    """Iterate :func:`section_pair` until a pair is active (nontrivial) or repeats."""
    seen = set()
    cur = pair
    level = 0
    while cur not in seen:
        if activity(cur.q):
            return PairTriviality(False, level, len(seen) + 1)
        seen.add(cur)
        cur = section_pair(cur)
        level += 1
    return PairTriviality(True, None, len(seen))


def normalize_laurent(p: LaurentBinPoly, q: LaurentBinPoly) -> tuple[Pair, int]:
    """Conjugate by a power of ``a`` so both exponents become ordinary polynomials.

    Returns the pair and the shift ``k`` applied (exponents multiplied by ``a^k``).
    """
    vals = [u.valuation for u in (p, q) if u]
    k = -min(vals) if vals else 0
    return Pair(p.shift(k).to_poly(), q.shift(k).to_poly()), k


# --- descent ------------------------------------------------------------------

def _P(p: str, q: str) -> Pair:
    return Pair.parse(p, q)


# Base elements exactly as listed in the case analysis.
CASE_II_BASE = (_P("a+1", "0"), _P("a", "0"), _P("1", "0"),
                _P("a+1", "a+1"), _P("a", "a+1"), _P("1", "a+1"))
CASE_III_BASE = (_P("0", "a+1"), _P("1", "a+1"))
# The list printed for Case IV (n = 2, m <= 0): x^{a^2}, x^{a^2+a}, x^{a^2+1}, x^{a^2+a+1}.
# These have q = 0, so none of them is in Case IV; they are checked nontrivial
# but the descent terminates on CASE_IV_BASE below.
CASE_IV_BASE_PRINTED = (_P("a^2", "0"), _P("a^2+a", "0"), _P("a^2+1", "0"), _P("a^2+a+1", "0"))
# The inactive pairs that actually make up Case IV with deg q = 2, deg p <= 0.
CASE_IV_BASE = (_P("0", "a^2+a"), _P("0", "a^2+1"), _P("1", "a^2+a"), _P("1", "a^2+1"))


@dataclass(frozen=True)
class DescentStep:
    pair: Pair
    degrees: tuple
    label: str  # "I", "II", "III", "IV" or "base"
    combined: Pair | None = None
    note: str = ""

    def __str__(self):
        m, n = self.degrees
        s = f"[{self.label}] {self.pair} deg=({m},{n})"
        if self.combined is not None:
            s += f" -> combine {self.combined}"
        if self.note:
            s += f"  # {self.note}"
        return s


@dataclass(frozen=True)
class DescentTrace:
    steps: tuple[DescentStep, ...] = field(default_factory=tuple)

    @property
    def terminal(self) -> DescentStep:
        return self.steps[-1]

    @property
    def combine_steps(self) -> list[DescentStep]:
        return [s for s in self.steps if s.combined is not None]

    def __len__(self):
        return len(self.steps)

    def __str__(self):
        return "\n".join(str(s) for s in self.steps)


def _case(m, n) -> str:
    if m > n:
        return "I"
    if m == n:
        return "II"
    if m == n - 1:
        return "III"
    return "IV"


def _base_note(pair: Pair) -> str | None:
    for name, lst in (("Case II list", CASE_II_BASE), ("Case III list", CASE_III_BASE),
                      ("Case IV list", CASE_IV_BASE)):
        if pair in lst:
            return name
    return None


def descent(pair: Pair, check_base: bool = True) -> DescentTrace:
    """Replay the degree-descent argument on ``pair``, checking every claimed step.

    Active pairs stop immediately.  Cases II and III pass to the first-level
    section; Cases I and IV replace ``(p, q)`` by ``(p + p'', q + q'')``, built
    from the second-level section, which must have strictly smaller maximal
    degree and nonzero x-exponent.  Raises :class:`ProofMismatch` on any
    violated claim.
    """
    if not pair:
        raise ValueError("descent needs a nonidentity pair")
    if check_base:
        verify_base_lists()
    steps = []
    cur = pair
    last_max = None
    for _ in range(10_000):
        m, n = cur.degrees
        if activity(cur.q):
            steps.append(DescentStep(cur, (m, n), "base", note="active at the root"))
            return DescentTrace(tuple(steps))
        note = _base_note(cur)
        if note:
            steps.append(DescentStep(cur, (m, n), "base", note=note))
            return DescentTrace(tuple(steps))
        case = _case(m, n)
        if max(m, n) <= 1 or (case == "IV" and n == 2):
            raise ProofMismatch("inactive low-degree pair missing from the base lists", cur)

        sec = section_pair(cur)
        m1, n1 = sec.degrees
        if case == "II":
            if not (m1 == m and n1 < m):
                raise ProofMismatch(f"Case II section has degrees ({m1},{n1})", cur)
            steps.append(DescentStep(cur, (m, n), "II", note="to first-level section"))
            cur = sec
            continue
        if case == "III":
            if not (m1 < n - 1 and n1 == n):
                raise ProofMismatch(f"Case III section has degrees ({m1},{n1})", cur)
            steps.append(DescentStep(cur, (m, n), "III", note="to first-level section"))
            cur = sec
            continue
        if case == "I" and not (m1 == n1 == m):
            raise ProofMismatch(f"Case I section has degrees ({m1},{n1})", cur)
        if case == "IV" and not (m1 == n - 1 and n1 == n):
            raise ProofMismatch(f"Case IV section has degrees ({m1},{n1})", cur)

        sec2 = section_pair(sec)
        comb = cur + sec2
        p, q = cur.p, cur.q
        closed = psi(q) + psi(p) + psi(A * psi(q)) + BinPoly(q(0) ^ p(0))
        if comb.p != closed:
            raise ProofMismatch("p + p'' differs from its closed form", cur)
        if not comb.p:
            raise ProofMismatch("p + p'' vanished", cur)
        top = max(m, n)
        expected = m - 1 if case == "I" else n - 2
        if comb.p.deg != expected:
            raise ProofMismatch(f"deg(p + p'') = {comb.p.deg}, expected {expected}", cur)
        if not comb.max_deg < top:
            raise ProofMismatch("maximal degree did not drop", cur)
        if last_max is not None and not comb.max_deg < last_max:
            raise ProofMismatch("combine steps not strictly decreasing", cur)
        last_max = comb.max_deg
        steps.append(DescentStep(cur, (m, n), case, combined=comb))
        cur = comb
    raise ProofMismatch("descent did not terminate", pair)


@functools.lru_cache(maxsize=None)
def verify_base_lists() -> bool:
    """Check every hard-coded base element nontrivial with the tree word problem."""
    aut = builtin("paper_G")
    for pair in CASE_II_BASE + CASE_III_BASE + CASE_IV_BASE + CASE_IV_BASE_PRINTED:
        word = nf_to_word(NormalForm.from_pair(pair), aut)
        if is_trivial(word).trivial:
            raise ProofMismatch("base element is trivial", pair)
    return True


# --- normal forms -----------------------------------------------------------------

@dataclass(frozen=True)
class NormalForm:
    """``x^p z^q a^m`` with Laurent exponents."""

    p: LaurentBinPoly = LaurentBinPoly()
    q: LaurentBinPoly = LaurentBinPoly()
    m: int = 0

    @classmethod
    def from_pair(cls, pair: Pair, m: int = 0) -> "NormalForm":
        return cls(LaurentBinPoly.from_poly(pair.p), LaurentBinPoly.from_poly(pair.q), m)

    def is_identity(self) -> bool:
        return not self.p and not self.q and self.m == 0

    def __mul__(self, other: "NormalForm") -> "NormalForm":
        return nf_mul(self, other)

    def __str__(self):
        return f"({self.p}, {self.q}, {self.m})"


IDENTITY = NormalForm()
NF_X = NormalForm(LaurentBinPoly.from_exponents([0]), LaurentBinPoly(), 0)
NF_Z = NormalForm(LaurentBinPoly(), LaurentBinPoly.from_exponents([0]), 0)
NF_A = NormalForm(LaurentBinPoly(), LaurentBinPoly(), 1)


def nf_mul(u: NormalForm, v: NormalForm) -> NormalForm:
    """``a^m s^(a^i) = s^(a^(i-m)) a^m``, so the second factor's lamps shift by ``a^-m1``."""
    return NormalForm(u.p + v.p.shift(-u.m), u.q + v.q.shift(-u.m), u.m + v.m)


def nf_inverse(u: NormalForm) -> NormalForm:
    return NormalForm(u.p.shift(u.m), u.q.shift(u.m), -u.m)


# Generators of paper_G in terms of x, z, a: b = x a, c = x z a, d = z a.
GENERATOR_NF = {
    "a": NF_A,
    "b": nf_mul(NF_X, NF_A),
    "c": nf_mul(nf_mul(NF_X, NF_Z), NF_A),
    "d": nf_mul(NF_Z, NF_A),
}


def word_to_nf(g: GroupWord) -> NormalForm:
    names = g.automaton.states
    out = IDENTITY
    for s in g.letters:
        gen = GENERATOR_NF[names[s >> 1]]
        out = nf_mul(out, nf_inverse(gen) if s & 1 else gen)
    return out


def nf_to_word(u: NormalForm, aut: MealyAutomaton | None = None) -> GroupWord:
    """A word over ``a, b, c, d`` realizing ``u``, freely reduced.

    Lamps are emitted at decreasing positions ``i`` as ``a^-i s a^i`` with
    ``x = a b^-1`` and ``z = a d^-1``, the inner powers of ``a`` telescoping.
    """
    aut = aut or builtin("paper_G")
    ia, ib, id_ = (2 * aut.index(n) for n in "abd")
    x_word = (ia, ib | 1)
    z_word = (ia, id_ | 1)

    def a_pow(k):
        return (ia,) * k if k >= 0 else (ia | 1,) * -k

    lamps = {}
    for e in u.p.exponents:
        lamps[e] = lamps.get(e, ()) + x_word
    for e in u.q.exponents:
        lamps[e] = lamps.get(e, ()) + z_word
    letters: list[int] = []
    pos = 0  # current conjugation offset: we are inside a^-pos ... a^pos
    for i in sorted(lamps, reverse=True):
        letters.extend(a_pow(pos - i))
        letters.extend(lamps[i])
        pos = i
    letters.extend(a_pow(pos + u.m))
    return GroupWord(aut, free_reduce(letters))


# --- bulk verification ------------------------------------------------------------

def pairs_up_to(max_deg: int):
    """Every nonidentity pair with both degrees <= max_deg, in canonical order."""
    size = 1 << (max_deg + 1)
    pairs = [Pair(BinPoly(p), BinPoly(q)) for p in range(size) for q in range(size) if p or q]
    pairs.sort(key=Pair.sort_key)
    return pairs


def random_nf(rng: random.Random, span: int = 4, max_lamps: int = 4, max_shift: int = 4) -> NormalForm:
    def lp():
        return LaurentBinPoly.from_exponents(rng.randint(-span, span)
                                             for _ in range(rng.randint(0, max_lamps)))
    return NormalForm(lp(), lp(), rng.randint(-max_shift, max_shift))


@dataclass
class PairRecord:
    pair: Pair
    verdict: str
    witness_level: int | None
    descent_steps: int
    tree_level: int | None = None

    def line(self) -> str:
        lvl = "-" if self.witness_level is None else self.witness_level
        return (f"p={format_poly(self.pair.p)} q={format_poly(self.pair.q)} verdict={self.verdict} "
                f"witness_level={lvl} descent_steps={self.descent_steps}")


@dataclass
class LamplighterReport:
    max_deg: int
    oracle_depth: int
    oracle_max_deg: int
    seed: int
    pairs_checked: int = 0
    pairs_nontrivial: int = 0
    descents_ok: int = 0
    tree_confirmed: int = 0
    max_witness_level: int = 0
    products_checked: int = 0
    products_ok: int = 0
    order_bound: int = 0
    order_exceeded: bool = False
    failures: list = field(default_factory=list)
    records: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        keys = ("max_deg", "oracle_depth", "oracle_max_deg", "seed", "pairs_checked",
                "pairs_nontrivial", "descents_ok", "tree_confirmed", "max_witness_level",
                "products_checked", "products_ok", "order_bound", "order_exceeded")
        out = [f"{k}={getattr(self, k)}" for k in keys]
        out.append(f"failures={len(self.failures)}")
        out.extend(f"failure={f}" for f in self.failures)
        return out


def verify_lamplighter(max_deg: int, oracle_depth: int = 20, seed: int = 0,
                       oracle_max_deg: int | None = None, n_products: int = 500,
                       cap: int = DEFAULT_CLOSURE_CAP) -> LamplighterReport:
    """Exhaustive pair sweep plus random product and order checks.

    1. Every pair with degrees <= ``max_deg`` must be nontrivial by section
       dynamics and pass :func:`descent`.  For degrees <= ``oracle_max_deg``
       (default ``min(max_deg, 3)``) the tree word problem must also find it
       nontrivial, at the same level as the pair dynamics and no deeper than
       ``oracle_depth``.
    2. ``n_products`` seeded random normal-form products must agree with
       composition of words on the tree.
    3. ``a`` must have no order up to ``2 * max_deg`` (at least 1).
    """
    aut = builtin("paper_G")
    if oracle_max_deg is None:
        oracle_max_deg = min(max_deg, 3)
    rep = LamplighterReport(max_deg, oracle_depth, oracle_max_deg, seed)
    verify_base_lists()

    for pair in pairs_up_to(max_deg):
        rep.pairs_checked += 1
        res = is_trivial_pair(pair)
        if res.trivial:
            rep.failures.append(f"{pair}: pair dynamics report trivial")
            rep.records.append(PairRecord(pair, "trivial", None, 0))
            continue
        rep.pairs_nontrivial += 1
        rep.max_witness_level = max(rep.max_witness_level, res.witness_level)
        try:
            steps = len(descent(pair, check_base=False))
            rep.descents_ok += 1
        except ProofMismatch as exc:
            rep.failures.append(f"{pair}: {exc}")
            steps = 0
        rec = PairRecord(pair, "nontrivial", res.witness_level, steps)
        if max(pair.degrees) <= oracle_max_deg:
            word = nf_to_word(NormalForm.from_pair(pair), aut)
            tree = is_trivial(word, cap)
            rec.tree_level = tree.witness_level
            if tree.trivial:
                rep.failures.append(f"{pair}: tree oracle says trivial")
            elif tree.witness_level != res.witness_level:
                rep.failures.append(f"{pair}: tree witness level {tree.witness_level} "
                                    f"!= pair witness level {res.witness_level}")
            elif tree.witness_level > oracle_depth:
                rep.failures.append(f"{pair}: witness level {tree.witness_level} beyond oracle depth")
            else:
                rep.tree_confirmed += 1
        rep.records.append(rec)

    rng = random.Random(seed)
    for _ in range(n_products):
        u, v = random_nf(rng), random_nf(rng)
        rep.products_checked += 1
        lhs = nf_to_word(u, aut) * nf_to_word(v, aut)
        rhs = nf_to_word(nf_mul(u, v), aut)
        if equal(lhs, rhs, cap):
            rep.products_ok += 1
        else:
            rep.failures.append(f"product {u} * {v}: words differ on the tree")

    bound = max(1, 2 * max_deg)
    rep.order_bound = bound
    rep.order_exceeded = order_probe(GroupWord.of(aut, ("a", 1)), bound, cap).exceeded
    if not rep.order_exceeded:
        rep.failures.append(f"a has finite order <= {bound}")
    return rep
