"""Finite Mealy automata: parsing, inverse and dual automata, reversibility."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .algebra import is_perm, perm_inverse


class AutomatonParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NotInvertible(ValueError):
    pass


# Trailing primes mark states of an inverse automaton.
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*'*\Z")


@dataclass(frozen=True)
class MealyAutomaton:
    """``(Q, X, pi, lambda)`` with ``X = {0, ..., d-1}``.

    ``transition[q][x]`` is the state index ``pi(q, x)`` and ``output[q][x]``
    the letter ``lambda(q, x)``.  ``letter_names`` is only set on duals, where
    the alphabet is the state set of another automaton.
    """

    d: int
    states: tuple[str, ...]
    transition: tuple[tuple[int, ...], ...]
    output: tuple[tuple[int, ...], ...]
    letter_names: tuple[str, ...] | None = field(default=None, compare=True)

    def __post_init__(self):
        # one letter is allowed here so that one-state automata have a dual;
        # the file format still insists on d >= 2
        if not isinstance(self.d, int) or self.d < 1:
            raise ValueError(f"alphabet size must be a positive integer, got {self.d!r}")
        n = len(self.states)
        if n == 0:
            raise ValueError("an automaton needs at least one state")
        if len(set(self.states)) != n:
            raise ValueError("state names must be unique")
        for name in self.states:
            if not _NAME.match(name):
                raise ValueError(f"invalid state name {name!r}")
        if len(self.transition) != n or len(self.output) != n:
            raise ValueError("tables must have one row per state")
        for row_t, row_o in zip(self.transition, self.output):
            if len(row_t) != self.d or len(row_o) != self.d:
                raise ValueError("tables must be total on Q x X")
            if any(not 0 <= s < n for s in row_t) or any(not 0 <= y < self.d for y in row_o):
                raise ValueError("table entry out of range")
        if self.letter_names is not None and self.letter_names == _default_letter_names(self.d):
            object.__setattr__(self, "letter_names", None)

    @property
    def size(self) -> int:
        return len(self.states)

    def index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise KeyError(f"unknown state {name!r}") from None

    def sections(self, q: int) -> tuple[int, ...]:
        return self.transition[q]

    def perm(self, q: int) -> tuple[int, ...]:
        return self.output[q]

    @cached_property
    def signed_table(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Step table on signed states.

        Signed state ``2*q`` is ``q`` and ``2*q + 1`` is ``q^-1``.  Entry
        ``[s][x]`` is ``(image of x, signed state of the section at x)``.
        Inverse rows are only present for invertible automata.
        """
        rows = []
        inv_ok = is_invertible(self)
        for q in range(self.size):
            rows.append(tuple((self.output[q][x], 2 * self.transition[q][x]) for x in range(self.d)))
            if inv_ok:
                lam_inv = perm_inverse(self.output[q])
                rows.append(tuple((lam_inv[x], 2 * self.transition[q][lam_inv[x]] + 1)
                                  for x in range(self.d)))
            else:
                rows.append(None)
        return tuple(rows)

    def to_text(self) -> str:
        return serialize_automaton(self)

    def __str__(self):
        return self.to_text()


def _default_letter_names(d: int) -> tuple[str, ...]:
    return tuple(f"_{i}" for i in range(d))


def from_wreath(d: int, rows: Sequence[tuple[str, Sequence[str], Sequence[int]]]) -> MealyAutomaton:
    """Build from ``[(name, (section_0, ..., section_{d-1}), perm), ...]``."""
    names = tuple(r[0] for r in rows)
    idx = {n: i for i, n in enumerate(names)}
    trans = tuple(tuple(idx[s] for s in secs) for _, secs, _ in rows)
    out = tuple(tuple(p) for _, _, p in rows)
    return MealyAutomaton(d, names, trans, out)


# --- file format ---------------------------------------------------------

_ALPHABET = re.compile(r"\s*alphabet\s*=\s*(\S+)\s*\Z")
_STATE = re.compile(r"\s*([^=\s]+)\s*=\s*\(([^)]*)\)\s*(.*?)\s*\Z")


def _parse_perm(text: str, d: int, lineno: int) -> tuple[int, ...]:
    if text in ("e", ""):
        return tuple(range(d))
    if text == "sigma":
        if d != 2:
            raise AutomatonParseError("'sigma' shorthand is only valid for alphabet = 2", lineno)
        return (1, 0)
    m = re.fullmatch(r"\[\s*([^\]]*)\]", text)
    if not m:
        raise AutomatonParseError(f"malformed permutation {text!r}", lineno)
    try:
        images = tuple(int(s) for s in m.group(1).split(","))
    except ValueError:
        raise AutomatonParseError(f"malformed permutation {text!r}", lineno) from None
    if len(images) != d or not is_perm(images):
        raise AutomatonParseError(f"{text!r} is not a permutation of {{0..{d - 1}}}", lineno)
    return images


def parse_automaton(text: str | Iterable[str]) -> MealyAutomaton:
    """Parse the wreath-recursion file format::

        alphabet = 2
        a = (b,d) sigma
        c = (a,c) e
    """
    lines = text.splitlines() if isinstance(text, str) else list(text)
    d = None
    rows = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _ALPHABET.match(line)
        if m:
            if d is not None:
                raise AutomatonParseError("alphabet declared twice", lineno)
            try:
                d = int(m.group(1))
            except ValueError:
                raise AutomatonParseError(f"bad alphabet size {m.group(1)!r}", lineno) from None
            if d < 2:
                raise AutomatonParseError(f"alphabet must be >= 2, got {d}", lineno)
            continue
        m = _STATE.match(line)
        if not m:
            raise AutomatonParseError(f"cannot parse {raw.strip()!r}", lineno)
        if d is None:
            raise AutomatonParseError("state declared before 'alphabet = d'", lineno)
        name = m.group(1)
        if not _NAME.match(name):
            raise AutomatonParseError(f"invalid state name {name!r}", lineno)
        secs = [s.strip() for s in m.group(2).split(",")]
        if len(secs) != d:
            raise AutomatonParseError(f"state {name!r} has {len(secs)} sections, expected {d}", lineno)
        perm = _parse_perm(m.group(3).strip(), d, lineno)
        rows.append((name, secs, perm, lineno))
    if d is None:
        raise AutomatonParseError("missing 'alphabet = d' line")
    if not rows:
        raise AutomatonParseError("no states declared")
    seen = {}
    for name, _, _, lineno in rows:
        if name in seen:
            raise AutomatonParseError(f"duplicate state {name!r}", lineno)
        seen[name] = len(seen)
    for name, secs, _, lineno in rows:
        for s in secs:
            if s not in seen:
                raise AutomatonParseError(f"unknown state {s!r} in definition of {name!r}", lineno)
    return from_wreath(d, [(n, s, p) for n, s, p, _ in rows])


def format_perm(images: Sequence[int]) -> str:
    if list(images) == list(range(len(images))):
        return "e"
    if len(images) == 2:
        return "sigma"
    return "[" + ",".join(str(i) for i in images) + "]"


def serialize_automaton(aut: MealyAutomaton, shorthand: bool = True) -> str:
    lines = [f"alphabet = {aut.d}"]
    for q, name in enumerate(aut.states):
        secs = ",".join(aut.states[s] for s in aut.transition[q])
        perm = format_perm(aut.output[q]) if shorthand else "[" + ",".join(map(str, aut.output[q])) + "]"
        lines.append(f"{name} = ({secs}) {perm}")
    return "\n".join(lines) + "\n"


# --- structural operations ----------------------------------------------

def is_invertible(aut: MealyAutomaton) -> bool:
    return all(is_perm(row) for row in aut.output)


def _inverse_name(name: str) -> str:
    return name[:-1] if name.endswith("'") else name + "'"


def inverse_automaton(aut: MealyAutomaton) -> MealyAutomaton:
    """``A^-1``: state ``q'`` outputs ``lambda_q^-1(x)`` and moves to ``pi(q, lambda_q^-1(x))'``."""
    if not is_invertible(aut):
        raise NotInvertible("automaton has a non-bijective output row")
    trans, out = [], []
    for q in range(aut.size):
        lam_inv = perm_inverse(aut.output[q])
        trans.append(tuple(aut.transition[q][lam_inv[x]] for x in range(aut.d)))
        out.append(lam_inv)
    names = tuple(_inverse_name(n) for n in aut.states)
    return MealyAutomaton(aut.d, names, tuple(trans), tuple(out), aut.letter_names)


def dual_automaton(aut: MealyAutomaton) -> MealyAutomaton:
    """Swap states with letters: the dual's state ``x`` reading ``q`` outputs
    ``pi(q, x)`` and moves to ``lambda(q, x)``."""
    names = aut.letter_names or _default_letter_names(aut.d)
    trans = tuple(tuple(aut.output[q][x] for q in range(aut.size)) for x in range(aut.d))
    out = tuple(tuple(aut.transition[q][x] for q in range(aut.size)) for x in range(aut.d))
    return MealyAutomaton(aut.size, names, trans, out, aut.states)


def is_reversible(aut: MealyAutomaton) -> bool:
    return is_invertible(dual_automaton(aut))


def is_bireversible(aut: MealyAutomaton) -> bool:
    return (is_invertible(aut) and is_reversible(aut)
            and is_reversible(inverse_automaton(aut)))


def identity_automaton(d: int = 2, name: str = "e") -> MealyAutomaton:
    return MealyAutomaton(d, (name,), ((0,) * d,), (tuple(range(d)),))


LAMPLIGHTER_G = """\
# 4-state bireversible automaton generating the rank-2 lamplighter group
alphabet = 2
a = (b,d) sigma
b = (d,b) sigma
c = (a,c) e
d = (c,a) e
"""

LAMPLIGHTER_2STATE = """\
# 2-state automaton generating Z_2 wr Z
alphabet = 2
a = (a,b) sigma
b = (a,b) e
"""

_BUILTINS = {"paper_G": LAMPLIGHTER_G, "lamplighter_2state": LAMPLIGHTER_2STATE}


def builtin(name: str) -> MealyAutomaton:
    try:
        return parse_automaton(_BUILTINS[name])
    except KeyError:
        raise KeyError(f"unknown builtin automaton {name!r}; choose from {sorted(_BUILTINS)}") from None


def builtin_names() -> list[str]:
    return sorted(_BUILTINS)
