"""Tree automorphisms given as words over automaton states.

Composition is left to right throughout: the word ``g h`` acts by ``g``
first, then ``h``.  Most group-theory software uses the opposite order.

A word is stored as a tuple of signed states: ``2*q`` stands for state ``q``
and ``2*q + 1`` for its inverse.
"""

from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .mealy import MealyAutomaton, NotInvertible, is_invertible

DEFAULT_CLOSURE_CAP = 10**6
DEFAULT_ORACLE_BUDGET = 2**20


class BudgetExceeded(RuntimeError):
    def __init__(self, message: str, cap: int):
        self.cap = cap
        super().__init__(f"{message} (cap={cap})")


class WordSyntaxError(ValueError):
    pass


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    stack = []
    for s in letters:
        if stack and stack[-1] == s ^ 1:
            stack.pop()
        else:
            stack.append(s)
    return tuple(stack)


@dataclass(frozen=True)
class GroupWord:
    automaton: MealyAutomaton
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        n = self.automaton.size
        for s in self.letters:
            if not 0 <= s < 2 * n:
                raise ValueError(f"signed state {s} out of range")

    @classmethod
    def identity(cls, aut: MealyAutomaton) -> "GroupWord":
        return cls(aut, ())

    @classmethod
    def parse(cls, aut: MealyAutomaton, text: str) -> "GroupWord":
        return parse_word(aut, text)

    @classmethod
    def of(cls, aut: MealyAutomaton, *pairs: tuple[str, int]) -> "GroupWord":
        return cls(aut, tuple(2 * aut.index(name) + (sign < 0) for name, sign in pairs))

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        if other.automaton is not self.automaton and other.automaton != self.automaton:
            raise ValueError("words over different automata")
        return GroupWord(self.automaton, self.letters + other.letters)

    def __pow__(self, n: int) -> "GroupWord":
        if n < 0:
            return self.inverse() ** -n
        return GroupWord(self.automaton, self.letters * n)

    def inverse(self) -> "GroupWord":
        return GroupWord(self.automaton, tuple(s ^ 1 for s in reversed(self.letters)))

    def reduced(self) -> "GroupWord":
        return GroupWord(self.automaton, free_reduce(self.letters))

    @property
    def signed_states(self) -> list[tuple[int, int]]:
        return [(s >> 1, -1 if s & 1 else 1) for s in self.letters]

    def __str__(self):
        return format_word(self)


def format_word(g: GroupWord) -> str:
    if not g.letters:
        return "1"
    names = g.automaton.states
    return " ".join(names[s >> 1] + ("^-1" if s & 1 else "") for s in g.letters)


_WORD_TOKEN = re.compile(r"([A-Za-z_][A-Za-z0-9_]*'*)(?:\^(-?\d+))?\Z")


def parse_word(aut: MealyAutomaton, text: str) -> GroupWord:
    """``"a b^-1 a"``; ``1`` or an empty string is the identity.  ``name^k`` repeats."""
    letters: list[int] = []
    for tok in text.split():
        if tok == "1":
            continue
        m = _WORD_TOKEN.match(tok)
        if not m:
            raise WordSyntaxError(f"bad word token {tok!r}")
        name, exp = m.group(1), int(m.group(2)) if m.group(2) else 1
        try:
            q = aut.index(name)
        except KeyError:
            raise WordSyntaxError(f"unknown state {name!r}") from None
        s = 2 * q + (exp < 0)
        letters.extend([s] * abs(exp))
    word = GroupWord(aut, tuple(letters))
    if any(s & 1 for s in letters) and not is_invertible(aut):
        raise NotInvertible("inverse letters need an invertible automaton")
    return word


def parse_vertex(text: str, d: int) -> tuple[int, ...]:
    text = text.strip()
    if text in ("", "-", "root"):
        return ()
    if d > 10:
        digits = tuple(int(t) for t in text.split(","))
    else:
        digits = tuple(int(ch) for ch in text)
    if any(not 0 <= x < d for x in digits):
        raise WordSyntaxError(f"vertex {text!r} has letters outside 0..{d - 1}")
    return digits


def format_vertex(v: Sequence[int]) -> str:
    if any(x > 9 for x in v):
        return ",".join(map(str, v))
    return "".join(map(str, v))


# --- action and sections ----------------------------------------------------

def _table(g: GroupWord):
    table = g.automaton.signed_table
    if any(table[s] is None for s in set(g.letters)):
        raise NotInvertible("inverse letters need an invertible automaton")
    return table


def _apply_signed(table, s: int, v: Sequence[int]) -> list[int]:
    out = []
    for x in v:
        y, s = table[s][x]
        out.append(y)
    return out


def act(g: GroupWord, v: Sequence[int]) -> tuple[int, ...]:
    """Image of vertex ``v`` under ``g`` (first letter of ``g`` acts first)."""
    table = _table(g)
    v = list(v)
    for s in g.letters:
        v = _apply_signed(table, s, v)
    return tuple(v)


def _section_letter(table, letters: Sequence[int], x: int) -> tuple[tuple[int, ...], int]:
    out = []
    for s in letters:
        x, t = table[s][x]
        out.append(t)
    return tuple(out), x


def section(g: GroupWord, v: Sequence[int]) -> GroupWord:
    """``g|_v`` computed letter by letter via ``g|_x = g_1|_x g_2|_{g_1(x)} ...``."""
    table = _table(g)
    letters = g.letters
    for x in v:
        letters, _ = _section_letter(table, letters, x)
    return GroupWord(g.automaton, letters)


def level_perm_oracle(g: GroupWord, n: int, budget: int = DEFAULT_ORACLE_BUDGET) -> tuple[int, ...]:
    """Action of ``g`` on ``X^n`` by brute force.

    Words are indexed in base d with the first letter most significant; entry
    ``i`` is the index of the image of word ``i``.
    """
    d = g.automaton.d
    if d ** n > budget:
        raise BudgetExceeded(f"level {n} has {d ** n} vertices", budget)
    images = []
    for i in range(d ** n):
        v = _index_to_word(i, n, d)
        images.append(_word_to_index(act(g, v), d))
    return tuple(images)


def _index_to_word(i: int, n: int, d: int) -> list[int]:
    v = [0] * n
    for k in range(n - 1, -1, -1):
        i, v[k] = divmod(i, d)
    return v


def _word_to_index(v: Sequence[int], d: int) -> int:
    i = 0
    for x in v:
        i = i * d + x
    return i


# --- element transducers ------------------------------------------------------

@dataclass(frozen=True)
class Transducer:
    """An initial invertible transducer; state 0 is initial.

    ``perm[s]`` is the action of state ``s`` on the first letter and
    ``nxt[s][x]`` the state at letter ``x``.  After :func:`minimize` distinct
    states are distinct automorphisms, numbered in breadth-first order.
    """

    perm: tuple[tuple[int, ...], ...]
    nxt: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.perm)

    def is_identity(self) -> bool:
        return self.size == 1 and self.perm[0] == tuple(range(len(self.perm[0])))

    def moving_vertex(self) -> tuple[int, ...] | None:
        """Shortlex-least vertex whose section moves a letter of level 1."""
        d = len(self.perm[0])
        ident = tuple(range(d))
        seen = {0}
        queue = deque([(0, ())])
        while queue:
            s, path = queue.popleft()
            if self.perm[s] != ident:
                return path
            for x in range(d):
                t = self.nxt[s][x]
                if t not in seen:
                    seen.add(t)
                    queue.append((t, path + (x,)))
        return None


def minimize(t: Transducer) -> Transducer:
    """Moore partition refinement, then breadth-first renumbering from state 0."""
    d = len(t.perm[0])
    ids: dict = {}
    block = [ids.setdefault(p, len(ids)) for p in t.perm]
    count = len(ids)
    while True:
        ids = {}
        new = [ids.setdefault((block[s],) + tuple(block[n] for n in t.nxt[s]), len(ids))
               for s in range(t.size)]
        if len(ids) == count:
            block = new
            break
        block, count = new, len(ids)
    rep = {}
    for s in range(t.size):
        rep.setdefault(block[s], s)
    order = {block[0]: 0}
    queue = deque([block[0]])
    perm, nxt = [], []
    while queue:
        b = queue.popleft()
        s = rep[b]
        perm.append(t.perm[s])
        row = []
        for x in range(d):
            c = block[t.nxt[s][x]]
            if c not in order:
                order[c] = len(order)
                queue.append(c)
            row.append(order[c])
        nxt.append(tuple(row))
    return Transducer(tuple(perm), tuple(nxt))


def compose(first: Transducer, second: Transducer, cap: int = DEFAULT_CLOSURE_CAP) -> Transducer:
    """Product transducer acting by ``first`` and then ``second``."""
    d = len(first.perm[0])
    index = {(0, 0): 0}
    pairs = [(0, 0)]
    perm, nxt = [], []
    k = 0
    while k < len(pairs):
        i, j = pairs[k]
        k += 1
        pi, pj = first.perm[i], second.perm[j]
        perm.append(tuple(pj[pi[x]] for x in range(d)))
        row = []
        for x in range(d):
            key = (first.nxt[i][x], second.nxt[j][pi[x]])
            n = index.get(key)
            if n is None:
                n = index[key] = len(pairs)
                pairs.append(key)
                if len(pairs) > cap:
                    raise BudgetExceeded("product transducer too large", cap)
            row.append(n)
        nxt.append(tuple(row))
    return Transducer(tuple(perm), tuple(nxt))


def signed_state_transducer(aut: MealyAutomaton, s: int) -> Transducer:
    table = aut.signed_table
    if table[s] is None:
        raise NotInvertible("inverse letters need an invertible automaton")
    index = {s: 0}
    order = [s]
    k = 0
    while k < len(order):
        for x in range(aut.d):
            t = table[order[k]][x][1]
            if t not in index:
                index[t] = len(order)
                order.append(t)
        k += 1
    perm = tuple(tuple(table[u][x][0] for x in range(aut.d)) for u in order)
    nxt = tuple(tuple(index[table[u][x][1]] for x in range(aut.d)) for u in order)
    return minimize(Transducer(perm, nxt))


def word_transducer(g: GroupWord, cap: int = DEFAULT_CLOSURE_CAP) -> Transducer:
    """Minimal transducer of the automorphism ``g``.

    Letters are composed along the height profile of the word (``+1`` per
    state, ``-1`` per inverse): every maximal stretch that returns to its
    starting height is evaluated on its own, so conjugates ``u s u^-1`` are
    built from the inside out and stay small.  The order affects only speed.
    """
    aut = g.automaton
    memo: dict = {}
    letter = {}

    def one(s):
        if s not in letter:
            letter[s] = signed_state_transducer(aut, s)
        return letter[s]

    def fold(parts):
        out = None
        for part in parts:
            out = part if out is None else minimize(compose(out, part, cap))
        return out

    def heights(seg):
        h = [0]
        for s in seg:
            h.append(h[-1] + (-1 if s & 1 else 1))
        return h

    def ev(seg):
        if seg in memo:
            return memo[seg]
        if len(seg) == 1:
            res = one(seg[0])
        else:
            h = heights(seg)
            last = {}
            for k, v in enumerate(h):
                last[v] = k
            parts, i = [], 0
            while i < len(seg):
                j = last[h[i]]
                if j > i and (i, j) != (0, len(seg)):
                    parts.append(ev(seg[i:j]))
                    i = j
                elif j > i:
                    parts.extend(excursion(seg, h))
                    i = j
                else:
                    parts.append(one(seg[i]))
                    i += 1
            res = fold(parts)
        memo[seg] = res
        return res

    def excursion(seg, h):
        # split at interior returns to the base height
        cuts = [0] + [k for k in range(1, len(seg)) if h[k] == 0] + [len(seg)]
        out = []
        for a, b in zip(cuts, cuts[1:]):
            if b - a == 1:
                out.append(one(seg[a]))
            elif len(cuts) > 2:
                out.append(ev(seg[a:b]))
            else:
                inner = seg[a + 1:b - 1]
                parts = [one(seg[a])]
                if inner:
                    parts.append(ev(inner))
                parts.append(one(seg[b - 1]))
                out.append(fold(parts))
        return out

    letters = free_reduce(g.letters)
    if not letters:
        d = aut.d
        return Transducer((tuple(range(d)),), ((0,) * d,))
    return ev(letters)


# --- word problem -----------------------------------------------------------

@dataclass(frozen=True)
class Triviality:
    trivial: bool
    witness: tuple[int, ...] | None
    closure_size: int
    method: str = "closure"

    @property
    def witness_level(self) -> int | None:
        return None if self.witness is None else len(self.witness)


def closure_is_trivial(g: GroupWord, cap: int = DEFAULT_CLOSURE_CAP) -> Triviality:
    """Breadth-first search over the section closure of ``g`` (freely reduced words).

    The closure is finite because sections never lengthen a word.  A
    nontrivial answer carries the shortlex-least vertex whose section moves
    some letter of level 1.
    """
    if not is_invertible(g.automaton):
        raise NotInvertible("the word problem needs an invertible automaton")
    table = g.automaton.signed_table
    d = g.automaton.d
    start = free_reduce(g.letters)
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        word, path = queue.popleft()
        children = []
        for x in range(d):
            sec, y = _section_letter(table, word, x)
            if y != x:
                return Triviality(False, path, len(seen))
            children.append(sec)
        for x, sec in enumerate(children):
            sec = free_reduce(sec)
            if sec not in seen:
                seen.add(sec)
                if len(seen) > cap:
                    raise BudgetExceeded("section closure too large", cap)
                queue.append((sec, path + (x,)))
    return Triviality(True, None, len(seen))


def transducer_is_trivial(g: GroupWord, cap: int = DEFAULT_CLOSURE_CAP) -> Triviality:
    if not is_invertible(g.automaton):
        raise NotInvertible("the word problem needs an invertible automaton")
    t = word_transducer(g, cap)
    if t.is_identity():
        return Triviality(True, None, t.size, "transducer")
    return Triviality(False, t.moving_vertex(), t.size, "transducer")


def is_trivial(g: GroupWord, cap: int = DEFAULT_CLOSURE_CAP, method: str = "auto",
               closure_budget: int = 4096) -> Triviality:
    """Decide exactly whether ``g`` acts trivially on the whole tree.

    ``method="closure"`` explores the section closure of the word.
    ``method="transducer"`` builds the minimal transducer of ``g``.
    ``"auto"`` tries the closure with a small budget and falls back to the
    transducer.  All three return the same witness: the shortlex-least vertex
    whose section moves a letter of level 1, a property of the automorphism
    rather than of the word.
    """
    if method == "closure":
        return closure_is_trivial(g, cap)
    if method == "transducer":
        return transducer_is_trivial(g, cap)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    try:
        return closure_is_trivial(g, min(cap, closure_budget))
    except BudgetExceeded:
        return transducer_is_trivial(g, cap)


def equal(g: GroupWord, h: GroupWord, cap: int = DEFAULT_CLOSURE_CAP) -> bool:
    return is_trivial(g * h.inverse(), cap).trivial


def is_spherically_homogeneous(g: GroupWord, cap: int = DEFAULT_CLOSURE_CAP) -> bool:
    """True iff all sections of ``g`` on each level coincide.

    Follows the chain ``g, g|_0, g|_00, ...`` (eventually periodic over freely
    reduced words); at each node every first-level section must equal the one
    at letter 0.
    """
    if not is_invertible(g.automaton):
        raise NotInvertible("needs an invertible automaton")
    table = g.automaton.signed_table
    d = g.automaton.d
    word = free_reduce(g.letters)
    visited = set()
    while word not in visited:
        visited.add(word)
        if len(visited) > cap:
            raise BudgetExceeded("section chain too long", cap)
        secs = [_section_letter(table, word, x)[0] for x in range(d)]
        first = GroupWord(g.automaton, secs[0])
        for other in secs[1:]:
            if not equal(GroupWord(g.automaton, other), first, cap):
                return False
        word = free_reduce(secs[0])
    return True


# --- order probing ------------------------------------------------------------

@dataclass(frozen=True)
class OrderResult:
    order: int | None
    bound: int
    # n -> vertex moved by g^n, for every n checked below the order
    witnesses: dict

    @property
    def exceeded(self) -> bool:
        return self.order is None

    def __str__(self):
        return f"order={self.order}" if self.order is not None else f"exceeds {self.bound}"


def find_moved_vertex(g: GroupWord, probes: Iterable[Sequence[int]]) -> tuple[int, ...] | None:
    """Shortest prefix of some probe vertex that ``g`` moves, else None.

    A moved vertex is an exact certificate of nontriviality; finding none
    proves nothing.
    """
    best = None
    for v in probes:
        w = act(g, v)
        for k, (x, y) in enumerate(zip(v, w)):
            if x != y:
                if best is None or k + 1 < len(best):
                    best = tuple(v[:k + 1])
                break
    return best


def probe_vertices(d: int, depth: int, count: int = 4, seed: int = 0) -> list[list[int]]:
    rng = random.Random(seed)
    probes = [[x] * depth for x in range(d)]
    probes += [[rng.randrange(d) for _ in range(depth)] for _ in range(count)]
    return probes


def order_probe(g: GroupWord, max_n: int, cap: int = DEFAULT_CLOSURE_CAP,
                probe_depth: int = 256, seed: int = 0) -> OrderResult:
    """Smallest ``n <= max_n`` with ``g^n`` trivial, or ``order=None``.

    Each power is first tested on a few deep probe vertices; only when none
    is moved does the exact section-closure decision run.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    probes = probe_vertices(g.automaton.d, probe_depth, seed=seed)
    witnesses = {}
    for n in range(1, max_n + 1):
        h = g ** n
        moved = find_moved_vertex(h, probes)
        if moved is None:
            res = is_trivial(h, cap)
            if res.trivial:
                return OrderResult(n, max_n, witnesses)
            moved = _first_moved_under(h, res.witness)
        witnesses[n] = moved
    return OrderResult(None, max_n, witnesses)


def _first_moved_under(h: GroupWord, prefix: tuple[int, ...]) -> tuple[int, ...]:
    d = h.automaton.d
    for x in range(d):
        v = prefix + (x,)
        if act(h, v) != v:
            return v
    raise AssertionError("witness section does not move level 1")
