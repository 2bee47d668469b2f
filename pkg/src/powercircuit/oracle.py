"""Independent reference implementations used to check the circuit code.

Everything here works on plain Python integers and fractions, so it is only
usable while the numbers stay small enough to write down.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .circuit import Marking, PowerCircuit

DEFAULT_BIT_BUDGET = 1 << 20
DEFAULT_EXP_CAP = 1 << 16


class Overflow(Exception):
    pass


class CapExceeded(Exception):
    pass


@dataclass(frozen=True)
class BigEval:
    """Exact value of a marking, or a flag saying why there is none.

    ``irrational`` is set when some node has a non-integer exponent, so its
    value 2**e is not even rational.
    """

    value: Fraction | None = None
    overflow: bool = False
    irrational: bool = False

    @property
    def ok(self) -> bool:
        return self.value is not None


class Evaluator:
    """Memoized bottom-up evaluation of node values over one circuit."""

    def __init__(self, circuit: PowerCircuit, bit_budget: int = DEFAULT_BIT_BUDGET):
        self.circuit = circuit
        self.bit_budget = bit_budget
        self._exp: dict[int, Fraction | None] = {}
        self._val: dict[int, Fraction] = {}
        self.overflowed = False
        self.irrational = False

    def exponent(self, p: int) -> Fraction | None:
        """e(succ(P)); None when it overflowed or involves irrational values."""
        if p not in self._exp:
            for q in self.circuit.topological_order(self._closure(p)):
                if q not in self._exp:
                    self._eval_node(q)
        return self._exp[p]

    def _closure(self, p: int) -> set[int]:
        seen, stack = set(), [p]
        while stack:
            q = stack.pop()
            if q in seen or q in self._exp:
                continue
            seen.add(q)
            stack.extend(self.circuit.succ[q])
        return seen

    def _eval_node(self, p: int) -> None:
        total = Fraction(0)
        for q, s in self.circuit.succ[p].items():
            if q not in self._val:
                self._exp[p] = None
                return
            total += s * self._val[q]
        self._exp[p] = total
        if total.denominator != 1:
            self.irrational = True
            return
        if abs(total) > self.bit_budget:
            self.overflowed = True
            return
        e = int(total)
        self._val[p] = Fraction(1 << e) if e >= 0 else Fraction(1, 1 << -e)

    def node_value(self, p: int) -> Fraction | None:
        self.exponent(p)
        return self._val.get(p)

    def evaluate(self, m: Marking) -> BigEval:
        total = Fraction(0)
        overflow = irrational = False
        for p, s in m.items():
            v = self.node_value(p)
            if v is None:
                e = self._exp[p]
                if e is not None and e.denominator != 1:
                    irrational = True
                else:
                    overflow = True
                continue
            total += s * v
        if irrational:
            return BigEval(irrational=True)
        if overflow:
            return BigEval(overflow=True)
        return BigEval(value=total)


def eval_exact(c: PowerCircuit, m: Marking, bit_budget: int = DEFAULT_BIT_BUDGET) -> BigEval:
    return Evaluator(c, bit_budget).evaluate(m)


def integrality(c: PowerCircuit, bit_budget: int = DEFAULT_BIT_BUDGET) -> bool | None:
    """True/False for "every node value is a positive integer"; None if unknown.

    A node is non-integral as soon as its exponent is negative or fractional;
    an overflowing node can still hide such a witness further up, so the
    answer is None only when no witness was found and something overflowed.
    """
    ev = Evaluator(c, bit_budget)
    unknown = False
    for p in c.topological_order():
        ev.exponent(p)
        e = ev._exp[p]
        if e is None:
            unknown = True
        elif e.denominator != 1 or e < 0:
            return False
    return None if unknown else True


def tow(n: int) -> int:
    v = 1
    for _ in range(n):
        v = 1 << v
    return v


def tower_line(c: PowerCircuit, n: int) -> list[int]:
    """A line of n + 1 nodes; the last one evaluates to tow(n)."""
    nodes = [c.add_node()]
    for _ in range(n):
        nodes.append(c.add_node({nodes[-1]: 1}))
    return nodes


def gen_random_circuit(seed: int, nodes: int, density: float, signs=(-1, 1)) -> PowerCircuit:
    """Random DAG: every pair (later, earlier) carries an arc with prob. density.

    With ``signs=(1,)`` every node value is a positive integer, so the result
    is always a power circuit.
    """
    rng = random.Random(seed)
    c = PowerCircuit()
    ids: list[int] = []
    for _ in range(nodes):
        succ = {q: rng.choice(signs) for q in ids if rng.random() < density}
        ids.append(c.add_node(succ))
    return c


# -- Z[1/2] x| Z ------------------------------------------------------------


def _check_cap(cap: int, *nums) -> None:
    for n in nums:
        if isinstance(n, Fraction):
            if n.numerator.bit_length() > cap or n.denominator.bit_length() > cap:
                raise CapExceeded
        elif int(n).bit_length() > cap:
            raise CapExceeded


def pow2(e: int, cap: int) -> Fraction:
    if abs(e) > cap:
        raise CapExceeded
    return Fraction(1 << e) if e >= 0 else Fraction(1, 1 << -e)


@dataclass(frozen=True)
class Pair:
    """Element (r, m) of Z[1/2] x| Z with (r, m)(s, n) = (r + 2^m s, m + n)."""

    r: Fraction
    m: int

    def mul(self, other: "Pair", cap: int = DEFAULT_EXP_CAP) -> "Pair":
        r = self.r + (pow2(self.m, cap) * other.r if other.r else 0)
        out = Pair(Fraction(r), self.m + other.m)
        _check_cap(cap, out.r, out.m)
        return out

    def inverse(self, cap: int = DEFAULT_EXP_CAP) -> "Pair":
        r = -self.r * pow2(-self.m, cap) if self.r else Fraction(0)
        return Pair(r, -self.m)

    def swap(self) -> "Pair | None":
        if self.r.denominator != 1:
            return None
        return Pair(Fraction(self.m), int(self.r))

    @property
    def is_identity(self) -> bool:
        return self.r == 0 and self.m == 0


IDENTITY = Pair(Fraction(0), 0)


def pair_a(s: int = 1) -> Pair:
    return Pair(Fraction(s), 0)


def pair_t(s: int = 1) -> Pair:
    return Pair(Fraction(0), s)


# -- reference word-problem solvers -----------------------------------------


def wp_baumslag_reference(word, exp_cap: int = DEFAULT_EXP_CAP):
    """Britton reduction for G(1,2) over exact pairs (r, m) of Z[1/2] x| Z.

    a = (1, 0), t = (0, 1) and b a b^-1 = t.  Returns a Verdict.
    """
    from .words import Verdict, expand

    try:
        head = IDENTITY
        stack: list[tuple[int, Pair]] = []
        for gen, exp in expand(word):
            if gen == "a" or gen == "t":
                g = pair_a(exp) if gen == "a" else pair_t(exp)
                if stack:
                    e, cur = stack[-1]
                    stack[-1] = (e, cur.mul(g, exp_cap))
                else:
                    head = head.mul(g, exp_cap)
                continue
            if gen != "b":
                raise ValueError(f"unknown generator {gen!r}")
            out = None
            if stack and stack[-1][0] == -exp:
                seg = stack[-1][1]
                if exp == -1 and seg.m == 0 and seg.r.denominator == 1:
                    out = pair_t(int(seg.r))  # b a^z b^-1 = t^z
                elif exp == 1 and seg.r == 0:
                    out = pair_a(seg.m)  # b^-1 t^z b = a^z
            if out is None:
                stack.append((exp, IDENTITY))
                continue
            stack.pop()
            if stack:
                e, cur = stack[-1]
                stack[-1] = (e, cur.mul(out, exp_cap))
            else:
                head = head.mul(out, exp_cap)
    except CapExceeded:
        return Verdict.CAP_EXCEEDED
    if stack:
        return Verdict.NONTRIVIAL
    return Verdict.TRIVIAL if head.is_identity else Verdict.NONTRIVIAL


@dataclass(eq=False)
class RefTriple:
    """(r, m) of type (p, p+1), standing for a_p^r a_{p+1}^m."""

    p: int
    r: Fraction
    m: int


class PairBackend:
    """Arithmetic backend for the Higman control flow over exact pairs."""

    def __init__(self, exp_cap: int = DEFAULT_EXP_CAP):
        self.cap = exp_cap
        self.basic_ops = 0
        self.peak_nodes = 0

    def load(self, word):
        return [RefTriple(p, Fraction(e), 0) for p, e in word]

    def _new(self, p: int, r, m: int) -> RefTriple:
        self.basic_ops += 1
        r = Fraction(r)
        _check_cap(self.cap, r, m)
        return RefTriple(p, r, m)

    def u_zero(self, t: RefTriple) -> bool:
        return t.r == 0

    def sum_zero(self, t: RefTriple) -> bool:
        return t.m == 0

    def is_one(self, t: RefTriple) -> bool:
        return t.r == 0 and t.m == 0

    def mul(self, a: RefTriple, b: RefTriple) -> RefTriple:
        if a.p != b.p:
            raise ValueError("type mismatch")
        prod = Pair(a.r, a.m).mul(Pair(b.r, b.m), self.cap)
        return self._new(a.p, prod.r, prod.m)

    def swap_up(self, t: RefTriple) -> RefTriple:
        assert t.r == 0
        return self._new(t.p % 4 + 1, t.m, 0)

    def swap_down(self, t: RefTriple) -> RefTriple:
        assert t.m == 0 and t.r.denominator == 1
        return self._new((t.p - 2) % 4 + 1, 0, int(t.r))

    def split(self, t: RefTriple):
        if t.p % 2 == 1:
            if t.r.denominator != 1:
                return None
            return self._new(t.p, t.r, 0), self._new(t.p, 0, t.m)
        z = t.r * pow2(-t.m, self.cap)
        if z.denominator != 1:
            return None
        return self._new(t.p, 0, t.m), self._new(t.p, z, 0)


def wp_higman_reference(word, exp_cap: int = DEFAULT_EXP_CAP):
    """The Higman control flow over exact pairs; returns a Verdict.

    Only the arithmetic differs from the circuit solver: there is no simpler
    decision procedure for H4 to compare against.
    """
    from .higman import HigmanSolver
    from .words import Verdict

    be = PairBackend(exp_cap)
    try:
        verdict, _ = HigmanSolver(be).solve(be.load(word))
    except CapExceeded:
        return Verdict.CAP_EXCEEDED
    return verdict


def gen_trivial_word(group: str, seed: int, length: int):
    """Freely reduced product of conjugates x r^+-1 x^-1 of relators.

    Conjugates are added until the word would exceed ``length`` letters.
    ``group`` is "baumslag" (letters a, t, b) or "higman".
    """
    from .words import free_reduce, inverse

    if group == "baumslag":
        from .baumslag import RELATORS_ATB as rels
        gens = ["a", "t", "b"]
    elif group == "higman":
        from .higman import RELATORS as rels
        gens = [1, 2, 3, 4]
    else:
        raise ValueError(f"unknown group {group!r}")
    rng = random.Random(seed)
    word: list = []
    misses = 0
    while misses < 20:
        x = free_reduce([(rng.choice(gens), rng.choice((-1, 1))) for _ in range(rng.randint(0, 6))])
        r = rng.choice(rels)
        if rng.random() < 0.5:
            r = inverse(r)
        cand = free_reduce(word + x + r + inverse(x))
        if sum(abs(e) for _, e in cand) > length:
            misses += 1
            continue
        word = cand
    return word
