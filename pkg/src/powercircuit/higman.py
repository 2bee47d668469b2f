"""Word problem for Higman's group H4 = < a1..a4 | a_p a_{p-1} a_p^-1 = a_{p-1}^2 >.

H4 is the amalgamated product G123 *_F13 G341, where G123 = G12 *_G2 G23,
G341 = G34 *_G4 G41 and F13 is the free group on a1, a3.  Group elements are
typed triples [u, x, k]_(p, p+1) standing for a_{p+1}^x a_p^u a_{p+1}^k.

The control flow (intervals, separator, F13 membership) is written once
against a small arithmetic backend.  :class:`CircuitBackend` keeps every
triple as compact markings over one shared power circuit in tree
representation; the bignum backend in :mod:`powercircuit.oracle` runs the
same control flow over exact dyadic rationals.
"""

from __future__ import annotations

import os
import time
import weakref
from dataclasses import dataclass, field

from .circuit import Marking, PowerCircuit, binary_basis, int_marking
from .reduce import TreeRep, make_tree
from .sdp import NotAPowerCircuit, scaled_is_integral
from .words import Verdict, inverse


class TypeMismatch(ValueError):
    pass


class PreconditionViolated(ValueError):
    pass


class WeightIncreased(AssertionError):
    pass


def nxt(p: int) -> int:
    return p % 4 + 1


def prv(p: int) -> int:
    return (p - 2) % 4 + 1


def is_low(p: int) -> bool:
    """Types (1,2) and (3,4); their amalgamated cyclic group is generated by a_{p+1}."""
    return p % 2 == 1


def interval_kind(p: int) -> int:
    """0 for the interval type (1,2,3), 1 for (3,4,1)."""
    return 0 if p in (1, 2) else 1


# a_p a_{p-1} a_p^-1 a_{p-1}^-2
RELATORS = [[(p, 1), (prv(p), 1), (p, -1), (prv(p), -2)] for p in (1, 2, 3, 4)]


def higman_tower_word(p: int, n: int) -> list[tuple[int, int]]:
    """w(p,0) = a_p and w(p,n) = w(p+1,n-1) a_p w(p+1,n-1)^-1; equal to a_p^tow(n)."""
    if n == 0:
        return [(p, 1)]
    inner = higman_tower_word(nxt(p), n - 1)
    return inner + [(p, 1)] + inverse(inner)


def tower_identity(p: int, n: int) -> list[tuple[int, int]]:
    """a_{p+1} w(p,n) a_{p+1}^-1 w(p,n)^-2, trivial by the defining relation."""
    w = higman_tower_word(p, n)
    return [(nxt(p), 1)] + w + [(nxt(p), -1)] + inverse(w) + inverse(w)


# -- circuit backend ------------------------------------------------------------


@dataclass(eq=False)
class TypedTriple:
    p: int
    u: Marking
    x: Marking
    k: Marking

    @property
    def type(self) -> tuple[int, int]:
        return (self.p, nxt(self.p))

    def markings(self) -> list[Marking]:
        return [self.u, self.x, self.k]

    def weight(self) -> int:
        return len(self.u) + len(self.x) + len(self.k)


def _sum(*ms: dict[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for m in ms:
        for q, s in m.items():
            out[q] = out.get(q, 0) + s
    return {q: s for q, s in out.items() if s}


class CircuitBackend:
    """Typed triples over one shared power circuit kept in tree representation.

    Every basic operation builds its result from clones, calls extend_tree and
    leaves compact markings behind.  Nodes that no live triple reaches any
    more are collected from time to time.
    """

    def __init__(self, strict: bool | None = None):
        self.circuit = PowerCircuit()
        self.tree: TreeRep | None = None
        self.basic_ops = 0
        self.peak_nodes = 0
        self.weight_violations = 0
        self.strict = bool(os.environ.get("POWERCIRCUIT_STRICT")) if strict is None else strict
        self._live: weakref.WeakSet = weakref.WeakSet()
        self._gc_mark = 0

    def _new(self, p: int, u, x, k) -> TypedTriple:
        t = TypedTriple(p, Marking(u), Marking(x), Marking(k))
        self._live.add(t)
        return t

    def load(self, word: list[tuple[int, int]]) -> list[TypedTriple]:
        """Encode a_p^e as [e,0,0]_(p,p+1) and reduce the circuit once."""
        return self.load_triples([(p, e, 0, 0) for p, e in word])

    def load_triples(self, specs: list[tuple[int, int, int, int]]) -> list[TypedTriple]:
        """Triples [u,x,k]_(p,p+1) from integers (x <= 0 <= k), over one binary basis."""
        bits = max((abs(v).bit_length() for sp in specs for v in sp[1:]), default=0)
        basis = binary_basis(self.circuit, bits)
        out = []
        for p, u, x, k in specs:
            if x > 0 or k < 0:
                raise ValueError("need x <= 0 <= k")
            ms = [int_marking(self.circuit, v, basis) for v in (u, x, k)]
            out.append(self._new(p, *ms))
        marks = [m for t in out for m in t.markings()]
        self.circuit.prune(marks)
        self.tree = make_tree(self.circuit, marks)
        if self.tree is None:
            raise NotAPowerCircuit("input circuit is not a power circuit")
        self._track()
        return out

    def pair(self, t: TypedTriple):
        """Exact (u 2^x, x + k) through the oracle, for tests and debugging."""
        from fractions import Fraction

        from .oracle import Evaluator

        ev = Evaluator(self.circuit)
        u, x, k = (ev.evaluate(m).value for m in t.markings())
        return u * Fraction(2) ** int(x), int(x + k)

    # bookkeeping

    def _track(self) -> None:
        n = len(self.circuit)
        self.peak_nodes = max(self.peak_nodes, n)
        if n > max(256, 2 * self._gc_mark):
            self.collect()

    def collect(self) -> int:
        """Remove nodes unreachable from every live triple."""
        keep = [m for t in list(self._live) for m in t.markings()]
        live = self.circuit.reachable(keep)
        dead = [p for p in self.circuit.succ if p not in live]
        for p in reversed(self.circuit.topological_order(dead)):
            self.tree.remove_node(p)
        self._gc_mark = len(self.circuit)
        return len(dead)

    def _fold(self, markings: list[dict]) -> list[Marking]:
        ms = [Marking(m) for m in markings]
        gamma = self.tree.gamma
        if all(q in gamma and abs(c) == 1 for m in ms for q, c in m.items()):
            # nothing pending: each marking is an untouched compact one
            return ms
        if self.tree.extend_tree(ms) is None:
            raise NotAPowerCircuit("basic operation produced a non-integral node")
        return ms

    def _op(self, before: list[TypedTriple], after: list[TypedTriple]) -> None:
        self.basic_ops += 1
        if sum(t.weight() for t in after) > sum(t.weight() for t in before):
            self.weight_violations += 1
            if self.strict:
                raise WeightIncreased(f"basic operation {self.basic_ops} increased the weight")
        self._track()

    def _scaled(self, u: Marking, e: dict[int, int]) -> tuple[Marking, bool]:
        """Marking of value u * 2**e and whether it consists of fresh clones."""
        if not u or not e:
            return Marking(u), False
        return self.circuit.mul_pow2(u, Marking(e)), True

    def _add(self, m1: Marking, fresh1: bool, m2: Marking, fresh2: bool) -> dict[int, int]:
        """Coefficients of m1 + m2.

        When both are non-empty, reduced operands are cloned first so that any
        growth of the tree is paid for by pending nodes inside extend_tree.
        """
        if not m1:
            return dict(m2)
        if not m2:
            return dict(m1)
        if not fresh1:
            m1 = self.circuit.clone_marking(m1)
        if not fresh2:
            m2 = self.circuit.clone_marking(m2)
        return _sum(m1, m2)

    # tests (no basic operations)

    def u_zero(self, t: TypedTriple) -> bool:
        return not t.u

    def sum_zero(self, t: TypedTriple) -> bool:
        return self.tree.sign_of(_sum(t.x, t.k), check=False) == 0

    def is_one(self, t: TypedTriple) -> bool:
        return not t.u and self.sum_zero(t)

    def weight(self, t: TypedTriple) -> int:
        return t.weight()

    # basic operations

    def identity(self, p: int) -> TypedTriple:
        return self._new(p, {}, {}, {})

    def mul(self, a: TypedTriple, b: TypedTriple) -> TypedTriple:
        """[u,x,k] [v,y,l] = [u 2^-y + v 2^k, x + y, k + l]."""
        if a.p != b.p:
            raise TypeMismatch(f"cannot multiply types {a.type} and {b.type}")
        left, fl = self._scaled(a.u, b.x.negated())
        right, fr = self._scaled(b.u, a.k)
        u, x, k = self._fold([
            self._add(left, fl, right, fr),
            self._add(a.x, False, b.x, False),
            self._add(a.k, False, b.k, False),
        ])
        out = self._new(a.p, u, x, k)
        self._op([a, b], [out])
        return out

    def swap_up(self, t: TypedTriple) -> TypedTriple:
        """[0,x,k]_(p,p+1) = [x+k,0,0]_(p+1,p+2)."""
        if t.u:
            raise PreconditionViolated("swap up needs u = 0")
        (z,) = self._fold([self._add(t.x, False, t.k, False)])
        out = self._new(nxt(t.p), z, {}, {})
        self._op([t], [out])
        return out

    def swap_down(self, t: TypedTriple) -> TypedTriple:
        """[z,0,0]_(p,p+1) = [0,0,z]_(p-1,p) for z >= 0 and [0,z,0] otherwise."""
        if t.x or t.k:
            raise PreconditionViolated("swap down needs x = k = 0")
        if self.tree.sign_of(t.u, check=False) >= 0:
            out = self._new(prv(t.p), {}, {}, t.u)
        else:
            out = self._new(prv(t.p), {}, t.u, {})
        self._op([t], [out])
        return out

    def split(self, t: TypedTriple) -> tuple[TypedTriple, TypedTriple] | None:
        """Low type: [u 2^x,0,0][0,x,k]; high type: [0,x,k][u 2^-k,0,0].

        None when the needed power u 2^x (resp. u 2^-k) is not an integer.
        """
        shift = t.x if is_low(t.p) else t.k.negated()
        if not scaled_is_integral(self.tree, t.u, shift):
            return None
        (z,) = self._fold([self._scaled(t.u, shift)[0]])
        outer = self._new(t.p, {}, t.x, t.k)
        inner = self._new(t.p, z, {}, {})
        pair = (inner, outer) if is_low(t.p) else (outer, inner)
        self._op([t], list(pair))
        return pair

    def describe(self, t: TypedTriple) -> str:
        return f"[{len(t.u)},{len(t.x)},{len(t.k)}]_{t.type}"


# -- generic control flow ----------------------------------------------------


@dataclass
class Interval:
    kind: int
    members: list = field(default_factory=list)


@dataclass
class Membership:
    inside: bool
    identity: bool = False
    members: list = field(default_factory=list)


@dataclass
class HigmanStats:
    triples: int = 0
    intervals_final: int = 0
    membership_tests: int = 0
    basic_ops: int = 0
    peak_nodes: int = 0
    time_ms: float = 0.0

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["time_ms"] = round(self.time_ms, 3)
        return d


class HigmanSolver:
    """Separator loop over intervals, with F13 membership tests."""

    def __init__(self, backend):
        self.be = backend
        self.membership_tests = 0

    def to_amalgam(self, t):
        """t as an element of the other pair type, if it lies in the amalgamated G2/G4."""
        be = self.be
        if is_low(t.p):
            return be.swap_up(t) if be.u_zero(t) else None
        if not be.sum_zero(t):
            return None
        parts = be.split(t)
        if parts is None:
            return None
        return be.swap_down(parts[1])

    def britton(self, members: list) -> list:
        """Alternating, reduced sequence with the same product.

        A single leftover element at the bottom may lie in the amalgamated
        subgroup; it is folded into the next element of the other type.
        """
        be = self.be
        stack: list = []
        bottom_conv = None  # converted form of stack[0] when it lies in G2/G4
        for t in members:
            while True:
                if stack and stack[-1].p == t.p:
                    t = be.mul(stack.pop(), t)
                elif len(stack) == 1 and bottom_conv is not None and bottom_conv.p == t.p:
                    stack.pop()
                    t = be.mul(bottom_conv, t)
                else:
                    conv = self.to_amalgam(t)
                    if conv is None:
                        break
                    if not stack:
                        bottom_conv = conv
                        break
                    t = be.mul(stack.pop(), conv)
                if not stack:
                    bottom_conv = None
            stack.append(t)
        return stack

    def membership(self, iv: Interval) -> Membership:
        """Is the product of the interval in F13?  Also decides triviality."""
        be = self.be
        self.membership_tests += 1
        seq = self.britton(iv.members)
        if not seq:
            return Membership(True, True, [])
        identity = len(seq) == 1 and be.is_one(seq[0])
        lefts = []
        h = None
        for j, t in enumerate(seq):
            e = be.mul(h, t) if h is not None else t
            parts = be.split(e)
            if parts is None:
                return Membership(False, False, lefts + [e] + seq[j + 1:])
            g, hj = parts
            lefts.append(g)
            if j == len(seq) - 1:
                if not be.is_one(hj):
                    return Membership(False, False, lefts + [hj])
            else:
                h = be.swap_up(hj) if is_low(hj.p) else be.swap_down(hj)
        return Membership(True, identity, lefts)

    def swapped(self, members: list) -> list:
        """Left factors g'_j of a successful test, moved to the other interval type."""
        be = self.be
        return [be.swap_down(g) if is_low(g.p) else be.swap_up(g) for g in members]

    def solve(self, triples: list) -> tuple[Verdict, int]:
        ivs = [Interval(interval_kind(t.p), [t]) for t in triples]
        if not ivs:
            return Verdict.TRIVIAL, 0
        f = 0
        while not (f >= 1 and f == len(ivs)) and not (f == 0 and len(ivs) == 1):
            if f == 0:
                res = self.membership(ivs[0])
                if not res.inside:
                    ivs[0].members = res.members
                    f = 1
                else:
                    self._join(ivs, 0, res, left_swaps=True)
                continue
            left, right = ivs[f - 1], ivs[f]
            if left.kind == right.kind:
                left.members = left.members + right.members
                del ivs[f]
                f -= 1
                continue
            res = self.membership(right)
            if not res.inside:
                right.members = res.members
                f += 1
            else:
                self._join(ivs, f, res, left_swaps=False)
                f -= 1
        if f >= 1:
            return Verdict.NONTRIVIAL, len(ivs)
        res = self.membership(ivs[0])
        return (Verdict.TRIVIAL if res.inside and res.identity else Verdict.NONTRIVIAL), 1

    def _join(self, ivs: list, i: int, res: Membership, left_swaps: bool) -> None:
        """Swap the interval at i if needed and merge it with its neighbour."""
        if left_swaps:
            other = ivs[i + 1]
            moved = res.members if other.kind == ivs[i].kind else self.swapped(res.members)
            other.members = moved + other.members
            del ivs[i]
        else:
            other = ivs[i - 1]
            moved = res.members if other.kind == ivs[i].kind else self.swapped(res.members)
            other.members = other.members + moved
            del ivs[i]


def wp_higman(word: list[tuple[int, int]], stats: HigmanStats | None = None,
              backend: CircuitBackend | None = None) -> Verdict:
    t0 = time.perf_counter()
    be = backend if backend is not None else CircuitBackend()
    triples = be.load(word)
    solver = HigmanSolver(be)
    verdict, t = solver.solve(triples)
    if stats is not None:
        stats.triples = len(triples)
        stats.intervals_final = t
        stats.membership_tests = solver.membership_tests
        stats.basic_ops = be.basic_ops
        stats.peak_nodes = be.peak_nodes
        stats.time_ms = (time.perf_counter() - t0) * 1000
    return verdict


def weight(triples: list[TypedTriple]) -> int:
    return sum(t.weight() for t in triples)
