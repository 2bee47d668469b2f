"""Tree representation of a power circuit and the quadratic reduction.

Nodes of the reduced part are kept sorted by value and grouped into maximal
chains (runs where each value doubles the previous one).  Inside a chain with
bottom value e0, a marking restricted to that chain is ``N * e0`` for an
ordinary integer N, and a compact marking is exactly the non-adjacent form of
N.  Chains are separated by a factor of at least 4, so comparing two compact
markings, or testing whether their difference is 1, only needs these
per-chain integers and never the (possibly tower-sized) values themselves.

The trie of leaf markings is not stored: compact markings are canonical, so a
marking is its own trie path and two leaves are equal iff their dicts are.
"""

from __future__ import annotations

import enum
import logging
import os
from dataclasses import dataclass

from .circuit import Marking, PowerCircuit

log = logging.getLogger(__name__)

_GAP = 1 << 32


class NotALeaf(ValueError):
    pass


class PreconditionViolated(ValueError):
    pass


class SizeBoundViolated(AssertionError):
    pass


class Order(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class Gap(enum.Enum):
    DIFF_ONE = "DiffOne"
    DIFF_AT_LEAST_TWO = "DiffAtLeastTwo"
    NA = "NA"


@dataclass(frozen=True)
class ChainStats:
    chain_count: int
    potential: int


@dataclass(frozen=True)
class ExtendRecord:
    gamma_before: int
    gamma_after: int
    new_nodes: int
    chains_before: int
    chains_after: int

    @property
    def bound(self) -> int:
        return self.gamma_before + 3 * self.new_nodes + self.chains_before - self.chains_after

    @property
    def ok(self) -> bool:
        return self.gamma_after <= self.bound and self.chains_after * self.gamma_after <= self.gamma_after**2


class ExtendLog:
    """Per-process record of the size bound of every extend_tree call."""

    def __init__(self):
        self.calls = 0
        self.violations: list[ExtendRecord] = []
        self.strict = bool(os.environ.get("POWERCIRCUIT_STRICT"))

    def record(self, rec: ExtendRecord) -> None:
        self.calls += 1
        if not rec.ok:
            self.violations.append(rec)
            if self.strict:
                raise SizeBoundViolated(rec)


EXTEND_LOG = ExtendLog()


def naf(n: int) -> list[int]:
    """Non-adjacent form of n, least significant digit first."""
    digits = []
    while n:
        if n & 1:
            d = 2 - (n & 3)
            n -= d
        else:
            d = 0
        digits.append(d)
        n >>= 1
    return digits


def _key(m: dict[int, int]) -> frozenset:
    return frozenset(m.items())


class TreeRep:
    """A power circuit whose nodes in ``gamma`` are reduced.

    Nodes of the circuit outside ``gamma`` are the pending set U that the next
    :meth:`extend_tree` call will fold in.
    """

    def __init__(self, circuit: PowerCircuit):
        self.circuit = circuit
        self.gamma: set[int] = set()
        self.order: list[int] = []
        self.label: dict[int, int] = {}
        self.base: dict[int, int] = {}
        self.off: dict[int, int] = {}
        self.chains: dict[int, list[int]] = {}
        self.canon: dict[frozenset, int] = {}
        self.leaves: list[Marking] = []

    def __len__(self) -> int:
        return len(self.order)

    @property
    def one(self) -> int | None:
        """The node of value 1, if any."""
        return self.canon.get(frozenset())

    def succ(self, p: int) -> dict[int, int]:
        return self.circuit.succ[p]

    # -- bits and chains -------------------------------------------------

    @property
    def doubling(self) -> list[int]:
        """b(i) = 1 iff value(order[i+1]) == 2 * value(order[i])."""
        return [
            int(self.base[p] == self.base[q])
            for p, q in zip(self.order, self.order[1:])
        ]

    def chain_of(self, p: int) -> list[int]:
        return self.chains[self.base[p]]

    def chain_stats(self) -> ChainStats:
        c = len(self.chains)
        return ChainStats(c, c * len(self.order))

    # -- per-chain integers ----------------------------------------------

    def vec(self, m: dict[int, int], sign: int = 1, into: dict[int, int] | None = None) -> dict[int, int]:
        v = {} if into is None else into
        base, off = self.base, self.off
        for p, c in m.items():
            b = base[p]
            v[b] = v.get(b, 0) + ((sign * c) << off[p])
        return v

    def sign_vec(self, v: dict[int, int]) -> int:
        best = None
        label = self.label
        for b, n in v.items():
            if n and (best is None or label[b] > label[best]):
                best = b
        if best is None:
            return 0
        return 1 if v[best] > 0 else -1

    def _check_leaf(self, m: dict[int, int]) -> None:
        for p in m:
            if p not in self.gamma:
                raise NotALeaf(f"node {p} is not reduced")
        if not self.is_compact(m):
            raise NotALeaf("marking is not compact")

    def is_compact(self, m: dict[int, int]) -> bool:
        seen: dict[int, set[int]] = {}
        for p, c in m.items():
            if c not in (-1, 1):
                return False
            offs = seen.setdefault(self.base[p], set())
            o = self.off[p]
            if o - 1 in offs or o + 1 in offs:
                return False
            offs.add(o)
        return True

    def sign_of(self, m: dict[int, int], check: bool = True) -> int:
        if check:
            self._check_leaf(m)
        return self.sign_vec(self.vec(m))

    def _diff_vec(self, a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
        return self.vec(b, -1, self.vec(a))

    def diff_is_one(self, a: dict[int, int], b: dict[int, int]) -> bool:
        """e(a) == e(b) + 1 for compact a, b."""
        one = self.one
        if one is None:
            return False
        v = self._diff_vec(a, b)
        v[self.base[one]] = v.get(self.base[one], 0) - 1
        return not any(v.values())

    def compare(self, k: dict[int, int], m: dict[int, int], check: bool = True) -> tuple[Order, Gap]:
        if check:
            self._check_leaf(k)
            self._check_leaf(m)
        s = self.sign_vec(self._diff_vec(k, m))
        if s == 0:
            return Order.EQUAL, Gap.NA
        hi, lo = (k, m) if s > 0 else (m, k)
        gap = Gap.DIFF_ONE if self.diff_is_one(hi, lo) else Gap.DIFF_AT_LEAST_TWO
        return Order(s), gap

    def value_is_zero(self, m: dict[int, int]) -> bool:
        return not any(self.vec(m).values())

    # -- node insertion and removal ----------------------------------------

    def _position(self, lam: dict[int, int]) -> int:
        lo, hi = 0, len(self.order)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.sign_vec(self._diff_vec(lam, self.succ(self.order[mid]))) > 0:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def _assign_label(self, i: int) -> None:
        order, label = self.order, self.label
        p = order[i]
        lo = label[order[i - 1]] if i > 0 else None
        hi = label[order[i + 1]] if i + 1 < len(order) else None
        if lo is None and hi is None:
            label[p] = 0
        elif lo is None:
            label[p] = hi - _GAP
        elif hi is None:
            label[p] = lo + _GAP
        elif hi - lo >= 2:
            label[p] = (lo + hi) // 2
        else:
            for j, q in enumerate(order):
                label[q] = j * _GAP

    def insert_node(self, lam: dict[int, int], node: int | None = None) -> int:
        """Return the node whose successor marking has the value of compact ``lam``.

        An existing node is reused; otherwise ``node`` (an unreduced node whose
        arcs already equal ``lam``) is moved in, or a fresh node is created.
        """
        key = _key(lam)
        p = self.canon.get(key)
        if p is not None:
            return p
        i = self._position(lam)
        if node is None:
            p = self.circuit.add_node(lam)
        else:
            p = node
        self.gamma.add(p)
        self.canon[key] = p
        self.order.insert(i, p)
        self._assign_label(i)
        pred = self.order[i - 1] if i > 0 else None
        nxt = self.order[i + 1] if i + 1 < len(self.order) else None
        down = pred is not None and self.diff_is_one(lam, self.succ(pred))
        up = nxt is not None and self.diff_is_one(self.succ(nxt), lam)
        if down:
            b = self.base[pred]
            chain = self.chains[b]
            self.base[p] = b
            self.off[p] = len(chain)
            chain.append(p)
            if up:
                upper = self.chains.pop(nxt)
                for q in upper:
                    self.base[q] = b
                    self.off[q] = len(chain)
                    chain.append(q)
        elif up:
            upper = self.chains.pop(nxt)
            chain = [p] + upper
            for j, q in enumerate(chain):
                self.base[q] = p
                self.off[q] = j
            self.chains[p] = chain
        else:
            self.base[p] = p
            self.off[p] = 0
            self.chains[p] = [p]
        return p

    def remove_node(self, p: int) -> None:
        """Drop an unreferenced reduced node from both the tree and the circuit."""
        key = _key(self.succ(p))
        self.circuit.remove_node(p)
        self.gamma.discard(p)
        del self.canon[key]
        self.order.remove(p)
        del self.label[p]
        b, j = self.base.pop(p), self.off.pop(p)
        chain = self.chains.pop(b)
        lower, upper = chain[:j], chain[j + 1:]
        if lower:
            self.chains[b] = lower
        if upper:
            nb = upper[0]
            for k, q in enumerate(upper):
                self.base[q] = nb
                self.off[q] = k
            self.chains[nb] = upper

    # -- compact markings --------------------------------------------------

    def compactify(self, coefs: dict[int, int], grow: bool = True) -> Marking:
        """Compact marking of the same value (integer coefficients allowed).

        When a chain is too short to hold the result, a node is added on top of
        it if ``grow``; otherwise PreconditionViolated is raised.
        """
        coefs = {p: c for p, c in coefs.items() if c}
        while True:
            v = self.vec(coefs)
            out = Marking()
            short = None
            for b, n in v.items():
                if not n:
                    continue
                chain = self.chains[b]
                digits = naf(n)
                if len(digits) > len(chain):
                    short = b
                    break
                for j, d in enumerate(digits):
                    if d:
                        out[chain[j]] = d
            if short is None:
                return out
            if not grow:
                raise PreconditionViolated("compactification runs past the end of a chain")
            self.create_room_above(self.chains[short][-1])

    def create_room_above(self, top: int) -> int:
        """Insert the node of value 2 * value(top)."""
        one = self.one
        if one is None:
            one = self.insert_node({})
        lam = dict(self.succ(top))
        lam[one] = lam.get(one, 0) + 1
        return self.insert_node(self.compactify(lam))

    def register_leaf(self, m: dict[int, int]) -> Marking:
        leaf = self.compactify(m)
        self.leaves.append(leaf)
        return leaf

    def increment_leaf(self, m: dict[int, int]) -> Marking:
        """Raw (possibly non-compact) marking of value e(m) + 1."""
        out = Marking(m)
        one = self.one
        if one is None:
            one = self.insert_node({})
        if out.get(one, 0) != 1:
            c = out.get(one, 0) + 1
            if c:
                out[one] = c
            else:
                out.pop(one, None)
            return out
        chain = self.chain_of(one)
        two = chain[1] if len(chain) > 1 else self.create_room_above(one)
        del out[one]
        out[two] = 1
        return out

    def _used_in_leaf(self, p: int) -> bool:
        return self.circuit.indeg[p] > 0 or any(p in m for m in self.leaves)

    def create_joker(self) -> int:
        """Node ending the chain of the value-1 node that no leaf uses."""
        one = self.one
        if one is None:
            one = self.insert_node({})
        while True:
            top = self.chain_of(one)[-1]
            if top != one and not self._used_in_leaf(top):
                return top
            new = self.create_room_above(top)
            if self.chain_of(one)[-1] == new:
                return new

    # -- ExtendTree ------------------------------------------------------

    def extend_tree(self, markings: list[Marking] = ()) -> dict[int, int] | None:
        """Fold every unreduced node into the tree.

        Returns the map from each folded node to its reduced replacement, or
        None when some node value is not an integer.  The given markings are
        rewritten in place into compact markings of equal value.  After None
        the tree is left in an unusable state.
        """
        circuit = self.circuit
        pending = [p for p in circuit.succ if p not in self.gamma]
        gamma_before = len(self.order)
        chains_before = len(self.chains)
        order = circuit.topological_order(pending)
        lam = {q: dict(circuit.succ[q]) for q in pending}
        users: dict[int, list[dict[int, int]]] = {q: [] for q in pending}
        for d in lam.values():
            for r in d:
                if r in users:
                    users[r].append(d)
        work = [dict(m) for m in markings]
        for d in work:
            for r in d:
                if r in users:
                    users[r].append(d)
        mapping: dict[int, int] = {}
        dead: list[int] = []
        for q in order:
            leaf = self.compactify(lam.pop(q))
            if self.sign_vec(self.vec(leaf)) < 0:
                return None
            p = self.canon.get(_key(leaf))
            if p is None:
                circuit.set_successors(q, leaf)
                self.insert_node(leaf, node=q)
                mapping[q] = q
                continue
            mapping[q] = p
            dead.append(q)
            for d in users[q]:
                c = d.pop(q) + d.get(p, 0)
                if c:
                    d[p] = c
                else:
                    d.pop(p, None)
        for q in reversed(dead):
            circuit.remove_node(q)
        for m, d in zip(markings, work):
            leaf = self.compactify(d)
            m.clear()
            m.update(leaf)
        EXTEND_LOG.record(ExtendRecord(gamma_before, len(self.order), len(pending), chains_before, len(self.chains)))
        return mapping

    # -- verification ----------------------------------------------------

    def check(self) -> None:
        """Assert the structural invariants (sortedness, bits, compactness)."""
        assert set(self.order) == self.gamma == set(self.label)
        assert len(self.order) == len(self.canon)
        for p in self.order:
            lam = self.succ(p)
            assert all(q in self.gamma for q in lam), "arc leaves the reduced part"
            assert self.is_compact(lam), f"successor marking of {p} not compact"
            assert self.canon[_key(lam)] == p
        for p, q in zip(self.order, self.order[1:]):
            assert self.label[p] < self.label[q]
            assert self.compare(self.succ(p), self.succ(q))[0] == Order.LESS
            linked = self.diff_is_one(self.succ(q), self.succ(p))
            assert linked == (self.base[p] == self.base[q])
        for b, chain in self.chains.items():
            assert chain[0] == b
            for j, q in enumerate(chain):
                assert self.base[q] == b and self.off[q] == j


def make_tree(circuit: PowerCircuit, markings: list[Marking] = ()) -> TreeRep | None:
    """Reduce ``circuit`` in place; None if it is not a power circuit."""
    tree = TreeRep(circuit)
    if tree.extend_tree(markings) is None:
        return None
    return tree


def is_power_circuit(circuit: PowerCircuit) -> bool:
    return make_tree(circuit.copy()) is not None
