"""Power circuits: a DAG of nodes with signed arcs, plus markings over it.

A node P evaluates to ``2 ** e(succ(P))`` where ``succ(P)`` is the marking
given by its outgoing arcs; a marking evaluates to the signed sum of the
values of the nodes it marks.  Nothing in this module checks that values are
integers; that is the job of the reduction in :mod:`powercircuit.reduce`.
"""

from __future__ import annotations

import json
from collections import deque
from typing import Iterable


class UnknownNode(KeyError):
    pass


class Marking(dict):
    """Sparse signed subset of nodes: node id -> +1 / -1 (absent means 0)."""

    def support(self) -> set[int]:
        return {p for p, s in self.items() if s}

    def negated(self) -> "Marking":
        return Marking({p: -s for p, s in self.items()})

    def __neg__(self) -> "Marking":
        return self.negated()

    def __repr__(self) -> str:
        body = " ".join(f"{'+' if s > 0 else '-'}{p}" for p, s in sorted(self.items()))
        return f"Marking({body})"


def support(m: Marking) -> set[int]:
    return m.support()


def negate_marking(m: Marking) -> Marking:
    return m.negated()


class PowerCircuit:
    """Mutable power circuit.

    Node ids are ints handed out by a counter and never reused.  Each node
    stores its outgoing arcs (its successor marking) and an in-degree counter,
    so :meth:`is_source` costs O(|support|).
    """

    def __init__(self):
        self._next_id = 0
        self.succ: dict[int, dict[int, int]] = {}
        self.indeg: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self.succ)

    def __contains__(self, p: int) -> bool:
        return p in self.succ

    @property
    def nodes(self) -> list[int]:
        return list(self.succ)

    def num_arcs(self) -> int:
        return sum(len(s) for s in self.succ.values())

    def successor_marking(self, p: int) -> Marking:
        self._check(p)
        return Marking(self.succ[p])

    def _check(self, p: int) -> None:
        if p not in self.succ:
            raise UnknownNode(p)

    # -- structure -------------------------------------------------------

    def add_node(self, succ: dict[int, int] | None = None) -> int:
        succ = {q: s for q, s in (succ or {}).items() if s}
        for q, s in succ.items():
            self._check(q)
            if s not in (-1, 1):
                raise ValueError(f"arc sign must be +-1, got {s}")
        p = self._next_id
        self._next_id += 1
        self.succ[p] = dict(succ)
        self.indeg[p] = 0
        for q in succ:
            self.indeg[q] += 1
        return p

    def add_arc(self, p: int, q: int, sign: int) -> None:
        """Add the arc p -> q.  The caller guarantees acyclicity."""
        self._check(p)
        self._check(q)
        if sign not in (-1, 1):
            raise ValueError(f"arc sign must be +-1, got {sign}")
        if q in self.succ[p]:
            raise ValueError(f"double arc {p} -> {q}")
        if p == q:
            raise ValueError("self loop")
        self.succ[p][q] = sign
        self.indeg[q] += 1

    def remove_arc(self, p: int, q: int) -> None:
        del self.succ[p][q]
        self.indeg[q] -= 1

    def set_successors(self, p: int, succ: dict[int, int]) -> None:
        for q in list(self.succ[p]):
            self.remove_arc(p, q)
        for q, s in succ.items():
            if s:
                self.add_arc(p, q, s)

    def remove_node(self, p: int) -> None:
        self._check(p)
        if self.indeg[p]:
            raise ValueError(f"node {p} still has {self.indeg[p]} incoming arcs")
        for q in self.succ.pop(p):
            self.indeg[q] -= 1
        del self.indeg[p]

    def is_source(self, m: Marking) -> bool:
        return all(self.indeg[p] == 0 for p, s in m.items() if s)

    # -- cloning and arithmetic -------------------------------------------

    def clone_node(self, p: int) -> int:
        self._check(p)
        return self.add_node(self.succ[p])

    def clone_marking(self, m: Marking) -> Marking:
        return Marking({self.clone_node(p): s for p, s in m.items() if s})

    def add_markings(self, m: Marking, k: Marking) -> Marking:
        """Marking of value e(m) + e(k); nodes marked twice with one sign get cloned."""
        out = Marking(m)
        for p, s in k.items():
            if not s:
                continue
            t = out.get(p, 0) + s
            if t == 0:
                del out[p]
            elif abs(t) == 1:
                out[p] = t
            else:
                out[p] = t // 2
                out[self.clone_node(p)] = t // 2
        return out

    def mul_pow2(self, u: Marking, x: Marking, reuse_source: bool = False) -> Marking:
        """Marking of value e(u) * 2**e(x).

        With ``reuse_source`` the nodes of ``u`` are rewired in place when ``u``
        is a source; only do this when no other marking shares them.
        """
        if not x:
            return Marking(u) if reuse_source and self.is_source(u) else self.clone_marking(u)
        if reuse_source and self.is_source(u):
            v = Marking(u)
        else:
            v = self.clone_marking(u)
        if not v:
            return v
        xc = self.clone_marking(x)
        for p in v:
            for q, s in xc.items():
                self.add_arc(p, q, s)
        return v

    # -- whole-circuit helpers -------------------------------------------

    def copy(self) -> "PowerCircuit":
        c = PowerCircuit()
        c._next_id = self._next_id
        c.succ = {p: dict(s) for p, s in self.succ.items()}
        c.indeg = dict(self.indeg)
        return c

    def absorb(self, other: "PowerCircuit") -> dict[int, int]:
        """Disjoint union: copy every node of ``other`` in; return the id map."""
        remap: dict[int, int] = {}
        for p in other.topological_order():
            remap[p] = self.add_node({remap[q]: s for q, s in other.succ[p].items()})
        return remap

    def topological_order(self, nodes: Iterable[int] | None = None) -> list[int]:
        """Nodes ordered so that every successor comes before its predecessors.

        With ``nodes`` given, only arcs inside that set are considered.
        """
        pool = set(self.succ) if nodes is None else set(nodes)
        pending = {p: sum(1 for q in self.succ[p] if q in pool) for p in pool}
        preds: dict[int, list[int]] = {p: [] for p in pool}
        for p in pool:
            for q in self.succ[p]:
                if q in pool:
                    preds[q].append(p)
        ready = deque(sorted(p for p, n in pending.items() if n == 0))
        out = []
        while ready:
            q = ready.popleft()
            out.append(q)
            for p in preds[q]:
                pending[p] -= 1
                if pending[p] == 0:
                    ready.append(p)
        if len(out) != len(pool):
            raise ValueError("circuit has a cycle")
        return out

    def is_acyclic(self) -> bool:
        try:
            self.topological_order()
        except ValueError:
            return False
        return True

    def reachable(self, markings: Iterable[Marking]) -> set[int]:
        seen: set[int] = set()
        stack = [p for m in markings for p in m]
        while stack:
            p = stack.pop()
            if p in seen:
                continue
            seen.add(p)
            stack.extend(self.succ[p])
        return seen

    def prune(self, keep: Iterable[Marking]) -> int:
        """Delete every node not reachable from ``keep``; return how many went."""
        live = self.reachable(keep)
        dead = [p for p in self.succ if p not in live]
        # dead nodes only have dead predecessors, so delete top-down
        order = self.topological_order(dead)
        for p in reversed(order):
            self.remove_node(p)
        return len(dead)

    # -- exchange formats ------------------------------------------------

    def to_json(self, markings: dict[str, Marking] | None = None) -> str:
        return json.dumps(self.to_dict(markings), sort_keys=False)

    def to_dict(self, markings: dict[str, Marking] | None = None) -> dict:
        order = self.topological_order()
        return {
            "nodes": [
                {"id": p, "succ": [[q, s] for q, s in sorted(self.succ[p].items())]}
                for p in order
            ],
            "markings": {
                name: [[p, s] for p, s in sorted(m.items())]
                for name, m in (markings or {}).items()
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> tuple["PowerCircuit", dict[str, Marking]]:
        """Rebuild a circuit, keeping the ids used in ``data``."""
        records = {}
        for rec in data.get("nodes", []):
            pid = int(rec["id"])
            if pid in records:
                raise ValueError(f"duplicate node id {pid}")
            records[pid] = {int(q): int(s) for q, s in rec.get("succ", [])}
        c = cls()
        for pid, succ in records.items():
            for q, s in succ.items():
                if q not in records:
                    raise UnknownNode(q)
                if s not in (-1, 0, 1):
                    raise ValueError(f"bad arc sign {s}")
            c.succ[pid] = {q: s for q, s in succ.items() if s}
            c.indeg.setdefault(pid, 0)
        for pid, succ in c.succ.items():
            for q in succ:
                c.indeg[q] = c.indeg.get(q, 0) + 1
        c._next_id = max(records, default=-1) + 1
        if not c.is_acyclic():
            raise ValueError("circuit has a cycle")
        markings = {}
        for name, pairs in data.get("markings", {}).items():
            m = Marking()
            for p, s in pairs:
                p, s = int(p), int(s)
                if p not in c.succ:
                    raise UnknownNode(p)
                if s not in (-1, 0, 1):
                    raise ValueError(f"bad marking sign {s}")
                if s:
                    m[p] = s
            markings[name] = m
        return c, markings

    @classmethod
    def from_json(cls, text: str) -> tuple["PowerCircuit", dict[str, Marking]]:
        return cls.from_dict(json.loads(text))

    def to_dot(self, markings: dict[str, Marking] | None = None) -> str:
        markings = markings or {}
        lines = ["digraph powercircuit {"]
        for p in sorted(self.succ):
            tags = [f"{'+' if m[p] > 0 else '-'}{name}" for name, m in sorted(markings.items()) if m.get(p)]
            label = f"{p}" + (f"\\n{' '.join(tags)}" if tags else "")
            lines.append(f'  n{p} [label="{label}"];')
        for p in sorted(self.succ):
            for q, s in sorted(self.succ[p].items()):
                lines.append(f'  n{p} -> n{q} [label="{"+" if s > 0 else "−"}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def create_circuit() -> PowerCircuit:
    return PowerCircuit()


def binary_basis(c: PowerCircuit, bits: int) -> list[int]:
    """Add nodes P_0..P_{bits-1} with e(P_i) = 2**i; return their ids.

    Each P_i points at the binary expansion of i over the earlier nodes.
    """
    basis: list[int] = []
    for i in range(bits):
        succ = {basis[j]: 1 for j in range(i.bit_length()) if i >> j & 1}
        basis.append(c.add_node(succ))
    return basis


def int_marking(c: PowerCircuit, n: int, basis: list[int] | None = None) -> Marking:
    """Marking of value n over a binary basis (built fresh unless given)."""
    if basis is None:
        basis = binary_basis(c, abs(n).bit_length())
    sign = 1 if n >= 0 else -1
    n = abs(n)
    return Marking({basis[j]: sign for j in range(n.bit_length()) if n >> j & 1})
