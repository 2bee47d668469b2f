"""Word problem for the Baumslag group G(1,2) = < a, b | a^(a^b) = a^2 >.

With t = b a b^-1 the group is an HNN extension of BS(1,2) = < a, t | t a t^-1 = a^2 >
with stable letter b, and BS(1,2) is Z[1/2] x| Z.  Words are processed left to
right; everything between two stable letters is one triple [U, X, K] kept in
its own circuit under four invariants:

  i)   U, X, K have pairwise disjoint supports,
  ii)  U is a source,
  iii) every arc into a node of X or K starts in U,
  iv)  an arc from U into X carries the opposite sign of that node in X.

Under these invariants a product of triples needs no new nodes: it only adds
arcs from the left U into the right X and from the right U into the left K.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass

from .circuit import Marking, PowerCircuit, int_marking
from .sdp import Triple, is_identity, reduced_copy, scaled_is_integral
from .words import Verdict, expand, inverse

# b a b^-1 a b a^-1 b^-1 a^-2
RELATOR = [("b", 1), ("a", 1), ("b", -1), ("a", 1), ("b", 1), ("a", -1), ("b", -1), ("a", -2)]
# relators of the presentation over {a, t, b}
RELATORS_ATB = [
    [("t", 1), ("a", 1), ("t", -1), ("a", -2)],
    [("b", 1), ("a", 1), ("b", -1), ("t", -1)],
    RELATOR,
]


class InvariantViolated(AssertionError):
    pass


@dataclass
class BaumslagStats:
    letters: int = 0
    tests: int = 0
    successful_tests: int = 0
    peak_nodes: int = 0
    time_ms: float = 0.0

    def as_dict(self) -> dict:
        return {
            "letters": self.letters,
            "tests": self.tests,
            "successful_tests": self.successful_tests,
            "peak_nodes": self.peak_nodes,
            "time_ms": round(self.time_ms, 3),
        }


def empty_triple() -> Triple:
    return Triple(PowerCircuit(), Marking(), Marking(), Marking())


def _source_marking(c: PowerCircuit, n: int) -> Marking:
    m = int_marking(c, n)
    if not c.is_source(m):
        m = c.clone_marking(m)
        c.prune([m])
    return m


def letter_triple(gen: str, exp: int) -> Triple:
    """a^s -> [s,0,0]; t^s -> [0,s,0] for s < 0 and [0,0,s] otherwise."""
    c = PowerCircuit()
    m = _source_marking(c, exp)
    if gen == "a":
        return Triple(c, m, Marking(), Marking())
    if gen == "t":
        if exp < 0:
            return Triple(c, Marking(), m, Marking())
        return Triple(c, Marking(), Marking(), m)
    raise ValueError(f"not a base letter: {gen}")


def _moved(remap: dict[int, int], m: Marking) -> Marking:
    return Marking({remap[p]: s for p, s in m.items()})


def bs_mul(a: Triple, b: Triple) -> Triple:
    """Product of two triples in disjoint circuits, adding arcs but no nodes.

    Both operands are consumed.
    """
    if len(a.circuit) < len(b.circuit):
        remap = b.circuit.absorb(a.circuit)
        c = b.circuit
        a = Triple(c, *(_moved(remap, m) for m in a.markings()))
    else:
        remap = a.circuit.absorb(b.circuit)
        c = a.circuit
        b = Triple(c, *(_moved(remap, m) for m in b.markings()))
    # u 2^-y: every node of U gains the arcs of -Y
    for p in a.u:
        for q, s in b.x.items():
            c.add_arc(p, q, -s)
    # v 2^k
    for p in b.u:
        for q, s in a.k.items():
            c.add_arc(p, q, s)
    return Triple(c, Marking({**a.u, **b.u}), Marking({**a.x, **b.x}), Marking({**a.k, **b.k}))


def check_invariants(t: Triple) -> list[str]:
    """Names of the violated invariants (empty when all four hold)."""
    bad = []
    su, sx, sk = set(t.u), set(t.x), set(t.k)
    if su & sx or su & sk or sx & sk:
        bad.append("i")
    if not t.circuit.is_source(t.u):
        bad.append("ii")
    targets = sx | sk
    iii = iv = True
    for p, succ in t.circuit.succ.items():
        for q, s in succ.items():
            if q in targets and p not in su:
                iii = False
            if p in su and q in sx and s != -t.x[q]:
                iv = False
    if not iii:
        bad.append("iii")
    if not iv:
        bad.append("iv")
    return bad


def try_t_to_a(t: Triple) -> Triple | None:
    """b^-1 T b with T = t^z is a^z; None unless u = 0."""
    tree, r, _ = reduced_copy(t)
    if r.u:
        return None
    c = t.circuit
    for p in t.u:
        c.remove_node(p)
    # X and K are sources now by invariant iii
    return Triple(c, Marking({**t.x, **t.k}), Marking(), Marking())


def try_a_to_t(t: Triple) -> Triple | None:
    """b T b^-1 with T = a^z is t^z; None unless x + k = 0 and u 2^x is an integer.

    The result is rebuilt from the reduced copy: z = u 2^x is realized by
    clones of the compact U pointing at a clone of X, which is a source.
    """
    tree, r, _ = reduced_copy(t)
    if tree.sign_of(tree_sum(r.x, r.k), check=False) != 0:
        return None
    if not scaled_is_integral(tree, r.u, r.x):
        return None
    c = r.circuit
    sign = tree.sign_of(r.u, check=False)
    z = c.mul_pow2(r.u, r.x)
    c.prune([z])
    if sign < 0:
        return Triple(c, Marking(), z, Marking())
    return Triple(c, Marking(), Marking(), z)


def tree_sum(x: Marking, k: Marking) -> dict[int, int]:
    """Coefficients of x + k; a node may end up with coefficient +-2."""
    out = dict(x)
    for p, s in k.items():
        out[p] = out.get(p, 0) + s
    return {p: s for p, s in out.items() if s}


class BaumslagSolver:
    def __init__(self, check: bool | None = None):
        self.stats = BaumslagStats()
        if check is None:
            check = bool(os.environ.get("POWERCIRCUIT_STRICT"))
        self.check = check

    def _assert(self, t: Triple) -> None:
        if self.check:
            bad = check_invariants(t)
            if bad:
                raise InvariantViolated(f"invariants {bad} broken")

    def _track(self, head: Triple, stack: list) -> None:
        live = len(head.circuit) + sum(len(t.circuit) for _, t in stack)
        self.stats.peak_nodes = max(self.stats.peak_nodes, live)

    def reduce(self, word: list[tuple[str, int]]) -> tuple[Triple, list[tuple[int, Triple]]]:
        """Britton-reduce ``word``: a head triple and a list of (b^+-1, triple) segments."""
        head = empty_triple()
        stack: list[tuple[int, Triple]] = []

        def top() -> Triple:
            return stack[-1][1] if stack else head

        def set_top(t: Triple) -> None:
            nonlocal head
            if stack:
                stack[-1] = (stack[-1][0], t)
            else:
                head = t

        for gen, exp in word:
            if gen in ("a", "t"):
                self.stats.letters += abs(exp)
                set_top(bs_mul(top(), letter_triple(gen, exp)))
                self._assert(top())
            elif gen == "b":
                for g, e in expand([(gen, exp)]):
                    self.stats.letters += 1
                    self._stable(e, stack, top, set_top)
            else:
                raise ValueError(f"unknown generator {gen!r}")
            self._track(head, stack)
        return head, stack

    def _stable(self, e: int, stack, top, set_top) -> None:
        if stack and stack[-1][0] == -e:
            seg = stack[-1][1]
            self.stats.tests += 1
            # b T b^-1 when the open letter is b and e = -1
            out = try_a_to_t(seg) if e == -1 else try_t_to_a(seg)
            if out is not None:
                self.stats.successful_tests += 1
                stack.pop()
                set_top(bs_mul(top(), out))
                self._assert(top())
                return
        stack.append((e, empty_triple()))

    def solve(self, word: list[tuple[str, int]]) -> Verdict:
        t0 = time.perf_counter()
        head, stack = self.reduce(word)
        if stack:
            verdict = Verdict.NONTRIVIAL
        else:
            verdict = Verdict.TRIVIAL if is_identity(head) else Verdict.NONTRIVIAL
        self.stats.time_ms = (time.perf_counter() - t0) * 1000
        return verdict


def wp_baumslag(word: list[tuple[str, int]], stats: BaumslagStats | None = None,
                check: bool | None = None) -> Verdict:
    """Trivial or Nontrivial; ``check`` asserts the invariants after every step."""
    solver = BaumslagSolver(check)
    verdict = solver.solve(word)
    if stats is not None:
        stats.__dict__.update(solver.stats.__dict__)
    return verdict


def tower_word(n: int) -> list[tuple[str, int]]:
    """T(0) = t and T(n+1) = b T(n) a T(n)^-1 b^-1; it equals t^tow(n)."""
    w = [("t", 1)]
    for _ in range(n):
        w = [("b", 1)] + w + [("a", 1)] + inverse(w) + [("b", -1)]
    return w


def tower_commutator(n: int) -> list[tuple[str, int]]:
    """t T(n) t^-1 T(n)^-1, trivial for every n."""
    tn = tower_word(n)
    return [("t", 1)] + tn + [("t", -1)] + inverse(tn)
