"""The group Z[1/2] x| Z with the partial swap (r, m) -> (m, r), over power circuits.

An element is stored as a triple of markings [U, X, K] with e(X) <= 0 <= e(K),
standing for the pair (u * 2**x, x + k).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .circuit import Marking, PowerCircuit, int_marking
from .oracle import DEFAULT_BIT_BUDGET, Evaluator
from .reduce import Order, TreeRep, make_tree


class SwapUndefined(ArithmeticError):
    """Swap applied to a pair whose first component is not an integer."""


class MalformedProgram(ValueError):
    pass


class NotAPowerCircuit(ValueError):
    pass


@dataclass
class Triple:
    circuit: PowerCircuit
    u: Marking
    x: Marking
    k: Marking

    def markings(self) -> list[Marking]:
        return [self.u, self.x, self.k]

    def inverse(self) -> "Triple":
        # t^x a^u t^k inverted is t^-k a^-u t^-x
        return Triple(self.circuit, self.u.negated(), self.k.negated(), self.x.negated())

    def size(self) -> int:
        return len(self.circuit)

    def pair(self, bit_budget: int = DEFAULT_BIT_BUDGET) -> tuple[Fraction, int] | None:
        """Exact (u * 2**x, x + k), or None when too large to write down."""
        ev = Evaluator(self.circuit, bit_budget)
        u, x, k = (ev.evaluate(m) for m in self.markings())
        if not (u.ok and x.ok and k.ok):
            return None
        xv = int(x.value)
        if abs(xv) > bit_budget:
            return None
        return u.value * Fraction(2) ** xv, int(x.value + k.value)

    def disjoint(self) -> bool:
        su, sx, sk = self.u.keys(), self.x.keys(), self.k.keys()
        return not (su & sx or su & sk or sx & sk)


def identity_triple() -> Triple:
    return Triple(PowerCircuit(), Marking(), Marking(), Marking())


def int_to_triple(n: int) -> tuple[PowerCircuit, Triple]:
    """The triple [n, 0, 0] over a binary-basis circuit."""
    c = PowerCircuit()
    u = int_marking(c, n)
    return c, Triple(c, u, Marking(), Marking())


def pair_to_triple(r: int, m: int) -> Triple:
    """Triple for the integer pair (r, m); U and X/K sit on separate bases."""
    c = PowerCircuit()
    u = int_marking(c, r)
    e = int_marking(c, m)
    if m >= 0:
        return Triple(c, u, Marking(), e)
    # [r * 2**-m, m, 0]
    return Triple(c, c.mul_pow2(u, e.negated()), e, Marking())


def _same_circuit(a: Triple, b: Triple) -> tuple[PowerCircuit, Triple]:
    if a.circuit is b.circuit:
        return a.circuit, b
    remap = a.circuit.absorb(b.circuit)
    moved = [Marking({remap[p]: s for p, s in m.items()}) for m in b.markings()]
    return a.circuit, Triple(a.circuit, *moved)


def triple_mul(a: Triple, b: Triple) -> Triple:
    """[u,x,k] * [v,y,l] = [u 2^-y + v 2^k, x + y, k + l].

    ``b``'s circuit is merged into ``a``'s; both operands should be treated as
    consumed afterwards.
    """
    c, b = _same_circuit(a, b)
    left = c.mul_pow2(a.u, b.x.negated())
    right = c.mul_pow2(b.u, a.k)
    u = c.add_markings(left, right)
    x = c.add_markings(a.x, b.x)
    k = c.add_markings(a.k, b.k)
    if x.keys() & k.keys():
        k = c.clone_marking(k)
    return Triple(c, u, x, k)


def reduced_copy(t: Triple, extra: Iterable[Marking] = ()) -> tuple[TreeRep, Triple, list[Marking]]:
    """Tree representation of a pruned copy of ``t``'s circuit.

    Raises NotAPowerCircuit when the copy fails the integrality test.
    """
    c = t.circuit.copy()
    marks = [Marking(m) for m in t.markings()]
    more = [Marking(m) for m in extra]
    c.prune(marks + more)
    tree = make_tree(c, marks + more)
    if tree is None:
        raise NotAPowerCircuit("triple circuit has a non-integral node")
    return tree, Triple(c, *marks), more


def lowest_node(tree: TreeRep, m: Marking) -> int:
    return min(m, key=tree.label.__getitem__)


def scaled_is_integral(tree: TreeRep, u: Marking, x: Marking) -> bool:
    """u * 2**x in Z, for compact u and x (x may be negative)."""
    if not u:
        return True
    low = tree.succ(lowest_node(tree, u))
    return tree.compare(low, x.negated(), check=False)[0] != Order.LESS


def triple_swap(t: Triple) -> Triple:
    """s(r, m) = (m, r) for integer r; the result lives in a fresh reduced circuit."""
    tree, r, _ = reduced_copy(t)
    if not scaled_is_integral(tree, r.u, r.x):
        raise SwapUndefined("first component is not an integer")
    c = r.circuit
    zsign = tree.sign_of(r.u, check=False)
    z = c.mul_pow2(r.u, r.x)
    s = c.add_markings(r.x, r.k)
    if zsign >= 0:
        return Triple(c, s, Marking(), z)
    return Triple(c, c.mul_pow2(s, z.negated()), z, Marking())


def is_identity(t: Triple) -> bool:
    c = t.circuit.copy()
    u = Marking(t.u)
    xk = c.add_markings(t.x, t.k)
    c.prune([u, xk])
    tree = make_tree(c, [u, xk])
    if tree is None:
        raise NotAPowerCircuit("triple circuit has a non-integral node")
    return not u and not xk


# -- straight-line programs ---------------------------------------------------


@dataclass(frozen=True)
class Instr:
    op: str
    r: int = 0
    m: int = 0

    def __str__(self) -> str:
        return f"lit {self.r} {self.m}" if self.op == "lit" else self.op


def parse_program(text: str) -> list[Instr]:
    prog = []
    for lineno, raw in enumerate(text.replace(";", "\n").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        op = toks[0].lower()
        if op == "lit":
            if len(toks) != 3:
                raise MalformedProgram(f"line {lineno}: lit takes two integers")
            try:
                prog.append(Instr("lit", int(toks[1], 0), int(toks[2], 0)))
            except ValueError:
                raise MalformedProgram(f"line {lineno}: bad integer") from None
        elif op in ("mul", "swap") and len(toks) == 1:
            prog.append(Instr(op))
        else:
            raise MalformedProgram(f"line {lineno}: cannot parse {raw!r}")
    check_program(prog)
    return prog


def check_program(prog: list[Instr]) -> None:
    depth = 0
    for i, ins in enumerate(prog):
        if ins.op == "lit":
            depth += 1
        elif ins.op == "mul":
            if depth < 2:
                raise MalformedProgram(f"instruction {i}: mul needs two operands")
            depth -= 1
        elif ins.op == "swap":
            if depth < 1:
                raise MalformedProgram(f"instruction {i}: swap needs an operand")
        else:
            raise MalformedProgram(f"instruction {i}: unknown op {ins.op}")
    if depth != 1:
        raise MalformedProgram(f"program leaves {depth} values on the stack")


@dataclass
class SdpStats:
    swaps: int = 0
    muls: int = 0
    peak_nodes: int = 0


def wp_sdp(prog: list[Instr], stats: SdpStats | None = None) -> Triple:
    """Evaluate a postfix program; raises SwapUndefined on an illegal swap."""
    check_program(prog)
    stats = stats if stats is not None else SdpStats()
    stack: list[Triple] = []
    for ins in prog:
        if ins.op == "lit":
            stack.append(pair_to_triple(ins.r, ins.m))
        elif ins.op == "mul":
            b = stack.pop()
            a = stack.pop()
            stack.append(triple_mul(a, b))
            stats.muls += 1
        else:
            stack.append(triple_swap(stack.pop()))
            stats.swaps += 1
        stats.peak_nodes = max(stats.peak_nodes, sum(len(t.circuit) for t in {id(t.circuit): t for t in stack}.values()))
    return stack[0]


def sdp_equal(p1: list[Instr], p2: list[Instr]) -> bool:
    a = wp_sdp(p1)
    b = wp_sdp(p2)
    return is_identity(triple_mul(a, b.inverse()))


def tower_ladder(n: int) -> list[Instr]:
    """Program evaluating to (0, tow(n)) by repeated conjugation and swapping."""
    up = [Instr("lit", 1, 0), Instr("swap")]
    down = [Instr("lit", -1, 0), Instr("swap")]
    for _ in range(n):
        up, down = (
            up + [Instr("lit", 1, 0), Instr("mul")] + down + [Instr("mul"), Instr("swap")],
            up + [Instr("lit", -1, 0), Instr("mul")] + down + [Instr("mul"), Instr("swap")],
        )
    return up


def format_pair(t: Triple, bit_budget: int = 64) -> str | None:
    """``(u*2^x, m)`` with decimal components, or None if they do not fit 64 bits."""
    pair = t.pair(bit_budget=max(bit_budget, 64))
    if pair is None:
        return None
    r, m = pair
    if r.numerator.bit_length() > 64 or m.bit_length() > 64:
        return None
    if r.denominator == 1:
        return f"({r.numerator}, {m})"
    return f"({r.numerator}*2^-{r.denominator.bit_length() - 1}, {m})"
