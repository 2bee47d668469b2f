"""Small shared builders for the tests."""

from powercircuit.circuit import Marking, PowerCircuit
from powercircuit.oracle import eval_exact


def value(c: PowerCircuit, m):
    ev = eval_exact(c, Marking(m))
    assert ev.ok
    return ev.value


def node_value(c: PowerCircuit, p: int):
    return value(c, {p: 1})
