"""Deterministic benchmark families.

Each row reports ``size, time_ms, peak_nodes, ops``.  What ``ops`` counts
depends on the family:

* baumslag-tower-commutator: pinch tests of the Britton reduction on t T(n) t^-1 T(n)^-1
* higman-tower-identity: basic operations on a2 w(1,n) a2^-1 w(1,n)^-2
* maketree-random: potential (chains x nodes) after reducing a random
  positive-arc circuit with ``size`` nodes
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import asdict, dataclass

FAMILIES = ("baumslag-tower-commutator", "higman-tower-identity", "maketree-random")
COLUMNS = ("size", "time_ms", "peak_nodes", "ops")


@dataclass
class Row:
    size: int
    time_ms: float
    peak_nodes: int
    ops: int


def input_length(family: str, size: int) -> int:
    """Letters (or nodes) of the instance; the x axis of the scaling plot."""
    if family == "baumslag-tower-commutator":
        from .baumslag import tower_commutator
        return len(tower_commutator(size))
    if family == "higman-tower-identity":
        from .higman import tower_identity
        return len(tower_identity(1, size))
    return size


def run_one(family: str, size: int, seed: int = 0) -> Row:
    if family == "baumslag-tower-commutator":
        from .baumslag import BaumslagStats, tower_commutator, wp_baumslag
        from .words import Verdict

        word = tower_commutator(size)
        st = BaumslagStats()
        t0 = time.perf_counter()
        verdict = wp_baumslag(word, st, check=False)
        ms = (time.perf_counter() - t0) * 1000
        assert verdict is Verdict.TRIVIAL
        return Row(size, ms, st.peak_nodes, st.tests)
    if family == "higman-tower-identity":
        from .higman import HigmanStats, tower_identity, wp_higman
        from .words import Verdict

        word = tower_identity(1, size)
        st = HigmanStats()
        t0 = time.perf_counter()
        verdict = wp_higman(word, st)
        ms = (time.perf_counter() - t0) * 1000
        assert verdict is Verdict.TRIVIAL
        return Row(size, ms, st.peak_nodes, st.basic_ops)
    if family == "maketree-random":
        from .oracle import gen_random_circuit
        from .reduce import make_tree

        density = min(1.0, 3.0 / max(size, 1))
        c = gen_random_circuit(seed + size, size, density, signs=(1,))
        t0 = time.perf_counter()
        tree = make_tree(c)
        ms = (time.perf_counter() - t0) * 1000
        assert tree is not None
        return Row(size, ms, len(c), tree.chain_stats().potential)
    raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def bench(family: str, sizes, seed: int = 0) -> list[Row]:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    return [run_one(family, n, seed) for n in sizes]


def to_csv(rows: list[Row]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        d = asdict(r)
        d["time_ms"] = f"{r.time_ms:.3f}"
        w.writerow(d)
    return buf.getvalue()


DEFAULT_SIZES = {
    "baumslag-tower-commutator": list(range(1, 11)),
    "higman-tower-identity": list(range(1, 9)),
    "maketree-random": [25, 50, 100, 200, 400],
}
