"""Power circuits and word problems for the Baumslag group and Higman's group."""

from .baumslag import tower_word, wp_baumslag
from .circuit import Marking, PowerCircuit, UnknownNode, create_circuit
from .higman import higman_tower_word, wp_higman
from .reduce import TreeRep, is_power_circuit, make_tree
from .words import Verdict, parse_baumslag, parse_higman

__all__ = [
    "Marking",
    "PowerCircuit",
    "TreeRep",
    "UnknownNode",
    "Verdict",
    "create_circuit",
    "higman_tower_word",
    "is_power_circuit",
    "make_tree",
    "parse_baumslag",
    "parse_higman",
    "tower_word",
    "wp_baumslag",
    "wp_higman",
]
