"""Shared test elements and small constructors."""

from aaut.element import Element, TreePair
from aaut.tree import TreeParams, parse_address

T22 = TreeParams(2, 2)
T33 = TreeParams(3, 3)
T23 = TreeParams(2, 3)


def leaf_map(text: str) -> dict:
    """``"0:00 10:01"`` -> {(0,): (0, 0), (1, 0): (0, 1)}."""
    out = {}
    for item in text.split():
        src, dst = item.split(":")
        out[parse_address(src)] = parse_address(dst)
    return out


def el(params: TreeParams, text: str) -> Element:
    return Element.from_mapping(params, leaf_map(text))


def pair(params: TreeParams, text: str) -> TreePair:
    return TreePair.from_mapping(params, leaf_map(text))


X = el(T22, "0:00 10:01 11:1")
SWAP = el(T22, "0:1 1:0")
DSWAP = el(T22, "00:01 01:00 10:11 11:10")
ID = Element.identity(T22)
A_TWIST = el(T22, "000:001 001:000 01:01 1:1")
AV = el(T22, "00:001 01:000 10:01 11:1")
G1 = el(T22, "00:01 01:00 10:100 110:101 111:11")
P0 = pair(T22, "00:10 01:11 1:0")
# a 2-cycle on one ball next to a fixed ball
SWAP_FIX = el(T22, "00:01 01:00 1:1")
THREE_CYCLE = el(T22, "000:001 001:01 01:000 1:1")

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}
