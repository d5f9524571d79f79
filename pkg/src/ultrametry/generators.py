"""Constructors for ultrametric spaces: dendrograms, seeded random spaces,
the max-of-the-pair construction, and two named test spaces."""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import InputError
from .rationals import format_rational, parse_rational
from .spaces import FiniteUltrametricSpace


def stable_seed(seed) -> int:
    """Derive a process-independent integer seed from any printable value."""
    if isinstance(seed, int):
        return seed
    digest = hashlib.sha256(repr(seed).encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class Leaf:
    label: str


@dataclass(frozen=True)
class Node:
    """Internal dendrogram node; its level is the distance between points
    separated here.  Levels strictly decrease from root to leaf."""

    level: Fraction
    children: tuple["Dendrogram", ...]

    def __post_init__(self) -> None:
        if self.level <= 0:
            raise InputError("dendrogram levels must be positive")
        if len(self.children) < 2:
            raise InputError("internal dendrogram nodes need at least two children")
        for child in self.children:
            if isinstance(child, Node) and child.level >= self.level:
                raise InputError("dendrogram levels must strictly decrease toward the leaves")


Dendrogram = Union[Leaf, Node]


def dendrogram_to_space(root: Dendrogram) -> FiniteUltrametricSpace:
    """Distance between two leaves = level of their lowest common ancestor."""
    leaves: list[str] = []

    def collect(node: Dendrogram) -> None:
        if isinstance(node, Leaf):
            leaves.append(node.label)
        else:
            for child in node.children:
                collect(child)

    collect(root)
    if len(set(leaves)) != len(leaves):
        raise InputError("dendrogram leaf labels must be unique")
    n = len(leaves)
    matrix = [[Fraction(0)] * n for _ in range(n)]
    cursor = 0

    def fill(node: Dendrogram) -> tuple[int, int]:
        nonlocal cursor
        if isinstance(node, Leaf):
            cursor += 1
            return cursor - 1, cursor
        spans = [fill(child) for child in node.children]
        for x in range(len(spans)):
            for y in range(x + 1, len(spans)):
                for i in range(spans[x][0], spans[x][1]):
                    for j in range(spans[y][0], spans[y][1]):
                        matrix[i][j] = matrix[j][i] = node.level
        return spans[0][0], spans[-1][1]

    fill(root)
    return FiniteUltrametricSpace(tuple(leaves), tuple(tuple(row) for row in matrix))


def random_space(n: int, seed, level_pool: Sequence[Fraction]) -> FiniteUltrametricSpace:
    """Seeded random dendrogram space on points x1..xn.

    Each node splits its block into a uniformly random composition of at
    least two sub-blocks; the node at depth d takes the d-th largest pool
    level.  When the recursion outruns the pool, the smallest level keeps
    halving, so levels still strictly decrease.
    """
    if n < 1:
        raise InputError("need at least one point")
    pool = sorted(set(Fraction(v) for v in level_pool), reverse=True)
    if not pool:
        raise InputError("level pool must be nonempty")
    if pool[-1] <= 0:
        raise InputError("levels must be positive")
    rng = random.Random(stable_seed(seed))
    labels = [f"x{i + 1}" for i in range(n)]

    def level_at(depth: int) -> Fraction:
        if depth < len(pool):
            return pool[depth]
        return pool[-1] / 2 ** (depth - len(pool) + 1)

    def build(block: list[str], depth: int) -> Dendrogram:
        if len(block) == 1:
            return Leaf(block[0])
        while True:
            cuts = [i for i in range(1, len(block)) if rng.random() < 0.5]
            if cuts:
                break
        bounds = [0, *cuts, len(block)]
        parts = [block[a:b] for a, b in zip(bounds, bounds[1:])]
        return Node(level_at(depth), tuple(build(part, depth + 1) for part in parts))

    return dendrogram_to_space(build(labels, 0))


def max_space(values: Sequence[Fraction]) -> FiniteUltrametricSpace:
    """Points labelled by distinct positive rationals, d(x, y) = max(x, y)."""
    vals = [Fraction(v) for v in values]
    if len(set(vals)) != len(vals):
        raise InputError("values must be distinct")
    if any(v <= 0 for v in vals):
        raise InputError("values must be positive")
    labels = tuple(format_rational(v) for v in vals)
    rows = tuple(
        tuple(Fraction(0) if i == j else max(vals[i], vals[j]) for j in range(len(vals)))
        for i in range(len(vals))
    )
    return FiniteUltrametricSpace(labels, rows)


def ex530_pair(n: int) -> tuple[FiniteUltrametricSpace, FiniteUltrametricSpace]:
    """Two weakly similar spaces on the points 1, 1/2, ..., 1/n.

    The first carries d(x, y) = max(x^2, y^2), the second
    delta(x, y) = 1 + max(x, y); the identity is a weak similarity between
    them with scaling t -> (t - 1)^2 on the nonzero distances.
    """
    if n < 2:
        raise InputError("need at least two points")
    pts = [Fraction(1, i + 1) for i in range(n)]
    labels = tuple(format_rational(p) for p in pts)
    d_rows = tuple(
        tuple(Fraction(0) if i == j else max(pts[i], pts[j]) ** 2 for j in range(n))
        for i in range(n)
    )
    delta_rows = tuple(
        tuple(Fraction(0) if i == j else 1 + max(pts[i], pts[j]) for j in range(n))
        for i in range(n)
    )
    return (
        FiniteUltrametricSpace(labels, d_rows),
        FiniteUltrametricSpace(labels, delta_rows),
    )


def p532_counterexample(a: Fraction, b: Fraction) -> FiniteUltrametricSpace:
    """Three points with one short side a and two long sides b, 0 < a < b.

    Composing with any increasing f that merges f(a) = f(b) collapses the
    distance count from 3 to 2, which rules out any weak similarity between
    the space and its image.
    """
    if not (0 < a < b):
        raise InputError("need 0 < a < b")
    zero = Fraction(0)
    rows = ((zero, a, b), (a, zero, b), (b, b, zero))
    return FiniteUltrametricSpace(("x1", "x2", "x3"), rows)


# ---------------------------------------------------------------------------
# Dendrogram JSON: {"level": "2", "children": [...]} / {"leaf": "x1"}
# ---------------------------------------------------------------------------


def dendrogram_to_json(node: Dendrogram) -> dict:
    if isinstance(node, Leaf):
        return {"leaf": node.label}
    return {
        "level": format_rational(node.level),
        "children": [dendrogram_to_json(child) for child in node.children],
    }


def dendrogram_from_json(obj: dict) -> Dendrogram:
    if not isinstance(obj, dict):
        raise InputError("dendrogram JSON must be an object")
    if "leaf" in obj:
        if not isinstance(obj["leaf"], str):
            raise InputError("leaf label must be a string")
        return Leaf(obj["leaf"])
    try:
        level = parse_rational(obj["level"])
        children = obj["children"]
    except (KeyError, TypeError):
        raise InputError("dendrogram node needs 'level' and 'children'") from None
    return Node(level, tuple(dendrogram_from_json(child) for child in children))


def load_dendrogram(path: str) -> Dendrogram:
    with open(path, encoding="utf-8") as fh:
        return dendrogram_from_json(json.load(fh))
