"""Exhaustive generation of labeled 1-2 trees and exact census statistics.

This module is the ground-truth oracle for everything else: it builds
every tree of a given size explicitly, walks each vertex, and aggregates
exact integer statistics.  Sizes are capped (default 10) because the
counts grow factorially; the refusal message quotes the exact count.

Internal representation: a tree on a label set is a nested tuple
(label, children) with children a tuple of subtrees.  Labels increase
toward the root, so the root of a tree on labels L is max(L).  Non-plane
trees are kept canonical by ordering a sibling pair so that the subtree
containing the smaller minimum label comes first; the generator produces
exactly one representative per unordered pair this way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Mapping

from .constants import Enclosure, iv_enclosure, sqrt_weighted_sum
from .series import tree_counts
from .variety import TreeVariety

DEFAULT_ENUM_LIMIT = 10

Node = tuple  # (label, tuple of Node)


class SizeLimitError(ValueError):
    """Requested size exceeds the configured exhaustive-enumeration cap."""

    def __init__(self, variety: TreeVariety, n: int, limit: int):
        count = tree_counts(variety, n)[n]
        super().__init__(
            f"refusing to enumerate {variety} trees of size {n} (limit {limit}): "
            f"there are exactly {count} of them"
        )
        self.count = count
        self.limit = limit


def _relabel(node: Node, labels: tuple[int, ...]) -> Node:
    lab, children = node
    return (labels[lab - 1], tuple(_relabel(c, labels) for c in children))


@lru_cache(maxsize=None)
def _canonical_trees(variety: TreeVariety, size: int) -> tuple[Node, ...]:
    """All trees on labels 1..size, materialized once per size."""
    return tuple(_generate(variety, tuple(range(1, size + 1))))


def _generate(variety: TreeVariety, labels: tuple[int, ...]) -> Iterator[Node]:
    """Stream every tree on the given sorted label tuple."""
    root = labels[-1]
    rest = labels[:-1]
    m = len(rest)
    if m == 0:
        yield (root, ())
        return
    identity = rest == tuple(range(1, m + 1))
    for sub in _canonical_trees(variety, m):
        yield (root, ((sub if identity else _relabel(sub, rest)),))
    if m < 2:
        return
    if variety is TreeVariety.PLANE:
        # Ordered sibling pairs: the first child takes any nonempty proper
        # label subset, the second takes the complement.
        for j in range(1, m):
            for a_set in combinations(rest, j):
                chosen = set(a_set)
                b_set = tuple(x for x in rest if x not in chosen)
                for ta in _canonical_trees(variety, j):
                    ra = _relabel(ta, a_set)
                    for tb in _canonical_trees(variety, m - j):
                        yield (root, (ra, _relabel(tb, b_set)))
    else:
        # Unordered pairs, one representative each: the subtree holding the
        # smallest remaining label is generated as the first child.
        head, pool = rest[0], rest[1:]
        for j in range(1, m):
            for a_tail in combinations(pool, j - 1):
                a_set = (head,) + a_tail
                chosen = set(a_set)
                b_set = tuple(x for x in rest if x not in chosen)
                for ta in _canonical_trees(variety, j):
                    ra = _relabel(ta, a_set)
                    for tb in _canonical_trees(variety, m - j):
                        yield (root, (ra, _relabel(tb, b_set)))


class LabeledTree:
    """A single labeled 1-2 tree, wrapping the canonical nested-tuple form."""

    __slots__ = ("_node", "_n")

    def __init__(self, node: Node, size: int | None = None):
        self._node = node
        self._n = size if size is not None else _node_size(node)

    @property
    def n(self) -> int:
        return self._n

    @property
    def root_label(self) -> int:
        return self._node[0]

    def parent_array(self) -> tuple[int, ...]:
        """parent_array()[v] is the parent label of v; the root maps to 0.

        Index 0 is unused padding so labels index directly.
        """
        parents = [0] * (self._n + 1)

        def walk(node: Node) -> None:
            lab, children = node
            for child in children:
                parents[child[0]] = lab
                walk(child)

        walk(self._node)
        return tuple(parents)

    def children(self, label: int) -> tuple[int, ...]:
        node = self._find(self._node, label)
        if node is None:
            raise KeyError(f"no vertex labeled {label}")
        return tuple(c[0] for c in node[1])

    def _find(self, node: Node, label: int) -> Node | None:
        if node[0] == label:
            return node
        for child in node[1]:
            if label <= child[0]:  # labels in a subtree never exceed its root
                found = self._find(child, label)
                if found is not None:
                    return found
        return None

    def as_tuple(self) -> Node:
        return self._node

    def to_text(self) -> str:
        """Nested-parentheses dump, plane order preserved: 4(3(1)(2))."""

        def fmt(node: Node) -> str:
            lab, children = node
            return str(lab) + "".join(f"({fmt(c)})" for c in children)

        return fmt(self._node)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledTree):
            return NotImplemented
        return self._node == other._node

    def __hash__(self) -> int:
        return hash(self._node)

    def __repr__(self) -> str:
        return f"LabeledTree({self.to_text()})"


def _node_size(node: Node) -> int:
    return 1 + sum(_node_size(c) for c in node[1])


def enumerate_trees(
    variety: TreeVariety, n: int, limit: int = DEFAULT_ENUM_LIMIT
) -> Iterator[LabeledTree]:
    """Every labeled 1-2 tree of the variety on 1..n, each exactly once."""
    if n < 1:
        raise ValueError("tree size must be at least 1")
    if n > limit:
        raise SizeLimitError(variety, n, limit)
    for node in _generate(variety, tuple(range(1, n + 1))):
        yield LabeledTree(node, n)


@dataclass(frozen=True)
class Census:
    """Exact aggregates over all (vertex, tree) pairs at one size.

    rank_totals[k] counts vertices of rank k; size_totals[r] counts
    vertices whose subtree has exactly r vertices; joint_totals[(k, r)]
    requires both at once.  root_rank_counts[k] counts whole trees by the
    rank of their root.  The sqrt-subtree-size data is size_totals itself,
    kept exact and evaluated only through enclosures.
    """

    variety: TreeVariety
    n: int
    tree_count: int
    rank_totals: tuple[int, ...]
    size_totals: tuple[int, ...]  # index r in 1..n; index 0 unused
    joint_totals: Mapping[tuple[int, int], int]
    root_rank_counts: tuple[int, ...]
    leaf_total: int
    one_child_total: int
    two_child_total: int

    @property
    def vertex_pairs(self) -> int:
        return self.n * self.tree_count

    def rank_prob(self, k: int) -> Fraction:
        total = self.rank_totals[k] if k < len(self.rank_totals) else 0
        return Fraction(total, self.vertex_pairs)

    def size_prob(self, r: int) -> Fraction:
        total = self.size_totals[r] if r < len(self.size_totals) else 0
        return Fraction(total, self.vertex_pairs)

    def joint_prob(self, k: int, r: int) -> Fraction:
        return Fraction(self.joint_totals.get((k, r), 0), self.vertex_pairs)

    @property
    def mean_leaves(self) -> Fraction:
        return Fraction(self.leaf_total, self.tree_count)

    @property
    def mean_one_child(self) -> Fraction:
        return Fraction(self.one_child_total, self.tree_count)

    def sqrt_size_mean(self, digits: int = 15) -> Enclosure:
        """Enclosure of the expected sqrt(subtree size) per vertex pair."""
        terms = {r: self.size_totals[r] for r in range(1, self.n + 1)}
        total = sqrt_weighted_sum(terms, digits + 6)
        scale = Fraction(1, self.vertex_pairs)
        return Enclosure(total.lo * scale, total.hi * scale, digits)

    def size_tail_prob(self, threshold: int) -> Fraction:
        """Probability that a vertex's subtree exceeds the threshold size."""
        tail = sum(self.size_totals[r] for r in range(threshold + 1, self.n + 1))
        return Fraction(tail, self.vertex_pairs)

    def _validate(self) -> None:
        pairs = self.vertex_pairs
        assert sum(self.rank_totals) == pairs
        assert sum(self.size_totals) == pairs
        assert self.rank_totals[0] == self.leaf_total
        assert self.size_totals[1] == self.leaf_total
        assert self.leaf_total - self.two_child_total == self.tree_count
        assert self.leaf_total + self.one_child_total + self.two_child_total == pairs
        assert sum(self.root_rank_counts) == self.tree_count
        for k in range(len(self.rank_totals)):
            assert sum(v for (kk, _), v in self.joint_totals.items() if kk == k) == \
                self.rank_totals[k]
        for r in range(1, self.n + 1):
            assert sum(v for (_, rr), v in self.joint_totals.items() if rr == r) == \
                self.size_totals[r]


@lru_cache(maxsize=None)
def census(variety: TreeVariety, n: int, limit: int = DEFAULT_ENUM_LIMIT) -> Census:
    """Full enumeration pass with per-vertex rank and subtree-size stats."""
    if n < 1:
        raise ValueError("tree size must be at least 1")
    if n > limit:
        raise SizeLimitError(variety, n, limit)
    rank_totals = [0] * n
    size_totals = [0] * (n + 1)
    joint: dict[tuple[int, int], int] = {}
    root_ranks = [0] * n
    leaf = one = two = 0
    count = 0

    def walk(node: Node) -> tuple[int, int]:
        nonlocal leaf, one, two
        children = node[1]
        if not children:
            size, rank = 1, 0
            leaf += 1
        elif len(children) == 1:
            s, r = walk(children[0])
            size, rank = s + 1, r + 1
            one += 1
        else:
            s1, r1 = walk(children[0])
            s2, r2 = walk(children[1])
            size, rank = s1 + s2 + 1, 1 + min(r1, r2)
            two += 1
        # Rank/size sanity: rank 0 exactly for one-vertex subtrees.
        assert (rank == 0) == (size == 1)
        rank_totals[rank] += 1
        size_totals[size] += 1
        key = (rank, size)
        joint[key] = joint.get(key, 0) + 1
        return size, rank

    for node in _generate(variety, tuple(range(1, n + 1))):
        count += 1
        _, root_rank = walk(node)
        root_ranks[root_rank] += 1

    result = Census(
        variety=variety,
        n=n,
        tree_count=count,
        rank_totals=tuple(rank_totals),
        size_totals=tuple(size_totals),
        joint_totals=joint,
        root_rank_counts=tuple(root_ranks),
        leaf_total=leaf,
        one_child_total=one,
        two_child_total=two,
    )
    result._validate()
    return result


# ---------------------------------------------------------------------------
# Plane statistics from the non-plane enumeration
#
# A non-plane tree with s one-child vertices has (n-1-s)/2 two-child
# vertices and corresponds to exactly 2^((n-1-s)/2) plane trees, so plane
# averages are weighted non-plane averages.


def _onechild_weight_data(n: int, limit: int) -> tuple[Fraction, int]:
    if n < 1:
        raise ValueError("tree size must be at least 1")
    if n > limit:
        raise SizeLimitError(TreeVariety.NONPLANE, n, limit)
    num = 0
    den = 0

    def onechild_count(node: Node) -> int:
        children = node[1]
        return (1 if len(children) == 1 else 0) + sum(onechild_count(c) for c in children)

    for node in _generate(TreeVariety.NONPLANE, tuple(range(1, n + 1))):
        s = onechild_count(node)
        exponent, parity = divmod(n - 1 - s, 2)
        assert parity == 0
        weight = 1 << exponent
        num += s * weight
        den += weight
    return (Fraction(num, den) if den else Fraction(0)), den


def weighted_onechild_mean(n: int, limit: int = DEFAULT_ENUM_LIMIT) -> Fraction:
    """Plane-variety mean one-child count computed from non-plane trees."""
    return _onechild_weight_data(n, limit)[0]


def plane_multiplicity_total(n: int, limit: int = DEFAULT_ENUM_LIMIT) -> int:
    """Sum of the plane multiplicities 2^((n-1-s)/2); equals the plane count."""
    return _onechild_weight_data(n, limit)[1]


# ---------------------------------------------------------------------------
# Inequality checks


@dataclass(frozen=True)
class InequalityCheck:
    name: str
    n: int
    holds: bool
    detail: str


@dataclass(frozen=True)
class InequalityReport:
    variety: TreeVariety
    n: int
    checks: tuple[InequalityCheck, ...] = field(default_factory=tuple)

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)

    def failures(self) -> list[InequalityCheck]:
        return [c for c in self.checks if not c.holds]


def _sqrt_bound_holds(cen: Census, digits: int) -> tuple[bool, str]:
    """E(sqrt(Z_n)) <= 100 - 90/sqrt(n), via enclosures with widening retries."""
    n = cen.n
    for d in (digits, digits * 2, digits * 4):
        lhs = cen.sqrt_size_mean(d)
        rhs = iv_enclosure(
            lambda ctx: ctx.mpf(100) - ctx.mpf(90) / ctx.sqrt(n), d
        )
        if lhs.certainly_le(rhs):
            return True, f"E(sqrt Z)={lhs.decimal(6)} <= {rhs.decimal(6)}"
        if rhs.certainly_lt(lhs):
            return False, f"E(sqrt Z)={lhs.decimal(6)} > {rhs.decimal(6)}"
    return False, "enclosures never separated"


MARKOV_CONSTANT_CAP = 10
MARKOV_SCALE = 10000


def check_inequalities(
    variety: TreeVariety,
    n: int,
    limit: int = DEFAULT_ENUM_LIMIT,
    digits: int = 15,
) -> InequalityReport:
    """Verify the probabilistic inequalities exactly at one size.

    Checks, all from full enumeration: expected leaves >= n/4, expected
    one-child vertices <= n/2, E(sqrt(Z_n)) <= 100 - 90/sqrt(n), the tail
    bound Pr(Z_n > 10000 C^2) <= 1/C for C up to 10, and for the
    non-plane variety the root-degree ratio p_n = count(n-1)/count(n)
    (<= 1/2 and decreasing from n >= 3) plus the cross-variety one-child
    mean comparison m_n <= M_n.
    """
    cen = census(variety, n, limit)
    checks: list[InequalityCheck] = []

    leaves = cen.mean_leaves
    checks.append(
        InequalityCheck(
            "expected-leaves>=n/4", n, leaves >= Fraction(n, 4),
            f"E(leaves)={leaves} vs n/4={Fraction(n, 4)}",
        )
    )
    onechild = cen.mean_one_child
    checks.append(
        InequalityCheck(
            "expected-one-child<=n/2", n, onechild <= Fraction(n, 2),
            f"E(one-child)={onechild} vs n/2={Fraction(n, 2)}",
        )
    )
    ok, detail = _sqrt_bound_holds(cen, digits)
    checks.append(InequalityCheck("sqrt-subtree-mean<=100-90/sqrt(n)", n, ok, detail))

    for c in range(1, MARKOV_CONSTANT_CAP + 1):
        tail = cen.size_tail_prob(MARKOV_SCALE * c * c)
        checks.append(
            InequalityCheck(
                f"tail-Pr(Z>{MARKOV_SCALE}*{c}^2)<=1/{c}", n, tail <= Fraction(1, c),
                f"tail={tail}",
            )
        )

    if variety is TreeVariety.NONPLANE:
        counts = tree_counts(TreeVariety.NONPLANE, max(n, 3))
        if n >= 3:
            p_n = Fraction(counts[n - 1], counts[n])
            ok = p_n <= Fraction(1, 2)
            detail = f"p_n={p_n}"
            if n >= 4:
                p_prev = Fraction(counts[n - 2], counts[n - 1])
                ok = ok and p_n < p_prev
                detail += f", p_(n-1)={p_prev}"
            checks.append(InequalityCheck("root-one-child-ratio", n, ok, detail))
        m_n = weighted_onechild_mean(n, limit)
        checks.append(
            InequalityCheck(
                "plane-mean-one-child<=nonplane", n, m_n <= onechild,
                f"m_n={m_n} vs M_n={onechild}",
            )
        )

    return InequalityReport(variety=variety, n=n, checks=tuple(checks))
