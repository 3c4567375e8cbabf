"""Structural checks on stable configurations and the flattening machinery.

Three checkable properties of stable configurations: extreme chips sitting
at the bottom straight descendants, the ordering relation along alternating
paths, and the rank-domination (ballot) property between sibling subtrees.
Plus: flattening a one-chip-per-vertex configuration into a permutation,
inversion counting, and a step-by-step replay of the lower-bound
construction with its symmetry requirements checked at run time.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bounds import n_chips
from .engine import (
    Configuration,
    EngineError,
    FiringMove,
    fire,
    initial_config,
    is_stable,
    stabilize,
)
from .tree import TreeShape, VertexId, child_index, is_left_child, is_right_child, parent


class ConstructionError(EngineError):
    """A lower-bound construction replay got an invalid choice or lost symmetry."""


@dataclass(frozen=True)
class PropertyVerdict:
    """Outcome of one structural check, with violating (vertex, chip) pairs."""

    property: str
    holds: bool
    witnesses: tuple[tuple[VertexId, int], ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "property": self.property,
            "holds": self.holds,
            "witnesses": [list(w) for w in self.witnesses],
        }


@dataclass(frozen=True)
class FlattenedPermutation:
    """Left-to-right reading of a one-chip-per-vertex stable configuration."""

    sequence: tuple[int, ...]
    rule: str

    def as_line(self) -> str:
        return ",".join(map(str, self.sequence))


# ---------------------------------------------------------------------------
# property checks


def _is_under(shape: TreeShape, top: VertexId, v: VertexId) -> bool:
    while v > top:
        v = parent(shape, v)
    return v == top


def _bottom_straight(shape: TreeShape, piles: dict, v: VertexId, slot: int) -> VertexId:
    while (nxt := shape.k * v + slot) in piles:
        v = nxt
    return v


def check_minmax_descendants(config: Configuration) -> PropertyVerdict:
    """Each occupied subtree's smallest chip must sit at its bottom straight
    left descendant, the largest at the bottom straight right descendant."""
    shape = config.shape
    piles = config.as_dict()
    witnesses = []
    for v in piles:
        chips = [c for u, pile in piles.items() if _is_under(shape, v, u) for c in pile]
        low = _bottom_straight(shape, piles, v, 1)
        high = _bottom_straight(shape, piles, v, shape.k)
        if min(chips) not in piles[low]:
            witnesses.append((v, min(chips)))
        if max(chips) not in piles[high]:
            witnesses.append((v, max(chips)))
    return PropertyVerdict("minmax_descendants", not witnesses, tuple(witnesses))


def check_zigzag_relation(config: Configuration) -> PropertyVerdict:
    """Ordering relation around vertices that sit on a direction change.

    For a left child of a right child, the chips on its left children
    ascend and stay below its own chip and all its right children's chips;
    mirrored for a right child of a left child.  Vertices holding more
    than one chip are outside the relation's setting and are skipped, as
    are unoccupied children.
    """
    shape = config.shape
    k = shape.k
    piles = config.as_dict()
    single = {v: pile[0] for v, pile in piles.items() if len(pile) == 1}
    witnesses = []
    for s in piles:
        if s == 0 or parent(shape, s) == 0:
            continue
        p = parent(shape, s)
        if is_left_child(shape, s) and is_right_child(shape, p):
            mirrored = False
        elif is_right_child(shape, s) and is_left_child(shape, p):
            mirrored = True
        else:
            continue
        kids = [k * s + j for j in range(1, k + 1)]
        involved = [s] + [c for c in kids if c in piles]
        if any(v not in single for v in involved):
            continue
        inner = [c for c in kids[: k // 2] if c in piles]  # the ascending side
        outer = [single[s]] + [single[c] for c in kids[k // 2 :] if c in piles]
        if mirrored:
            inner = [c for c in kids[k // 2 :] if c in piles]
            outer = [single[s]] + [single[c] for c in kids[: k // 2] if c in piles]
        for a, b in zip(inner, inner[1:]):
            if single[a] >= single[b]:
                witnesses.append((b, single[b]))
        for c in inner:
            bad = (single[c] >= min(outer)) if not mirrored else (single[c] <= max(outer))
            if bad:
                witnesses.append((c, single[c]))
    return PropertyVerdict("zigzag_relation", not witnesses, tuple(witnesses))


def check_ballot(config: Configuration) -> PropertyVerdict:
    """Rank domination between sibling subtrees: at every vertex, the i-th
    smallest chip under a child precedes the i-th smallest under any child
    further right, for every rank both subtrees reach."""
    shape = config.shape
    buckets: dict[tuple[VertexId, int], list[int]] = {}
    for u, pile in config.chips:
        w = u
        while w > 0:
            p = parent(shape, w)
            buckets.setdefault((p, child_index(shape, w)), []).extend(pile)
            w = p
    witnesses = []
    for v in sorted({v for v, _ in buckets}):
        subs = [sorted(buckets.get((v, slot), [])) for slot in range(1, shape.k + 1)]
        for a in range(shape.k):
            for b in range(a + 1, shape.k):
                for i in range(min(len(subs[a]), len(subs[b]))):
                    if subs[a][i] >= subs[b][i]:
                        witnesses.append((v, subs[a][i]))
    return PropertyVerdict("ballot", not witnesses, tuple(witnesses))


# ---------------------------------------------------------------------------
# flattening


def flatten(config: Configuration, rule: str = "inorder") -> FlattenedPermutation:
    """Read a one-chip-per-vertex configuration into a permutation.

    The inorder rule emits each vertex between its left and right halves of
    children (the left-to-right reading of the plane tree); children_first
    emits all child subtrees before the vertex itself.
    """
    if rule not in ("inorder", "children_first"):
        raise ValueError(f"unknown flattening rule {rule!r}")
    shape = config.shape
    piles = config.as_dict()
    for v, pile in piles.items():
        if len(pile) > 1:
            raise ValueError(f"vertex with multiple chips: {v} holds {list(pile)}")
    live: set[VertexId] = set()
    for v in piles:
        while v not in live:
            live.add(v)
            if v == 0:
                break
            v = parent(shape, v)
    out: list[int] = []

    def walk(v: VertexId) -> None:
        kids = [c for c in (shape.k * v + j for j in range(1, shape.k + 1)) if c in live]
        if rule == "children_first":
            for c in kids:
                walk(c)
            out.extend(piles.get(v, ()))
            return
        half = shape.k * v + shape.k // 2
        for c in kids:
            if c <= half:
                walk(c)
        out.extend(piles.get(v, ()))
        for c in kids:
            if c > half:
                walk(c)

    if live:
        walk(0)
    return FlattenedPermutation(tuple(out), rule)


def inversions(perm) -> int:
    """Exact inversion count by merge counting; accepts a plain sequence too."""
    seq = list(perm.sequence) if isinstance(perm, FlattenedPermutation) else list(perm)

    def count(arr: list[int]) -> tuple[list[int], int]:
        if len(arr) <= 1:
            return arr, 0
        mid = len(arr) // 2
        left, a = count(arr[:mid])
        right, b = count(arr[mid:])
        merged: list[int] = []
        inv = a + b
        i = j = 0
        while i < len(left) and j < len(right):
            if left[i] <= right[j]:
                merged.append(left[i])
                i += 1
            else:
                merged.append(right[j])
                j += 1
                inv += len(left) - i
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, inv

    return count(seq)[1]


def max_inversions(result, rule: str = "inorder") -> tuple[int, Configuration]:
    """Largest inversion count over an enumerated stable set, with a witness.

    Ties break to the canonically first configuration, so the witness is
    deterministic.
    """
    if result.truncated:
        raise ValueError("cannot scan a truncated enumeration")
    best: tuple[int, Configuration] | None = None
    for config in result.iter_stable():
        count = inversions(flatten(config, rule))
        if best is None or count > best[0]:
            best = (count, config)
    if best is None:
        raise ValueError("empty stable set")
    return best


# ---------------------------------------------------------------------------
# lower-bound construction replay


def _embed_vertex(shape: TreeShape, base: VertexId, rel: VertexId) -> VertexId:
    path = []
    while rel:
        path.append((rel - 1) % shape.k + 1)
        rel = (rel - 1) // shape.k
    v = base
    for slot in reversed(path):
        v = shape.k * v + slot
    return v


def _validated_choices(name: str, choices, count: int, lo: int, hi: int) -> tuple[int, ...]:
    seq = tuple(choices)
    if len(seq) != count:
        raise ConstructionError(f"choice out of range: need {count} values for {name}, got {len(seq)}")
    if list(seq) != sorted(set(seq)):
        raise ConstructionError(f"choice out of range: {name} must be strictly ascending")
    for x in seq:
        if not lo <= x <= hi:
            raise ConstructionError(f"choice out of range: {name} value {x} not in [{lo}, {hi}]")
    return seq


def replay_lower_bound_construction(
    k: int, ell: int, i: int, c_choices=(), c_prime_choices=()
) -> Configuration:
    """Run the explicit stabilization behind the lower bound and return its result.

    Two scripted root fires plant `i` crossing chips on each side, the root
    then fires symmetrically around the stationary chip until each child
    holds a full subtree load, and the child subtrees play out in lockstep.
    Any failure of the symmetry requirements raises ConstructionError.
    """
    shape = TreeShape(k)
    if ell < 3:
        raise ValueError(f"need ell >= 3, got {ell}")
    n = n_chips(k, ell)
    lo, hi = k // 2, (k + 1) // 2
    m = (n - 1) // k * lo + 1
    if not 0 <= i <= lo:
        raise ConstructionError(f"choice out of range: i must be in 0..{lo}, got {i}")
    c = _validated_choices("c", c_choices, i, lo + 2, m - 1)
    cp = _validated_choices("cprime", c_prime_choices, i, m + 1, n - 2 * hi + i - 1)

    config = initial_config(shape, ell)
    first = tuple(range(1, lo + 2)) + c + tuple(range(n - hi + i + 1, n + 1))
    config = fire(config, FiringMove(0, first))
    taken = set(range(1, lo + 1)) | set(c)
    d = tuple(x for x in range(1, m) if x not in taken)[: lo - i]
    second = d + cp + tuple(range(n - 2 * hi + i, n - hi + i + 1))
    config = fire(config, FiringMove(0, second))

    # drive the root down to the stationary chip alone
    target = n_chips(k, ell - 1)
    for _ in range(target - 2):
        pile = config.at(0)
        below = [x for x in pile if x < m][:lo]
        above = [x for x in pile if x > m][:hi]
        sel = tuple(below) + (m,) + tuple(above)
        if len(sel) != k + 1:
            raise ConstructionError("symmetry violated: root cannot fire around the stationary chip")
        config = fire(config, FiringMove(0, sel))
    if config.at(0) != (m,):
        raise ConstructionError("symmetry violated: root did not reduce to the stationary chip")

    # the child subtrees now play identical games; run them in lockstep
    children = list(range(1, k + 1))
    iso_traces = []
    rank_traces = []
    for child in children:
        pile = config.at(child)
        if len(pile) != target:
            raise ConstructionError(f"symmetry violated: child {child} holds {len(pile)} chips, expected {target}")
        _, trace = stabilize(Configuration.from_dict(k, {0: pile}), "lowest")
        rank = {label: r for r, label in enumerate(pile)}
        rank_traces.append([(mv.vertex, tuple(rank[x] for x in mv.selected)) for mv in trace])
        iso_traces.append(trace)
    if any(rt != rank_traces[0] for rt in rank_traces[1:]):
        raise ConstructionError("symmetry violated: subtree firing sequences diverge")

    for step in range(len(rank_traces[0])):
        owed: dict[int, int] = {}
        fired_roots = False
        for slot, child in enumerate(children, start=1):
            mv = iso_traces[slot - 1][step]
            config = fire(config, FiringMove(_embed_vertex(shape, child, mv.vertex), mv.selected))
            if mv.vertex == 0:
                owed[mv.selected[k // 2]] = slot
                fired_roots = True
        if fired_roots:
            pile = config.at(0)
            if len(pile) != k + 1 or pile[k // 2] != m:
                raise ConstructionError("symmetry violated: stationary chip displaced at the root")
            slot = 1
            for idx, chip in enumerate(pile):
                if idx == k // 2:
                    continue
                if owed.get(chip) != slot:
                    raise ConstructionError("symmetry violated: a returned chip would change subtrees")
                slot += 1
            config = fire(config, FiringMove(0, pile))

    if not is_stable(config) or config.at(0) != (m,):
        raise ConstructionError("symmetry violated: replay did not end at a stable state")
    return config
