"""Configurations of labeled chips and the firing mechanism.

A firing at a vertex selects k+1 of its chips.  The median of the
selection (the ceil((k+1)/2)-th smallest) travels to the parent and the
remaining k chips travel, in ascending order, to the children from
leftmost to rightmost.  The root's parent is the root itself via its
self-loop, so a root fire keeps its median and sheds k chips downward.

Chips are positive integer labels and each label lives on exactly one
vertex.  A configuration is *stable* when no vertex holds more than k
chips.
"""

from __future__ import annotations

import json
import random as _random
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from math import comb

from .tree import TreeShape, VertexId, layer, layer_start


class EngineError(Exception):
    """Base class for firing-engine failures."""


class IllegalMoveError(EngineError):
    """A move referenced absent chips or the wrong selection size."""


class ScriptError(EngineError):
    """A firing script was malformed or illegal when replayed."""


class StepLimitError(EngineError):
    """Stabilization exceeded its step limit."""


class EndgameShapeError(EngineError):
    """A configuration does not have the endgame-start shape."""


class WaveError(EngineError):
    """A wave schedule reached a vertex that was not ready to fire."""


@dataclass(frozen=True)
class FiringMove:
    """One firing: a vertex plus the k+1 selected chip labels (kept sorted)."""

    vertex: VertexId
    selected: tuple[int, ...]

    def __post_init__(self) -> None:
        sel = tuple(sorted(self.selected))
        object.__setattr__(self, "selected", sel)
        if self.vertex < 0:
            raise ValueError(f"vertex index must be >= 0, got {self.vertex}")
        if len(set(sel)) != len(sel):
            raise ValueError(f"repeated chip in selection {sel}")
        if any(c < 1 for c in sel):
            raise ValueError(f"chip labels must be positive, got {sel}")


@dataclass(frozen=True)
class Configuration:
    """Immutable placement of labeled chips.

    ``chips`` maps each occupied vertex to its ascending tuple of labels;
    empty vertices are absent.  Instances are hashable and order-canonical,
    so equal placements compare and hash equal.
    """

    k: int
    chips: tuple[tuple[VertexId, tuple[int, ...]], ...]

    @classmethod
    def from_dict(cls, k: int, mapping: dict[VertexId, object]) -> "Configuration":
        if not isinstance(k, int) or k < 2:
            raise ValueError(f"arity must be an integer >= 2, got {k!r}")
        seen: set[int] = set()
        items = []
        for v in sorted(mapping):
            labels = tuple(sorted(mapping[v]))
            if not labels:
                continue
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"vertex index must be an integer >= 0, got {v!r}")
            for c in labels:
                if not isinstance(c, int) or c < 1:
                    raise ValueError(f"chip labels must be positive integers, got {c!r}")
                if c in seen:
                    raise ValueError(f"chip {c} appears on more than one vertex")
                seen.add(c)
            items.append((v, labels))
        return cls(k, tuple(items))

    @property
    def shape(self) -> TreeShape:
        return TreeShape(self.k)

    def as_dict(self) -> dict[VertexId, tuple[int, ...]]:
        return dict(self.chips)

    def at(self, v: VertexId) -> tuple[int, ...]:
        for u, labels in self.chips:
            if u == v:
                return labels
        return ()

    def labels(self) -> tuple[int, ...]:
        return tuple(sorted(c for _, labels in self.chips for c in labels))

    @property
    def n_chips(self) -> int:
        return sum(len(labels) for _, labels in self.chips)

    def occupied(self) -> tuple[VertexId, ...]:
        return tuple(v for v, _ in self.chips)

    def to_json_dict(self) -> dict:
        return {"k": self.k, "chips": {str(v): list(labels) for v, labels in self.chips}}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Configuration":
        if not isinstance(data, dict) or "k" not in data or "chips" not in data:
            raise ValueError("configuration JSON needs 'k' and 'chips' fields")
        return cls.from_dict(int(data["k"]), {int(v): labels for v, labels in data["chips"].items()})

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "Configuration":
        return cls.from_json_dict(json.loads(text))

    def __str__(self) -> str:
        body = ", ".join(f"{v}:[{','.join(map(str, labels))}]" for v, labels in self.chips)
        return "{" + body + "}"


# ---------------------------------------------------------------------------
# firing kernel


def _apply(k: int, piles: dict[VertexId, list[int]], vertex: VertexId, selected: tuple[int, ...]) -> None:
    """Fire `selected` (sorted, size k+1) at `vertex`, mutating `piles`."""
    pile = piles.get(vertex, [])
    sel = set(selected)
    if len(sel & set(pile)) != k + 1:
        missing = sorted(sel - set(pile))
        raise IllegalMoveError(f"chip not present at vertex {vertex}: {missing}")
    remaining = [c for c in pile if c not in sel]
    if remaining:
        piles[vertex] = remaining
    else:
        del piles[vertex]
    median = selected[k // 2]
    dest_parent = 0 if vertex == 0 else (vertex - 1) // k
    _insert(piles, dest_parent, median)
    slot = 1
    for idx, chip in enumerate(selected):
        if idx == k // 2:
            continue
        _insert(piles, k * vertex + slot, chip)
        slot += 1


def _insert(piles: dict[VertexId, list[int]], vertex: VertexId, chip: int) -> None:
    pile = piles.get(vertex)
    if pile is None:
        piles[vertex] = [chip]
    else:
        lo, hi = 0, len(pile)
        while lo < hi:
            mid = (lo + hi) // 2
            if pile[mid] < chip:
                lo = mid + 1
            else:
                hi = mid
        pile.insert(lo, chip)


def _piles_of(config: Configuration) -> dict[VertexId, list[int]]:
    return {v: list(labels) for v, labels in config.chips}


def _build(k: int, piles: dict[VertexId, list[int]]) -> Configuration:
    return Configuration(k, tuple((v, tuple(piles[v])) for v in sorted(piles) if piles[v]))


def fire(config: Configuration, move: FiringMove) -> Configuration:
    """Apply a single firing move, returning the new configuration."""
    k = config.k
    if len(move.selected) != k + 1:
        raise IllegalMoveError(
            f"wrong selection size: need k+1 = {k + 1} chips, got {len(move.selected)}"
        )
    piles = _piles_of(config)
    _apply(k, piles, move.vertex, move.selected)
    out = _build(k, piles)
    if __debug__:
        assert out.labels() == config.labels(), "chip conservation violated"
    return out


def legal_moves(config: Configuration) -> list[FiringMove]:
    """Every legal firing, vertices ascending and selections in lexicographic order."""
    k = config.k
    moves = []
    for v, pile in config.chips:
        if len(pile) >= k + 1:
            moves.extend(FiringMove(v, sel) for sel in combinations(pile, k + 1))
    return moves


def is_stable(config: Configuration) -> bool:
    return all(len(pile) <= config.k for _, pile in config.chips)


def initial_config(shape: TreeShape, ell: int) -> Configuration:
    """Chips 1..N on the root, where N fills ell layers one chip per vertex."""
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    n = layer_start(shape, ell + 1)
    return Configuration.from_dict(shape.k, {0: range(1, n + 1)})


def stabilize(
    config: Configuration,
    policy: str = "lowest",
    *,
    script: list[FiringMove] | None = None,
    seed: int | None = None,
    step_limit: int | None = None,
) -> tuple[Configuration, list[FiringMove]]:
    """Drive `config` to a stable configuration and return it with the move trace.

    Policies: "lowest" fires the lexicographically first legal move, "random"
    draws uniformly from the legal moves of a seeded generator, and "script"
    replays the given moves (which must end at a stable configuration).
    """
    k = config.k
    rng = None
    if policy == "script":
        if script is None:
            raise ValueError("policy 'script' needs a script")
    elif policy == "random":
        if seed is None:
            raise ValueError("policy 'random' needs a seed")
        rng = _random.Random(seed)
    elif policy != "lowest":
        raise ValueError(f"unknown policy {policy!r}")
    if step_limit is None:
        counts = {v: len(pile) for v, pile in config.chips}
        _, fires = _unlabeled_relax(k, counts)
        step_limit = 10 * max(1, sum(fires.values()))

    piles = _piles_of(config)
    trace: list[FiringMove] = []
    script_iter = iter(script or ())
    while True:
        fireable = sorted(v for v, pile in piles.items() if len(pile) >= k + 1)
        if policy == "script":
            move = next(script_iter, None)
            if move is None:
                if fireable:
                    raise ScriptError(
                        f"script ended before stabilization (vertices {fireable} can still fire)"
                    )
                break
            if len(move.selected) != k + 1:
                raise ScriptError(
                    f"script illegal at step {len(trace)}: selection size {len(move.selected)}, need {k + 1}"
                )
        else:
            if not fireable:
                break
            if policy == "lowest":
                v = fireable[0]
                move = FiringMove(v, tuple(piles[v][: k + 1]))
            else:
                weights = [comb(len(piles[v]), k + 1) for v in fireable]
                v = rng.choices(fireable, weights=weights)[0]
                move = FiringMove(v, tuple(rng.sample(piles[v], k + 1)))
        if len(trace) >= step_limit:
            raise StepLimitError(f"step limit exceeded ({step_limit} moves)")
        try:
            _apply(k, piles, move.vertex, move.selected)
        except IllegalMoveError as err:
            if policy == "script":
                raise ScriptError(f"script illegal at step {len(trace)}: {err}") from err
            raise
        trace.append(move)
    return _build(k, piles), trace


# ---------------------------------------------------------------------------
# unlabeled (counting-only) dynamics


def _unlabeled_relax(
    k: int, counts: dict[VertexId, int], batch_limit: int = 10**7
) -> tuple[dict[VertexId, int], dict[VertexId, int]]:
    """Stabilize integer chip counts; returns (final counts, fires per vertex).

    Counts follow the same flow as labeled firing: a fire sends one chip to
    the parent and one to each child, with the root's parent chip looping
    back to the root.  Fires are batched per vertex for speed.
    """
    counts = {v: c for v, c in counts.items() if c}
    fires: dict[VertexId, int] = {}
    work = deque(v for v, c in counts.items() if c >= k + 1)
    queued = set(work)
    rounds = 0
    while work:
        rounds += 1
        if rounds > batch_limit:
            raise StepLimitError("step limit exceeded in unlabeled relaxation")
        v = work.popleft()
        queued.discard(v)
        c = counts.get(v, 0)
        if c <= k:
            continue
        drop = k if v == 0 else k + 1
        t = -(-(c - k) // drop)  # fires needed to bring v down to <= k
        counts[v] = c - t * drop
        fires[v] = fires.get(v, 0) + t
        touched = [] if v == 0 else [(v - 1) // k]
        touched.extend(k * v + j for j in range(1, k + 1))
        for u in touched:
            counts[u] = counts.get(u, 0) + t
            if counts[u] >= k + 1 and u not in queued:
                work.append(u)
                queued.add(u)
    return {v: c for v, c in counts.items() if c}, fires


def unlabeled_simulate(shape: TreeShape, n_chips: int) -> dict[VertexId, int]:
    """Final per-vertex chip counts after stabilizing n unlabeled chips at the root."""
    if n_chips < 1:
        raise ValueError(f"need at least one chip, got {n_chips}")
    final, _ = _unlabeled_relax(shape.k, {0: n_chips})
    return final


def unlabeled_fire_counts(shape: TreeShape, n_chips: int) -> dict[VertexId, int]:
    """How many times each vertex fires while stabilizing n chips from the root."""
    if n_chips < 1:
        raise ValueError(f"need at least one chip, got {n_chips}")
    _, fires = _unlabeled_relax(shape.k, {0: n_chips})
    return fires


def unlabeled_profile(shape: TreeShape, n_chips: int) -> list[int]:
    """Chips per vertex on each occupied layer of the stable configuration.

    Entry m of the returned list is the count shared by every vertex of
    layer m+1.  The profile is the base-k expansion, plus one per digit, of
    the excess of n over the largest exactly-filling chip count below it.
    """
    if n_chips < 1:
        raise ValueError(f"need at least one chip, got {n_chips}")
    ell = 1
    while layer_start(shape, ell + 2) <= n_chips:
        ell += 1
    rest = n_chips - layer_start(shape, ell + 1)
    profile = []
    for _ in range(ell):
        profile.append(rest % shape.k + 1)
        rest //= shape.k
    return profile


# ---------------------------------------------------------------------------
# endgame


def endgame_start(shape: TreeShape, ell: int, config: Configuration) -> Configuration:
    """Validate the shape that opens the endgame.

    The root must hold exactly k+1 chips, every vertex on layers 2..ell-1
    exactly k, and nothing may sit on layer ell or below.  Labels are not
    constrained.  Returns the configuration unchanged when valid.
    """
    if ell < 2:
        raise ValueError(f"ell must be >= 2, got {ell}")
    if config.k != shape.k:
        raise ValueError(f"configuration arity {config.k} does not match shape {shape.k}")
    d = config.as_dict()
    bad = []
    if len(d.get(0, ())) != shape.k + 1:
        bad.append(0)
    boundary = layer_start(shape, ell)
    for v in range(1, boundary):
        if len(d.get(v, ())) != shape.k:
            bad.append(v)
    bad.extend(v for v in d if v >= boundary)
    if bad:
        raise EndgameShapeError(
            f"not an endgame-start shape for ell={ell} (offending vertices {sorted(set(bad))})"
        )
    return config


def run_waves(config: Configuration) -> Configuration:
    """Fire a valid endgame start to its stable configuration in waves.

    Wave w fires vertices 0..N-1 once each in index order, where N counts
    the vertices of the top (ell - w) layers.  Every scheduled vertex must
    hold exactly k+1 chips when its turn comes.
    """
    k = config.k
    shape = config.shape
    if not config.chips:
        raise EndgameShapeError("empty configuration")
    deepest = max(layer(shape, v) for v, _ in config.chips)
    ell = deepest + 1
    endgame_start(shape, ell, config)
    piles = _piles_of(config)
    for wave in range(1, ell):
        limit = layer_start(shape, ell - wave + 1)
        for v in range(limit):
            pile = piles.get(v, [])
            if len(pile) != k + 1:
                raise WaveError(f"vertex {v} not ready in wave {wave} (holds {len(pile)} chips)")
            _apply(k, piles, v, tuple(pile))
    out = _build(k, piles)
    assert is_stable(out)
    return out


def random_endgame_start(shape: TreeShape, ell: int, seed: int) -> Configuration:
    """Endgame-start shape with labels 1..N dealt by a seeded shuffle."""
    if ell < 2:
        raise ValueError(f"ell must be >= 2, got {ell}")
    n = layer_start(shape, ell + 1)
    labels = list(range(1, n + 1))
    _random.Random(seed).shuffle(labels)
    chips: dict[VertexId, list[int]] = {0: labels[: shape.k + 1]}
    pos = shape.k + 1
    for v in range(1, layer_start(shape, ell)):
        chips[v] = labels[pos : pos + shape.k]
        pos += shape.k
    return Configuration.from_dict(shape.k, chips)


# ---------------------------------------------------------------------------
# firing-script text format


def parse_script(text: str) -> list[FiringMove]:
    """Parse the `fire <vertex>: <c1> <c2> ...` script format.

    Blank lines are skipped and `#` starts a comment.
    """
    moves = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, tail = line.partition(":")
        if not sep or not head.startswith("fire"):
            raise ScriptError(f"line {lineno}: expected 'fire <vertex>: <chips>'")
        try:
            vertex = int(head[4:].strip())
            chips = tuple(int(tok) for tok in tail.split())
            moves.append(FiringMove(vertex, chips))
        except ValueError as err:
            raise ScriptError(f"line {lineno}: {err}") from err
    return moves


def format_script(moves: list[FiringMove]) -> str:
    return "\n".join(f"fire {m.vertex}: {' '.join(map(str, m.selected))}" for m in moves) + "\n"
