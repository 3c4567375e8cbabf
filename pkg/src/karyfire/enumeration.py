"""Exhaustive enumeration of the stable configurations reachable by firing.

The search treats the reachable configurations as a graph, not a trace
tree: every distinct configuration is expanded once and successors that
were already seen count as memo hits.  Labels are normalized to ranks up
front (rank order and label order agree, and firing only looks at rank
order), so each state packs into a short byte string: entry r of an
unsigned-16-bit array is the vertex currently holding the r-th smallest
chip.
"""

from __future__ import annotations

import json
import threading
from array import array
from bisect import insort
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import IO, Iterator

from .engine import Configuration, FiringMove, endgame_start, initial_config, run_waves
from .tree import TreeShape, VertexId, child_index, layer, layer_start, parent

DEFAULT_MAX_STATES = 10**8
DEFAULT_MAX_STABLE = 10**7

_VERTEX_LIMIT = 0xFFFF  # states are packed as uint16 vertex indices


class EnumerationTruncated(Exception):
    """An exact answer was requested but the search hit a limit."""


def canonical_key(config: Configuration) -> bytes:
    """Deterministic byte serialization; equal configurations get equal keys."""
    return config.to_json().encode("ascii")


# ---------------------------------------------------------------------------
# packed rank-space states


def _encode(config: Configuration, labels: tuple[int, ...]) -> bytes:
    rank_of = {c: r for r, c in enumerate(labels)}
    arr = array("H", bytes(2 * len(labels)))
    for v, pile in config.chips:
        if v > _VERTEX_LIMIT:
            raise ValueError(f"vertex {v} exceeds the 16-bit state encoding")
        for c in pile:
            arr[rank_of[c]] = v
    return arr.tobytes()


def _decode(state: bytes, k: int, labels: tuple[int, ...]) -> Configuration:
    piles: dict[VertexId, list[int]] = {}
    arr = array("H")
    arr.frombytes(state)
    for r, v in enumerate(arr):
        piles.setdefault(v, []).append(labels[r])
    return Configuration(k, tuple((v, tuple(piles[v])) for v in sorted(piles)))


def _rank_piles(state: bytes) -> dict[VertexId, list[int]]:
    piles: dict[VertexId, list[int]] = {}
    arr = array("H")
    arr.frombytes(state)
    for r, v in enumerate(arr):
        piles.setdefault(v, []).append(r)
    return piles


def _successors(state: bytes, k: int) -> list[tuple[VertexId, tuple[int, ...], bytes]]:
    """All (vertex, selected ranks, next state) one fire away from `state`."""
    piles = _rank_piles(state)
    base = array("H")
    base.frombytes(state)
    out = []
    for v, pile in piles.items():
        if len(pile) <= k:
            continue
        if k * v + k > _VERTEX_LIMIT:
            raise ValueError(f"firing vertex {v} exceeds the 16-bit state encoding")
        dest_parent = 0 if v == 0 else (v - 1) // k
        for sel in combinations(pile, k + 1):
            nxt = array("H", base)
            nxt[sel[k // 2]] = dest_parent
            slot = 1
            for idx, r in enumerate(sel):
                if idx == k // 2:
                    continue
                nxt[r] = k * v + slot
                slot += 1
            out.append((v, sel, nxt.tobytes()))
    return out


def _is_stable_state(state: bytes, k: int) -> bool:
    return all(len(pile) <= k for pile in _rank_piles(state).values())


def _endgame_depth(piles: dict[VertexId, list[int]], k: int) -> int | None:
    """The number of layers the endgame will fill, or None if not endgame-shaped."""
    if len(piles.get(0, ())) != k + 1:
        return None
    shape = TreeShape(k)
    ell = max(layer(shape, v) for v in piles) + 1
    boundary = layer_start(shape, ell)
    for v in range(1, boundary):
        if len(piles.get(v, ())) != k:
            return None
    if any(v >= boundary for v in piles):
        return None
    return ell


def _wave_collapse(state: bytes, k: int, ell: int) -> tuple[bytes, tuple[tuple[VertexId, tuple[int, ...]], ...]]:
    """Fire the full wave schedule in rank space, returning (final state, moves)."""
    shape = TreeShape(k)
    arr = array("H")
    arr.frombytes(state)
    piles = _rank_piles(state)
    moves = []
    for wave in range(1, ell):
        limit = layer_start(shape, ell - wave + 1)
        for v in range(limit):
            sel = tuple(piles[v])
            moves.append((v, sel))
            del piles[v]
            arr[sel[k // 2]] = 0 if v == 0 else (v - 1) // k
            insort(piles.setdefault(0 if v == 0 else (v - 1) // k, []), sel[k // 2])
            slot = 1
            for idx, r in enumerate(sel):
                if idx == k // 2:
                    continue
                arr[r] = k * v + slot
                insort(piles.setdefault(k * v + slot, []), r)
                slot += 1
    return arr.tobytes(), tuple(moves)


# ---------------------------------------------------------------------------
# search


@dataclass
class EnumerationResult:
    """Outcome of an exhaustive search from one starting configuration."""

    k: int
    labels: tuple[int, ...]
    start_key: bytes
    stable_keys: frozenset[bytes]
    states_explored: int
    memo_hits: int
    truncated: bool
    max_states: int
    max_stable: int
    witnesses: dict | None = field(default=None, repr=False)

    @cached_property
    def stable_set(self) -> frozenset[Configuration]:
        return frozenset(_decode(s, self.k, self.labels) for s in self.stable_keys)

    def iter_stable(self) -> Iterator[Configuration]:
        """Stable configurations in canonical (serialized) order."""
        return iter(sorted(self.stable_set, key=canonical_key))

    def witness_trace(self, config: Configuration) -> list[FiringMove]:
        """A firing sequence from the start configuration to `config`.

        Available only when the search recorded witnesses.
        """
        if self.witnesses is None:
            raise ValueError("witnesses were not recorded for this search")
        key = _encode(config, self.labels)
        if key != self.start_key and key not in self.witnesses:
            raise ValueError("no witness recorded for that configuration")
        chunks = []
        while key != self.start_key:
            key, moves = self.witnesses[key]
            chunks.append(moves)
        trace: list[FiringMove] = []
        for moves in reversed(chunks):
            trace.extend(
                FiringMove(v, tuple(self.labels[r] for r in sel)) for v, sel in moves
            )
        return trace


def enumerate_stable(
    config: Configuration,
    *,
    max_states: int = DEFAULT_MAX_STATES,
    max_stable: int = DEFAULT_MAX_STABLE,
    threads: int = 1,
    endgame_shortcut: bool = True,
    record_witnesses: bool = False,
) -> EnumerationResult:
    """Explore every configuration reachable from `config`.

    Returns the full set of reachable stable configurations unless a limit
    was hit, in which case the result is flagged as truncated.  The stable
    set is independent of `threads` and of `endgame_shortcut`; the
    shortcut collapses endgame-shaped states straight to their unique
    stable outcome instead of expanding every interleaving.
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    k = config.k
    labels = config.labels()
    start = _encode(config, labels)

    visited = {start}
    stable_keys: set[bytes] = set()
    witnesses: dict | None = {} if record_witnesses else None
    work: deque[bytes] = deque([start])
    cond = threading.Condition()
    counters = {"busy": 0, "explored": 0, "hits": 0, "stop": False, "truncated": False}

    def expand(state: bytes):
        piles = _rank_piles(state)
        if all(len(p) <= k for p in piles.values()):
            return [], True
        if endgame_shortcut:
            ell = _endgame_depth(piles, k)
            if ell is not None:
                final, moves = _wave_collapse(state, k, ell)
                return [(final, moves, True)], False
        out = []
        for v, sel, nxt in _successors(state, k):
            out.append((nxt, ((v, sel),), None))
        return out, False

    def worker() -> None:
        while True:
            with cond:
                while not work and counters["busy"] and not counters["stop"]:
                    cond.wait()
                if counters["stop"] or (not work and not counters["busy"]):
                    cond.notify_all()
                    return
                state = work.popleft()
                counters["busy"] += 1
            successors, state_is_stable = expand(state)
            checked = [
                (nxt, moves, _is_stable_state(nxt, k) if known is None else known)
                for nxt, moves, known in successors
            ]
            with cond:
                counters["explored"] += 1
                if state_is_stable:
                    stable_keys.add(state)
                for nxt, moves, nxt_stable in checked:
                    if nxt in visited:
                        counters["hits"] += 1
                        continue
                    visited.add(nxt)
                    if witnesses is not None:
                        witnesses[nxt] = (state, moves)
                    if nxt_stable:
                        stable_keys.add(nxt)
                        counters["explored"] += 1
                    else:
                        work.append(nxt)
                if len(visited) > max_states or len(stable_keys) > max_stable:
                    counters["truncated"] = True
                    counters["stop"] = True
                counters["busy"] -= 1
                cond.notify_all()

    if threads == 1:
        worker()
    else:
        pool = [threading.Thread(target=worker) for _ in range(threads)]
        for t in pool:
            t.start()
        for t in pool:
            t.join()

    return EnumerationResult(
        k=k,
        labels=labels,
        start_key=start,
        stable_keys=frozenset(stable_keys),
        states_explored=counters["explored"],
        memo_hits=counters["hits"],
        truncated=counters["truncated"],
        max_states=max_states,
        max_stable=max_stable,
        witnesses=witnesses,
    )


def count_stable(shape: TreeShape, ell: int, **kwargs) -> int:
    """Exact count of stable configurations reachable from the root-loaded start."""
    result = enumerate_stable(initial_config(shape, ell), **kwargs)
    if result.truncated:
        raise EnumerationTruncated("enumeration truncated — no exact count")
    return len(result.stable_keys)


def verify_endgame_confluence(config: Configuration, **kwargs) -> bool:
    """Exhaustively confirm that an endgame-start state has one outcome.

    Enumerates with the endgame shortcut disabled (using it here would be
    circular) and checks the single survivor against the wave schedule.
    """
    shape = config.shape
    deepest = max(layer(shape, v) for v, _ in config.chips) if config.chips else 0
    endgame_start(shape, deepest + 1, config)
    result = enumerate_stable(config, endgame_shortcut=False, **kwargs)
    if result.truncated:
        raise EnumerationTruncated("enumeration truncated — confluence undecided")
    if len(result.stable_keys) != 1:
        return False
    (only,) = result.stable_set
    return only == run_waves(config)


def _relative_index(shape: TreeShape, subtree_root: VertexId, v: VertexId) -> VertexId | None:
    """Index of v within the subtree rooted at subtree_root, or None if outside."""
    path = []
    u = v
    while u > subtree_root:
        path.append(child_index(shape, u))
        u = parent(shape, u)
    if u != subtree_root:
        return None
    rel = 0
    for slot in reversed(path):
        rel = shape.k * rel + slot
    return rel


def subtree_orderings(
    result: EnumerationResult, subtree_root: VertexId
) -> set[tuple[tuple[VertexId, tuple[int, ...]], ...]]:
    """Distinct rank patterns a subtree shows across the stable set.

    Each pattern maps subtree-relative vertex indices to the ranks
    (1..subtree chip count) of the chips sitting there.
    """
    if result.truncated:
        raise ValueError("cannot project a truncated enumeration")
    shape = TreeShape(result.k)
    patterns = set()
    for config in result.stable_set:
        placed = []
        for v, pile in config.chips:
            rel = _relative_index(shape, subtree_root, v)
            if rel is not None:
                placed.append((rel, pile))
        ranks = {c: i + 1 for i, c in enumerate(sorted(c for _, pile in placed for c in pile))}
        patterns.add(tuple(sorted((rel, tuple(ranks[c] for c in pile)) for rel, pile in placed)))
    return patterns


def dump_stable(result: EnumerationResult, stream: IO[str]) -> None:
    """Write the stable set as newline-delimited JSON plus a summary record."""
    for config in result.iter_stable():
        stream.write(config.to_json() + "\n")
    summary = {
        "type": "summary",
        "format_version": 1,
        "stable": len(result.stable_keys),
        "states_explored": result.states_explored,
        "memo_hits": result.memo_hits,
        "truncated": result.truncated,
        "max_states": result.max_states,
        "max_stable": result.max_stable,
    }
    stream.write(json.dumps(summary, sort_keys=True) + "\n")
