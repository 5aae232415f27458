"""Neighbor-assisted binary search shared by every Linial-style stage.

A searching vertex ``v`` holds a range of positions ``[left, right]``
(1-based).  Each phase it learns, through some transport, how many conflicts
fall in each half, keeps the half with fewer (ties go left) and announces the
choice with one bit.  When a shortcut width is given and the range fits in
one message, the transport returns an OR-bitmask instead and ``v`` takes the
first clear position.

Every search runs for a fixed number of phases that depends only on the
initial width and the shortcut width, so idle vertices and empty searches
cost the same rounds as busy ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .engine import Message, Network


class NoFreeElement(RuntimeError):
    pass


def halves(left: int, right: int) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    mid = (left + right) // 2
    return (left, mid), (mid + 1, right)


@lru_cache(maxsize=None)
def search_schedule(width: int, shortcut: int = 0) -> int:
    """Worst-case phases to narrow ``width`` positions to one."""
    if width <= 1:
        return 0
    if width <= shortcut:
        return 1
    return 1 + search_schedule((width + 1) // 2, shortcut)


@dataclass
class PhaseRecord:
    stage: int
    phase: int
    vertex: int
    width: int
    kind: str  # "halve" or "mask"
    sum_left: int = 0
    sum_right: int = 0
    chose_left: bool = True
    conflicts: int = 0  # collisions seen in the current range (mask: set bits)


Range = Tuple[int, int]


class Transport:
    """How range queries reach the neighbors and how answers come back.

    ``query`` is one communication step carrying both kinds of report: a pair
    of half totals for ``halves`` and an OR-mask for ``masks``.
    """

    def query(
        self, halves: Mapping[int, Range], masks: Mapping[int, Range]
    ) -> Tuple[Dict[int, Tuple[int, int]], Dict[int, List[int]]]:
        raise NotImplementedError

    def announce(self, choosers: Sequence[int]) -> None:
        raise NotImplementedError


class NeighborTransport(Transport):
    """Each neighbor ``u`` of ``v`` answers from a per-position conflict vector.

    ``vectors[(u, v)]`` is what ``u`` counts on ``v``'s behalf at every
    position; only range totals (or an OR-mask) go over the wire.
    """

    def __init__(self, net: Network, vectors: Mapping[Tuple[int, int], np.ndarray], count_bits: int):
        self.net = net
        self.count_bits = count_bits
        self.prefix = {
            key: np.concatenate(([0], np.cumsum(vec, dtype=np.int64))) for key, vec in vectors.items()
        }

    def _senders(self, v: int) -> Iterable[int]:
        return self.net.graph.adj[v]

    def query(self, half_q, mask_q):
        out: Dict[int, Dict[int, Message]] = {}
        answers_h, answers_m = {}, {}
        for v, (lo, hi) in half_q.items():
            (a, b), (c, e) = halves(lo, hi)
            sl = sr = 0
            for u in self._senders(v):
                pre = self.prefix[(u, v)]
                pair = (int(pre[b] - pre[a - 1]), int(pre[e] - pre[c - 1]))
                sl += pair[0]
                sr += pair[1]
                out.setdefault(u, {})[v] = Message(pair, 2 * self.count_bits)
            answers_h[v] = (sl, sr)
        for v, (lo, hi) in mask_q.items():
            merged = np.zeros(hi - lo + 1, dtype=bool)
            for u in self._senders(v):
                pre = self.prefix[(u, v)]
                mask = (pre[lo:hi + 1] - pre[lo - 1:hi]) > 0
                merged |= mask
                out.setdefault(u, {})[v] = Message(tuple(int(x) for x in mask), hi - lo + 1)
            answers_m[v] = [int(x) for x in merged]
        self.net.exchange(out)
        return answers_h, answers_m

    def announce(self, choosers):
        g = self.net.graph
        self.net.exchange({v: {u: Message(None, 1) for u in g.adj[v]} for v in choosers})


def binary_search(
    transport: Transport,
    searchers: Iterable[int],
    width: int,
    shortcut: int = 0,
    need_zero: bool = True,
    records: Optional[List[PhaseRecord]] = None,
    stage_index: int = 0,
) -> Dict[int, int]:
    """Run the fixed-schedule search; returns the 1-based chosen position per searcher.

    With ``need_zero`` the result is guaranteed conflict-free or
    :class:`NoFreeElement` is raised.  Without it (defective stages) the search
    only halves and returns a position whose conflicts were kept small.
    """
    searchers = list(searchers)
    left = {v: 1 for v in searchers}
    right = {v: width for v in searchers}
    final: Dict[int, int] = {v: 1 for v in searchers} if width == 1 else {}
    schedule = search_schedule(width, shortcut)
    for phase in range(1, schedule + 1):
        active = [v for v in searchers if v not in final]
        by_mask = {v: (left[v], right[v]) for v in active if 1 < right[v] - left[v] + 1 <= shortcut}
        by_half = {v: (left[v], right[v]) for v in active if v not in by_mask}
        answers_h, answers_m = transport.query(by_half, by_mask)

        for v, (lo, hi) in by_mask.items():
            merged = answers_m[v]
            if records is not None:
                records.append(PhaseRecord(stage_index, phase, v, hi - lo + 1, "mask", conflicts=sum(merged)))
            try:
                final[v] = lo + merged.index(0)
            except ValueError:
                raise NoFreeElement(f"vertex {v}: every position in [{lo},{hi}] conflicts") from None

        choosers = []
        for v, (lo, hi) in by_half.items():
            sl, sr = answers_h[v]
            chose_left = sl <= sr
            if records is not None:
                records.append(PhaseRecord(stage_index, phase, v, hi - lo + 1, "halve", sl, sr, chose_left, sl + sr))
            (a, b), (c, e) = halves(lo, hi)
            left[v], right[v] = (a, b) if chose_left else (c, e)
            if left[v] == right[v]:
                remaining = sl if chose_left else sr
                if need_zero and remaining:
                    raise NoFreeElement(f"vertex {v}: last position still has {remaining} conflicts")
                final[v] = left[v]
            else:
                choosers.append(v)
        if phase < schedule:
            transport.announce(choosers)
    missing = [v for v in searchers if v not in final]
    assert not missing, f"search schedule too short for {missing[:3]}"
    return final
