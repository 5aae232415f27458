"""MIS of G^k: one color class per iteration, k rounds of counter flooding each."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..engine import Bandwidth, Message, Network, bandwidth_mode
from ..graph import Graph, id_bits
from .coloring import PowerColoring, agk_reduce, linialk_overcount_run
from .transform import PowerContext


@dataclass
class MisResult:
    members: List[int]
    palette: int
    iterations: int
    coloring_rounds: int
    broadcast_rounds: int
    network: Network
    coloring: PowerColoring
    # rounds spent in each iteration; every entry is k (0 without edges)
    iteration_rounds: List[int] = field(default_factory=list)

    @property
    def trace(self):
        return self.network.trace


def mis_k_run(g: Graph, k: int, bandwidth: Optional[Bandwidth] = None) -> MisResult:
    """Color G^k, then let each class join and silence its k-ball.

    In iteration ``c`` every still-active vertex of color ``c`` joins and
    floods ``(origin, counter)``.  A vertex handles one message per round,
    the one with the smallest origin, and forwards it while the counter is
    below ``k``; every receiver becomes inactive.  Joiners of one class are
    more than ``k`` apart, and a dropped message is always shadowed by one
    that reaches the same vertices, so every vertex within ``k`` of a joiner
    hears something.
    """
    net = Network(g, bandwidth or bandwidth_mode("congest", g.n))
    ctx = PowerContext(g, k)
    lin = linialk_overcount_run(g, k, net=net, ctx=ctx)
    col = agk_reduce(g, k, lin.colors, lin.palette, net=net, ctx=ctx)
    coloring_rounds = net.rounds

    # every flood of an iteration starts together, so the counter is the round
    # index and only the origin goes on the wire
    msg_bits = id_bits(g.n)
    by_color: Dict[int, List[int]] = {}
    for v in g.vertices:
        by_color.setdefault(col.colors[v], []).append(v)
    active = [True] * g.n
    members: List[int] = []
    iteration_rounds = []
    with net.stage("mis-broadcast"):
        for c in range(col.palette):
            start = net.rounds
            joiners = [v for v in by_color.get(c, []) if active[v]]
            members.extend(joiners)
            holding = {v: (v, 0) for v in joiners}
            if g.max_degree:
                for _ in range(k):
                    out = {
                        x: {y: Message((o, cnt + 1), msg_bits) for y in g.adj[x]}
                        for x, (o, cnt) in holding.items()
                        if cnt < k
                    }
                    if not out:
                        net.charge_loads({})
                        continue
                    inbox = net.exchange(out)
                    holding = {}
                    for y in g.vertices:
                        if inbox[y]:
                            handled = min(m.payload for m in inbox[y].values())
                            holding[y] = handled
                            active[y] = False
            for v in joiners:
                active[v] = False
            iteration_rounds.append(net.rounds - start)
    return MisResult(
        members=sorted(members),
        palette=col.palette,
        iterations=col.palette,
        coloring_rounds=coloring_rounds,
        broadcast_rounds=net.rounds - coloring_rounds,
        network=net,
        coloring=col,
        iteration_rounds=iteration_rounds,
    )
