"""Distance-2 additive-group color reduction with 1-bit messages.

Colors are pairs ``<a, b>`` over a prime field.  Each phase a neighbor ``u``
tells ``v`` whether v's ``b`` collides with anything u can see (its own pair
and its other neighbors'), then ``v`` either finalizes (``a := 0``) or shifts
``b := a + b`` and tells its neighbors which one happened.  Neighbors replay
the update locally, so pairs are sent once and never again.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .engine import Bandwidth, Message, Network, RoundCapReached, bandwidth_mode
from .graph import Graph, bits_for, smallest_prime_above


@dataclass(frozen=True)
class ColorPair:
    a: int
    b: int
    q: int

    def __post_init__(self) -> None:
        if not (0 <= self.a < self.q and 0 <= self.b < self.q):
            raise ValueError(f"pair <{self.a},{self.b}> outside field of size {self.q}")

    @property
    def finalized(self) -> bool:
        return self.a == 0


def encode_pair(c: int, q: int) -> ColorPair:
    if not 0 <= c < q * q:
        raise ValueError(f"color {c} does not fit in q^2 = {q * q}")
    return ColorPair(c // q, c % q, q)


def decode_pair(p: ColorPair) -> int:
    return p.a * p.q + p.b


def conflict(own: ColorPair, others: Sequence[ColorPair]) -> bool:
    return any(o.b == own.b for o in others)


def next_color(current: ColorPair, conflict_flags: Sequence[bool], q: int) -> Tuple[ColorPair, bool]:
    if current.a == 0:
        raise ValueError("finalized vertices do not update")
    if any(conflict_flags):
        return ColorPair(current.a, (current.a + current.b) % q, q), True
    return ColorPair(0, current.b, q), False


@dataclass(frozen=True)
class AgParams:
    q: int


def ag_params(m: int, delta: int, budget: Optional[int] = None) -> AgParams:
    """Smallest prime ``q > budget`` (default ``2 * delta**2``) with ``q**2 >= m``."""
    q = smallest_prime_above(2 * delta**2 if budget is None else budget)
    while q * q < m:
        q = smallest_prime_above(q)
    return AgParams(q)


@dataclass
class AgResult:
    colors: List[int]
    palette: int
    phases: int
    setup_rounds: int
    main_rounds: int
    network: Network
    finalize_phase: List[int] = field(default_factory=list)
    history: List[List[ColorPair]] = field(default_factory=list)
    passes: int = 1
    pass_log: List[Tuple[int, int]] = field(default_factory=list)  # (q, phases) per pass

    @property
    def trace(self):
        return self.network.trace


def ag2_run(
    g: Graph,
    colors: Sequence[int],
    palette: int,
    bandwidth: Optional[Bandwidth] = None,
    params: Optional[AgParams] = None,
    net: Optional[Network] = None,
    record: bool = False,
) -> AgResult:
    """Reduce a proper G^2 coloring with ``palette <= q^2`` colors to ``q`` colors."""
    if net is None:
        net = Network(g, bandwidth or bandwidth_mode("one_bit"))
    params = params or ag_params(palette, g.max_degree)
    q = params.q
    if palette > q * q:
        raise ValueError(f"palette {palette} exceeds q^2 = {q * q}")
    pair = [encode_pair(c, q) for c in colors]

    start = net.rounds
    with net.stage("ag2-setup"):
        inbox = net.exchange(
            {v: {u: Message(pair[v], 2 * bits_for(q - 1)) for u in g.adj[v]} for v in g.vertices}
        )
    # mirror[u][v]: the pair u believes its neighbor v holds
    mirror: List[Dict[int, ColorPair]] = [
        {v: inbox[u][v].payload for v in g.adj[u]} for u in g.vertices
    ]
    setup_rounds = net.rounds - start

    finalize_phase = [0 if p.finalized else -1 for p in pair]
    history = [list(pair)] if record else []
    phase = 0
    start = net.rounds
    with net.stage("ag2"):
        while any(not p.finalized for p in pair):
            phase += 1
            if phase > q:
                net.trace.cap_reached = True
                raise RoundCapReached(f"ag2 did not finish within q={q} phases")
            # R: does v's b collide with u or one of u's other neighbors?
            verdicts: Dict[int, Dict[int, Message]] = {}
            for u in g.vertices:
                for v in g.adj[u]:
                    mv = mirror[u][v]
                    if mv.finalized:
                        continue
                    others = [pair[u]] + [mirror[u][w] for w in g.adj[u] if w != v]
                    verdicts.setdefault(u, {})[v] = Message(conflict(mv, others), 1)
            inbox = net.exchange(verdicts)

            # S: every active vertex reports whether it shifted b
            updates: Dict[int, Dict[int, Message]] = {}
            for v in g.vertices:
                if pair[v].finalized:
                    continue
                flags = [inbox[v][u].payload for u in g.adj[v]]
                pair[v], changed = next_color(pair[v], flags, q)
                if pair[v].finalized:
                    finalize_phase[v] = phase
                updates[v] = {u: Message(changed, 1) for u in g.adj[v]}
            inbox = net.exchange(updates)
            for u in g.vertices:
                for v, msg in inbox[u].items():
                    mirror[u][v], _ = next_color(mirror[u][v], [msg.payload], q)
            if record:
                history.append(list(pair))
                stale = [(u, v) for u in g.vertices for v in g.adj[u] if mirror[u][v] != pair[v]]
                assert not stale, f"mirrored pairs diverged at {stale[:3]}"
    return AgResult(
        colors=[p.b for p in pair],
        palette=q,
        phases=phase,
        setup_rounds=setup_rounds,
        main_rounds=net.rounds - start,
        network=net,
        finalize_phase=finalize_phase,
        history=history,
        pass_log=[(q, phase)],
    )


def ag2_reduce(
    g: Graph,
    colors: Sequence[int],
    palette: int,
    bandwidth: Optional[Bandwidth] = None,
    net: Optional[Network] = None,
    record: bool = False,
) -> AgResult:
    """Chain ag2 passes until the palette is the smallest prime above ``2 * delta**2``.

    One pass suffices when ``palette <= p**2``; otherwise the first pass uses a
    larger field and the second pass starts from at most ``p**2`` colors.
    """
    if net is None:
        net = Network(g, bandwidth or bandwidth_mode("one_bit"))
    target = smallest_prime_above(2 * g.max_degree**2)
    total: Optional[AgResult] = None
    while True:
        res = ag2_run(g, colors, palette, net=net, record=record)
        if total is None:
            total = res
        else:
            total.colors, total.palette = res.colors, res.palette
            total.phases += res.phases
            total.setup_rounds += res.setup_rounds
            total.main_rounds += res.main_rounds
            total.finalize_phase = res.finalize_phase
            total.history += res.history
            total.passes += 1
            total.pass_log += res.pass_log
        colors, palette = res.colors, res.palette
        if palette <= target:
            return total
