"""Lockstep CONGEST round simulator.

Two layers live here:

* :func:`run` steps a set of :class:`VertexProcess` objects round by round and
  enforces the per-edge bandwidth cap on every message.
* :class:`Network` is the phase-level driver the algorithms use.  A call to
  :meth:`Network.exchange` is one synchronous communication step in which every
  vertex may hand each neighbor a message of arbitrary length; long messages
  are streamed in ``B``-bit chunks exactly as :func:`stream_send` would, so the
  step costs ``max ceil(bit_len / B)`` rounds.  Both layers write the same
  :class:`RoundTrace` records.
"""

from __future__ import annotations

import csv
import io
import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .graph import Graph


class BandwidthExceeded(RuntimeError):
    def __init__(self, vertex: int, rnd: int, bit_len: int, limit: int):
        super().__init__(
            f"vertex {vertex} sent {bit_len} bits in round {rnd} (limit {limit})"
        )
        self.vertex, self.round, self.bit_len, self.limit = vertex, rnd, bit_len, limit


class RoundCapReached(RuntimeError):
    pass


class ProtocolError(RuntimeError):
    pass


@dataclass(frozen=True)
class Bandwidth:
    bits_per_edge_per_round: int

    def __post_init__(self) -> None:
        if self.bits_per_edge_per_round < 1:
            raise ValueError("bandwidth must be at least one bit")

    @property
    def B(self) -> int:
        return self.bits_per_edge_per_round


def bandwidth_mode(mode: str, n: int | None = None) -> Bandwidth:
    if mode == "one_bit":
        return Bandwidth(1)
    if mode == "congest":
        if n is None:
            raise ValueError("congest bandwidth needs n")
        return Bandwidth(max(1, math.ceil(math.log2(n))) if n > 1 else 1)
    if mode.startswith("B:"):
        return Bandwidth(int(mode[2:]))
    raise ValueError(f"unknown bandwidth mode {mode!r}")


@dataclass(frozen=True)
class Message:
    payload: Any
    bit_len: int

    def __post_init__(self) -> None:
        if self.bit_len < 0:
            raise ValueError("bit_len must be non-negative")


@dataclass
class RoundTrace:
    rounds_elapsed: int = 0
    total_bits_sent: int = 0
    per_round: List[Tuple[int, int]] = field(default_factory=list)
    outputs: Dict[int, Any] = field(default_factory=dict)
    cap_reached: bool = False
    stage_rounds: Dict[str, int] = field(default_factory=dict)

    def record(self, messages: int, bits: int, stage: str | None = None) -> None:
        self.per_round.append((messages, bits))
        self.rounds_elapsed += 1
        self.total_bits_sent += bits
        if stage is not None:
            self.stage_rounds[stage] = self.stage_rounds.get(stage, 0) + 1

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["round", "messages", "bits"])
        for i, (m, b) in enumerate(self.per_round, start=1):
            w.writerow([i, m, b])
        return buf.getvalue()


class VertexProcess:
    """Per-vertex state machine driven by :func:`run`.

    ``on_round`` sees only its own state, the round number and its inbox; it
    returns a mapping ``neighbor -> Message``.
    """

    halted: bool = False
    output: Any = None

    def init(self, ctx: "VertexContext") -> None:
        self.ctx = ctx

    def on_round(self, rnd: int, inbox: Mapping[int, Message]) -> Dict[int, Message]:
        raise NotImplementedError


@dataclass(frozen=True)
class VertexContext:
    vertex: int
    neighbors: Tuple[int, ...]
    n: int
    max_degree: int
    bandwidth: Bandwidth


def run(
    graph: Graph,
    processes: Sequence[VertexProcess],
    bandwidth: Bandwidth,
    max_rounds: int,
) -> RoundTrace:
    if len(processes) != graph.n:
        raise ValueError("need exactly one process per vertex")
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    B = bandwidth.B
    for v, p in enumerate(processes):
        p.init(VertexContext(v, graph.adj[v], graph.n, graph.max_degree, bandwidth))
    trace = RoundTrace()
    inboxes: List[Dict[int, Message]] = [{} for _ in range(graph.n)]
    rnd = 0
    while not all(p.halted for p in processes):
        if rnd >= max_rounds:
            trace.cap_reached = True
            break
        rnd += 1
        next_inboxes: List[Dict[int, Message]] = [{} for _ in range(graph.n)]
        messages = bits = 0
        for v, p in enumerate(processes):  # ascending ID; order is unobservable
            if p.halted:
                continue
            # a process may send its last messages in the round it halts
            outbox = p.on_round(rnd, dict(inboxes[v])) or {}
            for u, msg in outbox.items():
                if u not in graph.adj[v]:
                    raise ProtocolError(f"vertex {v} addressed non-neighbor {u}")
                if msg.bit_len > B:
                    raise BandwidthExceeded(v, rnd, msg.bit_len, B)
                next_inboxes[u][v] = msg
                messages += 1
                bits += msg.bit_len
        trace.record(messages, bits)
        inboxes = next_inboxes
    trace.outputs = {v: p.output for v, p in enumerate(processes)}
    return trace


# -- streaming ------------------------------------------------------------------

class _StreamSender(VertexProcess):
    def __init__(self, bits: str, peer: int):
        self.bits, self.peer, self.pos = bits, peer, 0
        self.halted = not bits

    def on_round(self, rnd, inbox):
        B = self.ctx.bandwidth.B
        chunk = self.bits[self.pos:self.pos + B]
        self.pos += len(chunk)
        if self.pos >= len(self.bits):
            self.halted = True
        return {self.peer: Message(chunk, len(chunk))}


class _StreamReceiver(VertexProcess):
    def __init__(self, expected: int):
        self.expected, self.buf = expected, []
        self.halted = expected == 0
        self.output = ""

    def on_round(self, rnd, inbox):
        for msg in inbox.values():
            self.buf.append(msg.payload)
        self.output = "".join(self.buf)
        if len(self.output) >= self.expected:
            self.halted = True
        return {}


def stream_send(payload: str, bandwidth: Bandwidth) -> Tuple[str, int]:
    """Ship a bit string over one edge; returns ``(reassembled, rounds)``.

    Rounds counts the sending rounds, ``ceil(len(payload) / B)``; the receiver
    reads the final chunk at the start of the following round, which belongs
    to whatever step comes next.
    """
    if set(payload) - {"0", "1"}:
        raise ValueError("payload must be a bit string")
    g = Graph.from_edges(2, [(0, 1)])
    sender = _StreamSender(payload, 1)
    receiver = _StreamReceiver(len(payload))
    cap = len(payload) + 2
    trace = run(g, [sender, receiver], bandwidth, cap)
    sending_rounds = sum(1 for m, _ in trace.per_round if m)
    return trace.outputs[1], sending_rounds


def stream_rounds(bit_len: int, B: int) -> int:
    return -(-bit_len // B)


# -- phase-level driver -----------------------------------------------------------

Outboxes = Mapping[int, Mapping[int, Message]]


class Network:
    """Synchronous communication steps over a fixed graph, with round accounting."""

    def __init__(self, graph: Graph, bandwidth: Bandwidth, max_rounds: Optional[int] = None):
        self.graph = graph
        self.bandwidth = bandwidth
        self.trace = RoundTrace()
        self.max_rounds = max_rounds
        self._stage: str | None = None

    @property
    def B(self) -> int:
        return self.bandwidth.B

    @property
    def rounds(self) -> int:
        return self.trace.rounds_elapsed

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        prev, self._stage = self._stage, name
        self.trace.stage_rounds.setdefault(name, 0)
        try:
            yield
        finally:
            self._stage = prev

    def _charge(self, loads: Sequence[int], min_rounds: int) -> None:
        B = self.B
        chunks = [stream_rounds(b, B) for b in loads]
        rounds = max([min_rounds] + chunks)
        # a stream of c chunks is active in rounds 0..c-1; only its last chunk may be short
        ending = [0] * (rounds + 1)
        short = [0] * (rounds + 1)
        for b, c in zip(loads, chunks):
            ending[c] += 1
            short[c - 1] += B * c - b
        active = len(loads)
        for r in range(rounds):
            active -= ending[r]
            self.trace.record(active, active * B - short[r], self._stage)
        if self.max_rounds is not None and self.rounds > self.max_rounds:
            self.trace.cap_reached = True
            raise RoundCapReached(f"round cap {self.max_rounds} exceeded")

    def exchange(self, outboxes: Outboxes, min_rounds: int = 1) -> List[Dict[int, Message]]:
        """Deliver one message per edge direction; returns each vertex's inbox."""
        inboxes: List[Dict[int, Message]] = [{} for _ in range(self.graph.n)]
        loads = []
        for v in sorted(outboxes):
            adj = self.graph.adj[v]
            for u in sorted(outboxes[v]):
                if u not in adj:
                    raise ProtocolError(f"vertex {v} addressed non-neighbor {u}")
                msg = outboxes[v][u]
                inboxes[u][v] = msg
                if msg.bit_len:
                    loads.append(msg.bit_len)
        self._charge(loads, min_rounds)
        return inboxes

    def charge_loads(self, loads: Mapping[Tuple[int, int], int], min_rounds: int = 1) -> None:
        """Account for a step whose per-edge-direction bit loads are known."""
        for (v, u) in loads:
            if u not in self.graph.adj[v]:
                raise ProtocolError(f"load on non-edge {v}->{u}")
        self._charge([b for _, b in sorted(loads.items()) if b], min_rounds)
