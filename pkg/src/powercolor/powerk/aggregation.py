"""Aggregation specs: a finite domain plus a commutative family of functions on it.

A spec's tokens name functions ``f_t : A -> A``.  ``token_of(state_v, state_u)``
says which function a pair contributes to ``v``'s result; the fold of all
contributions is the value ``v`` receives.  In idempotent mode applying a
token twice is the same as applying it once, so duplicate deliveries are
harmless.  Counting specs are not idempotent: they need either a tolerance
for over-counting or the exact one-applier discipline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Tuple

from ..graph import bits_for

MODES = ("idempotent", "overcount", "exact_count")


@dataclass(frozen=True)
class AggregationSpec:
    domain_size: int
    init: Any
    token_of: Callable[[Any, Any], Any]
    apply: Callable[[Any, Any], Any]
    mode: str = "idempotent"
    name: str = ""

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown aggregation mode {self.mode!r}")
        if self.domain_size < 1:
            raise ValueError("domain must be non-empty")

    @property
    def value_bits(self) -> int:
        return bits_for(self.domain_size - 1)

    def apply_times(self, token: Any, times: int, x: Any) -> Any:
        for _ in range(times):
            x = self.apply(token, x)
        return x

    def fold(self, tokens: Iterable[Any], x: Any = None) -> Any:
        acc = self.init if x is None else x
        for t in tokens:
            acc = self.apply(t, acc)
        return acc


def or_spec(pred: Callable[[Any, Any], bool], name: str = "or") -> AggregationSpec:
    """A = {0, 1}; token 0 is the identity F0 and token 1 the constant-one F1."""
    return AggregationSpec(
        domain_size=2,
        init=0,
        token_of=lambda sv, su: 1 if pred(sv, su) else 0,
        apply=lambda t, x: x | t,
        mode="idempotent",
        name=name,
    )


def max_spec(domain_size: int, value_of: Callable[[Any], int], name: str = "max") -> AggregationSpec:
    """A = {0..domain_size-1}; token t is ``x -> max(x, t)``."""
    return AggregationSpec(
        domain_size=domain_size,
        init=0,
        token_of=lambda sv, su: value_of(su),
        apply=lambda t, x: max(x, t),
        mode="idempotent",
        name=name,
    )


class _SaturatingCount:
    def __init__(self, cap: int):
        self.cap = cap

    def __call__(self, t: int, x: int) -> int:
        return min(self.cap, x + t)


@dataclass(frozen=True)
class _CountSpec(AggregationSpec):
    def apply_times(self, token, times, x):
        return min(self.domain_size - 1, x + token * times)


def count_spec(
    pred: Callable[[Any, Any], bool], cap: int, mode: str = "exact_count", name: str = "count"
) -> AggregationSpec:
    """A = [0, cap] with saturating addition; a pair contributes 1 when ``pred`` holds."""
    if mode == "idempotent":
        raise ValueError("counting is not idempotent")
    return _CountSpec(
        domain_size=cap + 1,
        init=0,
        token_of=lambda sv, su: 1 if pred(sv, su) else 0,
        apply=_SaturatingCount(cap),
        mode=mode,
        name=name,
    )


def support_fold(spec: AggregationSpec, tokens: Iterable[Any]) -> Any:
    """Fold over the distinct tokens only; equals ``spec.fold`` for idempotent specs."""
    seen = []
    for t in tokens:
        if t not in seen:
            seen.append(t)
    return spec.fold(seen)


def token_family(domain_size: int) -> Tuple[Tuple[str, int], ...]:
    """The tokens F0, F1 and max_t over A = {0..domain_size-1}, as (kind, arg) pairs."""
    return (("F0", 0), ("F1", 1)) + tuple(("max", t) for t in range(domain_size))


def apply_family_token(token: Tuple[str, int], x: int) -> int:
    kind, arg = token
    if kind == "F0":
        return x
    if kind == "F1":
        return max(x, 1)
    return max(x, arg)
