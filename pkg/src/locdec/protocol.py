"""Alternating labelling protocols: typed label levels plus a local verifier.

A protocol fixes k label layers, claimed alternately by two players, and a
radius-t verifier run at every node once all layers are down.  The prover
wants every node to accept; the disprover wants one rejection.  Each level
describes its move space twice: a label domain (what one node may carry)
and an optional cover (which whole labellings the evaluator tries).  A
cover must contain a winning move for the level's owner whenever one
exists, so substituting it for the full product never changes the verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Iterator, Optional, Union

from .graphs import Instance
from .labels import INVALID, LabelDomain, Labelling
from .runtime import LocalVerifier

PROVER = "prover"
DISPROVER = "disprover"


class ProtocolError(ValueError):
    """Raised for ill-formed protocols or unsupported transformations."""


def other_side(side: str) -> str:
    return DISPROVER if side == PROVER else PROVER


def pattern_tag(first: str, k: int) -> str:
    """Quantifier-pattern tag: who moves first and how many levels."""
    if k == 0:
        return "decision-0"
    return f"{'existential' if first == PROVER else 'universal'}-{k}"


DomainFactory = Callable[[Instance], LabelDomain]
Cover = Callable[[Instance, tuple[Labelling, ...]], Iterable[Labelling]]
Strategy = Callable[[Instance, tuple[Labelling, ...]], Labelling]


@dataclass(frozen=True)
class Level:
    """One labelling round: its domain, move cover and optional strategy.

    ``cover`` None means the full product over the domain (plus INVALID per
    node on disprover levels).  ``strategy`` picks the honest move during
    constructive play; it is only consulted on prover levels.
    """

    domain_of: DomainFactory
    cover: Optional[Cover] = None
    strategy: Optional[Strategy] = None


@dataclass(frozen=True)
class LanguageSpec:
    """The graph language a protocol claims to decide."""

    name: str
    oracle: Callable[[Instance], bool]
    class_tag: str


@dataclass(frozen=True)
class Protocol:
    name: str
    first: str
    levels: tuple[Level, ...]
    verifier: LocalVerifier
    language: Optional[LanguageSpec] = None

    def __post_init__(self) -> None:
        if self.first not in (PROVER, DISPROVER):
            raise ProtocolError(f"unknown first mover {self.first!r}")
        if self.verifier.layer_count != len(self.levels):
            raise ProtocolError(
                f"{self.name}: verifier reads {self.verifier.layer_count} layers,"
                f" protocol has {len(self.levels)} levels")

    @property
    def level_count(self) -> int:
        return len(self.levels)

    def owner(self, i: int) -> str:
        """Side that places level ``i`` (1-based); strict alternation."""
        if not 1 <= i <= len(self.levels):
            raise ProtocolError(f"{self.name} has no level {i}")
        return self.first if i % 2 == 1 else other_side(self.first)


# ---------------------------------------------------------------------------
# default move enumeration


def canonical_labelling(domain: LabelDomain) -> Labelling:
    """First structured value of the domain at every node."""
    try:
        first = next(iter(domain.values()))
    except StopIteration:
        raise ProtocolError(f"domain {domain.name} has no values") from None
    return Labelling((first,) * domain.instance.n)


def all_invalid_labelling(n: int) -> Labelling:
    return Labelling((INVALID,) * n)


def default_cover_size(domain: LabelDomain, include_invalid: bool) -> int:
    per_node = domain.size + (1 if include_invalid and domain.has_invalid else 0)
    return per_node ** domain.instance.n


def product_cover(domain: LabelDomain,
                  include_invalid: bool = False) -> Iterator[Labelling]:
    """Every labelling over the domain, lexicographic in identity order.

    The node with the smallest identity is the most significant position,
    and each node runs through the domain in enumeration order (INVALID
    last when requested and the encoding has spare patterns).
    """
    instance = domain.instance
    order = sorted(range(instance.n), key=instance.id_of)
    axis: list[object] = list(domain.values())
    if include_invalid and domain.has_invalid:
        axis.append(INVALID)
    slot: list[object] = [None] * instance.n
    for combo in product(axis, repeat=instance.n):
        for pos, value in zip(order, combo):
            slot[pos] = value
        yield Labelling(tuple(slot))
