"""Exact arithmetic for three families of partially ordered groups.

Kinds: ``zvec`` (integer vectors Z^n), ``fword`` (freely reduced words in
F_n), ``finsupp`` (finitely supported maps N -> Z).  All values are
immutable after construction and every operation is pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

ZVEC = "zvec"
FWORD = "fword"
FINSUPP = "finsupp"

TRIVIAL = "trivial"
COORDINATEWISE = "coordinatewise"

KINDS = (ZVEC, FWORD, FINSUPP)
ORDERS = (TRIVIAL, COORDINATEWISE)


class GroupError(ValueError):
    """Kind/rank mismatch or malformed element data."""


def reduce_letters(letters) -> tuple[int, ...]:
    """Freely reduce a sequence of signed 1-based generator indices."""
    out: list[int] = []
    for letter in letters:
        if letter == 0:
            raise GroupError("generator index 0 is not allowed")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(int(letter))
    return tuple(out)


def invert_letters(letters) -> tuple[int, ...]:
    return tuple(-l for l in reversed(letters))


@dataclass(frozen=True)
class GroupElement:
    """Immutable element; ``data`` layout depends on ``kind``.

    zvec: tuple of ints of length rank.
    fword: freely reduced tuple of signed generator indices.
    finsupp: sorted tuple of (index, value) pairs with no zero values.
    """

    kind: str
    data: tuple

    def is_identity(self) -> bool:
        return self.kind == ZVEC and not any(self.data) or (
            self.kind != ZVEC and not self.data
        )

    def __repr__(self):
        return f"GroupElement({self.kind}, {self.data!r})"


def zvec_element(values) -> GroupElement:
    return GroupElement(ZVEC, tuple(int(v) for v in values))


def word_element(letters) -> GroupElement:
    return GroupElement(FWORD, reduce_letters(letters))


def finsupp_element(mapping) -> GroupElement:
    items = mapping.items() if hasattr(mapping, "items") else mapping
    cleaned = sorted((int(k), int(v)) for k, v in items if int(v) != 0)
    for k, _ in cleaned:
        if k < 0:
            raise GroupError("finsupp indices must be natural numbers")
    return GroupElement(FINSUPP, tuple(cleaned))


_WORD_TOKEN = re.compile(r"^g(\d+)(?:\^(-?\d+))?$")


def parse_word(text: str, rank: int | None = None) -> GroupElement:
    """Parse a signed-generator string such as ``"g1 g2^-1"``; ``"e"`` is the identity."""
    text = text.strip()
    if text in ("", "e"):
        return GroupElement(FWORD, ())
    letters: list[int] = []
    for token in text.split():
        m = _WORD_TOKEN.match(token)
        if not m:
            raise GroupError(f"bad generator token {token!r}")
        idx = int(m.group(1))
        if idx < 1:
            raise GroupError(f"generator index must be >= 1 in {token!r}")
        if rank is not None and idx > rank:
            raise GroupError(f"generator index {idx} exceeds rank {rank}")
        power = int(m.group(2)) if m.group(2) else 1
        letters.extend([idx if power > 0 else -idx] * abs(power))
    return word_element(letters)


def format_word(elt: GroupElement) -> str:
    if elt.kind != FWORD:
        raise GroupError("format_word expects an fword element")
    if not elt.data:
        return "e"
    return " ".join(f"g{l}" if l > 0 else f"g{-l}^-1" for l in elt.data)


def word_exponent_sums(elt: GroupElement, rank: int) -> tuple[int, ...]:
    """Abelianization of a free word as a vector of exponent sums."""
    sums = [0] * rank
    for l in elt.data:
        sums[abs(l) - 1] += 1 if l > 0 else -1
    return tuple(sums)


@dataclass(frozen=True)
class PoGroup:
    """A group family together with a compatible partial order.

    ``order`` is ``trivial`` (a <= b iff a == b) or, on zvec only,
    ``coordinatewise``.  Rank is fixed per instance; mismatches are errors.
    """

    kind: str
    rank: int | None = None
    order: str = TRIVIAL

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GroupError(f"unknown group kind {self.kind!r}")
        if self.kind in (ZVEC, FWORD):
            if not isinstance(self.rank, int) or self.rank < 1:
                raise GroupError(f"{self.kind} groups need a positive rank")
        elif self.rank is not None:
            raise GroupError("finsupp groups have no rank")
        if self.order not in ORDERS:
            raise GroupError(f"unknown order {self.order!r}")
        if self.order == COORDINATEWISE and self.kind != ZVEC:
            raise GroupError("coordinatewise order is only defined on zvec")

    # -- element plumbing ------------------------------------------------

    def identity(self) -> GroupElement:
        if self.kind == ZVEC:
            return GroupElement(ZVEC, (0,) * self.rank)
        return GroupElement(self.kind, ())

    def generator(self, i: int) -> GroupElement:
        """The i-th generator, 1-based.  finsupp uses the basis map {i-1: 1}."""
        if i < 1:
            raise GroupError("generator index must be >= 1")
        if self.kind == ZVEC:
            if i > self.rank:
                raise GroupError(f"generator index {i} exceeds rank {self.rank}")
            return GroupElement(ZVEC, tuple(1 if j == i - 1 else 0 for j in range(self.rank)))
        if self.kind == FWORD:
            if i > self.rank:
                raise GroupError(f"generator index {i} exceeds rank {self.rank}")
            return GroupElement(FWORD, (i,))
        return GroupElement(FINSUPP, ((i - 1, 1),))

    def check_element(self, a: GroupElement) -> None:
        if not isinstance(a, GroupElement) or a.kind != self.kind:
            raise GroupError(f"element kind mismatch: expected {self.kind}")
        if self.kind == ZVEC and len(a.data) != self.rank:
            raise GroupError(f"vector length {len(a.data)} != rank {self.rank}")
        if self.kind == FWORD:
            for l in a.data:
                if abs(l) > self.rank:
                    raise GroupError(f"letter g{abs(l)} exceeds rank {self.rank}")

    # -- group operations -------------------------------------------------

    def mul(self, a: GroupElement, b: GroupElement) -> GroupElement:
        self.check_element(a)
        self.check_element(b)
        if self.kind == ZVEC:
            return GroupElement(ZVEC, tuple(x + y for x, y in zip(a.data, b.data)))
        if self.kind == FWORD:
            return GroupElement(FWORD, reduce_letters(a.data + b.data))
        acc = dict(a.data)
        for k, v in b.data:
            acc[k] = acc.get(k, 0) + v
        return finsupp_element(acc)

    def inv(self, a: GroupElement) -> GroupElement:
        self.check_element(a)
        if self.kind == ZVEC:
            return GroupElement(ZVEC, tuple(-x for x in a.data))
        if self.kind == FWORD:
            return GroupElement(FWORD, invert_letters(a.data))
        return GroupElement(FINSUPP, tuple((k, -v) for k, v in a.data))

    def conjugate(self, a: GroupElement, t: GroupElement) -> GroupElement:
        """t^-1 a t."""
        return self.mul(self.mul(self.inv(t), a), t)

    def po_leq(self, a: GroupElement, b: GroupElement) -> bool:
        self.check_element(a)
        self.check_element(b)
        if self.order == TRIVIAL:
            return a == b
        return all(x <= y for x, y in zip(a.data, b.data))

    def positive_cone_generators(self) -> tuple[GroupElement, ...]:
        """Monoid generators of G+; empty for the trivial order."""
        if self.order == TRIVIAL:
            return ()
        return tuple(self.generator(i) for i in range(1, self.rank + 1))

    # -- JSON --------------------------------------------------------------

    def to_json(self):
        out = {"kind": self.kind, "order": self.order}
        if self.rank is not None:
            out["rank"] = self.rank
        return out

    @classmethod
    def from_json(cls, obj) -> "PoGroup":
        return cls(obj["kind"], obj.get("rank"), obj.get("order", TRIVIAL))

    def element_to_json(self, a: GroupElement):
        self.check_element(a)
        if self.kind == ZVEC:
            return list(a.data)
        if self.kind == FWORD:
            return format_word(a)
        return {str(k): v for k, v in a.data}

    def element_from_json(self, obj) -> GroupElement:
        if self.kind == ZVEC:
            if not isinstance(obj, (list, tuple)) or len(obj) != self.rank:
                raise GroupError(f"expected an integer array of length {self.rank}")
            return zvec_element(obj)
        if self.kind == FWORD:
            if not isinstance(obj, str):
                raise GroupError("expected a signed-generator string")
            return parse_word(obj, self.rank)
        if not isinstance(obj, dict):
            raise GroupError("expected an {index: value} map")
        return finsupp_element({int(k): int(v) for k, v in obj.items()})
