"""The lattice-group of finitely supported maps N -> Z, with polars,
minimal/quasi-minimal primes, and complementation witnesses.

Everything is pointwise and support-driven: two positive functions are
orthogonal exactly when their supports are disjoint, the principal convex
subgroup of f is {h : supp(h) contained in supp(f)}, and the point primes
{f : f(n) = 0} exhaust the support-based spectrum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .reporting import Report


class FnlError(ValueError):
    pass


@dataclass(frozen=True)
class FinSuppFn:
    """Finitely supported map N -> Z; entries are sorted (index, value)
    pairs with no zero values, so the support is exactly the key set."""

    entries: tuple = ()

    @classmethod
    def from_map(cls, mapping) -> "FinSuppFn":
        items = mapping.items() if hasattr(mapping, "items") else mapping
        cleaned = []
        for k, v in items:
            k, v = int(k), int(v)
            if k < 0:
                raise FnlError("indices must be natural numbers")
            if v != 0:
                cleaned.append((k, v))
        return cls(tuple(sorted(cleaned)))

    @classmethod
    def identity(cls) -> "FinSuppFn":
        return cls(())

    @classmethod
    def indicator(cls, indices) -> "FinSuppFn":
        return cls.from_map({i: 1 for i in indices})

    @classmethod
    def basis(cls, index: int) -> "FinSuppFn":
        return cls.from_map({index: 1})

    def value(self, n: int) -> int:
        for k, v in self.entries:
            if k == n:
                return v
        return 0

    @property
    def support(self) -> frozenset:
        return frozenset(k for k, _ in self.entries)

    def is_identity(self) -> bool:
        return not self.entries

    def is_positive(self) -> bool:
        """f >= identity pointwise."""
        return all(v >= 0 for _, v in self.entries)

    def _pointwise(self, other: "FinSuppFn", op) -> "FinSuppFn":
        keys = self.support | other.support
        return FinSuppFn.from_map({k: op(self.value(k), other.value(k)) for k in keys})

    def add(self, other: "FinSuppFn") -> "FinSuppFn":
        return self._pointwise(other, lambda a, b: a + b)

    def neg(self) -> "FinSuppFn":
        return FinSuppFn(tuple((k, -v) for k, v in self.entries))

    def sub(self, other: "FinSuppFn") -> "FinSuppFn":
        return self.add(other.neg())

    def meet(self, other: "FinSuppFn") -> "FinSuppFn":
        return self._pointwise(other, min)

    def join(self, other: "FinSuppFn") -> "FinSuppFn":
        return self._pointwise(other, max)

    def abs(self) -> "FinSuppFn":
        """|f| = f v f^-1, i.e. pointwise absolute value."""
        return FinSuppFn(tuple((k, abs(v)) for k, v in self.entries))

    def scale(self, n: int) -> "FinSuppFn":
        """n-th power in additive notation."""
        if n == 0:
            return FinSuppFn()
        return FinSuppFn(tuple((k, n * v) for k, v in self.entries))

    def leq(self, other: "FinSuppFn") -> bool:
        return all(self.value(k) <= other.value(k) for k in self.support | other.support)

    def to_json(self):
        return {str(k): v for k, v in self.entries}

    @classmethod
    def from_json(cls, obj) -> "FinSuppFn":
        return cls.from_map({int(k): int(v) for k, v in obj.items()})

    def __repr__(self):
        return f"FinSuppFn({dict(self.entries)!r})"


def orthogonal(f: FinSuppFn, g: FinSuppFn) -> bool:
    """|f| meet |g| is the identity (equivalently, disjoint supports)."""
    return f.abs().meet(g.abs()).is_identity()


# ---------------------------------------------------------------------------
# Support subgroups, polars, point primes
# ---------------------------------------------------------------------------

PRINCIPAL_CONVEX = "principal-convex"
POLAR = "polar"
IDEAL = "ideal"


@dataclass(frozen=True)
class SupportSubgroup:
    """Membership: supp(h) inside the fixed finite support set.  In this
    group, principal convex subgroups, double polars and principal ideals
    all take this shape."""

    support: frozenset
    role: str = PRINCIPAL_CONVEX

    def contains(self, h: FinSuppFn) -> bool:
        return h.support <= self.support

    def to_json(self):
        return {"role": self.role, "support": sorted(self.support)}


@dataclass(frozen=True)
class PointPrime:
    """The minimal prime at an index: functions vanishing there."""

    index: int

    def contains(self, h: FinSuppFn) -> bool:
        return h.value(self.index) == 0

    def to_json(self):
        return {"role": "point-prime", "index": self.index}


def principal_convex_contains(f: FinSuppFn, h: FinSuppFn) -> bool:
    """h is dominated by some power of |f|; here: support inclusion."""
    return h.support <= f.support


def principal_convex_power_witness(f: FinSuppFn, h: FinSuppFn) -> int | None:
    """Smallest n >= 1 with |h| <= n|f|, or None when no power suffices."""
    if not h.support <= f.support:
        return None
    n = 1
    fa, ha = f.abs(), h.abs()
    for k in h.support:
        need = -(-abs(ha.value(k)) // abs(fa.value(k)))  # ceil division
        n = max(n, need)
    return n


def double_polar(f: FinSuppFn) -> SupportSubgroup:
    return SupportSubgroup(f.support, POLAR)


def polar_at_level(f: FinSuppFn, level: int) -> SupportSubgroup:
    """The polar of f restricted to supports inside {0..level-1}."""
    return SupportSubgroup(frozenset(range(level)) - f.support, POLAR)


def principal_ideal(f: FinSuppFn) -> SupportSubgroup:
    # the group is Abelian, so ideals coincide with convex sublattice subgroups
    return SupportSubgroup(f.support, IDEAL)


# ---------------------------------------------------------------------------
# Exhaustive boxes
# ---------------------------------------------------------------------------

DEFAULT_BOX = 2
DEFAULT_LEVEL = 4


def box_functions(level: int, box: int = DEFAULT_BOX):
    """All functions with support inside {0..level-1} and entries in [-box, box]."""
    rng = range(-box, box + 1)
    for values in itertools.product(rng, repeat=level):
        yield FinSuppFn.from_map(dict(enumerate(values)))


def positive_box_functions(level: int, box: int = DEFAULT_BOX):
    rng = range(0, box + 1)
    for values in itertools.product(rng, repeat=level):
        yield FinSuppFn.from_map(dict(enumerate(values)))


def _coerce_predicate(p):
    if isinstance(p, (SupportSubgroup, PointPrime)):
        return p.contains
    if callable(p):
        return p
    raise FnlError("predicate must be a SupportSubgroup, PointPrime, or callable")


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def minimal_prime_check(index: int, level: int, box: int = DEFAULT_BOX) -> Report:
    """Exhaustively verify that the point prime at ``index`` behaves like a
    minimal prime on the truncation: convex sublattice subgroup, prime, and
    equal to the union of the polars of its non-members."""
    if not 0 <= index < level:
        raise FnlError("truncation level must exceed the index")
    prime = PointPrime(index)
    report = Report(
        f"minimal prime at index {index}",
        scope=f"supports in 0..{level - 1}, entries in [-{box}, {box}]",
    )
    everything = list(box_functions(level, box))
    members = [f for f in everything if prime.contains(f)]

    report.add("proper", any(not prime.contains(f) for f in everything),
               note="some box element escapes the prime")

    ok, witness = True, None
    for f in members:
        for g in members:
            if not prime.contains(f.sub(g)):
                ok, witness = False, [f.to_json(), g.to_json()]
                break
        if not ok:
            break
    report.add("subgroup", ok, witness)

    ok, witness = True, None
    for f in members:
        for g in members:
            if not (prime.contains(f.meet(g)) and prime.contains(f.join(g))):
                ok, witness = False, [f.to_json(), g.to_json()]
                break
        if not ok:
            break
    report.add("sublattice", ok, witness)

    ok, witness = True, None
    positives = [f for f in everything if f.is_positive()]
    for g in positives:
        if not prime.contains(g):
            continue
        for h in positives:
            if h.leq(g) and not prime.contains(h):
                ok, witness = False, [h.to_json(), g.to_json()]
                break
        if not ok:
            break
    report.add("convex", ok, witness, note="checked on 0 <= h <= g")

    ok, witness = True, None
    for f in positives:
        for g in positives:
            if prime.contains(f.meet(g)) and not (prime.contains(f) or prime.contains(g)):
                ok, witness = False, [f.to_json(), g.to_json()]
                break
        if not ok:
            break
    report.add("prime", ok, witness)

    # union of polars of non-members: both inclusions
    ok, witness = True, None
    non_members = [x for x in everything if not prime.contains(x)]
    for h in members:
        if not any(orthogonal(h, x) for x in non_members):
            ok, witness = False, h.to_json()
            break
    report.add("members-hit-a-polar-of-a-non-member", ok, witness)
    ok, witness = True, None
    for x in non_members:
        for h in everything:
            if orthogonal(h, x) and not prime.contains(h):
                ok, witness = False, [x.to_json(), h.to_json()]
                break
        if not ok:
            break
    report.add("polars-of-non-members-stay-inside", ok, witness)
    return report


def quasi_minimal_report(predicate, level: int, box: int = DEFAULT_BOX) -> Report:
    """Truncated check that a prime equals the union of the double polars of
    its members.  One inclusion is structural (every member lies in its own
    double polar); the content is the other: double polars of members must
    stay inside the prime."""
    contains = _coerce_predicate(predicate)
    report = Report(
        "quasi-minimality",
        scope=f"supports in 0..{level - 1}, entries in [-{box}, {box}]",
    )
    everything = list(box_functions(level, box))
    members = [f for f in everything if contains(f)]
    report.add("proper", len(members) < len(everything),
               note="the improper predicate is rejected")
    ok, witness = True, None
    for x in members:
        for h in everything:
            if h.support <= x.support and not contains(h):
                ok, witness = False, [x.to_json(), h.to_json()]
                break
        if not ok:
            break
    report.add("double-polars-of-members-stay-inside", ok, witness)
    return report


def quasi_minimal_check(predicate, level: int, box: int = DEFAULT_BOX) -> bool:
    return quasi_minimal_report(predicate, level, box).passed


def theorem_complement_witness(f: FinSuppFn, level: int, box: int = DEFAULT_BOX):
    """Complement a positive f inside the truncation: returns g with
    f meet g = identity and f join g a weak unit at this level, plus the
    verification report."""
    if not f.is_positive():
        raise FnlError("complementation needs a positive function")
    if not f.support <= frozenset(range(level)):
        raise FnlError(f"support of f must sit inside 0..{level - 1}")
    g = FinSuppFn.indicator(frozenset(range(level)) - f.support)
    report = Report(
        "complementation witness",
        scope=f"level {level}, entries in [-{box}, {box}]",
    )
    report.add("meet-is-identity", f.meet(g).is_identity())
    w = f.join(g)
    report.add("join-has-full-support", w.support == frozenset(range(level)))
    ok, witness = True, None
    for x in box_functions(level, box):
        if w.meet(x.abs()).is_identity() and not x.is_identity():
            ok, witness = False, x.to_json()
            break
    report.add("join-is-weak-unit-at-level", ok, witness)
    report.summary["witness"] = g.to_json()
    return g, report


def ideal_intersection_report(f: FinSuppFn, g: FinSuppFn, level: int, box: int = DEFAULT_BOX) -> Report:
    """Principal ideals: J(f) intersect J(g) equals J(f meet g), exhaustively
    on the truncation (supports multiply out to intersections here)."""
    if not (f.is_positive() and g.is_positive()):
        raise FnlError("ideal intersection check needs positive functions")
    report = Report(
        "principal ideal intersection",
        scope=f"level {level}, entries in [-{box}, {box}]",
    )
    jf, jg, jm = principal_ideal(f), principal_ideal(g), principal_ideal(f.meet(g))
    ok, witness = True, None
    for h in box_functions(level, box):
        if (jf.contains(h) and jg.contains(h)) != jm.contains(h):
            ok, witness = False, h.to_json()
            break
    report.add("intersection-equals-ideal-of-meet", ok, witness)
    report.add(
        "support-identity",
        f.meet(g).support == (f.support & g.support),
        note="supp(f ^ g) = supp(f) n supp(g) for positive f, g",
    )
    return report


def ideal_intersection_check(f, g, level: int, box: int = DEFAULT_BOX) -> bool:
    return ideal_intersection_report(f, g, level, box).passed


def no_strong_unit_witness(u: FinSuppFn) -> FinSuppFn:
    """A basis function no power of u dominates: the group has no strong unit.

    The witness sits just past the support of u, so n|u| vanishes there for
    every n while the witness takes value 1.
    """
    index = max(u.support) + 1 if u.support else 0
    return FinSuppFn.basis(index)


def strong_unit_gap_report(u: FinSuppFn, witness: FinSuppFn | None = None) -> Report:
    report = Report("no strong unit")
    w = witness if witness is not None else no_strong_unit_witness(u)
    gap = [k for k in w.support if u.value(k) == 0]
    report.add(
        "witness-outside-every-power",
        bool(gap) and not principal_convex_contains(u, w),
        note=f"|u| vanishes at index {gap[0]} where the witness is 1" if gap else "",
    )
    report.summary["witness"] = w.to_json()
    return report


def ell_law_report(level: int = DEFAULT_LEVEL, box: int = DEFAULT_BOX,
                   seed: int = 0, samples: int = 300) -> Report:
    """Seeded sweep of the lattice-group laws on the truncation."""
    import random

    rng = random.Random(seed)

    def rand_fn():
        return FinSuppFn.from_map(
            {i: rng.randint(-box, box) for i in range(level)}
        )

    report = Report(
        "lattice-group laws",
        scope=f"level {level}, entries in [-{box}, {box}], seed {seed}, {samples} samples",
    )
    dist_ok, trans_ok, abs_ok, join_abs_ok = True, True, True, True
    witness = {}
    for _ in range(samples):
        f, g, h = rand_fn(), rand_fn(), rand_fn()
        if f.meet(g.join(h)) != f.meet(g).join(f.meet(h)):
            dist_ok, witness = False, {"f": f.to_json(), "g": g.to_json(), "h": h.to_json()}
        if f.add(g.join(h)) != f.add(g).join(f.add(h)):
            trans_ok, witness = False, {"f": f.to_json(), "g": g.to_json(), "h": h.to_json()}
        if not f.add(g).abs().leq(f.abs().add(g.abs()).add(f.abs())):
            abs_ok, witness = False, {"f": f.to_json(), "g": g.to_json()}
        if f.join(f.neg()) != f.abs():
            join_abs_ok, witness = False, {"f": f.to_json()}
    report.add("lattice-distributivity", dist_ok, witness if not dist_ok else None)
    report.add("translation-distributes", trans_ok, witness if not trans_ok else None)
    report.add("abs-triangle-law", abs_ok, witness if not abs_ok else None)
    report.add("join-with-inverse-is-abs", join_abs_ok, witness if not join_abs_ok else None)
    return report
