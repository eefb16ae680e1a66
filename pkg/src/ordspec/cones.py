"""Pre-cones of partially ordered groups and their decision procedures.

Two representations: exact lexicographic-flag cones on Z^n and bounded
sign-table cones on balls of F_n.  A cone C holds the elements that are
positive-or-equivalent-to-identity in the right pre-order it encodes;
``a`` is below ``b`` exactly when ``b a^-1`` lands in C.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import gcd, lcm

from .groups import (
    FWORD,
    TRIVIAL,
    ZVEC,
    GroupElement,
    GroupError,
    PoGroup,
    format_word,
    invert_letters,
    parse_word,
    reduce_letters,
    word_element,
    zvec_element,
)
from .reporting import Report


class Sign(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    KERNEL = "kernel"
    OUT_OF_SCOPE = "out-of-scope"


class CmpResult(Enum):
    LESS = "less"
    EQUIV = "equiv"
    GREATER = "greater"
    OUT_OF_SCOPE = "out-of-scope"


class ConeError(ValueError):
    """Representation mismatch or violated precondition."""


class BudgetError(RuntimeError):
    """An exhaustive sweep would exceed its configured budget."""


_SIGN_FROM_INT = {1: Sign.POSITIVE, 0: Sign.KERNEL, -1: Sign.NEGATIVE}
_CMP_FROM_SIGN = {
    Sign.POSITIVE: CmpResult.LESS,
    Sign.KERNEL: CmpResult.EQUIV,
    Sign.NEGATIVE: CmpResult.GREATER,
    Sign.OUT_OF_SCOPE: CmpResult.OUT_OF_SCOPE,
}


# ---------------------------------------------------------------------------
# Lexicographic flag cones on Z^n
# ---------------------------------------------------------------------------


def _primitive_int_row(row: list[Fraction]) -> tuple[int, ...]:
    # positive rescaling only: the induced pre-order must not flip
    den = 1
    for x in row:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in row]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    return tuple(v // g for v in ints)


def canonical_flag(rows, rank: int) -> tuple[tuple[tuple[int, ...], ...], int]:
    """Reduce a flag to its canonical form.

    Each row is reduced against the pivot columns of earlier rows (a
    positive-scaling/earlier-row change that leaves the pre-order intact),
    scaled to a primitive integer vector, and dropped if dependent.
    Returns (canonical rows, number of pruned rows).
    """
    canon: list[tuple[int, ...]] = []
    pivots: list[int] = []
    pruned = 0
    for raw in rows:
        row = [Fraction(x) for x in raw]
        if len(row) != rank:
            raise ConeError(f"flag row length {len(row)} != rank {rank}")
        for crow, p in zip(canon, pivots):
            if row[p]:
                c = row[p] / crow[p]
                row = [ri - c * ci for ri, ci in zip(row, crow)]
        if not any(row):
            pruned += 1
            continue
        prim = _primitive_int_row(row)
        canon.append(prim)
        pivots.append(next(i for i, v in enumerate(prim) if v))
    return tuple(canon), pruned


def _parse_flag_entry(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise ConeError(f"flag entries must be integers or 'p/q' strings, got {x!r}")


class LexFlagCone:
    """a in C  iff  (<v_1,a>, ..., <v_k,a>) >=_lex 0.

    Flags are stored canonically (dependent rows pruned, rows primitive
    integer vectors), so equal pre-orders compare equal.  The kernel is
    {a : all pairings vanish}; the cone is a right order iff the flag has
    full rank.
    """

    def __init__(self, rank: int, flag, group: PoGroup | None = None):
        if rank < 1:
            raise ConeError("rank must be positive")
        self.rank = rank
        rows = [[_parse_flag_entry(x) for x in row] for row in flag]
        self.flag, self.pruned_rows = canonical_flag(rows, rank)
        if group is None:
            group = PoGroup(ZVEC, rank)
        if group.kind != ZVEC or group.rank != rank:
            raise ConeError("LexFlagCone needs a zvec group of matching rank")
        self.group = group

    # -- structure ---------------------------------------------------------

    @property
    def is_proper(self) -> bool:
        return len(self.flag) > 0

    @property
    def is_right_order(self) -> bool:
        # rows are independent by construction, so full rank == rank rows
        return len(self.flag) == self.rank

    def pairings(self, a: GroupElement) -> tuple[int, ...]:
        self.group.check_element(a)
        return tuple(sum(v * x for v, x in zip(row, a.data)) for row in self.flag)

    def contains(self, a: GroupElement) -> Sign:
        for p in self.pairings(a):
            if p > 0:
                return Sign.POSITIVE
            if p < 0:
                return Sign.NEGATIVE
        return Sign.KERNEL

    def cmp(self, a: GroupElement, b: GroupElement) -> CmpResult:
        diff = self.group.mul(b, self.group.inv(a))
        return _CMP_FROM_SIGN[self.contains(diff)]

    def truncated(self, depth: int) -> "LexFlagCone":
        return LexFlagCone(self.rank, self.flag[:depth], self.group)

    def __eq__(self, other):
        return (
            isinstance(other, LexFlagCone)
            and self.rank == other.rank
            and self.flag == other.flag
        )

    def __hash__(self):
        return hash((self.rank, self.flag))

    def __repr__(self):
        return f"LexFlagCone(rank={self.rank}, flag={list(map(list, self.flag))})"

    # -- JSON ----------------------------------------------------------------

    def to_json(self):
        return {
            "type": "lexflag",
            "rank": self.rank,
            "flag": [list(row) for row in self.flag],
        }

    @classmethod
    def from_json(cls, obj) -> "LexFlagCone":
        return cls(obj["rank"], obj["flag"])


# ---------------------------------------------------------------------------
# Ball cones on F_n
# ---------------------------------------------------------------------------

Word = tuple  # freely reduced tuple of signed generator indices

_SIGN_NAMES = {"pos": 1, "zero": 0, "neg": -1}
_SIGN_LABELS = {1: "pos", 0: "zero", -1: "neg"}


def word_key(word: Word):
    """Deterministic spelling order: by length, then g1 < g1^-1 < g2 < ..."""
    return (len(word), tuple((abs(l), 0 if l > 0 else 1) for l in word))


def ball_words(rank: int, radius: int, include_identity: bool = False) -> tuple[Word, ...]:
    """All reduced words of length <= radius, in spelling order."""
    out: list[Word] = [()] if include_identity else []
    layer: list[Word] = [()]
    letters = [l for i in range(1, rank + 1) for l in (i, -i)]
    for _ in range(radius):
        nxt = []
        for w in layer:
            for l in letters:
                if w and w[-1] == -l:
                    continue
                nxt.append(w + (l,))
        out.extend(nxt)
        layer = nxt
    return tuple(sorted(out, key=word_key))


def _norm_word(w, rank: int) -> Word:
    if isinstance(w, str):
        return parse_word(w, rank).data
    if isinstance(w, GroupElement):
        return w.data
    return reduce_letters(tuple(w))


class BallCone:
    """Sign table on the radius-r ball of F_n.

    The table maps every reduced word of length 1..r to +1 (in C, inverse
    out), 0 (kernel: both in C), or -1; the identity is kernel and the sign
    of w^-1 is forced by the sign of w.  Queries outside the ball answer
    OUT_OF_SCOPE — truncation is explicit, never silent.
    """

    def __init__(self, rank: int, radius: int, table, group: PoGroup | None = None):
        if rank < 1:
            raise ConeError("rank must be positive")
        if radius < 1:
            raise ConeError("radius must be >= 1")
        self.rank = rank
        self.radius = radius
        if group is None:
            group = PoGroup(FWORD, rank)
        if group.kind != FWORD or group.rank != rank:
            raise ConeError("BallCone needs an fword group of matching rank")
        self.group = group

        signs: dict[Word, int] = {(): 0}
        for key, val in table.items():
            w = _norm_word(key, rank)
            if len(w) > radius:
                raise ConeError(f"table word longer than radius {radius}")
            s = _SIGN_NAMES[val] if isinstance(val, str) else int(val)
            if s not in (-1, 0, 1):
                raise ConeError(f"bad sign {val!r}")
            for word, sign in ((w, s), (invert_letters(w), -s)):
                if word in signs and signs[word] != sign:
                    raise ConeError(f"inconsistent signs for {word} and its inverse")
                signs[word] = sign
        for w in ball_words(rank, radius):
            if w not in signs:
                raise ConeError(f"table is not total: missing word {w}")
        self._signs = signs
        self.words = ball_words(rank, radius)

    def sign_of(self, word: Word) -> int | None:
        return self._signs.get(tuple(word))

    def contains(self, a: GroupElement) -> Sign:
        self.group.check_element(a)
        s = self._signs.get(a.data)
        if s is None:
            return Sign.OUT_OF_SCOPE
        return _SIGN_FROM_INT[s]

    def cmp(self, a: GroupElement, b: GroupElement) -> CmpResult:
        diff = self.group.mul(b, self.group.inv(a))
        return _CMP_FROM_SIGN[self.contains(diff)]

    def restricted(self, radius: int) -> "BallCone":
        if radius > self.radius:
            raise ConeError("cannot grow a ball cone")
        table = {w: s for w, s in self._signs.items() if 0 < len(w) <= radius}
        return BallCone(self.rank, radius, table, self.group)

    def __eq__(self, other):
        return (
            isinstance(other, BallCone)
            and self.rank == other.rank
            and self.radius == other.radius
            and self._signs == other._signs
        )

    def __hash__(self):
        return hash((self.rank, self.radius, tuple(sorted(self._signs.items()))))

    def __repr__(self):
        return f"BallCone(rank={self.rank}, radius={self.radius})"

    def to_json(self):
        table = {}
        for w in self.words:
            table[format_word(GroupElement(FWORD, w))] = _SIGN_LABELS[self._signs[w]]
        return {"type": "ball", "rank": self.rank, "radius": self.radius, "table": table}

    @classmethod
    def from_json(cls, obj) -> "BallCone":
        return cls(obj["rank"], obj["radius"], obj["table"])


def cone_from_json(obj):
    if obj.get("type") == "lexflag":
        return LexFlagCone.from_json(obj)
    if obj.get("type") == "ball":
        return BallCone.from_json(obj)
    raise ConeError(f"unknown cone type {obj.get('type')!r}")


def ball_cone_from_zvec_cone(zcone: LexFlagCone, radius: int) -> BallCone:
    """Pull a Z^n cone back along abelianization to a ball cone on F_n.

    Always a valid sign table: preimages of submonoids under homomorphisms
    are submonoids.
    """
    rank = zcone.rank
    table = {}
    sign_int = {Sign.POSITIVE: 1, Sign.KERNEL: 0, Sign.NEGATIVE: -1}
    for w in ball_words(rank, radius):
        sums = [0] * rank
        for l in w:
            sums[abs(l) - 1] += 1 if l > 0 else -1
        table[w] = sign_int[zcone.contains(zvec_element(sums))]
    return BallCone(rank, radius, table)


# ---------------------------------------------------------------------------
# Axioms
# ---------------------------------------------------------------------------


def _ball_triples(rank: int, radius: int):
    """All (u, v, uv) with u, v, uv classified words and uv != e."""
    words = ball_words(rank, radius)
    triples = []
    for u in words:
        for v in words:
            p = reduce_letters(u + v)
            if p and len(p) <= radius:
                triples.append((u, v, p))
    return triples


def _fmt(word: Word) -> str:
    return format_word(GroupElement(FWORD, word))


def check_axioms(cone, seed: int = 0, samples: int = 60) -> Report:
    """Verify the pre-cone axioms, exactly where possible.

    LexFlag: submonoid/totality hold by the representation (spot-checked on
    a seeded sample); properness and G+ containment are decided exactly.
    BallCone: everything is checked exhaustively within the ball.
    """
    import random

    report = Report("pre-cone axioms")
    if isinstance(cone, LexFlagCone):
        report.scope = "exact on Z^%d" % cone.rank
        report.add(
            "properness",
            cone.is_proper,
            note="" if cone.is_proper else "every flag row pruned: C = G",
        )
        rng = random.Random(seed)
        ok, witness = True, None
        for _ in range(samples):
            a = zvec_element([rng.randint(-5, 5) for _ in range(cone.rank)])
            b = zvec_element([rng.randint(-5, 5) for _ in range(cone.rank)])
            if cone.contains(a) != Sign.NEGATIVE and cone.contains(b) != Sign.NEGATIVE:
                if cone.contains(cone.group.mul(a, b)) == Sign.NEGATIVE:
                    ok, witness = False, [list(a.data), list(b.data)]
                    break
        report.add("submonoid", ok, witness, note="linear representation; sampled")
        ok, witness = True, None
        for _ in range(samples):
            a = zvec_element([rng.randint(-5, 5) for _ in range(cone.rank)])
            sa, si = cone.contains(a), cone.contains(cone.group.inv(a))
            pair_ok = {
                Sign.POSITIVE: si == Sign.NEGATIVE,
                Sign.NEGATIVE: si == Sign.POSITIVE,
                Sign.KERNEL: si == Sign.KERNEL,
            }[sa]
            if not pair_ok:
                ok, witness = False, list(a.data)
                break
        report.add("totality", ok, witness, note="C u C^-1 = G; sampled")
        gens = cone.group.positive_cone_generators()
        bad = [g for g in gens if cone.contains(g) == Sign.NEGATIVE]
        report.add(
            "positive-cone",
            not bad,
            [list(g.data) for g in bad] or None,
            note="trivial order: nothing to contain" if not gens else "checked on monoid generators of G+",
        )
        report.add(
            "degenerate-rows",
            True,
            note=f"{cone.pruned_rows} dependent or zero rows pruned at construction",
        )
        return report

    if not isinstance(cone, BallCone):
        raise ConeError("unknown cone representation")
    report.scope = f"ball of radius {cone.radius} in F_{cone.rank}"
    report.add("identity-kernel", cone.sign_of(()) == 0)
    ok, witness = True, None
    for w in cone.words:
        if cone.sign_of(w) != -cone.sign_of(invert_letters(w)):
            ok, witness = False, _fmt(w)
            break
    report.add("inverse-consistency", ok, witness)
    report.add("totality", all(cone.sign_of(w) is not None for w in cone.words))
    gen_signs = [cone.sign_of((i,)) for i in range(1, cone.rank + 1)]
    report.add(
        "properness",
        any(s != 0 for s in gen_signs),
        note="" if any(s != 0 for s in gen_signs) else "kernel contains every generator, so C = G",
    )
    ok, witness = True, None
    for u, v, p in _ball_triples(cone.rank, cone.radius):
        if cone.sign_of(u) >= 0 and cone.sign_of(v) >= 0 and cone.sign_of(p) < 0:
            ok, witness = False, [_fmt(u), _fmt(v)]
            break
    report.add("submonoid", ok, witness)
    report.add("positive-cone", True, note="trivial order on F_n")
    return report


# ---------------------------------------------------------------------------
# Predicates: normal / representable / abelian
# ---------------------------------------------------------------------------


@dataclass
class PredicateResult:
    name: str
    holds: bool
    scope: str
    witness: object = None

    def to_json(self):
        out = {"name": self.name, "holds": self.holds, "scope": self.scope}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _conjugation_pairs(cone: BallCone):
    """(a, t) with t^-1 a t guaranteed inside the ball: 2|t| + |a| <= r."""
    r = cone.radius
    for a in cone.words:
        for t in ball_words(cone.rank, (r - len(a)) // 2, include_identity=True):
            yield a, t


def normality_report(cone) -> PredicateResult:
    """Closure of C under conjugation, i.e. conjugation-invariant signs."""
    if isinstance(cone, LexFlagCone):
        return PredicateResult("normal", True, "exact: conjugation is trivial on Z^n")
    scope = f"pairs with 2|t|+|a| <= {cone.radius}"
    for a, t in _conjugation_pairs(cone):
        conj = reduce_letters(invert_letters(t) + a + t)
        if cone.sign_of(conj) != cone.sign_of(a):
            return PredicateResult(
                "normal", False, scope, {"a": _fmt(a), "t": _fmt(t), "conjugate": _fmt(conj)}
            )
    return PredicateResult("normal", True, scope)


def representable_report(cone) -> PredicateResult:
    """Uniform conjugate signs: conjugates of a never land strictly on both sides."""
    if isinstance(cone, LexFlagCone):
        return PredicateResult("representable", True, "exact: conjugates equal the element")
    scope = f"conjugates b a b^-1 with 2|b|+|a| <= {cone.radius}"
    for a in cone.words:
        pos_t = neg_t = None
        for b in ball_words(cone.rank, (cone.radius - len(a)) // 2, include_identity=True):
            s = cone.sign_of(reduce_letters(b + a + invert_letters(b)))
            if s > 0:
                pos_t = b
            elif s < 0:
                neg_t = b
            if pos_t is not None and neg_t is not None:
                return PredicateResult(
                    "representable",
                    False,
                    scope,
                    {"a": _fmt(a), "b_positive": _fmt(pos_t), "b_negative": _fmt(neg_t)},
                )
    return PredicateResult("representable", True, scope)


def abelian_report(cone) -> PredicateResult:
    """Every commutator visible in the ball lies in the kernel."""
    if isinstance(cone, LexFlagCone):
        return PredicateResult("abelian", True, "exact: commutators vanish on Z^n")
    scope = f"commutators a^-1 b^-1 a b of reduced length <= {cone.radius}"
    for a in cone.words:
        for b in cone.words:
            c = reduce_letters(invert_letters(a) + invert_letters(b) + a + b)
            if not c or len(c) > cone.radius:
                continue
            if cone.sign_of(c) != 0:
                return PredicateResult(
                    "abelian", False, scope,
                    {"a": _fmt(a), "b": _fmt(b), "commutator": _fmt(c)},
                )
    return PredicateResult("abelian", True, scope)


def is_normal(cone) -> bool:
    return normality_report(cone).holds


def is_representable_cone(cone) -> bool:
    return representable_report(cone).holds


def is_abelian_cone(cone) -> bool:
    return abelian_report(cone).holds


# ---------------------------------------------------------------------------
# Interior operator: largest normal sub-cone
# ---------------------------------------------------------------------------


@dataclass
class NormalInteriorResult:
    """Outcome of intersecting all conjugates of a cone within a budget.

    ``cone`` is None when some word falls out on both sides (possible for
    non-representable cones at finite scope); such words are listed in
    ``dropped`` and no sign is invented for them.
    """

    source: object
    budget: int
    cone: object | None
    dropped: tuple = ()
    radius: int | None = None

    @property
    def is_precone(self) -> bool:
        return self.cone is not None

    def to_json(self):
        out = {
            "budget": self.budget,
            "is_precone": self.is_precone,
            "dropped": [_fmt(w) for w in self.dropped],
        }
        if self.radius is not None:
            out["radius"] = self.radius
        if self.cone is not None:
            out["cone"] = self.cone.to_json()
        return out


def normal_interior(cone, budget: int = 1) -> NormalInteriorResult:
    """Intersect the conjugates t^-1 C t over |t| <= budget.

    On Z^n this is the identity.  On a ball cone the scope shrinks by twice
    the budget, so every needed conjugate stays classified.
    """
    if budget < 0:
        raise ConeError("budget must be >= 0")
    if isinstance(cone, LexFlagCone):
        return NormalInteriorResult(cone, budget, cone)
    if not isinstance(cone, BallCone):
        raise ConeError("unknown cone representation")
    new_radius = cone.radius - 2 * budget
    if new_radius < 1:
        raise ConeError(
            f"radius {cone.radius} cannot absorb conjugator budget {budget}: "
            f"resulting scope {new_radius} is empty"
        )
    conjugators = ball_words(cone.rank, budget, include_identity=True)

    def member(w: Word) -> bool:
        return all(
            cone.sign_of(reduce_letters(t + w + invert_letters(t))) >= 0
            for t in conjugators
        )

    table: dict[Word, int] = {}
    dropped: list[Word] = []
    for w in ball_words(cone.rank, new_radius):
        m, mi = member(w), member(invert_letters(w))
        if m and mi:
            table[w] = 0
        elif m:
            table[w] = 1
        elif mi:
            table[w] = -1
        else:
            dropped.append(w)
    if dropped:
        return NormalInteriorResult(cone, budget, None, tuple(dropped), new_radius)
    return NormalInteriorResult(
        cone, budget, BallCone(cone.rank, new_radius, table, cone.group), (), new_radius
    )


# ---------------------------------------------------------------------------
# Refinement to a right order
# ---------------------------------------------------------------------------


def refine_to_order(cone: LexFlagCone, order: LexFlagCone) -> LexFlagCone:
    """Break kernel ties of ``cone`` with a full right order ``order``.

    The result compares by the cone first and, on its kernel, by the order;
    its positive set is contained in the cone.
    """
    if not isinstance(cone, LexFlagCone) or not isinstance(order, LexFlagCone):
        raise ConeError("refinement is defined for lexicographic flag cones")
    if cone.rank != order.rank:
        raise ConeError("rank mismatch")
    if not cone.is_proper:
        raise ConeError("cannot refine an improper cone")
    if not order.is_right_order:
        raise ConeError("tie-breaker must be a right order (full-rank flag)")
    result = LexFlagCone(cone.rank, cone.flag + order.flag, cone.group)
    assert result.is_right_order
    return result


# ---------------------------------------------------------------------------
# Inclusion of cones
# ---------------------------------------------------------------------------


def cone_leq(c, d) -> bool:
    """Set inclusion C subseteq D, exact per representation family."""
    if isinstance(c, LexFlagCone) and isinstance(d, LexFlagCone):
        if c.rank != d.rank:
            raise ConeError("rank mismatch")
        # coarsenings of a lex pre-order are exactly its flag truncations,
        # and canonical forms make the prefix test literal
        return d.flag == c.flag[: len(d.flag)]
    if isinstance(c, BallCone) and isinstance(d, BallCone):
        if c.rank != d.rank:
            raise ConeError("rank mismatch")
        common = min(c.radius, d.radius)
        return all(
            d.sign_of(w) >= 0
            for w in ball_words(c.rank, common)
            if c.sign_of(w) >= 0
        )
    raise ConeError("cone representations do not match")


def cone_leq_certificate(c, d, search_radius: int | None = None):
    """(holds, witness): on failure, an explicit element of C outside D.

    For flag cones the witness is found by deterministic integer search over
    a ball of radius max(10, coefficient height).
    """
    holds = cone_leq(c, d)
    if holds:
        return True, None
    if isinstance(c, LexFlagCone):
        if search_radius is None:
            height = max(
                (abs(x) for cone in (c, d) for row in cone.flag for x in row),
                default=1,
            )
            search_radius = max(10, height)
        for shell in range(1, search_radius + 1):
            for vec in itertools.product(range(-shell, shell + 1), repeat=c.rank):
                if max(abs(v) for v in vec) != shell:
                    continue
                a = zvec_element(vec)
                if c.contains(a) != Sign.NEGATIVE and d.contains(a) == Sign.NEGATIVE:
                    return False, a
        return False, None
    common = min(c.radius, d.radius)
    for w in ball_words(c.rank, common):
        if c.sign_of(w) >= 0 and d.sign_of(w) < 0:
            return False, GroupElement(FWORD, w)
    return False, None


# ---------------------------------------------------------------------------
# Exhaustive enumeration of ball cones
# ---------------------------------------------------------------------------

DEFAULT_ENUM_MAX_WORDS = 200


@dataclass
class EnumConstraints:
    """Filters for the ball-cone stream.

    ``signs`` pins exact signs ('pos'/'zero'/'neg'); ``must_contain`` and
    ``must_exclude`` constrain membership in C; the boolean flags post-filter
    by the corresponding predicate reports.
    """

    signs: dict = field(default_factory=dict)
    must_contain: tuple = ()
    must_exclude: tuple = ()
    kernel_free: bool = False
    normal: bool = False
    representable: bool = False
    abelian: bool = False

    @classmethod
    def from_json(cls, obj) -> "EnumConstraints":
        return cls(
            signs=dict(obj.get("signs", {})),
            must_contain=tuple(obj.get("must_contain", ())),
            must_exclude=tuple(obj.get("must_exclude", ())),
            kernel_free=bool(obj.get("kernel_free", False)),
            normal=bool(obj.get("normal", False)),
            representable=bool(obj.get("representable", False)),
            abelian=bool(obj.get("abelian", False)),
        )


def enumerate_ball_cones(
    rank: int,
    radius: int,
    constraints: EnumConstraints | None = None,
    max_words: int = DEFAULT_ENUM_MAX_WORDS,
):
    """Stream every valid sign table on the radius-r ball, deterministically.

    Order: depth-first over inverse-pair orbits sorted by word spelling,
    trying Pos, then Zero, then Neg.  Raises BudgetError up front when the
    ball exceeds ``max_words`` — no partial silent output.
    """
    words = ball_words(rank, radius)
    if len(words) > max_words:
        raise BudgetError(
            f"ball of radius {radius} in F_{rank} has {len(words)} words, "
            f"budget is {max_words}"
        )
    constraints = constraints or EnumConstraints()

    allowed: dict[Word, set] = {w: {1, 0, -1} for w in words}

    def restrict(word_spec, signs):
        w = _norm_word(word_spec, rank)
        if not w:
            raise ConeError("constraints may not mention the identity")
        if len(w) > radius:
            raise ConeError(f"constraint word {word_spec!r} outside the ball")
        allowed[w] &= set(signs)
        allowed[invert_letters(w)] &= {-s for s in signs}

    for word_spec, sign_name in constraints.signs.items():
        restrict(word_spec, {_SIGN_NAMES[sign_name] if isinstance(sign_name, str) else int(sign_name)})
    for word_spec in constraints.must_contain:
        restrict(word_spec, {1, 0})
    for word_spec in constraints.must_exclude:
        restrict(word_spec, {-1})
    if constraints.kernel_free:
        for w in words:
            allowed[w].discard(0)

    reps = sorted({min(w, invert_letters(w), key=word_key) for w in words}, key=word_key)
    triples = _ball_triples(rank, radius)
    touching: dict[Word, list[int]] = {w: [] for w in words}
    for idx, (u, v, p) in enumerate(triples):
        for w in {u, v, p}:
            touching[w].append(idx)

    return _enumerate_dfs(rank, radius, words, reps, allowed, triples, touching, constraints)


def _enumerate_dfs(rank, radius, words, reps, allowed, triples, touching, constraints):
    signs: dict[Word, int] = {(): 0}

    def consistent_around(w: Word) -> bool:
        for idx in touching[w]:
            u, v, p = triples[idx]
            su, sv, sp = signs.get(u), signs.get(v), signs.get(p)
            if su is None or sv is None or sp is None:
                continue
            if su >= 0 and sv >= 0 and sp < 0:
                return False
        return True

    def dfs(i: int):
        if i == len(reps):
            if all(signs[(g,)] == 0 for g in range(1, rank + 1)):
                return  # improper: kernel swallows every generator
            table = {w: signs[w] for w in words}
            cone = BallCone(rank, radius, table)
            if constraints.normal and not normality_report(cone).holds:
                return
            if constraints.representable and not representable_report(cone).holds:
                return
            if constraints.abelian and not abelian_report(cone).holds:
                return
            yield cone
            return
        rep = reps[i]
        inv = invert_letters(rep)
        for s in (1, 0, -1):
            if s not in allowed[rep] or -s not in allowed[inv]:
                continue
            signs[rep] = s
            signs[inv] = -s
            if consistent_around(rep) and (inv == rep or consistent_around(inv)):
                yield from dfs(i + 1)
            del signs[rep]
            if inv != rep:
                del signs[inv]

    yield from dfs(0)


def lexflag_family(rank: int = 2, entry_bound: int = 2, max_rows: int | None = None):
    """All proper LexFlagCones with flag entries in [-bound, bound], deduplicated.

    Canonicalization collapses equivalent flags, so the family is finite and
    its enumeration order is deterministic.
    """
    if max_rows is None:
        max_rows = rank
    entries = range(-entry_bound, entry_bound + 1)
    vectors = [v for v in itertools.product(entries, repeat=rank)]
    seen = set()
    family = []
    for rows in range(1, max_rows + 1):
        for combo in itertools.product(vectors, repeat=rows):
            flag, _ = canonical_flag([list(map(Fraction, row)) for row in combo], rank)
            if not flag or flag in seen:
                continue
            seen.add(flag)
            family.append(LexFlagCone(rank, flag))
    return family
